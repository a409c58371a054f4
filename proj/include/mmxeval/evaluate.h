// Copyright 2026 The mmxeval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/// @file evaluate.h
/// @brief End-to-end evaluation of heatmap methods against one or more models.
///
/// Stage order: cases are loaded, the random baseline and the ground-truth
/// modality importance are computed once per oracle, then every method runs
/// its heatmaps through faithfulness, MI correlation, plausibility and
/// informativeness. A failure inside one method is recorded on that method
/// and the run continues.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmxeval/faithfulness.h"
#include "mmxeval/manifest.h"
#include "mmxeval/modality.h"
#include "mmxeval/oracle.h"
#include "mmxeval/run_config.h"
#include "mmxeval/stats.h"
#include "mmxeval/timing.h"

namespace mmxeval {

/// mean and sample standard deviation over the defined values. `std` needs
/// at least two of them.
struct Summary {
  std::size_t n = 0;
  std::size_t n_undefined = 0;
  std::optional<double> mean;
  std::optional<double> std;
};

Summary summarize(const std::vector<std::optional<double>>& values);

struct OracleRunResult {
  std::string spec;
  std::string id;
  /// Volumes asked for before and after the score cache.
  std::size_t requested = 0;
  std::size_t forwarded = 0;
  std::optional<RemovalCurve> baseline;
  std::optional<ModalityImportance> importance;
  std::optional<double> probe_accuracy_tic;
  std::optional<double> probe_accuracy_flair;
  std::optional<std::vector<double>> phi;
};

struct MethodResult {
  std::string name;
  /// Empty when the method completed.
  std::string error;

  /// One entry per oracle.
  std::vector<RemovalCurve> curves;
  std::vector<std::optional<double>> diff_auc_per_oracle;
  Summary diff_auc;

  std::vector<std::optional<double>> mi_correlation_per_case;
  Summary mi_correlation;

  std::vector<std::optional<double>> fp_per_case;
  std::vector<std::optional<double>> msfi_per_case;
  /// Over cases with a mask only.
  Summary fp;
  Summary msfi;
  std::size_t n_without_mask = 0;
  std::string msfi_note;

  std::optional<InformativenessResult> informativeness;
  std::string informativeness_note;

  /// Heatmap generation time reported in the manifest.
  Summary gen_seconds;
  std::vector<StageTiming> timing;

  bool failed() const { return !error.empty(); }
};

struct AgreementResult {
  std::size_t items = 0;
  std::size_t raters = 0;
  AlphaLevel level = AlphaLevel::kOrdinal;
  std::optional<double> alpha;
  std::optional<double> kappa;
  std::string note;
};

struct EvaluationReport {
  RunConfig config;
  std::string config_hash;
  std::string manifest_hash;

  std::string dataset_name;
  std::vector<std::string> modalities;
  std::vector<std::string> case_ids;
  TaskMetric metric = TaskMetric::kAccuracy;

  std::vector<OracleRunResult> oracles;
  /// Ground-truth modality importance feeding MI correlation and MSFI.
  std::optional<std::vector<double>> phi;
  std::optional<std::vector<double>> phi_normalized;
  std::string phi_note;

  std::vector<MethodResult> methods;
  std::optional<AgreementResult> agreement;
  std::vector<StageTiming> timing;

  /// 0 when every method completed, 3 otherwise.
  int exit_status() const;
};

/// Builds the oracle a spec describes. Built-in oracles take their input
/// shape and modality names from the dataset.
std::unique_ptr<Oracle> make_oracle(const OracleSpec& spec, const DatasetManifest& manifest,
                                    const Shape& input_shape);

/// Loads every case volume; all must share one shape.
std::vector<EvalCase> load_cases(const DatasetManifest& manifest);

/// Throws ConfigError for invalid configurations (before anything runs),
/// DataError for unreadable inputs and OracleError when an oracle cannot be
/// reached or fails outside a method.
EvaluationReport run_evaluation(const RunConfig& config);

}  // namespace mmxeval
