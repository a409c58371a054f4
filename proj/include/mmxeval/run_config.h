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


/// @file run_config.h
/// @brief Evaluation run configuration (JSON file plus CLI overrides).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmxeval/heatmap_ops.h"
#include "mmxeval/protocol_oracle.h"
#include "mmxeval/stats.h"
#include "mmxeval/types.h"

namespace mmxeval {

enum class OracleKind { kGated, kLinear, kConstant, kSubprocess, kTcp };

struct OracleSpec {
  OracleKind kind = OracleKind::kGated;
  /// kGated: the modality the classifier looks at.
  std::string modality = "T1C";
  /// kLinear: weight container and bias.
  std::filesystem::path weights;
  double bias = 0.0;
  /// kConstant: the fixed distribution.
  std::vector<double> probs;
  /// kSubprocess / kTcp.
  OracleEndpoint endpoint;

  std::string describe() const;
};

/// Parses the compact CLI form:
///   builtin:gated[:MODALITY]
///   builtin:linear:WEIGHTS.mmxt[:BIAS]
///   builtin:constant:P0,P1,...
///   stdio:COMMAND [ARGS...]
///   tcp:HOST:PORT
OracleSpec parse_oracle_spec(std::string_view text);

struct MetricToggles {
  bool faithfulness = true;
  bool shapley = true;
  bool plausibility = true;
  bool informativeness = true;
  bool agreement = true;

  bool any() const { return faithfulness || shapley || plausibility || informativeness || agreement; }
};

/// Where the ground-truth modality importance comes from.
enum class PhiSource { kShapley, kConfig, kProbe };

std::string to_string(PhiSource source);
PhiSource parse_phi_source(std::string_view text);

struct RunConfig {
  std::filesystem::path manifest;
  std::vector<OracleSpec> oracles;
  /// Empty selects every heatmap set in the manifest.
  std::vector<std::string> methods;
  MetricToggles metrics;
  RemovalSchedule schedule = RemovalSchedule::standard();
  PostprocessMode postprocess = PostprocessMode::kPositiveClip;
  FillStrategy fill = FillStrategy::kZero;
  std::optional<std::uint64_t> seed;
  std::size_t repeats = 15;
  PhiSource phi_source = PhiSource::kShapley;
  std::vector<double> phi;
  std::filesystem::path probe_tic;
  std::filesystem::path probe_flair;
  /// Probe accuracies at or below this count as uninformative.
  std::optional<double> chance_threshold = 0.5;
  AlphaLevel agreement_level = AlphaLevel::kOrdinal;
  bool timing = true;
  std::filesystem::path output_dir = "mmxeval-out";
  std::optional<std::filesystem::path> cache_spill;

  /// Throws ConfigError.
  void validate() const;
  /// True when any enabled metric has to query a model.
  bool needs_oracle() const;
  bool needs_phi() const;
};

/// Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical JSON of everything that influences results (not the output
/// directory).
std::string canonical_config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace mmxeval
