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

/// @file faithfulness.h
/// @brief Cumulative feature removal and the diffAUC truthfulness score.
///
/// Each case is ablated at every schedule fraction q by filling its top
/// ceil(q*N) heatmap locations, rescored, and the dataset performance is
/// recorded per q. The random baseline repeats the same cumulative removal
/// with a fresh uniformly random feature order per case and repeat.
/// diffAUC is area(baseline mean) - area(method), both by the trapezoid
/// rule on the schedule knots.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmxeval/error.h"
#include "mmxeval/heatmap_ops.h"
#include "mmxeval/oracle.h"
#include "mmxeval/tensor.h"
#include "mmxeval/types.h"

namespace mmxeval {

struct EvalCase {
  std::string id;
  Tensor volume;
  int label = 0;
};

struct RemovalCurve {
  std::vector<double> fractions;
  /// Method curve, or the mean over repeats for a baseline.
  std::vector<double> performance;
  TaskMetric metric = TaskMetric::kAccuracy;
  /// Baseline only: one curve per repeat.
  std::vector<std::vector<double>> repeats;
  /// Baseline only: 95% normal-approximation band of the mean.
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;

  bool is_baseline() const { return !repeats.empty(); }
};

struct RemovalSettings {
  RemovalSchedule schedule = RemovalSchedule::standard();
  TaskMetric metric = TaskMetric::kAccuracy;
  FillStrategy fill = FillStrategy::kZero;
};

/// Raised when the oracle fails part-way; carries the schedule points that
/// were completed before the failure.
class PartialCurveError : public OracleError {
 public:
  PartialCurveError(const std::string& what, RemovalCurve partial)
      : OracleError(what), partial_(std::move(partial)) {}
  const RemovalCurve& partial() const { return partial_; }

 private:
  RemovalCurve partial_;
};

/// Performance after cumulative removal guided by `heatmaps` (one per case,
/// post-processed, same shape as the case volume).
RemovalCurve removal_curve(Oracle& oracle, std::span<const EvalCase> cases,
                           std::span<const Tensor> heatmaps, const RemovalSettings& settings);

/// Random-order removal repeated `repeats` times (>= 2).
RemovalCurve random_baseline(Oracle& oracle, std::span<const EvalCase> cases,
                             const RemovalSettings& settings, std::size_t repeats,
                             std::uint64_t seed);

double trapezoid_area(std::span<const double> x, std::span<const double> y);

/// area(baseline.performance) - area(method.performance). Throws DataError on
/// a schedule or metric mismatch.
double diff_auc(const RemovalCurve& method, const RemovalCurve& baseline);

}  // namespace mmxeval
