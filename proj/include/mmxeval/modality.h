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

/// @file modality.h
/// @brief Ground-truth modality importance and its agreement with heatmaps.
///
/// The value of a modality subset c is the dataset performance when only the
/// modalities in c are kept and the rest are filled. Each modality's
/// importance is its exact Shapley value over all 2^M subsets:
///
///     phi_m = sum over c not containing m of
///             |c|! (M - |c| - 1)! / M! * (v(c + {m}) - v(c))

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mmxeval/faithfulness.h"
#include "mmxeval/oracle.h"
#include "mmxeval/types.h"

namespace mmxeval {

inline constexpr std::size_t kMaxShapleyModalities = 16;

/// v(c) for every subset c, indexed by bitmask (bit m set = modality m kept).
class SubsetTable {
 public:
  explicit SubsetTable(std::size_t modality_count);
  SubsetTable(std::size_t modality_count, std::vector<double> values);

  std::size_t modality_count() const { return modality_count_; }
  std::size_t size() const { return values_.size(); }
  std::uint32_t full_set() const { return static_cast<std::uint32_t>(values_.size() - 1); }

  void set(std::uint32_t subset, double value);
  bool has(std::uint32_t subset) const { return values_.at(subset).has_value(); }
  /// Throws DataError("incomplete table ...") for an unset entry.
  double at(std::uint32_t subset) const;
  bool complete() const;

 private:
  std::size_t modality_count_;
  std::vector<std::optional<double>> values_;
};

struct ModalityImportance {
  std::vector<double> phi;
  SubsetTable v_table{1};
  TaskMetric metric = TaskMetric::kAccuracy;
};

/// v(c): performance with only the modalities in `subset` kept.
double subset_performance(Oracle& oracle, std::span<const EvalCase> cases, std::uint32_t subset,
                          TaskMetric metric, FillStrategy fill);

SubsetTable compute_subset_table(Oracle& oracle, std::span<const EvalCase> cases,
                                 TaskMetric metric, FillStrategy fill);

/// Exact Shapley values from a complete table.
std::vector<double> modality_shapley(const SubsetTable& table);

ModalityImportance modality_importance(Oracle& oracle, std::span<const EvalCase> cases,
                                       TaskMetric metric, FillStrategy fill);

/// Kendall tau-b between `phi` and the heatmap's per-modality positive sums.
/// Empty when either vector is constant (a heatmap that is not
/// modality-specific).
std::optional<double> mi_correlation(const Tensor& heatmap, std::span<const double> phi);

}  // namespace mmxeval
