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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmxeval/tensor.h"
#include "mmxeval/types.h"

namespace mmxeval {

/// One byte per element; nonzero marks a selected location.
using FeatureMask = std::vector<std::uint8_t>;

/// Clips (or takes the magnitude of) a raw attribution map and rescales it
/// by its global maximum so the result lies in [0, 1]. All-zero maps pass
/// through unchanged.
Tensor postprocess(const Tensor& raw, PostprocessMode mode);

/// Cumulative removal fractions: starts at 0, ends at 1, strictly increasing.
class RemovalSchedule {
 public:
  explicit RemovalSchedule(std::vector<double> fractions);

  /// {0, 1/steps, ..., 1}.
  static RemovalSchedule uniform(std::size_t steps);
  /// The 11-point default {0, 0.1, ..., 1}.
  static RemovalSchedule standard() { return uniform(10); }
  /// Comma-separated fractions ("0,0.25,1") or "uniform:N".
  static RemovalSchedule parse(std::string_view text);

  const std::vector<double>& fractions() const { return fractions_; }
  std::size_t size() const { return fractions_.size(); }
  std::string to_string() const;

  friend bool operator==(const RemovalSchedule&, const RemovalSchedule&) = default;

 private:
  std::vector<double> fractions_;
};

/// ceil(q * n), with products within rounding noise of an integer snapped to
/// it (so 0.3 * 10 selects 3, not 4).
std::size_t removal_count(double q, std::size_t n);

/// Flat indices sorted by descending value; equal values keep ascending
/// index order.
std::vector<std::size_t> importance_order(std::span<const float> values);

/// Marks the removal_count(q, N) highest-valued locations of the whole
/// multi-modal array.
FeatureMask topk_mask(const Tensor& heatmap, double q);

/// Mask of the first `k` entries of a precomputed order.
FeatureMask mask_from_order(std::span<const std::size_t> order, std::size_t k,
                            std::size_t total);

/// Per-modality sum of the positive heatmap values (the heatmap's estimated
/// modality importance).
std::vector<double> modality_positive_sum(const Tensor& heatmap);

}  // namespace mmxeval
