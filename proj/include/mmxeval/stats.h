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

/// @file stats.h
/// @brief Correlation, rank tests and inter-rater agreement.
///
/// All functions are pure. Statistics that are undefined for the given input
/// (constant vectors, no chance disagreement) come back as std::nullopt;
/// inputs that violate a precondition throw DataError.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmxeval {

/// Sample Pearson correlation. Empty when either input is constant.
std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b with tie correction. Empty when either input is all-tied.
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct MannWhitneyResult {
  double u = 0.0;  ///< U of the first sample: #(a > b) + 0.5 #(a == b)
  double p = 1.0;  ///< two-sided
  bool exact = false;
};

/// Exact enumeration is used when the combined sample has at most this many
/// values and no ties.
inline constexpr std::size_t kMannWhitneyExactLimit = 12;

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

enum class StarLevel { kNotSignificant, kOne, kTwo, kThree };

/// Thresholds 0.05, 0.01 and 0.001.
StarLevel star_level(double p);
/// "NS", "★", "★★" or "★★★".
std::string to_string(StarLevel level);

struct InformativenessResult {
  std::optional<double> pearson_r;           ///< MSFI vs predicted-class probability
  std::optional<MannWhitneyResult> u_test;   ///< MSFI | correct vs MSFI | incorrect
  std::optional<StarLevel> stars;
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
};

InformativenessResult informativeness_test(std::span<const double> msfi,
                                           const std::vector<bool>& correct,
                                           std::span<const double> prob);

/// items x raters; std::nullopt marks a missing rating.
using RatingMatrix = std::vector<std::vector<std::optional<double>>>;

enum class AlphaLevel { kNominal, kOrdinal, kInterval };

AlphaLevel parse_alpha_level(const std::string& name);
std::string to_string(AlphaLevel level);

/// Krippendorff's alpha from the coincidence matrix. Throws UndefinedError
/// when fewer than two pairable values exist or the data show no variation.
double krippendorff_alpha(const RatingMatrix& ratings, AlphaLevel level = AlphaLevel::kOrdinal);

/// items x categories matrix of rating counts; every row must sum to the same
/// rater count (>= 2). Empty when chance agreement is 1.
std::optional<double> fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts);

/// Counts per category for complete ratings. `categories` lists the scale.
std::vector<std::vector<std::size_t>> category_counts(const RatingMatrix& ratings,
                                                       std::span<const double> categories);

}  // namespace mmxeval
