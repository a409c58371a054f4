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

/// @file plausibility.h
/// @brief Agreement of heatmap mass with annotated feature regions.
///
/// Feature portion (FP) is the share of total heatmap mass S that falls
/// inside the annotation L:
///
///     FP = sum_i [L^i > 0] S^i / sum_i S^i
///
/// Modality-specific feature importance (MSFI) applies the same ratio per
/// modality and weights it by the normalized modality importance phi:
///
///     MSFI = sum_m phi_m * (sum_i [L_m^i > 0] S_m^i / sum_i S_m^i) / sum_m phi_m
///
/// A modality with no heatmap mass contributes 0 to the numerator while its
/// phi_m stays in the denominator. Heatmaps are expected post-processed
/// (nonnegative). Mass missing from inside the mask is never penalized.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mmxeval/tensor.h"

namespace mmxeval {

/// Empty when the heatmap has no mass.
std::optional<double> feature_portion(const Tensor& heatmap, const Tensor& mask);

/// Clips negatives to 0 and rescales so the maximum is 1. Throws
/// UndefinedError when no entry is positive.
std::vector<double> normalize_mi(std::span<const double> phi);

/// `phi_normalized` must come from normalize_mi (entries in [0, 1], at least
/// one positive).
double msfi(const Tensor& heatmap, const Tensor& mask, std::span<const double> phi_normalized);

}  // namespace mmxeval
