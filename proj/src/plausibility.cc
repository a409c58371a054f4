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

#include "mmxeval/plausibility.h"

#include <algorithm>
#include <cmath>

#include "mmxeval/error.h"

namespace mmxeval {
namespace {

struct MassSplit {
  double inside = 0.0;
  double total = 0.0;
};

MassSplit split_mass(std::span<const float> heatmap, std::span<const float> mask) {
  MassSplit s;
  for (std::size_t i = 0; i < heatmap.size(); ++i) {
    s.total += heatmap[i];
    if (mask[i] > 0.0f) s.inside += heatmap[i];
  }
  return s;
}

void check_inputs(const Tensor& heatmap, const Tensor& mask, const char* what) {
  require_same_shape(heatmap, mask, what);
  for (float v : heatmap.values()) {
    if (!(v >= 0.0f) || !std::isfinite(v)) {
      throw DataError(std::string(what) + ": heatmap must be post-processed (finite, >= 0)");
    }
  }
}

}  // namespace

std::optional<double> feature_portion(const Tensor& heatmap, const Tensor& mask) {
  check_inputs(heatmap, mask, "feature_portion");
  const MassSplit s = split_mass(heatmap.values(), mask.values());
  if (s.total <= 0.0) return std::nullopt;
  return std::clamp(s.inside / s.total, 0.0, 1.0);
}

std::vector<double> normalize_mi(std::span<const double> phi) {
  std::vector<double> out(phi.begin(), phi.end());
  double peak = 0.0;
  for (double& v : out) {
    if (!std::isfinite(v)) throw DataError("normalize_mi: non-finite modality importance");
    v = std::max(v, 0.0);
    peak = std::max(peak, v);
  }
  if (peak <= 0.0) throw UndefinedError("MSFI undefined: no positively important modality");
  for (double& v : out) v /= peak;
  return out;
}

double msfi(const Tensor& heatmap, const Tensor& mask, std::span<const double> phi_normalized) {
  check_inputs(heatmap, mask, "msfi");
  if (phi_normalized.size() != heatmap.modality_count()) {
    throw DataError("msfi: phi has " + std::to_string(phi_normalized.size()) +
                    " entries for " + std::to_string(heatmap.modality_count()) + " modalities");
  }
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (std::size_t m = 0; m < phi_normalized.size(); ++m) {
    const double w = phi_normalized[m];
    if (!(w >= 0.0 && w <= 1.0)) throw DataError("msfi: phi must be normalized to [0, 1]");
    weight_sum += w;
    if (w == 0.0) continue;
    const MassSplit s = split_mass(heatmap.modality(m), mask.modality(m));
    if (s.total > 0.0) weighted += w * (s.inside / s.total);
  }
  if (weight_sum <= 0.0) throw UndefinedError("MSFI undefined: no positively important modality");
  return std::clamp(weighted / weight_sum, 0.0, 1.0);
}

}  // namespace mmxeval
