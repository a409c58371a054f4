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

#include "mmxeval/ablation.h"

#include <algorithm>

#include "mmxeval/error.h"

namespace mmxeval {

ModalitySubset ModalitySubset::from_bits(std::uint32_t bits, std::size_t modality_count) {
  ModalitySubset s;
  for (std::size_t m = 0; m < modality_count; ++m) {
    if (bits & (1u << m)) s.keep.push_back(m);
  }
  return s;
}

std::vector<float> fill_values(const Tensor& volume, FillStrategy fill) {
  std::vector<float> values(volume.modality_count(), 0.0f);
  if (fill == FillStrategy::kModalityMean) {
    for (std::size_t m = 0; m < values.size(); ++m) {
      double sum = 0.0;
      const auto slab = volume.modality(m);
      for (float v : slab) sum += v;
      values[m] = slab.empty() ? 0.0f : static_cast<float>(sum / static_cast<double>(slab.size()));
    }
  }
  return values;
}

Tensor ablate(const Tensor& volume, const AblationSpec& spec) {
  const std::vector<float> fill = fill_values(volume, spec.fill);
  Tensor out = volume;
  const std::size_t stride = volume.modality_stride();
  if (const auto* removal = std::get_if<FeatureRemoval>(&spec.kind)) {
    if (removal->mask.size() != volume.size()) {
      throw DataError("ablate: shape mismatch between mask (" +
                      std::to_string(removal->mask.size()) + " elements) and volume " +
                      shape_to_string(volume.shape()));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (removal->mask[i]) out[i] = fill[i / stride];
    }
    return out;
  }
  const auto& subset = std::get<ModalitySubset>(spec.kind);
  std::vector<bool> keep(volume.modality_count(), false);
  for (std::size_t m : subset.keep) {
    if (m >= keep.size()) throw DataError("ablate: modality index out of range");
    keep[m] = true;
  }
  for (std::size_t m = 0; m < keep.size(); ++m) {
    if (!keep[m]) {
      auto slab = out.modality(m);
      std::fill(slab.begin(), slab.end(), fill[m]);
    }
  }
  return out;
}

}  // namespace mmxeval
