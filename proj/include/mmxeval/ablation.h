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
#include <variant>
#include <vector>

#include "mmxeval/heatmap_ops.h"
#include "mmxeval/tensor.h"
#include "mmxeval/types.h"

namespace mmxeval {

/// Replace every masked location.
struct FeatureRemoval {
  FeatureMask mask;
};

/// Keep the listed modalities; replace every other modality entirely.
/// An empty list replaces everything.
struct ModalitySubset {
  std::vector<std::size_t> keep;

  /// Subset whose members are the set bits of `bits` (bit m = modality m).
  static ModalitySubset from_bits(std::uint32_t bits, std::size_t modality_count);
};

struct AblationSpec {
  std::variant<FeatureRemoval, ModalitySubset> kind;
  FillStrategy fill = FillStrategy::kZero;
};

/// Per-modality replacement values for `volume` under `fill`.
std::vector<float> fill_values(const Tensor& volume, FillStrategy fill);

/// Returns a copy of `volume` with the locations selected by `spec`
/// replaced; all other locations are bit-identical to the input.
Tensor ablate(const Tensor& volume, const AblationSpec& spec);

}  // namespace mmxeval
