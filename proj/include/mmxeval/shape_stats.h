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

namespace mmxeval {

struct ShapeStats {
  double area = 0.0;
  double perimeter = 0.0;
  /// 4*pi*area / perimeter^2; close to 1 for a disc, smaller for ragged
  /// outlines. Zero for an empty shape.
  double compactness = 0.0;
};

/// Area is the pixel count; perimeter is the length of the marching-squares
/// iso-contour of the binary image (pixels outside the image count as 0).
ShapeStats shape_stats(std::span<const std::uint8_t> pixels, std::size_t height,
                       std::size_t width);

/// Shape statistics of the pixels of `slab` (H x W, row-major) brighter than
/// `threshold`.
ShapeStats shape_stats_above(std::span<const float> slab, std::size_t height,
                             std::size_t width, float threshold);

/// Decision rule shared by the synthetic generator's checks and the gated
/// glass-box oracle.
struct ShapeRule {
  /// Lesion pixels are strictly brighter than this; synthetic backgrounds
  /// stay below it.
  float intensity_threshold = 0.75f;
  /// Compactness above this reads as round (class 0).
  double compactness_threshold = 0.8;
  /// Slope of the logistic link from compactness to P(irregular).
  double steepness = 40.0;

  /// P(class 1 = irregular) for a shape.
  double irregular_probability(const ShapeStats& stats) const;
};

}  // namespace mmxeval
