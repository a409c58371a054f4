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

#include "mmxeval/shape_stats.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "mmxeval/error.h"

namespace mmxeval {

ShapeStats shape_stats(std::span<const std::uint8_t> pixels, std::size_t height,
                       std::size_t width) {
  if (pixels.size() != height * width) throw DataError("shape_stats: size mismatch");
  auto at = [&](std::ptrdiff_t r, std::ptrdiff_t c) -> int {
    if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(height) ||
        c >= static_cast<std::ptrdiff_t>(width)) {
      return 0;
    }
    return pixels[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c)] ? 1 : 0;
  };

  ShapeStats s;
  for (std::uint8_t p : pixels) s.area += p ? 1.0 : 0.0;
  if (s.area == 0.0) return s;

  // Marching squares over every 2x2 cell, including the one-pixel border.
  constexpr double kHalfDiagonal = std::numbers::sqrt2 / 2.0;
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  for (std::ptrdiff_t r = -1; r < h; ++r) {
    for (std::ptrdiff_t c = -1; c < w; ++c) {
      const int code = at(r, c) | at(r, c + 1) << 1 | at(r + 1, c + 1) << 2 | at(r + 1, c) << 3;
      switch (code) {
        case 0:
        case 15:
          break;
        case 3:
        case 6:
        case 9:
        case 12:
          s.perimeter += 1.0;
          break;
        case 5:
        case 10:
          s.perimeter += 2.0 * kHalfDiagonal;
          break;
        default:
          s.perimeter += kHalfDiagonal;
          break;
      }
    }
  }
  s.compactness = 4.0 * std::numbers::pi * s.area / (s.perimeter * s.perimeter);
  return s;
}

ShapeStats shape_stats_above(std::span<const float> slab, std::size_t height,
                             std::size_t width, float threshold) {
  std::vector<std::uint8_t> pixels(slab.size());
  for (std::size_t i = 0; i < slab.size(); ++i) pixels[i] = slab[i] > threshold ? 1 : 0;
  return shape_stats(pixels, height, width);
}

double ShapeRule::irregular_probability(const ShapeStats& stats) const {
  if (stats.area == 0.0) return 0.5;
  return 1.0 / (1.0 + std::exp(steepness * (stats.compactness - compactness_threshold)));
}

}  // namespace mmxeval
