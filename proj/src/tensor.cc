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

#include "mmxeval/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "mmxeval/error.h"

namespace mmxeval {

std::size_t shape_volume(const Shape& shape) {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape, float fill)
    : shape_(std::move(shape)), values_(shape_volume(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<float> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_volume(shape_)) {
    throw DataError("tensor of shape " + shape_to_string(shape_) + " needs " +
                    std::to_string(shape_volume(shape_)) + " values, got " +
                    std::to_string(values_.size()));
  }
}

std::size_t Tensor::modality_stride() const {
  const std::size_t m = modality_count();
  return m == 0 ? 0 : values_.size() / m;
}

std::span<const float> Tensor::modality(std::size_t m) const {
  const std::size_t stride = modality_stride();
  return std::span<const float>(values_).subspan(m * stride, stride);
}

std::span<float> Tensor::modality(std::size_t m) {
  const std::size_t stride = modality_stride();
  return std::span<float>(values_).subspan(m * stride, stride);
}

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](float v) { return std::isfinite(v); });
}

void require_same_shape(const Tensor& a, const Tensor& b, const std::string& what) {
  if (a.shape() != b.shape()) {
    throw DataError(what + ": shape mismatch " + shape_to_string(a.shape()) +
                    " vs " + shape_to_string(b.shape()));
  }
}

}  // namespace mmxeval
