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

#include "mmxeval/heatmap_ops.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mmxeval/error.h"

namespace mmxeval {

Tensor postprocess(const Tensor& raw, PostprocessMode mode) {
  if (!raw.all_finite()) throw DataError("postprocess: heatmap has non-finite values");
  Tensor out = raw;
  auto values = out.values();
  if (mode == PostprocessMode::kPositiveClip) {
    for (float& v : values) v = std::max(v, 0.0f);
  } else {
    for (float& v : values) v = std::fabs(v);
  }
  const float peak = values.empty() ? 0.0f : *std::max_element(values.begin(), values.end());
  if (peak > 0.0f) {
    for (float& v : values) v /= peak;
  }
  return out;
}

RemovalSchedule::RemovalSchedule(std::vector<double> fractions)
    : fractions_(std::move(fractions)) {
  if (fractions_.size() < 2) throw ConfigError("removal schedule needs at least 2 points");
  if (fractions_.front() != 0.0 || fractions_.back() != 1.0) {
    throw ConfigError("removal schedule must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < fractions_.size(); ++i) {
    if (!(fractions_[i] > fractions_[i - 1])) {
      throw ConfigError("removal schedule must be strictly increasing");
    }
  }
}

RemovalSchedule RemovalSchedule::uniform(std::size_t steps) {
  if (steps == 0) throw ConfigError("removal schedule needs at least one step");
  std::vector<double> f(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    f[k] = static_cast<double>(k) / static_cast<double>(steps);
  }
  return RemovalSchedule(std::move(f));
}

RemovalSchedule RemovalSchedule::parse(std::string_view text) {
  constexpr std::string_view kUniform = "uniform:";
  if (text.substr(0, kUniform.size()) == kUniform) {
    const std::string_view n = text.substr(kUniform.size());
    std::size_t steps = 0;
    auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), steps);
    if (ec != std::errc() || ptr != n.data() + n.size()) {
      throw ConfigError("bad removal schedule '" + std::string(text) + "'");
    }
    return uniform(steps);
  }
  std::vector<double> f;
  std::stringstream in{std::string(text)};
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      f.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::logic_error&) {
      throw ConfigError("bad removal schedule entry '" + item + "'");
    }
  }
  return RemovalSchedule(std::move(f));
}

std::string RemovalSchedule::to_string() const {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < fractions_.size(); ++i) {
    if (i) out << ',';
    out << fractions_[i];
  }
  return out.str();
}

std::size_t removal_count(double q, std::size_t n) {
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("removal fraction must be in [0, 1]");
  const double target = q * static_cast<double>(n);
  const double nearest = std::round(target);
  if (std::fabs(target - nearest) <= 1e-9 * std::max(1.0, target)) {
    return static_cast<std::size_t>(nearest);
  }
  return std::min(n, static_cast<std::size_t>(std::ceil(target)));
}

std::vector<std::size_t> importance_order(std::span<const float> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

FeatureMask mask_from_order(std::span<const std::size_t> order, std::size_t k,
                            std::size_t total) {
  FeatureMask mask(total, 0);
  for (std::size_t i = 0; i < k && i < order.size(); ++i) mask[order[i]] = 1;
  return mask;
}

FeatureMask topk_mask(const Tensor& heatmap, double q) {
  const std::size_t n = heatmap.size();
  const std::size_t k = removal_count(q, n);
  if (k == 0) return FeatureMask(n, 0);
  if (k == n) return FeatureMask(n, 1);
  return mask_from_order(importance_order(heatmap.values()), k, n);
}

std::vector<double> modality_positive_sum(const Tensor& heatmap) {
  std::vector<double> sums(heatmap.modality_count(), 0.0);
  for (std::size_t m = 0; m < sums.size(); ++m) {
    for (float v : heatmap.modality(m)) {
      if (v > 0.0f) sums[m] += v;
    }
  }
  return sums;
}

}  // namespace mmxeval
