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

#include "mmxeval/faithfulness.h"

#include <cmath>
#include <functional>
#include <numeric>

#include "mmxeval/ablation.h"
#include "mmxeval/performance.h"
#include "mmxeval/rng.h"

namespace mmxeval {
namespace {

constexpr std::size_t kCasesPerCall = 64;
// Cache feature orders across schedule points while they fit in this many
// index entries; beyond that they are recomputed per point.
constexpr std::size_t kOrderCacheBudget = std::size_t{64} << 20;

using OrderFn = std::function<std::vector<std::size_t>(std::size_t case_index)>;

// Performance at each schedule point for removal orders given by `order_of`.
// `points` receives the completed values, so a failure leaves it partial.
void removal_points(Oracle& oracle, std::span<const EvalCase> cases,
                    const RemovalSettings& settings, const OrderFn& order_of,
                    std::vector<double>& points) {
  if (cases.empty()) throw DataError("feature removal needs at least one case");
  std::vector<int> labels;
  for (const auto& c : cases) labels.push_back(c.label);

  std::size_t total_elements = 0;
  for (const auto& c : cases) total_elements += c.volume.size();
  std::vector<std::vector<std::size_t>> cached;
  if (total_elements <= kOrderCacheBudget) {
    cached.resize(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) cached[i] = order_of(i);
  }

  for (double q : settings.schedule.fractions()) {
    std::vector<PredictionRecord> records;
    records.reserve(cases.size());
    for (std::size_t start = 0; start < cases.size(); start += kCasesPerCall) {
      const std::size_t end = std::min(cases.size(), start + kCasesPerCall);
      std::vector<std::string> ids;
      std::vector<Tensor> ablated;
      for (std::size_t i = start; i < end; ++i) {
        const Tensor& volume = cases[i].volume;
        const std::size_t k = removal_count(q, volume.size());
        ids.push_back(cases[i].id);
        if (k == 0) {
          ablated.push_back(volume);
          continue;
        }
        FeatureMask mask;
        if (k == volume.size()) {
          mask.assign(volume.size(), 1);
        } else if (!cached.empty()) {
          mask = mask_from_order(cached[i], k, volume.size());
        } else {
          mask = mask_from_order(order_of(i), k, volume.size());
        }
        ablated.push_back(ablate(volume, AblationSpec{FeatureRemoval{std::move(mask)}, settings.fill}));
      }
      auto part = score(oracle, ids, ablated);
      records.insert(records.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
    points.push_back(performance(records, labels, settings.metric));
  }
}

}  // namespace

RemovalCurve removal_curve(Oracle& oracle, std::span<const EvalCase> cases,
                           std::span<const Tensor> heatmaps, const RemovalSettings& settings) {
  if (heatmaps.size() != cases.size()) {
    throw DataError("removal_curve: need exactly one heatmap per case");
  }
  for (std::size_t i = 0; i < cases.size(); ++i) {
    require_same_shape(cases[i].volume, heatmaps[i], "heatmap of case '" + cases[i].id + "'");
  }
  RemovalCurve curve;
  curve.fractions = settings.schedule.fractions();
  curve.metric = settings.metric;
  try {
    removal_points(oracle, cases, settings,
                   [&](std::size_t i) { return importance_order(heatmaps[i].values()); },
                   curve.performance);
  } catch (const OracleError& e) {
    RemovalCurve partial = curve;
    partial.fractions.resize(partial.performance.size());
    throw PartialCurveError(e.what(), std::move(partial));
  }
  return curve;
}

RemovalCurve random_baseline(Oracle& oracle, std::span<const EvalCase> cases,
                             const RemovalSettings& settings, std::size_t repeats,
                             std::uint64_t seed) {
  if (repeats < 2) throw ConfigError("random baseline needs at least 2 repeats");
  RemovalCurve curve;
  curve.fractions = settings.schedule.fractions();
  curve.metric = settings.metric;
  for (std::size_t r = 0; r < repeats; ++r) {
    std::vector<double> points;
    auto random_order = [&](std::size_t i) {
      std::vector<std::size_t> order(cases[i].volume.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(derive_seed(seed, {r, i}));
      rng.shuffle(std::span<std::size_t>(order));
      return order;
    };
    try {
      removal_points(oracle, cases, settings, random_order, points);
    } catch (const OracleError& e) {
      RemovalCurve partial = curve;
      partial.repeats.push_back(points);
      throw PartialCurveError(std::string(e.what()) + " (baseline repeat " +
                                  std::to_string(r) + ")",
                              std::move(partial));
    }
    curve.repeats.push_back(std::move(points));
  }

  const std::size_t n_points = curve.fractions.size();
  const double n = static_cast<double>(repeats);
  curve.performance.assign(n_points, 0.0);
  curve.ci_lo.assign(n_points, 0.0);
  curve.ci_hi.assign(n_points, 0.0);
  for (std::size_t k = 0; k < n_points; ++k) {
    double sum = 0.0;
    for (const auto& rep : curve.repeats) sum += rep[k];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& rep : curve.repeats) ss += (rep[k] - mean) * (rep[k] - mean);
    const double half_width = 1.959963984540054 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    curve.performance[k] = mean;
    curve.ci_lo[k] = mean - half_width;
    curve.ci_hi[k] = mean + half_width;
  }
  return curve;
}

double trapezoid_area(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("trapezoid_area: length mismatch");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return area;
}

double diff_auc(const RemovalCurve& method, const RemovalCurve& baseline) {
  if (method.fractions != baseline.fractions) throw DataError("diff_auc: schedule mismatch");
  if (method.metric != baseline.metric) throw DataError("diff_auc: metric mismatch");
  if (method.performance.size() != method.fractions.size() ||
      baseline.performance.size() != baseline.fractions.size()) {
    throw DataError("diff_auc: incomplete curve");
  }
  return trapezoid_area(baseline.fractions, baseline.performance) -
         trapezoid_area(method.fractions, method.performance);
}

}  // namespace mmxeval
