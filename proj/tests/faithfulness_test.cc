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

#include <gtest/gtest.h>

#include <cmath>

#include "mmxeval/error.h"
#include "mmxeval/rng.h"

namespace mmxeval {
namespace {

class CountingOracle final : public Oracle {
 public:
  explicit CountingOracle(Oracle& inner, std::size_t fail_after = SIZE_MAX)
      : inner_(inner), fail_after_(fail_after) {}
  const OracleInfo& info() const override { return inner_.info(); }
  std::vector<Prediction> predict(std::span<const Tensor> volumes) override {
    if (calls + volumes.size() > fail_after_) throw OracleError("injected failure");
    calls += volumes.size();
    return inner_.predict(volumes);
  }
  std::size_t calls = 0;

 private:
  Oracle& inner_;
  std::size_t fail_after_;
};

struct LinearProblem {
  Tensor w;
  std::vector<EvalCase> cases;
  std::vector<Tensor> heatmaps;
};

// Positive weights and intensities: label 1 iff logit > 0 on the intact input.
LinearProblem linear_problem(std::size_t n, std::uint64_t seed, const Shape& shape = {2, 6, 6}) {
  Rng rng(seed);
  LinearProblem p;
  p.w = Tensor(shape);
  for (float& v : p.w.values()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  LinearOracle oracle(p.w, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    EvalCase c;
    c.id = "c" + std::to_string(i);
    c.volume = Tensor(shape);
    for (float& v : c.volume.values()) v = static_cast<float>(rng.uniform(0.0, 1.0));
    c.label = static_cast<int>(argmax(oracle.probabilities(c.volume)));
    Tensor h(shape);
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double contribution = static_cast<double>(p.w[k]) * c.volume[k];
      h[k] = static_cast<float>(c.label == 1 ? contribution : -contribution);
    }
    p.heatmaps.push_back(postprocess(h, PostprocessMode::kPositiveClip));
    p.cases.push_back(std::move(c));
  }
  return p;
}

RemovalCurve curve(std::vector<double> q, std::vector<double> perf) {
  RemovalCurve c;
  c.fractions = std::move(q);
  c.performance = std::move(perf);
  return c;
}

TEST(Trapezoid, HandValues) {
  const std::vector<double> q{0, 0.5, 1};
  EXPECT_DOUBLE_EQ(trapezoid_area(q, std::vector<double>{1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(trapezoid_area(q, std::vector<double>{1, 0.5, 0}), 0.5);
  EXPECT_DOUBLE_EQ(trapezoid_area(std::vector<double>{0, 0.1, 1}, std::vector<double>{1, 0, 0}), 0.05);
}

TEST(DiffAuc, HandExamples) {
  const std::vector<double> q{0, 0.5, 1};
  const RemovalCurve flat = curve(q, {1, 1, 1});
  const RemovalCurve linear = curve(q, {1, 0.5, 0});
  EXPECT_DOUBLE_EQ(diff_auc(flat, flat), 0.0);
  EXPECT_DOUBLE_EQ(diff_auc(linear, flat), 0.5);
  EXPECT_DOUBLE_EQ(diff_auc(flat, linear), -0.5);
}

TEST(DiffAuc, AntisymmetricAndBounded) {
  Rng rng(1);
  const RemovalSchedule s = RemovalSchedule::standard();
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(s.size());
    std::vector<double> b(s.size());
    for (auto& v : a) v = rng.uniform();
    for (auto& v : b) v = rng.uniform();
    const RemovalCurve ca = curve(s.fractions(), a);
    const RemovalCurve cb = curve(s.fractions(), b);
    EXPECT_EQ(diff_auc(ca, ca), 0.0);
    EXPECT_NEAR(diff_auc(ca, cb), -diff_auc(cb, ca), 1e-15);
    EXPECT_LE(std::abs(diff_auc(ca, cb)), 1.0);
  }
}

TEST(DiffAuc, MismatchedSchedulesOrMetrics) {
  const RemovalCurve a = curve({0, 1}, {1, 0});
  const RemovalCurve b = curve({0, 0.5, 1}, {1, 0.5, 0});
  EXPECT_THROW(diff_auc(a, b), DataError);
  RemovalCurve c = a;
  c.metric = TaskMetric::kRocAuc;
  EXPECT_THROW(diff_auc(a, c), DataError);
}

TEST(RemovalCurveTest, TwoPointSchedule) {
  LinearProblem p = linear_problem(30, 2);
  LinearOracle oracle(p.w, 0.0);
  RemovalSettings settings;
  settings.schedule = RemovalSchedule({0.0, 1.0});
  const RemovalCurve c = removal_curve(oracle, p.cases, p.heatmaps, settings);
  ASSERT_EQ(c.performance.size(), 2u);
  EXPECT_DOUBLE_EQ(c.performance[0], 1.0);
  std::size_t ones = 0;
  for (const auto& e : p.cases) ones += e.label == 1;
  const double full = ones == p.cases.size() ? 0.0 : (p.cases.size() - ones) / static_cast<double>(p.cases.size());
  EXPECT_DOUBLE_EQ(c.performance[1], full);
}

TEST(RemovalCurveTest, ConstantOracleIsFlat) {
  LinearProblem p = linear_problem(20, 3);
  ConstantOracle oracle({0.6, 0.4}, p.w.shape());
  RemovalSettings settings;
  const RemovalCurve c = removal_curve(oracle, p.cases, p.heatmaps, settings);
  const RemovalCurve b = random_baseline(oracle, p.cases, settings, 4, 1);
  for (std::size_t k = 1; k < c.performance.size(); ++k) {
    EXPECT_EQ(c.performance[k], c.performance[0]);
    EXPECT_EQ(b.performance[k], c.performance[0]);
  }
  EXPECT_DOUBLE_EQ(diff_auc(c, b), 0.0);
}

TEST(RemovalCurveTest, InformedRemovalIsFaster) {
  LinearProblem p = linear_problem(60, 4);
  LinearOracle oracle(p.w, 0.0);
  RemovalSettings settings;
  const RemovalCurve method = removal_curve(oracle, p.cases, p.heatmaps, settings);
  const RemovalCurve base = random_baseline(oracle, p.cases, settings, 5, 11);
  double gap = 0.0;
  for (std::size_t k = 1; k + 1 < method.performance.size(); ++k) {
    gap += base.performance[k] - method.performance[k];
  }
  EXPECT_GT(gap, 0.0);
  EXPECT_GT(diff_auc(method, base), 0.0);
  for (double v : method.performance) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(RandomBaseline, DeterministicAndAnchored) {
  LinearProblem p = linear_problem(25, 5);
  LinearOracle oracle(p.w, 0.0);
  RemovalSettings settings;
  const RemovalCurve a = random_baseline(oracle, p.cases, settings, 6, 99);
  const RemovalCurve b = random_baseline(oracle, p.cases, settings, 6, 99);
  EXPECT_EQ(a.performance, b.performance);
  EXPECT_EQ(a.repeats, b.repeats);
  ASSERT_EQ(a.repeats.size(), 6u);
  EXPECT_TRUE(a.is_baseline());
  const RemovalCurve m = removal_curve(oracle, p.cases, p.heatmaps, settings);
  EXPECT_EQ(a.performance.front(), m.performance.front());
  EXPECT_EQ(a.performance.back(), m.performance.back());
  for (std::size_t k = 0; k < a.performance.size(); ++k) {
    EXPECT_LE(a.ci_lo[k], a.performance[k]);
    EXPECT_GE(a.ci_hi[k], a.performance[k]);
    double mean = 0.0;
    for (const auto& r : a.repeats) mean += r[k];
    EXPECT_NEAR(a.performance[k], mean / 6.0, 1e-12);
  }
  const RemovalCurve c = random_baseline(oracle, p.cases, settings, 6, 100);
  EXPECT_NE(a.repeats, c.repeats);
  EXPECT_THROW(random_baseline(oracle, p.cases, settings, 1, 1), ConfigError);
}

TEST(RandomBaseline, ConfidenceBandIsNormalApproximation) {
  LinearProblem p = linear_problem(20, 6);
  LinearOracle oracle(p.w, 0.0);
  const RemovalCurve b = random_baseline(oracle, p.cases, RemovalSettings{}, 15, 3);
  for (std::size_t k = 0; k < b.performance.size(); ++k) {
    double var = 0.0;
    for (const auto& r : b.repeats) var += (r[k] - b.performance[k]) * (r[k] - b.performance[k]);
    const double half = 1.959963984540054 * std::sqrt(var / 14.0) / std::sqrt(15.0);
    EXPECT_NEAR(b.ci_hi[k] - b.performance[k], half, 1e-9);
    EXPECT_NEAR(b.performance[k] - b.ci_lo[k], half, 1e-9);
  }
}

TEST(RemovalCurveTest, ScoreCallAccounting) {
  LinearProblem p = linear_problem(7, 7);
  LinearOracle inner(p.w, 0.0);
  CountingOracle oracle(inner);
  RemovalSettings settings;
  const std::size_t repeats = 3;
  removal_curve(oracle, p.cases, p.heatmaps, settings);
  random_baseline(oracle, p.cases, settings, repeats, 1);
  EXPECT_EQ(oracle.calls, settings.schedule.size() * p.cases.size() * (1 + repeats));
}

TEST(RemovalCurveTest, FailureCarriesPartialCurve) {
  LinearProblem p = linear_problem(5, 8);
  LinearOracle inner(p.w, 0.0);
  CountingOracle oracle(inner, 5 * 3);
  try {
    removal_curve(oracle, p.cases, p.heatmaps, RemovalSettings{});
    FAIL() << "expected PartialCurveError";
  } catch (const PartialCurveError& e) {
    EXPECT_EQ(e.partial().performance.size(), 3u);
    EXPECT_EQ(e.partial().fractions.size(), 3u);
  }
}

TEST(RemovalCurveTest, HeatmapCountMustMatch) {
  LinearProblem p = linear_problem(3, 9);
  LinearOracle oracle(p.w, 0.0);
  p.heatmaps.pop_back();
  EXPECT_THROW(removal_curve(oracle, p.cases, p.heatmaps, RemovalSettings{}), DataError);
}

}  // namespace
}  // namespace mmxeval
