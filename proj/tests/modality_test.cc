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


#include "mmxeval/modality.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmxeval/error.h"
#include "mmxeval/oracle.h"
#include "mmxeval/rng.h"
#include "mmxeval/synthgen.h"

namespace mmxeval {
namespace {

SubsetTable random_table(Rng& rng, std::size_t m) {
  SubsetTable t(m);
  for (std::uint32_t s = 0; s < t.size(); ++s) t.set(s, rng.uniform());
  return t;
}

// Average marginal contribution over all M! orderings.
std::vector<double> permutation_shapley(const SubsetTable& t) {
  const std::size_t m = t.modality_count();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(m, 0.0);
  double count = 0.0;
  do {
    std::uint32_t s = 0;
    for (std::size_t p : order) {
      const std::uint32_t next = s | (1u << p);
      phi[p] += t.at(next) - t.at(s);
      s = next;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= count;
  return phi;
}

double pairwise_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0, tx = 0, ty = 0, n0 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      n0 += 1;
      const double a = x[i] - x[j];
      const double b = y[i] - y[j];
      if (a == 0) tx += 1;
      if (b == 0) ty += 1;
      if (a * b > 0) c += 1;
      if (a * b < 0) d += 1;
    }
  }
  return (c - d) / std::sqrt((n0 - tx) * (n0 - ty));
}

Tensor heatmap_with_sums(const std::vector<double>& sums) {
  Tensor h({sums.size(), 2});
  for (std::size_t m = 0; m < sums.size(); ++m) {
    h[2 * m] = static_cast<float>(sums[m]);
    h[2 * m + 1] = -1.0f;
  }
  return h;
}

TEST(Shapley, SinglePlayer) {
  const SubsetTable t(1, {0.3, 0.8});
  const auto phi = modality_shapley(t);
  ASSERT_EQ(phi.size(), 1u);
  EXPECT_DOUBLE_EQ(phi[0], 0.5);
}

TEST(Shapley, TwoPlayerHandExample) {
  const SubsetTable t(2, {0.5, 0.9, 0.6, 0.95});
  const auto phi = modality_shapley(t);
  EXPECT_NEAR(phi[0], 0.375, 1e-15);
  EXPECT_NEAR(phi[1], 0.075, 1e-15);
}

TEST(Shapley, ConstantGameIsZero) {
  const SubsetTable t(4, std::vector<double>(16, 0.7));
  for (double v : modality_shapley(t)) EXPECT_EQ(v, 0.0);
}

TEST(Shapley, IncompleteTable) {
  SubsetTable t(2);
  t.set(0, 0.1);
  t.set(3, 0.2);
  EXPECT_FALSE(t.complete());
  EXPECT_THROW(modality_shapley(t), DataError);
  EXPECT_THROW(SubsetTable(2, {0.1, 0.2}), DataError);
}

TEST(Shapley, AxiomsOnRandomTables) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng.below(6);
    const SubsetTable t = random_table(rng, m);
    const auto phi = modality_shapley(t);
    const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
    EXPECT_NEAR(total, t.at(t.full_set()) - t.at(0), 1e-9);

    // Linearity.
    const SubsetTable u = random_table(rng, m);
    std::vector<double> sum(t.size());
    for (std::uint32_t s = 0; s < t.size(); ++s) sum[s] = t.at(s) + u.at(s);
    const auto phi_u = modality_shapley(u);
    const auto phi_sum = modality_shapley(SubsetTable(m, sum));
    for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(phi_sum[k], phi[k] + phi_u[k], 1e-12);
  }
}

TEST(Shapley, SymmetricAndNullPlayers) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.below(5);
    // Player 0 and 1 interchangeable; player m-1 null (when m > 2).
    std::vector<double> v(std::size_t{1} << m);
    std::vector<double> by_key(std::size_t{1} << m, -1.0);
    for (std::uint32_t s = 0; s < v.size(); ++s) {
      std::uint32_t key = s;
      if (m > 2) key &= ~(1u << (m - 1));
      const std::uint32_t swapped = (key & ~3u) | ((key & 1u) << 1) | ((key >> 1) & 1u);
      const std::uint32_t canon = std::min(key, swapped);
      if (by_key[canon] < 0) by_key[canon] = rng.uniform();
      v[s] = by_key[canon];
    }
    const auto phi = modality_shapley(SubsetTable(m, v));
    EXPECT_EQ(phi[0], phi[1]);
    if (m > 2) {
      EXPECT_EQ(phi[m - 1], 0.0);
    }
  }
}

TEST(Shapley, MatchesPermutationEnumeration) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng.below(4);
    const SubsetTable t = random_table(rng, m);
    const auto fast = modality_shapley(t);
    const auto slow = permutation_shapley(t);
    for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(fast[k], slow[k], 1e-12);
  }
}

TEST(MiCorrelation, MonotoneAndReversed) {
  const std::vector<double> phi{0.4, 0.3, 0.2, 0.1};
  EXPECT_DOUBLE_EQ(*mi_correlation(heatmap_with_sums({8, 6, 4, 2}), phi), 1.0);
  EXPECT_DOUBLE_EQ(*mi_correlation(heatmap_with_sums({1, 2, 3, 4}), phi), -1.0);
}

TEST(MiCorrelation, HandExampleWithTies) {
  const std::vector<double> phi{0.375, 0.075, 0, 0};
  const auto r = mi_correlation(heatmap_with_sums({5, 1, 2, 0}), phi);
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(*r, 3.0 / std::sqrt(30.0), 1e-12);
  EXPECT_NEAR(*r, pairwise_tau_b(phi, {5, 1, 2, 0}), 1e-12);
}

TEST(MiCorrelation, ConstantEstimateIsUndefined) {
  const std::vector<double> phi{0.4, 0.3, 0.2, 0.1};
  EXPECT_FALSE(mi_correlation(heatmap_with_sums({1, 1, 1, 1}), phi).has_value());
  EXPECT_FALSE(mi_correlation(heatmap_with_sums({0, 0, 0, 0}), phi).has_value());
  EXPECT_FALSE(mi_correlation(heatmap_with_sums({1, 2, 3, 4}), std::vector<double>(4, 0.5)).has_value());
}

TEST(MiCorrelation, InvariantToMonotoneRescaling) {
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> phi(5);
    std::vector<double> est(5);
    for (auto& v : phi) v = static_cast<double>(rng.below(4));
    for (auto& v : est) v = static_cast<double>(rng.below(4));
    std::vector<double> rescaled(5);
    for (std::size_t k = 0; k < 5; ++k) rescaled[k] = std::exp(est[k]) * 3.0 + 1.0;
    const auto a = mi_correlation(heatmap_with_sums(est), phi);
    const auto b = mi_correlation(heatmap_with_sums(rescaled), phi);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_NEAR(*a, *b, 1e-12);
      EXPECT_NEAR(*a, pairwise_tau_b(phi, est), 1e-12);
    }
  }
}

class GatedModalityTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SynthConfig cfg;
    cfg.n = 40;
    cfg.height = cfg.width = 64;
    cfg.seed = 21;
    for (auto& c : generate_cases(cfg)) cases_.push_back({c.id, c.volume, c.label});
    modalities_ = cfg.modalities;
  }
  std::vector<EvalCase> cases_;
  std::vector<std::string> modalities_;
};

TEST_F(GatedModalityTest, SubsetPerformance) {
  ModalityGatedOracle oracle({4, 64, 64}, modalities_, 0);
  const double full = subset_performance(oracle, cases_, 0b1111, TaskMetric::kAccuracy, FillStrategy::kZero);
  EXPECT_GE(full, 0.95);
  EXPECT_DOUBLE_EQ(subset_performance(oracle, cases_, 0b0001, TaskMetric::kAccuracy, FillStrategy::kZero), full);
  std::size_t zeros = 0;
  for (const auto& c : cases_) zeros += c.label == 0;
  const double chance = static_cast<double>(zeros) / static_cast<double>(cases_.size());
  EXPECT_DOUBLE_EQ(subset_performance(oracle, cases_, 0b1110, TaskMetric::kAccuracy, FillStrategy::kZero), chance);
}

TEST_F(GatedModalityTest, ImportanceIsOneHot) {
  ModalityGatedOracle oracle({4, 64, 64}, modalities_, 0);
  const ModalityImportance mi = modality_importance(oracle, cases_, TaskMetric::kRocAuc, FillStrategy::kZero);
  EXPECT_EQ(mi.v_table.size(), 16u);
  EXPECT_TRUE(mi.v_table.complete());
  EXPECT_EQ(mi.metric, TaskMetric::kRocAuc);
  EXPECT_NEAR(mi.phi[0], mi.v_table.at(15) - mi.v_table.at(0), 1e-12);
  EXPECT_GT(mi.phi[0], 0.4);
  for (std::size_t m = 1; m < 4; ++m) EXPECT_EQ(mi.phi[m], 0.0);
}

}  // namespace
}  // namespace mmxeval
