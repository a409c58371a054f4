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


#include "mmxeval/oracle.h"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>

#include "mmxeval/ablation.h"
#include "mmxeval/error.h"
#include "mmxeval/performance.h"
#include "mmxeval/rng.h"
#include "mmxeval/score_cache.h"
#include "mmxeval/synthgen.h"

namespace mmxeval {
namespace {

Tensor random_tensor(Rng& rng, const Shape& shape, double lo = 0.0, double hi = 1.0) {
  Tensor t(shape);
  for (float& v : t.values()) v = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

PredictionRecord record(double p1) {
  PredictionRecord r;
  r.probs = {1.0 - p1, p1};
  r.predicted_class = argmax(r.probs);
  return r;
}

TEST(Probabilities, Validation) {
  EXPECT_NO_THROW(validate_probabilities({0.25, 0.75}, 2));
  EXPECT_NO_THROW(validate_probabilities({0.5, 0.5 + 5e-6}, 2));
  EXPECT_THROW(validate_probabilities({0.5, 0.6}, 2), OracleError);
  EXPECT_THROW(validate_probabilities({-0.1, 1.1}, 2), OracleError);
  EXPECT_THROW(validate_probabilities({1.0}, 2), OracleError);
  EXPECT_THROW(validate_probabilities({NAN, 1.0}, 2), OracleError);
}

TEST(Probabilities, ArgmaxTiesGoLow) {
  EXPECT_EQ(argmax({0.5, 0.5}), 0u);
  EXPECT_EQ(argmax({0.2, 0.4, 0.4}), 1u);
  EXPECT_EQ(argmax({0.1, 0.9}), 1u);
}

TEST(LinearOracleTest, ZeroVolumeIsUniform) {
  Rng rng(1);
  LinearOracle oracle(random_tensor(rng, {2, 3, 3}, -1, 1), 0.0);
  const Probabilities p = oracle.probabilities(Tensor({2, 3, 3}));
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(LinearOracleTest, ZeroWeightsAlwaysUniform) {
  Rng rng(2);
  LinearOracle oracle(Tensor({3, 4}), 0.0);
  for (int i = 0; i < 10; ++i) {
    const Probabilities p = oracle.probabilities(random_tensor(rng, {3, 4}));
    EXPECT_DOUBLE_EQ(p[1], 0.5);
  }
}

TEST(LinearOracleTest, UnitLogit) {
  Tensor w({4});
  w[0] = 1.0f;
  LinearOracle oracle(w, 0.0);
  const Probabilities p = oracle.probabilities(w);
  EXPECT_DOUBLE_EQ(oracle.logit(w), 1.0);
  EXPECT_NEAR(p[1], 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
  EXPECT_EQ(oracle.ground_truth_attribution(), w);
}

TEST(LinearOracleTest, GroundTruthIsAbsoluteWeights) {
  LinearOracle oracle(Tensor({3}, std::vector<float>{-2, 0, 1.5f}), 0.3);
  EXPECT_EQ(oracle.ground_truth_attribution(), Tensor({3}, std::vector<float>{2, 0, 1.5f}));
}

TEST(LinearOracleTest, ShapeMismatchIsOracleError) {
  LinearOracle oracle(Tensor({2, 2}), 0.0);
  const std::vector<Tensor> bad{Tensor({2, 3})};
  EXPECT_THROW(oracle.predict(bad), OracleError);
}

TEST(LinearOracleTest, DeterministicScoring) {
  Rng rng(4);
  LinearOracle oracle(random_tensor(rng, {2, 8, 8}, -1, 1), 0.1);
  const Tensor v = random_tensor(rng, {2, 8, 8});
  const std::vector<Tensor> vols{v, v};
  const std::vector<std::string> ids{"x", "y"};
  const auto recs = score(oracle, ids, vols);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].case_id, "x");
  EXPECT_NEAR(recs[0].probs[1], recs[1].probs[1], 1e-6);
}

TEST(LinearOracleTest, TopWeightRemovalBeatsRandomRemoval) {
  // Positive weights and intensities, so every removal lowers the logit.
  Rng rng(42);
  const Shape shape{4, 10, 10};
  const Tensor w = random_tensor(rng, shape, 0.0, 1.0);
  LinearOracle oracle(w, 0.0);
  const FeatureMask top = topk_mask(oracle.ground_truth_attribution(), 0.1);
  double drop_top = 0.0;
  double drop_random = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Tensor x = random_tensor(rng, shape);
    const double p0 = oracle.probabilities(x)[1];
    const Tensor removed_top = ablate(x, {FeatureRemoval{top}, FillStrategy::kZero});
    FeatureMask random_mask(x.size(), 0);
    std::vector<std::size_t> order(x.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t k = 0; k < removal_count(0.1, x.size()); ++k) random_mask[order[k]] = 1;
    const Tensor removed_random = ablate(x, {FeatureRemoval{random_mask}, FillStrategy::kZero});
    drop_top += p0 - oracle.probabilities(removed_top)[1];
    drop_random += p0 - oracle.probabilities(removed_random)[1];
  }
  EXPECT_GE(drop_top / 100.0, drop_random / 100.0);
}

TEST(ConstantOracleTest, IgnoresInput) {
  ConstantOracle oracle({0.3, 0.7});
  const std::vector<Tensor> vols{Tensor({1}), Tensor({1}, 5.0f)};
  const auto preds = oracle.predict(vols);
  ASSERT_EQ(preds.size(), 2u);
  EXPECT_EQ(preds[1].probs, (Probabilities{0.3, 0.7}));
  EXPECT_THROW(ConstantOracle({0.3, 0.3}), OracleError);
}

class GatedOracleTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_.n = 40;
    config_.height = config_.width = 64;
    config_.seed = 9;
    cases_ = generate_cases(config_);
  }
  SynthConfig config_;
  std::vector<SynthCase> cases_;
};

TEST_F(GatedOracleTest, IgnoresOtherModalities) {
  ModalityGatedOracle oracle({4, 64, 64}, config_.modalities, 0);
  for (const auto& c : cases_) {
    const Probabilities before = oracle.probabilities(c.volume);
    const Tensor kept = ablate(c.volume, {ModalitySubset{{0}}, FillStrategy::kZero});
    EXPECT_EQ(oracle.probabilities(kept), before);
  }
}

TEST_F(GatedOracleTest, ZeroedModalityIsUniform) {
  ModalityGatedOracle oracle({4, 64, 64}, config_.modalities, 0);
  for (const auto& c : cases_) {
    const Tensor removed = ablate(c.volume, {ModalitySubset{{1, 2, 3}}, FillStrategy::kZero});
    const Probabilities p = oracle.probabilities(removed);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
  }
}

TEST_F(GatedOracleTest, ProbeAccuracies) {
  ModalityGatedOracle oracle({4, 64, 64}, config_.modalities, 0);
  auto probe_accuracy = [&](const SynthConfig& cfg) {
    const auto probe = generate_cases(cfg);
    std::vector<Tensor> vols;
    std::vector<std::string> ids;
    std::vector<int> labels;
    for (const auto& c : probe) {
      vols.push_back(c.volume);
      ids.push_back(c.id);
      labels.push_back(c.label);
    }
    return accuracy(score(oracle, ids, vols), labels);
  };
  EXPECT_GE(probe_accuracy(tic_probe_config(config_)), 0.95);
  EXPECT_LE(probe_accuracy(flair_probe_config(config_)), 0.55);
}

TEST_F(GatedOracleTest, ConstructionChecks) {
  EXPECT_THROW(ModalityGatedOracle({4, 8}, {}, 0), ConfigError);
  EXPECT_THROW(ModalityGatedOracle({4, 8, 8}, {}, 4), ConfigError);
  EXPECT_THROW(ModalityGatedOracle({4, 8, 8}, {"A", "B"}, 0), ConfigError);
}

TEST(Ablate, EmptyAndFullMasks) {
  Rng rng(6);
  const Tensor v = random_tensor(rng, {2, 3, 3});
  EXPECT_EQ(ablate(v, {FeatureRemoval{FeatureMask(v.size(), 0)}, FillStrategy::kZero}), v);
  EXPECT_EQ(ablate(v, {FeatureRemoval{FeatureMask(v.size(), 1)}, FillStrategy::kZero}),
            Tensor({2, 3, 3}));
}

TEST(Ablate, ModalitySubsetMatchesReferenceLoop) {
  Rng rng(7);
  const Tensor v = random_tensor(rng, {4, 5, 5});
  const Tensor out = ablate(v, {ModalitySubset{{0}}, FillStrategy::kZero});
  for (std::size_t m = 0; m < 4; ++m) {
    for (std::size_t i = 0; i < 25; ++i) {
      EXPECT_EQ(out[m * 25 + i], m == 0 ? v[m * 25 + i] : 0.0f);
    }
  }
}

TEST(Ablate, MeanFillAndUntouchedBits) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    Tensor v = random_tensor(rng, {3, 4, 4}, -2, 2);
    v[5] = -0.0f;
    const std::vector<float> fills = fill_values(v, FillStrategy::kModalityMean);
    ASSERT_EQ(fills.size(), 3u);
    for (std::size_t m = 0; m < 3; ++m) {
      double s = 0.0;
      for (float x : v.modality(m)) s += x;
      EXPECT_NEAR(fills[m], s / 16.0, 1e-6);
    }
    FeatureMask mask(v.size(), 0);
    for (auto& b : mask) b = rng.bernoulli(0.3);
    const Tensor out = ablate(v, {FeatureRemoval{mask}, FillStrategy::kModalityMean});
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (mask[i]) {
        EXPECT_EQ(out[i], fills[i / 16]);
      } else {
        EXPECT_EQ(std::bit_cast<std::uint32_t>(out[i]), std::bit_cast<std::uint32_t>(v[i]));
      }
    }
    const std::uint32_t bits = static_cast<std::uint32_t>(rng.below(8));
    const Tensor sub = ablate(v, {ModalitySubset::from_bits(bits, 3), FillStrategy::kModalityMean});
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool kept = (bits >> (i / 16)) & 1u;
      if (kept) {
        EXPECT_EQ(std::bit_cast<std::uint32_t>(sub[i]), std::bit_cast<std::uint32_t>(v[i]));
      } else {
        EXPECT_EQ(sub[i], fills[i / 16]);
      }
    }
  }
}

TEST(Ablate, ShapeMismatch) {
  const Tensor v({2, 2});
  EXPECT_THROW(ablate(v, {FeatureRemoval{FeatureMask(3, 0)}, FillStrategy::kZero}), DataError);
  EXPECT_THROW(ablate(v, {ModalitySubset{{2}}, FillStrategy::kZero}), DataError);
}

TEST(Performance, Accuracy) {
  const std::vector<PredictionRecord> recs{record(0.9), record(0.2), record(0.6)};
  EXPECT_DOUBLE_EQ(accuracy(recs, std::vector<int>{1, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(recs, std::vector<int>{0, 0, 0}), 1.0 / 3.0);
}

TEST(Performance, AucExamples) {
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.4, 0.1}, std::vector<int>{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.7, 0.7}, std::vector<int>{1, 0}), 0.5);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), UndefinedError);
  try {
    roc_auc(std::vector<double>{0.1}, std::vector<int>{0});
  } catch (const UndefinedError& e) {
    EXPECT_NE(std::string(e.what()).find("AUC undefined"), std::string::npos);
  }
}

TEST(Performance, AucMatchesPairCounting) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(10)) / 10.0;
      y[i] = static_cast<int>(rng.below(2));
    }
    y[0] = 0;
    y[1] = 1;
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (y[i] != 1 || y[j] != 0) continue;
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
    const double auc = roc_auc(s, y);
    EXPECT_NEAR(auc, wins / pairs, 1e-12);
    EXPECT_GE(auc, 0.0);
    EXPECT_LE(auc, 1.0);
  }
}

TEST(Performance, RocAucUsesClassOneProbability) {
  const std::vector<PredictionRecord> recs{record(0.9), record(0.2)};
  EXPECT_DOUBLE_EQ(performance(recs, std::vector<int>{1, 0}, TaskMetric::kRocAuc), 1.0);
  EXPECT_DOUBLE_EQ(performance(recs, std::vector<int>{0, 1}, TaskMetric::kRocAuc), 0.0);
}

class CountingOracle final : public Oracle {
 public:
  explicit CountingOracle(Tensor w) : inner_(std::move(w), 0.0) {}
  const OracleInfo& info() const override { return inner_.info(); }
  std::vector<Prediction> predict(std::span<const Tensor> volumes) override {
    calls += volumes.size();
    return inner_.predict(volumes);
  }
  std::size_t calls = 0;

 private:
  LinearOracle inner_;
};

TEST(ScoreCache, CachedEqualsFresh) {
  Rng rng(12);
  CountingOracle inner(random_tensor(rng, {2, 4}, -1, 1));
  CachingOracle cache(inner);
  const Tensor a = random_tensor(rng, {2, 4});
  const Tensor b = random_tensor(rng, {2, 4});
  const std::vector<Tensor> vols{a, b, a};
  const auto first = cache.predict(vols);
  EXPECT_EQ(inner.calls, 2u);
  const auto second = cache.predict(vols);
  EXPECT_EQ(inner.calls, 2u);
  EXPECT_EQ(cache.requested(), 6u);
  EXPECT_EQ(cache.forwarded(), 2u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(first[i].probs, second[i].probs);
  EXPECT_EQ(first[0].probs, first[2].probs);
  EXPECT_NE(cache.key(a), cache.key(b));
}

TEST(ScoreCache, SpillFileSurvivesRestart) {
  const auto spill = std::filesystem::temp_directory_path() / "mmxeval_cache_spill.jsonl";
  std::filesystem::remove(spill);
  Rng rng(13);
  const Tensor w = random_tensor(rng, {3}, -1, 1);
  const std::vector<Tensor> vols{random_tensor(rng, {3}), random_tensor(rng, {3})};
  std::vector<Prediction> fresh;
  {
    CountingOracle inner(w);
    CachingOracle cache(inner, spill);
    fresh = cache.predict(vols);
  }
  CountingOracle inner(w);
  CachingOracle cache(inner, spill);
  EXPECT_EQ(cache.entries(), 2u);
  const auto again = cache.predict(vols);
  EXPECT_EQ(inner.calls, 0u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(again[i].probs, fresh[i].probs);
}

}  // namespace
}  // namespace mmxeval
