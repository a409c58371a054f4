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

/// @file oracle.h
/// @brief The model under test, seen only through class probabilities.
///
/// All metric code talks to an `Oracle`. Concrete oracles are the built-in
/// glass-box models below and `ProtocolOracle` (protocol_oracle.h), which
/// forwards to an external process over the line-delimited JSON protocol.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmxeval/shape_stats.h"
#include "mmxeval/tensor.h"

namespace mmxeval {

using Probabilities = std::vector<double>;

inline constexpr double kProbabilitySumTolerance = 1e-5;

struct OracleInfo {
  /// Stable identifier; part of the score-cache key.
  std::string id;
  std::size_t n_classes = 2;
  /// Expected volume shape; empty accepts any shape.
  Shape input_shape;
  std::vector<std::string> modalities;
  std::size_t batch_size = 1;
};

struct Prediction {
  Probabilities probs;
  /// Attribution generation time, when the endpoint reports one.
  std::optional<double> gen_seconds;
};

struct PredictionRecord {
  std::string case_id;
  Probabilities probs;
  std::size_t predicted_class = 0;
  double latency_seconds = 0.0;
  std::optional<double> gen_seconds;
};

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual const OracleInfo& info() const = 0;
  /// One prediction per volume, in input order.
  virtual std::vector<Prediction> predict(std::span<const Tensor> volumes) = 0;
};

/// Throws OracleError unless `probs` has `n_classes` nonnegative finite
/// entries summing to 1 within kProbabilitySumTolerance.
void validate_probabilities(const Probabilities& probs, std::size_t n_classes);

/// Index of the largest probability; ties go to the lowest class index.
std::size_t argmax(const Probabilities& probs);

/// Scores `volumes` in batches of the oracle's batch size and returns one
/// record per volume in request order.
std::vector<PredictionRecord> score(Oracle& oracle, std::span<const std::string> ids,
                                    std::span<const Tensor> volumes);

/// softmax([0, logit]).
Probabilities two_class_softmax(double logit);

/// logit = sum(w * x) + b; the ground-truth attribution is |w|.
class LinearOracle final : public Oracle {
 public:
  LinearOracle(Tensor weights, double bias);

  const OracleInfo& info() const override { return info_; }
  std::vector<Prediction> predict(std::span<const Tensor> volumes) override;

  double logit(const Tensor& volume) const;
  Probabilities probabilities(const Tensor& volume) const;
  Tensor ground_truth_attribution() const;
  const Tensor& weights() const { return weights_; }

 private:
  Tensor weights_;
  double bias_;
  OracleInfo info_;
};

/// Ignores its input and always returns the same distribution.
class ConstantOracle final : public Oracle {
 public:
  ConstantOracle(Probabilities probs, Shape input_shape = {});

  const OracleInfo& info() const override { return info_; }
  std::vector<Prediction> predict(std::span<const Tensor> volumes) override;

 private:
  Probabilities probs_;
  OracleInfo info_;
};

/// Two-class shape classifier that looks at a single modality of a
/// [M, H, W] volume: pixels brighter than the rule's intensity threshold
/// form the lesion, whose compactness decides round (class 0) versus
/// irregular (class 1). Every other modality is ignored, so the true
/// modality importance is one-hot. An empty lesion yields [0.5, 0.5].
class ModalityGatedOracle final : public Oracle {
 public:
  ModalityGatedOracle(Shape input_shape, std::vector<std::string> modalities,
                      std::size_t discriminative_modality, ShapeRule rule = {});

  const OracleInfo& info() const override { return info_; }
  std::vector<Prediction> predict(std::span<const Tensor> volumes) override;

  Probabilities probabilities(const Tensor& volume) const;
  std::size_t discriminative_modality() const { return modality_; }

 private:
  std::size_t modality_;
  ShapeRule rule_;
  OracleInfo info_;
};

}  // namespace mmxeval
