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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string_view>

#include "mmxeval/error.h"
#include "mmxeval/rng.h"
#include "mmxeval/tensor_io.h"

namespace mmxeval {

void validate_probabilities(const Probabilities& probs, std::size_t n_classes) {
  if (probs.size() != n_classes) {
    throw OracleError("malformed response: expected " + std::to_string(n_classes) +
                      " probabilities, got " + std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw OracleError("malformed response: probabilities must be finite and >= 0");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kProbabilitySumTolerance) {
    throw OracleError("probability-sum violation: probabilities sum to " + std::to_string(sum));
  }
}

std::size_t argmax(const Probabilities& probs) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < probs.size(); ++k) {
    if (probs[k] > probs[best]) best = k;
  }
  return best;
}

std::vector<PredictionRecord> score(Oracle& oracle, std::span<const std::string> ids,
                                    std::span<const Tensor> volumes) {
  if (ids.size() != volumes.size()) throw OracleError("score: ids and volumes differ in length");
  const OracleInfo& info = oracle.info();
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    if (!info.input_shape.empty() && volumes[i].shape() != info.input_shape) {
      throw OracleError("shape mismatch for case '" + ids[i] + "': oracle expects " +
                        shape_to_string(info.input_shape) + ", got " +
                        shape_to_string(volumes[i].shape()));
    }
  }
  const std::size_t batch = std::max<std::size_t>(1, info.batch_size);
  std::vector<PredictionRecord> records;
  records.reserve(volumes.size());
  for (std::size_t start = 0; start < volumes.size(); start += batch) {
    const std::size_t count = std::min(batch, volumes.size() - start);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Prediction> out = oracle.predict(volumes.subspan(start, count));
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out.size() != count) {
      throw OracleError("malformed response: expected " + std::to_string(count) +
                        " predictions, got " + std::to_string(out.size()));
    }
    for (std::size_t j = 0; j < count; ++j) {
      validate_probabilities(out[j].probs, info.n_classes);
      PredictionRecord r;
      r.case_id = ids[start + j];
      r.predicted_class = argmax(out[j].probs);
      r.probs = std::move(out[j].probs);
      r.latency_seconds = elapsed / static_cast<double>(count);
      r.gen_seconds = out[j].gen_seconds;
      records.push_back(std::move(r));
    }
  }
  return records;
}

Probabilities two_class_softmax(double logit) {
  // Evaluated on the side that cannot overflow.
  if (logit >= 0.0) {
    const double e = std::exp(-logit);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
  }
  const double e = std::exp(logit);
  return {1.0 / (1.0 + e), e / (1.0 + e)};
}

LinearOracle::LinearOracle(Tensor weights, double bias)
    : weights_(std::move(weights)), bias_(bias) {
  if (weights_.empty()) throw ConfigError("linear oracle needs non-empty weights");
  if (!weights_.all_finite()) throw ConfigError("linear oracle weights must be finite");
  info_.id = "builtin-linear:" + content_hash(encode_tensor(weights_)).substr(0, 16) + ":" +
             std::to_string(bias_);
  info_.n_classes = 2;
  info_.input_shape = weights_.shape();
  info_.batch_size = 64;
}

double LinearOracle::logit(const Tensor& volume) const {
  if (volume.shape() != weights_.shape()) {
    throw OracleError("linear oracle: shape mismatch " + shape_to_string(weights_.shape()) +
                      " vs " + shape_to_string(volume.shape()));
  }
  double z = bias_;
  for (std::size_t i = 0; i < volume.size(); ++i) {
    z += static_cast<double>(weights_[i]) * static_cast<double>(volume[i]);
  }
  return z;
}

Probabilities LinearOracle::probabilities(const Tensor& volume) const {
  return two_class_softmax(logit(volume));
}

std::vector<Prediction> LinearOracle::predict(std::span<const Tensor> volumes) {
  std::vector<Prediction> out;
  out.reserve(volumes.size());
  for (const Tensor& v : volumes) out.push_back({probabilities(v), std::nullopt});
  return out;
}

Tensor LinearOracle::ground_truth_attribution() const {
  Tensor a = weights_;
  for (float& v : a.values()) v = std::fabs(v);
  return a;
}

ConstantOracle::ConstantOracle(Probabilities probs, Shape input_shape)
    : probs_(std::move(probs)) {
  validate_probabilities(probs_, probs_.size());
  info_.id = "builtin-constant";
  for (double p : probs_) info_.id += ":" + std::to_string(p);
  info_.n_classes = probs_.size();
  info_.input_shape = std::move(input_shape);
  info_.batch_size = 64;
}

std::vector<Prediction> ConstantOracle::predict(std::span<const Tensor> volumes) {
  return std::vector<Prediction>(volumes.size(), Prediction{probs_, std::nullopt});
}

ModalityGatedOracle::ModalityGatedOracle(Shape input_shape, std::vector<std::string> modalities,
                                         std::size_t discriminative_modality, ShapeRule rule)
    : modality_(discriminative_modality), rule_(rule) {
  if (input_shape.size() != 3) {
    throw ConfigError("gated oracle expects [M, H, W] volumes, got " +
                      shape_to_string(input_shape));
  }
  if (modality_ >= input_shape[0]) {
    throw ConfigError("gated oracle: discriminative modality index out of range");
  }
  if (!modalities.empty() && modalities.size() != input_shape[0]) {
    throw ConfigError("gated oracle: modality names do not match the input shape");
  }
  info_.id = "builtin-gated:" +
             (modalities.empty() ? std::to_string(modality_) : modalities[modality_]);
  info_.n_classes = 2;
  info_.input_shape = std::move(input_shape);
  info_.modalities = std::move(modalities);
  info_.batch_size = 64;
}

Probabilities ModalityGatedOracle::probabilities(const Tensor& volume) const {
  if (volume.shape() != info_.input_shape) {
    throw OracleError("gated oracle: shape mismatch " + shape_to_string(volume.shape()));
  }
  const ShapeStats stats = shape_stats_above(volume.modality(modality_), info_.input_shape[1],
                                             info_.input_shape[2], rule_.intensity_threshold);
  const double p1 = rule_.irregular_probability(stats);
  return {1.0 - p1, p1};
}

std::vector<Prediction> ModalityGatedOracle::predict(std::span<const Tensor> volumes) {
  std::vector<Prediction> out;
  out.reserve(volumes.size());
  for (const Tensor& v : volumes) out.push_back({probabilities(v), std::nullopt});
  return out;
}

}  // namespace mmxeval
