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

#include "mmxeval/performance.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "mmxeval/error.h"

namespace mmxeval {

double accuracy(std::span<const PredictionRecord> records, std::span<const int> labels) {
  if (records.empty()) throw UndefinedError("accuracy undefined: no records");
  if (records.size() != labels.size()) throw DataError("accuracy: records/labels length mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (labels[i] >= 0 && records[i].predicted_class == static_cast<std::size_t>(labels[i])) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("roc_auc: scores/labels length mismatch");
  std::size_t n_pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw UndefinedError("AUC undefined: labels must be binary");
    n_pos += l == 1;
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedError("AUC undefined: labels contain a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double performance(std::span<const PredictionRecord> records, std::span<const int> labels,
                   TaskMetric metric) {
  if (metric == TaskMetric::kAccuracy) return accuracy(records, labels);
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) {
    if (r.probs.size() != 2) throw UndefinedError("AUC undefined: oracle is not binary");
    scores.push_back(r.probs[1]);
  }
  return roc_auc(scores, labels);
}

}  // namespace mmxeval
