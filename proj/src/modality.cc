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

#include <algorithm>
#include <bit>

#include "mmxeval/ablation.h"
#include "mmxeval/error.h"
#include "mmxeval/heatmap_ops.h"
#include "mmxeval/performance.h"
#include "mmxeval/stats.h"

namespace mmxeval {

SubsetTable::SubsetTable(std::size_t modality_count) : modality_count_(modality_count) {
  if (modality_count == 0 || modality_count > kMaxShapleyModalities) {
    throw DataError("subset table: modality count must be in 1.." +
                    std::to_string(kMaxShapleyModalities));
  }
  values_.resize(std::size_t{1} << modality_count);
}

SubsetTable::SubsetTable(std::size_t modality_count, std::vector<double> values)
    : SubsetTable(modality_count) {
  if (values.size() != values_.size()) {
    throw DataError("incomplete table: expected " + std::to_string(values_.size()) +
                    " subset values, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) values_[i] = values[i];
}

void SubsetTable::set(std::uint32_t subset, double value) { values_.at(subset) = value; }

double SubsetTable::at(std::uint32_t subset) const {
  const auto& v = values_.at(subset);
  if (!v) throw DataError("incomplete table: no value for subset " + std::to_string(subset));
  return *v;
}

bool SubsetTable::complete() const {
  for (const auto& v : values_) {
    if (!v) return false;
  }
  return true;
}

double subset_performance(Oracle& oracle, std::span<const EvalCase> cases, std::uint32_t subset,
                          TaskMetric metric, FillStrategy fill) {
  if (cases.empty()) throw DataError("subset_performance needs at least one case");
  std::vector<std::string> ids;
  std::vector<Tensor> ablated;
  std::vector<int> labels;
  for (const auto& c : cases) {
    ids.push_back(c.id);
    labels.push_back(c.label);
    const std::size_t m = c.volume.modality_count();
    if (m > kMaxShapleyModalities || (subset >> m) != 0) {
      throw DataError("subset_performance: subset names a missing modality");
    }
    ablated.push_back(ablate(c.volume, AblationSpec{ModalitySubset::from_bits(subset, m), fill}));
  }
  return performance(score(oracle, ids, ablated), labels, metric);
}

SubsetTable compute_subset_table(Oracle& oracle, std::span<const EvalCase> cases,
                                 TaskMetric metric, FillStrategy fill) {
  if (cases.empty()) throw DataError("compute_subset_table needs at least one case");
  SubsetTable table(cases.front().volume.modality_count());
  for (std::uint32_t c = 0; c < table.size(); ++c) {
    table.set(c, subset_performance(oracle, cases, c, metric, fill));
  }
  return table;
}

std::vector<double> modality_shapley(const SubsetTable& table) {
  if (!table.complete()) throw DataError("incomplete table: every subset needs a value");
  const std::size_t M = table.modality_count();
  // weight[s] = s! (M - s - 1)! / M!  =  1 / (M * C(M - 1, s))
  std::vector<double> weight(M);
  double binom = 1.0;
  for (std::size_t s = 0; s < M; ++s) {
    weight[s] = 1.0 / (static_cast<double>(M) * binom);
    binom = binom * static_cast<double>(M - 1 - s) / static_cast<double>(s + 1);
  }
  std::vector<double> phi(M, 0.0);
  std::vector<double> terms;
  terms.reserve(table.size() / 2);
  for (std::size_t m = 0; m < M; ++m) {
    const std::uint32_t bit = 1u << m;
    terms.clear();
    for (std::uint32_t c = 0; c < table.size(); ++c) {
      if (c & bit) continue;
      terms.push_back(weight[std::popcount(c)] * (table.at(c | bit) - table.at(c)));
    }
    // Sorted summation: equal multisets of terms give bit-equal phi.
    std::sort(terms.begin(), terms.end());
    for (double t : terms) phi[m] += t;
  }
  return phi;
}

ModalityImportance modality_importance(Oracle& oracle, std::span<const EvalCase> cases,
                                       TaskMetric metric, FillStrategy fill) {
  ModalityImportance mi;
  mi.v_table = compute_subset_table(oracle, cases, metric, fill);
  mi.phi = modality_shapley(mi.v_table);
  mi.metric = metric;
  return mi;
}

std::optional<double> mi_correlation(const Tensor& heatmap, std::span<const double> phi) {
  if (phi.size() < 2) throw DataError("mi_correlation needs at least 2 modalities");
  if (heatmap.modality_count() != phi.size()) {
    throw DataError("mi_correlation: heatmap has " + std::to_string(heatmap.modality_count()) +
                    " modalities, phi has " + std::to_string(phi.size()));
  }
  const std::vector<double> estimated = modality_positive_sum(heatmap);
  return kendall_tau_b(phi, estimated);
}

}  // namespace mmxeval
