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

#include "mmxeval/score_cache.h"

#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "mmxeval/error.h"
#include "mmxeval/rng.h"
#include "mmxeval/tensor_io.h"

namespace mmxeval {

CachingOracle::CachingOracle(Oracle& inner, std::optional<std::filesystem::path> spill_file)
    : inner_(inner), spill_file_(std::move(spill_file)) {
  if (!spill_file_ || !std::filesystem::exists(*spill_file_)) return;
  std::ifstream in(*spill_file_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      Prediction p;
      p.probs = doc.at("probs").get<Probabilities>();
      if (doc.contains("gen_seconds")) p.gen_seconds = doc["gen_seconds"].get<double>();
      cache_.emplace(doc.at("key").get<std::string>(), std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(spill_file_->string() + ": corrupt score cache line: " + e.what());
    }
  }
}

CachingOracle::~CachingOracle() {
  try {
    flush();
  } catch (...) {
  }
}

std::string CachingOracle::key(const Tensor& volume) const {
  return content_hash(encode_tensor(volume)) + "|" + inner_.info().id;
}

std::vector<Prediction> CachingOracle::predict(std::span<const Tensor> volumes) {
  requested_ += volumes.size();
  std::vector<std::string> keys;
  keys.reserve(volumes.size());
  std::vector<Tensor> misses;
  std::vector<std::string> miss_keys;
  std::unordered_set<std::string> pending;
  for (const Tensor& v : volumes) {
    keys.push_back(key(v));
    if (!cache_.contains(keys.back()) && pending.insert(keys.back()).second) {
      misses.push_back(v);
      miss_keys.push_back(keys.back());
    }
  }
  if (!misses.empty()) {
    std::vector<Prediction> fresh = inner_.predict(misses);
    if (fresh.size() != misses.size()) {
      throw OracleError("malformed response: prediction count mismatch");
    }
    forwarded_ += misses.size();
    for (std::size_t i = 0; i < misses.size(); ++i) {
      validate_probabilities(fresh[i].probs, inner_.info().n_classes);
      cache_.emplace(miss_keys[i], std::move(fresh[i]));
      if (spill_file_) unsaved_.push_back(miss_keys[i]);
    }
  }
  std::vector<Prediction> out;
  out.reserve(volumes.size());
  for (const auto& k : keys) out.push_back(cache_.at(k));
  return out;
}

void CachingOracle::flush() {
  if (!spill_file_ || unsaved_.empty()) return;
  if (spill_file_->has_parent_path()) std::filesystem::create_directories(spill_file_->parent_path());
  std::ofstream out(*spill_file_, std::ios::app);
  if (!out) throw DataError(spill_file_->string() + ": cannot append to score cache");
  for (const auto& k : unsaved_) {
    const Prediction& p = cache_.at(k);
    nlohmann::json line{{"key", k}, {"probs", p.probs}};
    if (p.gen_seconds) line["gen_seconds"] = *p.gen_seconds;
    out << line.dump() << '\n';
  }
  unsaved_.clear();
}

}  // namespace mmxeval
