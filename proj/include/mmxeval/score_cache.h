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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>

#include "mmxeval/oracle.h"

namespace mmxeval {

/// Content-addressed memo in front of another oracle. The key is the hash of
/// the encoded volume together with the inner oracle's id, so identical
/// ablated inputs are scored once.
///
/// With a spill file, entries are loaded on construction and appended by
/// flush() (also called from the destructor).
class CachingOracle final : public Oracle {
 public:
  explicit CachingOracle(Oracle& inner,
                         std::optional<std::filesystem::path> spill_file = std::nullopt);
  ~CachingOracle() override;

  CachingOracle(const CachingOracle&) = delete;
  CachingOracle& operator=(const CachingOracle&) = delete;

  const OracleInfo& info() const override { return inner_.info(); }
  std::vector<Prediction> predict(std::span<const Tensor> volumes) override;

  /// Volumes asked for, before caching.
  std::size_t requested() const { return requested_; }
  /// Volumes forwarded to the inner oracle.
  std::size_t forwarded() const { return forwarded_; }
  std::size_t entries() const { return cache_.size(); }

  void flush();

  std::string key(const Tensor& volume) const;

 private:
  Oracle& inner_;
  std::optional<std::filesystem::path> spill_file_;
  std::unordered_map<std::string, Prediction> cache_;
  std::vector<std::string> unsaved_;
  std::size_t requested_ = 0;
  std::size_t forwarded_ = 0;
};

}  // namespace mmxeval
