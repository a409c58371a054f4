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


/// @file timing.h
/// @brief Wall-clock instrumentation of evaluation stages.

#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmxeval {

struct StageTiming {
  std::string label;
  double seconds = 0.0;
  std::size_t cases = 0;
  /// seconds / cases when cases > 0.
  std::optional<double> per_case_seconds;
};

/// Records monotonic-clock durations. A disabled log runs the work without
/// recording anything.
class TimingLog {
 public:
  explicit TimingLog(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  const std::vector<StageTiming>& stages() const { return stages_; }

  void record(std::string label, double seconds, std::size_t cases = 0);

  template <typename Fn>
  decltype(auto) time_stage(std::string label, std::size_t cases, Fn&& work) {
    const auto start = std::chrono::steady_clock::now();
    struct Recorder {
      TimingLog& log;
      std::string label;
      std::size_t cases;
      std::chrono::steady_clock::time_point start;
      ~Recorder() {
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
        log.record(std::move(label), d.count(), cases);
      }
    } recorder{*this, std::move(label), cases, start};
    return std::forward<Fn>(work)();
  }

 private:
  bool enabled_;
  std::vector<StageTiming> stages_;
};

}  // namespace mmxeval
