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

#include <string>
#include <string_view>

#include "mmxeval/error.h"

namespace mmxeval {

/// Dataset-level performance functional.
enum class TaskMetric { kAccuracy, kRocAuc };

/// Replacement value for ablated locations.
enum class FillStrategy { kZero, kModalityMean };

enum class PostprocessMode { kPositiveClip, kAbsolute };

inline std::string to_string(TaskMetric m) {
  return m == TaskMetric::kAccuracy ? "accuracy" : "roc-auc";
}
inline std::string to_string(FillStrategy f) {
  return f == FillStrategy::kZero ? "zero" : "per-modality-mean";
}
inline std::string to_string(PostprocessMode p) {
  return p == PostprocessMode::kPositiveClip ? "positive-clip" : "absolute";
}

inline TaskMetric parse_task_metric(std::string_view s) {
  if (s == "accuracy") return TaskMetric::kAccuracy;
  if (s == "roc-auc" || s == "auc") return TaskMetric::kRocAuc;
  throw ConfigError("unknown task metric '" + std::string(s) + "'");
}
inline FillStrategy parse_fill(std::string_view s) {
  if (s == "zero") return FillStrategy::kZero;
  if (s == "per-modality-mean" || s == "mean") return FillStrategy::kModalityMean;
  throw ConfigError("unknown fill strategy '" + std::string(s) + "'");
}
inline PostprocessMode parse_postprocess(std::string_view s) {
  if (s == "positive-clip") return PostprocessMode::kPositiveClip;
  if (s == "absolute") return PostprocessMode::kAbsolute;
  throw ConfigError("unknown postprocess mode '" + std::string(s) + "'");
}

}  // namespace mmxeval
