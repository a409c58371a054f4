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

#include <span>

#include "mmxeval/oracle.h"
#include "mmxeval/types.h"

namespace mmxeval {

/// Fraction of records whose predicted class equals the label.
double accuracy(std::span<const PredictionRecord> records, std::span<const int> labels);

/// P(score_pos > score_neg) + 0.5 * P(tie) over all positive/negative
/// pairs, computed from midranks. Labels must be 0/1 with both present;
/// otherwise throws UndefinedError("AUC undefined ...").
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Dataset performance; roc-auc scores each record by its class-1
/// probability.
double performance(std::span<const PredictionRecord> records, std::span<const int> labels,
                   TaskMetric metric);

}  // namespace mmxeval
