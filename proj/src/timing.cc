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


#include "mmxeval/timing.h"

namespace mmxeval {

void TimingLog::record(std::string label, double seconds, std::size_t cases) {
  if (!enabled_) return;
  StageTiming t{std::move(label), seconds, cases, std::nullopt};
  if (cases > 0) t.per_case_seconds = seconds / static_cast<double>(cases);
  stages_.push_back(std::move(t));
}

}  // namespace mmxeval
