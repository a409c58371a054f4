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


/// @file report.h
/// @brief Canonical JSON report and the files rendered from it.
///
/// report.json is the machine format; every other artifact (markdown
/// tables, per-method curve CSV and SVG, per-case CSV) is rendered from the
/// JSON document alone, so `mmxeval report` can regenerate them later. All
/// wall-clock data lives under keys named "timing".

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "mmxeval/evaluate.h"

namespace mmxeval {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json report_to_json(const EvaluationReport& report);

/// Copy without any "timing" member at any depth.
nlohmann::json strip_timing(const nlohmann::json& report);

/// Two-space indented dump with a trailing newline.
std::string canonical_dump(const nlohmann::json& doc);

/// "%.3f", or "NaN" when absent.
std::string format_value(const std::optional<double>& v, int digits = 3);

std::string render_markdown(const nlohmann::json& report);
std::string render_curve_csv(const nlohmann::json& report, const nlohmann::json& method);
std::string render_curve_svg(const nlohmann::json& report, const nlohmann::json& method);
std::string render_plausibility_csv(const nlohmann::json& report);
std::string render_mi_correlation_csv(const nlohmann::json& report);

struct ReportFormats {
  bool json = true;
  bool markdown = true;
  bool csv = true;
  bool svg = true;
};

/// Parses "json,md,csv,svg" (any subset). Throws ConfigError.
ReportFormats parse_report_formats(const std::string& text);

/// Writes the selected artifacts under `out_dir`. Throws DataError when the
/// directory cannot be written.
void write_report(const nlohmann::json& report, const std::filesystem::path& out_dir,
                  ReportFormats formats = {});

nlohmann::json load_report(const std::filesystem::path& path);

/// File-safe form of a method name.
std::string file_stem(const std::string& name);

}  // namespace mmxeval
