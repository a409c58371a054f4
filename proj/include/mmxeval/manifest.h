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

/// @file manifest.h
/// @brief Dataset manifest: one JSON document describing every case of a
/// dataset. The schema is documented in docs/formats.md.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmxeval/types.h"

namespace mmxeval {

inline constexpr int kManifestSchemaVersion = 1;

struct HeatmapRef {
  std::string uri;
  /// Attribution generation time reported by whoever produced the heatmap.
  std::optional<double> gen_seconds;
};

struct CaseRecord {
  std::string id;
  std::string volume_uri;
  int label = 0;
  std::optional<std::string> mask_uri;
  std::map<std::string, HeatmapRef> heatmaps;
  /// rater id -> ordinal score
  std::map<std::string, double> ratings;
};

struct RatingScale {
  double min = 1;
  double max = 5;
};

struct DatasetManifest {
  int schema_version = kManifestSchemaVersion;
  std::string name;
  std::vector<std::string> modalities;
  std::size_t n_classes = 2;
  TaskMetric task_metric = TaskMetric::kAccuracy;
  std::optional<RatingScale> rating_scale;
  std::map<std::string, std::string> metadata;
  std::vector<CaseRecord> cases;

  /// Directory relative URIs are resolved against.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& uri) const;
  /// Sorted union of heatmap method names over all cases.
  std::vector<std::string> method_names() const;
  /// Index of a modality by name; throws DataError when absent.
  std::size_t modality_index(std::string_view name) const;
};

/// Parses and validates a manifest document. With `check_files`, every
/// referenced URI must exist relative to `base_dir`.
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                               bool check_files = true);

DatasetManifest load_manifest(const std::filesystem::path& path);

std::string manifest_to_json(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace mmxeval
