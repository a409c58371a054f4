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

/// @file synthgen.h
/// @brief Procedural multi-modal tumor images with known modality importance.
///
/// Every case is a [M, H, W] volume: an elliptical textured "brain" with one
/// tumor blob per modality. Class 0 tumors are round, class 1 tumors are
/// irregular. A modality's blob takes the label's shape with its alignment
/// probability and the other class's shape otherwise; a modality without an
/// alignment probability draws its shape independently of the label.
///
/// Tumor pixels are brighter than 0.75 and the background never is, so the
/// per-modality masks are exactly the pixels above that threshold.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmxeval/manifest.h"
#include "mmxeval/tensor.h"

namespace mmxeval {

inline constexpr std::size_t kMinSynthSize = 32;

struct SynthConfig {
  std::size_t n = 100;
  std::size_t height = 256;
  std::size_t width = 256;
  std::uint64_t seed = 0;
  std::vector<std::string> modalities{"T1C", "FLAIR", "T1", "T2"};
  /// Per modality; std::nullopt means the shape carries no label information.
  std::vector<std::optional<double>> alignment{1.0, 0.7, std::nullopt, std::nullopt};
  /// Without background only the tumors are drawn.
  bool background = true;
  /// Simulated raters attached to every case (0 for none).
  std::size_t raters = 3;
  /// Share of cases whose manifest record carries the mask.
  double mask_fraction = 1.0;

  /// Throws ConfigError.
  void validate() const;
};

struct SynthCase {
  std::string id;
  int label = 0;
  Tensor volume;
  /// Binary [M, H, W] tumor masks.
  Tensor masks;
  /// Rendered shape class per modality.
  std::vector<int> shape_class;
  std::vector<bool> aligned;
};

/// Exactly floor(n/2) or ceil(n/2) cases per class, in seeded order.
std::vector<int> balanced_labels(std::size_t n, std::uint64_t seed);

SynthCase generate_case(const SynthConfig& config, std::size_t index, int label);
std::vector<SynthCase> generate_cases(const SynthConfig& config);

/// Probe variants of `base`: shape follows the label on T1C and the other
/// class on FLAIR (or the reverse), no background.
SynthConfig tic_probe_config(const SynthConfig& base);
SynthConfig flair_probe_config(const SynthConfig& base);

/// Reference heatmaps written with every generated dataset.
inline constexpr const char* kHeatmapPerfect = "oracle_perfect";
inline constexpr const char* kHeatmapAllTumors = "all_tumors";
inline constexpr const char* kHeatmapNonDiscriminative = "non_discriminative";
inline constexpr const char* kHeatmapNoise = "uniform_noise";

/// Writes containers plus manifest.json under `out_dir` and returns the
/// manifest.
DatasetManifest write_dataset(const SynthConfig& config, const std::filesystem::path& out_dir,
                              const std::string& name);

struct SynthSuite {
  std::filesystem::path dataset;
  std::filesystem::path probe_tic;
  std::filesystem::path probe_flair;
};

/// Dataset plus both probe sets under `out_dir`.
SynthSuite write_synthetic_suite(const SynthConfig& config, const std::filesystem::path& out_dir);

/// phi on the manifest's modality axis: T1C and FLAIR get their probe
/// accuracies, everything else 0. With a chance threshold, accuracies at or
/// below it count as 0.
std::vector<double> ground_truth_mi(const std::vector<std::string>& modalities, double acc_t1c,
                                    double acc_flair,
                                    std::optional<double> chance_threshold = std::nullopt);

}  // namespace mmxeval
