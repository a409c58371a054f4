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

#include "mmxeval/synthgen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "mmxeval/error.h"
#include "mmxeval/rng.h"
#include "mmxeval/tensor_io.h"

namespace mmxeval {
namespace {

constexpr double kPi = std::numbers::pi;

// Radial contour r(theta) = r0 * (1 + sum_k a_k cos(k theta + phase_k)).
struct Contour {
  double r0 = 0.0;
  std::vector<int> order;
  std::vector<double> amplitude;
  std::vector<double> phase;

  double radius(double theta) const {
    double s = 1.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      s += amplitude[i] * std::cos(order[i] * theta + phase[i]);
    }
    return r0 * std::max(s, 0.25);
  }
};

Contour draw_contour(Rng& rng, double r0, int shape_class) {
  Contour c;
  c.r0 = r0;
  if (shape_class == 0) {
    c.order = {2};
    c.amplitude = {rng.uniform(0.0, 0.06)};
    c.phase = {rng.uniform(0.0, 2.0 * kPi)};
  } else {
    for (int k = 3; k <= 7; ++k) {
      c.order.push_back(k);
      c.amplitude.push_back(rng.uniform(0.08, 0.16));
      c.phase.push_back(rng.uniform(0.0, 2.0 * kPi));
    }
  }
  return c;
}

std::string case_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "case-%04zu", index);
  return buf;
}

std::string format_alignment(const std::optional<double>& a) {
  if (!a) return "none";
  std::ostringstream os;
  os << *a;
  return os.str();
}

}  // namespace

void SynthConfig::validate() const {
  if (n == 0) throw ConfigError("synth: n must be positive");
  if (std::min(height, width) < kMinSynthSize) {
    throw ConfigError("synth: image too small to place a tumor (need at least " +
                      std::to_string(kMinSynthSize) + " pixels per side)");
  }
  if (modalities.empty()) throw ConfigError("synth: at least one modality is required");
  if (alignment.size() != modalities.size()) {
    throw ConfigError("synth: one alignment entry per modality is required");
  }
  for (const auto& a : alignment) {
    if (a && !(*a >= 0.0 && *a <= 1.0)) throw ConfigError("synth: alignment must be in [0, 1]");
  }
  if (!(mask_fraction >= 0.0 && mask_fraction <= 1.0)) {
    throw ConfigError("synth: mask_fraction must be in [0, 1]");
  }
}

std::vector<int> balanced_labels(std::size_t n, std::uint64_t seed) {
  std::vector<int> labels(n, 0);
  for (std::size_t i = n / 2; i < n; ++i) labels[i] = 1;
  Rng rng(derive_seed(seed, {0x6c6162656cULL}));
  rng.shuffle(std::span<int>(labels));
  return labels;
}

SynthCase generate_case(const SynthConfig& config, std::size_t index, int label) {
  config.validate();
  if (label != 0 && label != 1) throw ConfigError("synth: label must be 0 or 1");
  const std::size_t M = config.modalities.size();
  const std::size_t H = config.height, W = config.width;
  const double h = static_cast<double>(H), w = static_cast<double>(W);
  Rng rng(derive_seed(config.seed, {index}));

  SynthCase out;
  out.id = case_id(index);
  out.label = label;
  out.volume = Tensor({M, H, W});
  out.masks = Tensor({M, H, W});

  // Brain ellipse and the tumor site are shared by all modalities.
  const double cy = 0.5 * h + rng.uniform(-0.03, 0.03) * h;
  const double cx = 0.5 * w + rng.uniform(-0.03, 0.03) * w;
  const double ay = rng.uniform(0.36, 0.42) * h;
  const double ax = rng.uniform(0.30, 0.36) * w;
  const double r0 = std::max(5.0, rng.uniform(0.075, 0.10) * std::min(h, w));
  const double ty = cy + rng.uniform(-0.12, 0.12) * h;
  const double tx = cx + rng.uniform(-0.10, 0.10) * w;

  for (std::size_t m = 0; m < M; ++m) {
    int shape;
    if (config.alignment[m]) {
      const bool aligned = rng.bernoulli(*config.alignment[m]);
      shape = aligned ? label : 1 - label;
    } else {
      shape = rng.bernoulli(0.5) ? 1 : 0;
    }
    out.shape_class.push_back(shape);
    out.aligned.push_back(shape == label);

    const Contour contour = draw_contour(rng, r0, shape);
    const double base = rng.uniform(0.25, 0.45);
    const double fy = rng.uniform(2.0, 6.0) * 2.0 * kPi / h;
    const double fx = rng.uniform(2.0, 6.0) * 2.0 * kPi / w;
    const double py = rng.uniform(0.0, 2.0 * kPi);
    const double px = rng.uniform(0.0, 2.0 * kPi);

    std::span<float> slab = out.volume.modality(m);
    std::span<float> mask = out.masks.modality(m);
    for (std::size_t y = 0; y < H; ++y) {
      for (std::size_t x = 0; x < W; ++x) {
        const std::size_t i = y * W + x;
        const double dy = static_cast<double>(y) - ty;
        const double dx = static_cast<double>(x) - tx;
        const double dist = std::hypot(dy, dx);
        const bool tumor = dist <= contour.radius(std::atan2(dy, dx));
        // Draws happen for every pixel so the stream does not depend on shape.
        const double tumor_value = rng.uniform(0.8, 1.0);
        const double noise = rng.uniform(-0.05, 0.05);
        if (tumor) {
          slab[i] = static_cast<float>(tumor_value);
          mask[i] = 1.0f;
          continue;
        }
        if (!config.background) continue;
        const double ey = (static_cast<double>(y) - cy) / ay;
        const double ex = (static_cast<double>(x) - cx) / ax;
        const double rho2 = ey * ey + ex * ex;
        if (rho2 > 1.0) continue;
        const double texture = 0.12 * std::sin(fy * static_cast<double>(y) + py) *
                                   std::cos(fx * static_cast<double>(x) + px) +
                               0.08 * (1.0 - rho2);
        slab[i] = static_cast<float>(std::clamp(base + texture + noise, 0.05, 0.65));
      }
    }
  }
  return out;
}

std::vector<SynthCase> generate_cases(const SynthConfig& config) {
  config.validate();
  const std::vector<int> labels = balanced_labels(config.n, config.seed);
  std::vector<SynthCase> cases;
  cases.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) cases.push_back(generate_case(config, i, labels[i]));
  return cases;
}

namespace {

std::optional<std::size_t> find_modality(const std::vector<std::string>& names, const char* name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

SynthConfig probe_config(const SynthConfig& base, double t1c, double flair) {
  SynthConfig probe = base;
  probe.background = false;
  probe.raters = 0;
  const auto i_t1c = find_modality(base.modalities, "T1C");
  const auto i_flair = find_modality(base.modalities, "FLAIR");
  if (!i_t1c || !i_flair) throw ConfigError("synth: probe sets need T1C and FLAIR modalities");
  probe.alignment[*i_t1c] = t1c;
  probe.alignment[*i_flair] = flair;
  return probe;
}

}  // namespace

SynthConfig tic_probe_config(const SynthConfig& base) { return probe_config(base, 1.0, 0.0); }
SynthConfig flair_probe_config(const SynthConfig& base) { return probe_config(base, 0.0, 1.0); }

DatasetManifest write_dataset(const SynthConfig& config, const std::filesystem::path& out_dir,
                              const std::string& name) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto i_t1c = find_modality(config.modalities, "T1C");

  DatasetManifest manifest;
  manifest.name = name;
  manifest.modalities = config.modalities;
  manifest.n_classes = 2;
  manifest.task_metric = TaskMetric::kAccuracy;
  manifest.base_dir = out_dir;
  manifest.metadata["generator"] = "mmxeval synth-gen";
  manifest.metadata["seed"] = std::to_string(config.seed);
  manifest.metadata["size"] = std::to_string(config.height) + "x" + std::to_string(config.width);
  manifest.metadata["class_0"] = "round";
  manifest.metadata["class_1"] = "irregular";
  manifest.metadata["background"] = config.background ? "elliptical textured field" : "none";
  manifest.metadata["tumor_threshold"] = "0.75";
  manifest.metadata["mask_fraction"] = format_alignment(config.mask_fraction);
  std::string align;
  for (std::size_t m = 0; m < config.modalities.size(); ++m) {
    if (m) align += ",";
    align += config.modalities[m] + ":" + format_alignment(config.alignment[m]);
  }
  manifest.metadata["alignment"] = align;
  manifest.metadata["unaligned_modalities"] =
      "tumor blob with label-independent shape (round or irregular, 50/50)";
  if (config.raters > 0) manifest.rating_scale = RatingScale{1, 5};

  for (const SynthCase& c : generate_cases(config)) {
    CaseRecord rec;
    rec.id = c.id;
    rec.label = c.label;
    rec.volume_uri = "volumes/" + c.id + ".mmxt";
    write_tensor(out_dir / rec.volume_uri, c.volume);
    Rng mask_rng(derive_seed(config.seed, {0x6d61736bULL, manifest.cases.size()}));
    if (config.mask_fraction >= 1.0 || mask_rng.bernoulli(config.mask_fraction)) {
      rec.mask_uri = "masks/" + c.id + ".mmxt";
      write_tensor(out_dir / *rec.mask_uri, c.masks);
    }

    const Shape& shape = c.volume.shape();
    const std::size_t stride = c.volume.modality_stride();
    auto add_heatmap = [&](const std::string& method, const Tensor& t) {
      const std::string uri = "heatmaps/" + method + "/" + c.id + ".mmxt";
      write_tensor(out_dir / uri, t);
      rec.heatmaps[method] = HeatmapRef{uri, std::nullopt};
    };

    Tensor perfect(shape);
    if (i_t1c) {
      std::copy_n(c.masks.modality(*i_t1c).begin(), stride, perfect.modality(*i_t1c).begin());
    }
    add_heatmap(kHeatmapPerfect, perfect);
    add_heatmap(kHeatmapAllTumors, c.masks);
    Tensor non_disc(shape);
    for (std::size_t m = 0; m < config.modalities.size(); ++m) {
      if (config.alignment[m]) continue;
      std::copy_n(c.masks.modality(m).begin(), stride, non_disc.modality(m).begin());
    }
    add_heatmap(kHeatmapNonDiscriminative, non_disc);
    Tensor noise(shape);
    Rng noise_rng(derive_seed(config.seed, {0x6e6f697365ULL, manifest.cases.size()}));
    for (float& v : noise.values()) v = static_cast<float>(noise_rng.uniform());
    add_heatmap(kHeatmapNoise, noise);

    if (config.raters > 0) {
      Rng rate_rng(derive_seed(config.seed, {0x72617465ULL, manifest.cases.size()}));
      const double latent = rate_rng.uniform(1.0, 5.0);
      for (std::size_t r = 0; r < config.raters; ++r) {
        const double score = std::clamp(std::round(latent + 0.9 * rate_rng.normal()), 1.0, 5.0);
        rec.ratings["rater-" + std::to_string(r + 1)] = score;
      }
    }
    manifest.cases.push_back(std::move(rec));
  }
  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

SynthSuite write_synthetic_suite(const SynthConfig& config, const std::filesystem::path& out_dir) {
  SynthSuite suite{out_dir / "dataset" / "manifest.json", out_dir / "probe_tic" / "manifest.json",
                   out_dir / "probe_flair" / "manifest.json"};
  write_dataset(config, out_dir / "dataset", "synthetic");
  SynthConfig tic = tic_probe_config(config);
  tic.seed = derive_seed(config.seed, {0x746963ULL});
  write_dataset(tic, out_dir / "probe_tic", "synthetic-probe-tic");
  SynthConfig flair = flair_probe_config(config);
  flair.seed = derive_seed(config.seed, {0x666c616972ULL});
  write_dataset(flair, out_dir / "probe_flair", "synthetic-probe-flair");
  return suite;
}

std::vector<double> ground_truth_mi(const std::vector<std::string>& modalities, double acc_t1c,
                                    double acc_flair, std::optional<double> chance_threshold) {
  for (double a : {acc_t1c, acc_flair}) {
    if (!(a >= 0.0 && a <= 1.0)) throw DataError("ground_truth_mi: accuracies must be in [0, 1]");
  }
  const auto i_t1c = find_modality(modalities, "T1C");
  const auto i_flair = find_modality(modalities, "FLAIR");
  if (!i_t1c || !i_flair) throw DataError("ground_truth_mi: modalities must include T1C and FLAIR");
  auto cut = [&](double a) { return chance_threshold && a <= *chance_threshold ? 0.0 : a; };
  std::vector<double> phi(modalities.size(), 0.0);
  phi[*i_t1c] = cut(acc_t1c);
  phi[*i_flair] = cut(acc_flair);
  return phi;
}

}  // namespace mmxeval
