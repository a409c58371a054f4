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


#include "mmxeval/evaluate.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "mmxeval/error.h"
#include "mmxeval/heatmap_ops.h"
#include "mmxeval/performance.h"
#include "mmxeval/plausibility.h"
#include "mmxeval/protocol_oracle.h"
#include "mmxeval/rng.h"
#include "mmxeval/score_cache.h"
#include "mmxeval/synthgen.h"
#include "mmxeval/tensor_io.h"

namespace mmxeval {
namespace {

namespace fs = std::filesystem;

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content_hash(bytes);
}

std::vector<std::string> select_methods(const RunConfig& config, const DatasetManifest& manifest) {
  const std::vector<std::string> available = manifest.method_names();
  if (config.methods.empty()) return available;
  for (const auto& m : config.methods) {
    if (std::find(available.begin(), available.end(), m) == available.end()) {
      throw ConfigError("method '" + m + "' has no heatmaps in the manifest");
    }
  }
  return config.methods;
}

std::vector<double> mean_vector(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out(rows.front().size(), 0.0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += r[i];
  }
  for (double& v : out) v /= static_cast<double>(rows.size());
  return out;
}

double probe_accuracy(Oracle& oracle, const fs::path& manifest_path) {
  const DatasetManifest probe = load_manifest(manifest_path);
  const std::vector<EvalCase> cases = load_cases(probe);
  std::vector<std::string> ids;
  std::vector<Tensor> volumes;
  std::vector<int> labels;
  for (const auto& c : cases) {
    ids.push_back(c.id);
    volumes.push_back(c.volume);
    labels.push_back(c.label);
  }
  return performance(score(oracle, ids, volumes), labels, TaskMetric::kAccuracy);
}

AgreementResult compute_agreement(const DatasetManifest& manifest, AlphaLevel level) {
  AgreementResult r;
  r.level = level;
  std::set<std::string> rater_set;
  for (const auto& c : manifest.cases) {
    for (const auto& [rater, _] : c.ratings) rater_set.insert(rater);
  }
  const std::vector<std::string> raters(rater_set.begin(), rater_set.end());
  r.raters = raters.size();
  RatingMatrix matrix;
  bool complete = true;
  for (const auto& c : manifest.cases) {
    if (c.ratings.empty()) continue;
    std::vector<std::optional<double>> row;
    for (const auto& rater : raters) {
      const auto it = c.ratings.find(rater);
      if (it == c.ratings.end()) {
        row.emplace_back();
        complete = false;
      } else {
        row.emplace_back(it->second);
      }
    }
    matrix.push_back(std::move(row));
  }
  r.items = matrix.size();
  if (matrix.empty()) {
    r.note = "no ratings in the manifest";
    return r;
  }
  try {
    r.alpha = krippendorff_alpha(matrix, level);
  } catch (const Error& e) {
    r.note = e.what();
  }
  if (!complete) {
    if (!r.note.empty()) r.note += "; ";
    r.note += "Fleiss' kappa needs complete ratings";
    return r;
  }
  std::vector<double> categories;
  if (manifest.rating_scale) {
    for (double v = manifest.rating_scale->min; v <= manifest.rating_scale->max; v += 1.0) {
      categories.push_back(v);
    }
  }
  for (const auto& row : matrix) {
    for (const auto& v : row) {
      if (std::find(categories.begin(), categories.end(), *v) == categories.end()) {
        categories.push_back(*v);
      }
    }
  }
  std::sort(categories.begin(), categories.end());
  try {
    r.kappa = fleiss_kappa(category_counts(matrix, categories));
    if (!r.kappa) {
      if (!r.note.empty()) r.note += "; ";
      r.note += "Fleiss' kappa undefined: every rating falls in one category";
    }
  } catch (const Error& e) {
    if (!r.note.empty()) r.note += "; ";
    r.note += e.what();
  }
  return r;
}

}  // namespace

Summary summarize(const std::vector<std::optional<double>>& values) {
  Summary s;
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) {
      defined.push_back(*v);
    } else {
      ++s.n_undefined;
    }
  }
  s.n = defined.size();
  if (defined.empty()) return s;
  double sum = 0.0;
  for (double v : defined) sum += v;
  const double mean = sum / static_cast<double>(defined.size());
  s.mean = mean;
  if (defined.size() >= 2) {
    double ss = 0.0;
    for (double v : defined) ss += (v - mean) * (v - mean);
    s.std = std::sqrt(ss / static_cast<double>(defined.size() - 1));
  }
  return s;
}

int EvaluationReport::exit_status() const {
  for (const auto& m : methods) {
    if (m.failed()) return 3;
  }
  return 0;
}

std::unique_ptr<Oracle> make_oracle(const OracleSpec& spec, const DatasetManifest& manifest,
                                    const Shape& input_shape) {
  switch (spec.kind) {
    case OracleKind::kGated:
      return std::make_unique<ModalityGatedOracle>(input_shape, manifest.modalities,
                                                   manifest.modality_index(spec.modality));
    case OracleKind::kLinear: {
      Tensor w = read_tensor(spec.weights);
      if (w.shape() != input_shape) {
        throw ConfigError("linear oracle weights " + shape_to_string(w.shape()) +
                          " do not match volumes " + shape_to_string(input_shape));
      }
      return std::make_unique<LinearOracle>(std::move(w), spec.bias);
    }
    case OracleKind::kConstant:
      try {
        validate_probabilities(spec.probs, manifest.n_classes);
      } catch (const OracleError& e) {
        throw ConfigError(std::string("constant oracle: ") + e.what());
      }
      return std::make_unique<ConstantOracle>(spec.probs, input_shape);
    case OracleKind::kSubprocess:
    case OracleKind::kTcp:
      break;
  }
  auto oracle = std::make_unique<ProtocolOracle>(spec.endpoint);
  const OracleInfo& info = oracle->info();
  if (info.n_classes != manifest.n_classes) {
    throw OracleError("oracle " + spec.describe() + " reports " + std::to_string(info.n_classes) +
                      " classes, the dataset has " + std::to_string(manifest.n_classes));
  }
  if (!info.input_shape.empty() && info.input_shape != input_shape) {
    throw OracleError("oracle " + spec.describe() + " expects " +
                      shape_to_string(info.input_shape) + ", the dataset has " +
                      shape_to_string(input_shape));
  }
  return oracle;
}

std::vector<EvalCase> load_cases(const DatasetManifest& manifest) {
  if (manifest.cases.empty()) throw DataError("manifest has no cases");
  std::vector<EvalCase> cases;
  cases.reserve(manifest.cases.size());
  for (const auto& rec : manifest.cases) {
    Tensor v = load_volume(manifest.resolve(rec.volume_uri));
    if (v.modality_count() != manifest.modalities.size()) {
      throw DataError("case '" + rec.id + "': volume has " + std::to_string(v.modality_count()) +
                      " modalities, the manifest lists " +
                      std::to_string(manifest.modalities.size()));
    }
    if (!cases.empty() && v.shape() != cases.front().volume.shape()) {
      throw DataError("case '" + rec.id + "': volume shape " + shape_to_string(v.shape()) +
                      " differs from " + shape_to_string(cases.front().volume.shape()));
    }
    cases.push_back(EvalCase{rec.id, std::move(v), rec.label});
  }
  return cases;
}

EvaluationReport run_evaluation(const RunConfig& config) {
  config.validate();
  TimingLog log(config.timing);

  EvaluationReport report;
  report.config = config;
  report.config_hash = config_hash(config);

  const DatasetManifest manifest = log.time_stage("load_manifest", 0, [&] { return load_manifest(config.manifest); });
  report.manifest_hash = file_hash(config.manifest);
  report.dataset_name = manifest.name;
  report.modalities = manifest.modalities;
  report.metric = manifest.task_metric;
  for (const auto& c : manifest.cases) report.case_ids.push_back(c.id);

  const bool per_method = config.metrics.faithfulness || config.metrics.shapley ||
                          config.metrics.plausibility || config.metrics.informativeness;
  const bool needs_heatmaps = config.metrics.faithfulness || config.metrics.plausibility ||
                              config.metrics.informativeness;
  const std::vector<std::string> methods = select_methods(config, manifest);
  if (needs_heatmaps && methods.empty()) throw ConfigError("no heatmap methods to evaluate");
  if (config.phi_source == PhiSource::kConfig && config.needs_phi() &&
      config.phi.size() != manifest.modalities.size()) {
    throw ConfigError("config phi has " + std::to_string(config.phi.size()) + " entries for " +
                      std::to_string(manifest.modalities.size()) + " modalities");
  }

  std::vector<EvalCase> cases;
  if (per_method) {
    cases = log.time_stage("load_cases", manifest.cases.size(), [&] { return load_cases(manifest); });
  }
  std::vector<int> labels;
  for (const auto& c : cases) labels.push_back(c.label);

  // Oracles, each behind a score cache.
  std::vector<std::unique_ptr<Oracle>> oracles;
  std::vector<std::unique_ptr<CachingOracle>> cached;
  if (config.needs_oracle()) {
    const Shape shape = cases.empty() ? Shape{} : cases.front().volume.shape();
    for (const auto& spec : config.oracles) {
      oracles.push_back(log.time_stage("connect " + spec.describe(), 0,
                                       [&] { return make_oracle(spec, manifest, shape); }));
      cached.push_back(std::make_unique<CachingOracle>(*oracles.back(), config.cache_spill));
      OracleRunResult r;
      r.spec = spec.describe();
      r.id = oracles.back()->info().id;
      report.oracles.push_back(std::move(r));
    }
  }

  RemovalSettings settings{config.schedule, manifest.task_metric, config.fill};

  if (config.metrics.faithfulness) {
    for (std::size_t k = 0; k < cached.size(); ++k) {
      report.oracles[k].baseline = log.time_stage("random_baseline " + report.oracles[k].spec, cases.size(), [&] {
        return random_baseline(*cached[k], cases, settings, config.repeats,
                               derive_seed(*config.seed, {0x62617365ULL, k}));
      });
    }
  }

  // Ground-truth modality importance.
  if (config.needs_phi()) {
    if ((config.metrics.shapley || config.phi_source == PhiSource::kShapley) &&
        config.phi_source != PhiSource::kConfig) {
      for (std::size_t k = 0; k < cached.size(); ++k) {
        report.oracles[k].importance = log.time_stage("modality_importance " + report.oracles[k].spec, cases.size(), [&] {
          return modality_importance(*cached[k], cases, manifest.task_metric, config.fill);
        });
      }
    }
    std::vector<std::vector<double>> per_oracle;
    switch (config.phi_source) {
      case PhiSource::kConfig:
        report.phi = config.phi;
        break;
      case PhiSource::kShapley:
        for (auto& o : report.oracles) {
          o.phi = o.importance->phi;
          per_oracle.push_back(*o.phi);
        }
        break;
      case PhiSource::kProbe:
        for (std::size_t k = 0; k < cached.size(); ++k) {
          auto& o = report.oracles[k];
          log.time_stage("probe_sets " + o.spec, 0, [&] {
            o.probe_accuracy_tic = probe_accuracy(*cached[k], config.probe_tic);
            o.probe_accuracy_flair = probe_accuracy(*cached[k], config.probe_flair);
          });
          o.phi = ground_truth_mi(manifest.modalities, *o.probe_accuracy_tic,
                                  *o.probe_accuracy_flair, config.chance_threshold);
          per_oracle.push_back(*o.phi);
        }
        break;
    }
    if (!per_oracle.empty()) report.phi = mean_vector(per_oracle);
    if (report.phi) {
      try {
        report.phi_normalized = normalize_mi(*report.phi);
      } catch (const UndefinedError& e) {
        report.phi_note = e.what();
      }
    }
  }

  // Reference predictions for informativeness come from the first oracle.
  std::vector<PredictionRecord> reference;
  if (config.metrics.informativeness && !cached.empty()) {
    std::vector<std::string> ids;
    std::vector<Tensor> volumes;
    for (const auto& c : cases) {
      ids.push_back(c.id);
      volumes.push_back(c.volume);
    }
    reference = score(*cached.front(), ids, volumes);
  }

  const bool need_masks = config.metrics.plausibility || config.metrics.informativeness;
  std::vector<std::optional<Tensor>> masks(manifest.cases.size());
  if (need_masks && !methods.empty()) {
    log.time_stage("load_masks", manifest.cases.size(), [&] {
      for (std::size_t i = 0; i < manifest.cases.size(); ++i) {
        const auto& uri = manifest.cases[i].mask_uri;
        if (uri) masks[i] = load_mask(manifest.resolve(*uri));
      }
    });
  }

  for (const std::string& name : per_method ? methods : std::vector<std::string>{}) {
    MethodResult mr;
    mr.name = name;
    TimingLog mlog(config.timing);
    try {
      std::vector<Tensor> heatmaps;
      std::vector<std::optional<double>> gen;
      mlog.time_stage("load_heatmaps", cases.size(), [&] {
        for (std::size_t i = 0; i < manifest.cases.size(); ++i) {
          const CaseRecord& rec = manifest.cases[i];
          const auto it = rec.heatmaps.find(name);
          if (it == rec.heatmaps.end()) {
            throw DataError("case '" + rec.id + "' has no heatmap for method '" + name + "'");
          }
          Tensor raw = load_heatmap(manifest.resolve(it->second.uri), rec.id, name);
          require_same_shape(cases[i].volume, raw, "heatmap '" + name + "' of case '" + rec.id + "'");
          heatmaps.push_back(postprocess(raw, config.postprocess));
          gen.push_back(it->second.gen_seconds);
        }
      });
      mr.gen_seconds = summarize(gen);

      if (config.metrics.faithfulness) {
        mlog.time_stage("faithfulness", cases.size(), [&] {
          for (std::size_t k = 0; k < cached.size(); ++k) {
            RemovalCurve curve = removal_curve(*cached[k], cases, heatmaps, settings);
            mr.diff_auc_per_oracle.push_back(diff_auc(curve, *report.oracles[k].baseline));
            mr.curves.push_back(std::move(curve));
          }
        });
        mr.diff_auc = summarize(mr.diff_auc_per_oracle);
      }

      if (config.metrics.shapley && report.phi && manifest.modalities.size() >= 2) {
        mlog.time_stage("mi_correlation", cases.size(), [&] {
          for (const Tensor& h : heatmaps) mr.mi_correlation_per_case.push_back(mi_correlation(h, *report.phi));
        });
        mr.mi_correlation = summarize(mr.mi_correlation_per_case);
      }

      if (need_masks) {
        mlog.time_stage("plausibility", cases.size(), [&] {
          for (std::size_t i = 0; i < heatmaps.size(); ++i) {
            if (!masks[i]) {
              mr.fp_per_case.emplace_back();
              mr.msfi_per_case.emplace_back();
              continue;
            }
            require_same_shape(heatmaps[i], *masks[i], "mask of case '" + cases[i].id + "'");
            mr.fp_per_case.push_back(feature_portion(heatmaps[i], *masks[i]));
            if (report.phi_normalized) {
              mr.msfi_per_case.push_back(msfi(heatmaps[i], *masks[i], *report.phi_normalized));
            } else {
              mr.msfi_per_case.emplace_back();
            }
          }
        });
        if (!report.phi_normalized) {
          mr.msfi_note = report.phi_note.empty() ? "no modality importance available" : report.phi_note;
        }
        std::vector<std::optional<double>> fp, ms;
        for (std::size_t i = 0; i < heatmaps.size(); ++i) {
          if (!masks[i]) {
            ++mr.n_without_mask;
            continue;
          }
          fp.push_back(mr.fp_per_case[i]);
          ms.push_back(mr.msfi_per_case[i]);
        }
        mr.fp = summarize(fp);
        mr.msfi = summarize(ms);
      }

      if (config.metrics.informativeness) {
        mlog.time_stage("informativeness", cases.size(), [&] {
          std::vector<double> ms, prob;
          std::vector<bool> correct;
          for (std::size_t i = 0; i < cases.size(); ++i) {
            if (!mr.msfi_per_case[i]) continue;
            ms.push_back(*mr.msfi_per_case[i]);
            const PredictionRecord& p = reference[i];
            correct.push_back(static_cast<int>(p.predicted_class) == cases[i].label);
            prob.push_back(p.probs[p.predicted_class]);
          }
          if (ms.empty()) {
            mr.informativeness_note = "no case has a defined MSFI";
            return;
          }
          mr.informativeness = informativeness_test(ms, correct, prob);
          if (!mr.informativeness->u_test) {
            mr.informativeness_note = "U test undefined: all predictions are " +
                                      std::string(mr.informativeness->n_incorrect == 0 ? "correct" : "incorrect");
          }
        });
      }
    } catch (const Error& e) {
      mr.error = e.what();
    }
    mr.timing = mlog.stages();
    report.methods.push_back(std::move(mr));
  }

  if (config.metrics.agreement) {
    report.agreement = log.time_stage("agreement", manifest.cases.size(),
                                      [&] { return compute_agreement(manifest, config.agreement_level); });
  }

  for (std::size_t k = 0; k < cached.size(); ++k) {
    report.oracles[k].requested = cached[k]->requested();
    report.oracles[k].forwarded = cached[k]->forwarded();
    cached[k]->flush();
  }
  report.timing = log.stages();
  return report;
}

}  // namespace mmxeval
