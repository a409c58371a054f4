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


// mmxeval command-line interface.
//
// Exit codes: 0 success, 1 configuration or input error, 2 oracle error,
// 3 partial failure (at least one method failed).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmxeval/error.h"
#include "mmxeval/evaluate.h"
#include "mmxeval/report.h"
#include "mmxeval/run_config.h"
#include "mmxeval/synthgen.h"

namespace {

namespace fs = std::filesystem;
using namespace mmxeval;

constexpr int kExitConfig = 1;
constexpr int kExitOracle = 2;

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> oracles;
  std::string postprocess;
  std::string schedule;
  std::string fill;
  std::string manifest;
  std::vector<std::string> methods;
  std::optional<std::size_t> repeats;
  std::string phi_source;
  std::vector<double> phi;
  std::string probe_tic;
  std::string probe_flair;
  std::string spill;
  bool no_timing = false;
};

void add_run_flags(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("--config", f.config, "JSON run configuration");
  cmd.add_option("--seed", f.seed, "Seed for the random baselines");
  cmd.add_option("--out", f.out, "Output directory");
  cmd.add_option("--oracle", f.oracles,
                 "Model under test (repeatable): builtin:gated[:MOD], builtin:linear:W.mmxt[:BIAS], "
                 "builtin:constant:P0,P1, stdio:CMD, tcp:HOST:PORT");
  cmd.add_option("--postprocess", f.postprocess, "positive-clip or absolute");
  cmd.add_option("--removal-schedule", f.schedule, "Fractions '0,0.5,1' or 'uniform:N'");
  cmd.add_option("--fill", f.fill, "zero or per-modality-mean");
  cmd.add_option("--manifest", f.manifest, "Dataset manifest");
  cmd.add_option("--methods", f.methods, "Heatmap methods to evaluate (default: all)")->delimiter(',');
  cmd.add_option("--repeats", f.repeats, "Random-baseline repeats");
  cmd.add_option("--phi-source", f.phi_source, "shapley, config or probe");
  cmd.add_option("--phi", f.phi, "Ground-truth modality importance, comma separated")->delimiter(',');
  cmd.add_option("--probe-tic", f.probe_tic, "TIC probe-set manifest");
  cmd.add_option("--probe-flair", f.probe_flair, "FLAIR probe-set manifest");
  cmd.add_option("--cache-spill", f.spill, "Score cache file reused across runs");
  cmd.add_flag("--no-timing", f.no_timing, "Omit timing fields from the report");
}

RunConfig build_config(const RunFlags& f, const MetricToggles* only) {
  RunConfig c;
  if (!f.config.empty()) c = load_run_config(f.config);
  if (!f.manifest.empty()) c.manifest = fs::absolute(f.manifest);
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  if (!f.oracles.empty()) {
    c.oracles.clear();
    for (const auto& o : f.oracles) c.oracles.push_back(parse_oracle_spec(o));
  }
  if (!f.postprocess.empty()) c.postprocess = parse_postprocess(f.postprocess);
  if (!f.schedule.empty()) {
    try {
      c.schedule = RemovalSchedule::parse(f.schedule);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  }
  if (!f.fill.empty()) c.fill = parse_fill(f.fill);
  if (!f.methods.empty()) c.methods = f.methods;
  if (f.repeats) c.repeats = *f.repeats;
  if (!f.phi.empty()) {
    c.phi = f.phi;
    if (f.phi_source.empty()) c.phi_source = PhiSource::kConfig;
  }
  if (!f.phi_source.empty()) c.phi_source = parse_phi_source(f.phi_source);
  if (!f.probe_tic.empty()) c.probe_tic = fs::absolute(f.probe_tic);
  if (!f.probe_flair.empty()) c.probe_flair = fs::absolute(f.probe_flair);
  if (!f.spill.empty()) c.cache_spill = fs::absolute(f.spill);
  if (f.no_timing) c.timing = false;
  if (only) c.metrics = *only;
  return c;
}

int run(const RunFlags& flags, const MetricToggles* only) {
  const RunConfig config = build_config(flags, only);
  const EvaluationReport report = run_evaluation(config);
  write_report(report_to_json(report), config.output_dir);
  for (const auto& m : report.methods) {
    if (m.failed()) std::cerr << "mmxeval: method '" << m.name << "' failed: " << m.error << "\n";
  }
  std::cout << "report written to " << (config.output_dir / "report.json").string() << "\n";
  return report.exit_status();
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const OracleError& e) {
    std::cerr << "mmxeval: oracle error: " << e.what() << "\n";
    return kExitOracle;
  } catch (const ConfigError& e) {
    std::cerr << "mmxeval: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "mmxeval: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "mmxeval: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmxeval: evaluate heatmap explanations of multi-modal image classifiers"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    std::optional<MetricToggles> only;
  };
  const MetricToggles none{false, false, false, false, false};
  auto with = [&](bool MetricToggles::*field) {
    MetricToggles t = none;
    t.*field = true;
    return t;
  };
  const std::vector<Sub> subs = {
      {"evaluate", "Full run with the metrics enabled in the config", std::nullopt},
      {"faithfulness", "Feature-removal curves and diffAUC", with(&MetricToggles::faithfulness)},
      {"modality-importance", "Shapley modality importance and MI correlation", with(&MetricToggles::shapley)},
      {"plausibility", "Feature portion and MSFI", with(&MetricToggles::plausibility)},
      {"informativeness", "MSFI vs prediction correctness", with(&MetricToggles::informativeness)},
      {"agreement", "Inter-rater agreement of manifest ratings", with(&MetricToggles::agreement)},
  };
  std::vector<RunFlags> flags(subs.size());
  std::vector<CLI::App*> commands;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_run_flags(*cmd, flags[i]);
    commands.push_back(cmd);
  }

  SynthConfig synth;
  std::size_t size = 256;
  std::string synth_out;
  bool no_probes = false;
  CLI::App* gen = app.add_subcommand("synth-gen", "Generate the synthetic dataset and probe sets");
  gen->add_option("--n", synth.n, "Number of cases")->capture_default_str();
  gen->add_option("--size", size, "Image height and width")->capture_default_str();
  gen->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", synth_out, "Output directory")->required();
  gen->add_option("--raters", synth.raters, "Simulated raters per case")->capture_default_str();
  gen->add_option("--mask-fraction", synth.mask_fraction, "Share of cases that get a mask")->capture_default_str();
  gen->add_flag("--no-probes", no_probes, "Only write the dataset");

  std::string report_in, report_out, formats = "json,md,csv,svg";
  CLI::App* rep = app.add_subcommand("report", "Re-render report files from a report.json");
  rep->add_option("--in", report_in, "report.json")->required();
  rep->add_option("--out", report_out, "Output directory (default: next to the input)");
  rep->add_option("--formats", formats, "Any of json,md,csv,svg")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!commands[i]->parsed()) continue;
    const MetricToggles* only = subs[i].only ? &*subs[i].only : nullptr;
    return guarded([&] { return run(flags[i], only); });
  }
  if (gen->parsed()) {
    return guarded([&] {
      synth.height = synth.width = size;
      if (no_probes) {
        write_dataset(synth, fs::path(synth_out), "synthetic");
        std::cout << "dataset written to " << (fs::path(synth_out) / "manifest.json").string() << "\n";
      } else {
        const SynthSuite suite = write_synthetic_suite(synth, synth_out);
        std::cout << "dataset: " << suite.dataset.string() << "\nprobe (TIC): " << suite.probe_tic.string()
                  << "\nprobe (FLAIR): " << suite.probe_flair.string() << "\n";
      }
      return 0;
    });
  }
  if (rep->parsed()) {
    return guarded([&] {
      const auto doc = load_report(report_in);
      fs::path out = report_out.empty() ? fs::path(report_in).parent_path() : fs::path(report_out);
      if (out.empty()) out = ".";
      write_report(doc, out, parse_report_formats(formats));
      return 0;
    });
  }
  return kExitConfig;
}
