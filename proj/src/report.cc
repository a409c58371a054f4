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


#include "mmxeval/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mmxeval/error.h"

namespace mmxeval {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json opt_list(const std::vector<std::optional<double>>& values) {
  json a = json::array();
  for (const auto& v : values) a.push_back(opt(v));
  return a;
}

json summary_json(const Summary& s) {
  return {{"mean", opt(s.mean)}, {"std", opt(s.std)}, {"n", s.n}, {"n_undefined", s.n_undefined}};
}

json stages_json(const std::vector<StageTiming>& stages) {
  json a = json::array();
  for (const auto& t : stages) {
    a.push_back({{"label", t.label},
                 {"seconds", t.seconds},
                 {"cases", t.cases},
                 {"per_case_seconds", opt(t.per_case_seconds)}});
  }
  return a;
}

json curve_json(const RemovalCurve& c) {
  json j = {{"fractions", c.fractions}, {"performance", c.performance}};
  if (c.is_baseline()) {
    j["ci_lo"] = c.ci_lo;
    j["ci_hi"] = c.ci_hi;
    j["repeats"] = c.repeats;
  }
  return j;
}

std::optional<double> num(const json& j) {
  if (j.is_number()) return j.get<double>();
  return std::nullopt;
}

std::string provenance_line(const json& report) {
  const json& p = report.at("provenance");
  std::string seed = p.at("seed").is_null() ? "none" : p.at("seed").dump();
  return "config_hash=" + p.at("config_hash").get<std::string>() +
         " manifest_hash=" + p.at("manifest_hash").get<std::string>() + " seed=" + seed;
}

std::string mean_std(const json& s) {
  if (!s.is_object()) return "";
  const auto mean = num(s.at("mean"));
  const auto sd = num(s.at("std"));
  std::string out = !mean ? "NaN" : (sd ? format_value(mean) + " ± " + format_value(sd) : format_value(mean));
  out += " (n=" + std::to_string(s.at("n").get<std::size_t>());
  if (const auto u = s.at("n_undefined").get<std::size_t>(); u > 0) out += ", " + std::to_string(u) + " NaN";
  return out + ")";
}

std::string escape_md(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

std::string csv_number(const json& v) {
  if (!v.is_number()) return "";
  std::ostringstream os;
  os.precision(17);
  os << v.get<double>();
  return os.str();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

}  // namespace

std::string format_value(const std::optional<double>& v, int digits) {
  if (!v || !std::isfinite(*v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, *v);
  return buf;
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

json report_to_json(const EvaluationReport& r) {
  const RunConfig& c = r.config;
  const bool timing = c.timing;
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["provenance"] = {{"config_hash", r.config_hash},
                       {"manifest_hash", r.manifest_hash},
                       {"seed", c.seed ? json(*c.seed) : json(nullptr)}};
  doc["settings"] = {
      {"metrics",
       {{"faithfulness", c.metrics.faithfulness},
        {"shapley", c.metrics.shapley},
        {"plausibility", c.metrics.plausibility},
        {"informativeness", c.metrics.informativeness},
        {"agreement", c.metrics.agreement}}},
      {"task_metric", to_string(r.metric)},
      {"postprocess", to_string(c.postprocess)},
      {"fill", to_string(c.fill)},
      {"schedule", c.schedule.fractions()},
      {"repeats", c.repeats},
      {"phi_source", to_string(c.phi_source)},
      {"chance_threshold", opt(c.chance_threshold)},
      {"agreement_level", to_string(c.agreement_level)},
      {"definitions",
       {{"diff_auc", "trapezoid area under the baseline mean curve minus that of the method curve"},
        {"baseline", "fresh uniform random feature order per case and repeat; 95% band = mean ± 1.96 sd/sqrt(repeats)"},
        {"removal_count", "ceil(q * N) features, ties broken by lower flat index"},
        {"mi_correlation", "Kendall tau-b between phi and per-modality positive heatmap sums, per case"},
        {"msfi_zero_mass", "a modality with no heatmap mass contributes 0 while its weight stays in the denominator"},
        {"phi_aggregation", "mean of the per-oracle vectors"},
        {"informativeness", "MSFI vs predicted-class probability of the first oracle; two-sided Mann-Whitney U of MSFI for correct vs incorrect predictions"}}}};
  doc["dataset"] = {{"name", r.dataset_name},
                    {"manifest", c.manifest.string()},
                    {"n_cases", r.case_ids.size()},
                    {"modalities", r.modalities},
                    {"case_ids", r.case_ids}};

  json oracles = json::array();
  for (const auto& o : r.oracles) {
    json jo = {{"spec", o.spec}, {"id", o.id}, {"calls", {{"requested", o.requested}, {"forwarded", o.forwarded}}}};
    if (o.baseline) jo["baseline"] = curve_json(*o.baseline);
    if (o.importance) {
      json table = json::array();
      for (std::uint32_t s = 0; s < o.importance->v_table.size(); ++s) {
        json names = json::array();
        for (std::size_t m = 0; m < r.modalities.size(); ++m) {
          if (s & (1u << m)) names.push_back(r.modalities[m]);
        }
        table.push_back({{"subset", names}, {"value", o.importance->v_table.at(s)}});
      }
      jo["modality_importance"] = {{"phi", o.importance->phi}, {"v_table", table}};
    }
    if (o.probe_accuracy_tic) {
      jo["probe_accuracy"] = {{"tic", *o.probe_accuracy_tic}, {"flair", *o.probe_accuracy_flair}};
    }
    if (o.phi) jo["phi"] = *o.phi;
    oracles.push_back(std::move(jo));
  }
  doc["oracles"] = oracles;

  doc["modality_importance"] = {{"phi", r.phi ? json(*r.phi) : json(nullptr)},
                                {"phi_normalized", r.phi_normalized ? json(*r.phi_normalized) : json(nullptr)},
                                {"note", r.phi_note}};

  json methods = json::array();
  for (const auto& m : r.methods) {
    json jm = {{"name", m.name}, {"status", m.failed() ? "failed" : "ok"}, {"error", m.error}};
    if (c.metrics.faithfulness) {
      json curves = json::array();
      for (std::size_t k = 0; k < m.curves.size(); ++k) {
        curves.push_back({{"oracle", r.oracles[k].spec}, {"performance", m.curves[k].performance}});
      }
      jm["faithfulness"] = {{"diff_auc", summary_json(m.diff_auc)},
                            {"per_oracle", opt_list(m.diff_auc_per_oracle)},
                            {"curves", curves}};
    }
    if (c.metrics.shapley) {
      json jc = summary_json(m.mi_correlation);
      jc["per_case"] = opt_list(m.mi_correlation_per_case);
      jm["mi_correlation"] = jc;
    }
    if (c.metrics.plausibility) {
      jm["plausibility"] = {{"fp", summary_json(m.fp)},
                            {"msfi", summary_json(m.msfi)},
                            {"note", m.msfi_note},
                            {"n_without_mask", m.n_without_mask},
                            {"fp_per_case", opt_list(m.fp_per_case)},
                            {"msfi_per_case", opt_list(m.msfi_per_case)}};
    }
    if (c.metrics.informativeness) {
      json ji = {{"note", m.informativeness_note}};
      if (m.informativeness) {
        const auto& inf = *m.informativeness;
        ji["pearson_r"] = opt(inf.pearson_r);
        ji["u"] = inf.u_test ? json(inf.u_test->u) : json(nullptr);
        ji["p"] = inf.u_test ? json(inf.u_test->p) : json(nullptr);
        ji["exact"] = inf.u_test ? json(inf.u_test->exact) : json(nullptr);
        ji["stars"] = inf.stars ? json(to_string(*inf.stars)) : json(nullptr);
        ji["n_correct"] = inf.n_correct;
        ji["n_incorrect"] = inf.n_incorrect;
      }
      jm["informativeness"] = ji;
    }
    if (timing) {
      jm["timing"] = {{"stages", stages_json(m.timing)}, {"gen_seconds", summary_json(m.gen_seconds)}};
    }
    methods.push_back(std::move(jm));
  }
  doc["methods"] = methods;

  if (r.agreement) {
    const auto& a = *r.agreement;
    doc["agreement"] = {{"items", a.items},
                        {"raters", a.raters},
                        {"level", to_string(a.level)},
                        {"krippendorff_alpha", opt(a.alpha)},
                        {"fleiss_kappa", opt(a.kappa)},
                        {"note", a.note}};
  }
  if (timing) doc["timing"] = {{"stages", stages_json(r.timing)}};
  return doc;
}

json strip_timing(const json& report) {
  if (report.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : report.items()) {
      if (key == "timing") continue;
      out[key] = strip_timing(value);
    }
    return out;
  }
  if (report.is_array()) {
    json out = json::array();
    for (const auto& v : report) out.push_back(strip_timing(v));
    return out;
  }
  return report;
}

std::string canonical_dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string render_markdown(const json& report) {
  std::ostringstream md;
  const json& settings = report.at("settings");
  md << "# mmxeval report: " << report.at("dataset").at("name").get<std::string>() << "\n\n";
  md << "`" << provenance_line(report) << "`\n\n";
  md << "- cases: " << report.at("dataset").at("n_cases").get<std::size_t>() << "\n";
  md << "- modalities: ";
  const auto modalities = report.at("dataset").at("modalities").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < modalities.size(); ++i) md << (i ? ", " : "") << modalities[i];
  md << "\n- task metric: " << settings.at("task_metric").get<std::string>() << "\n";
  md << "- postprocess: " << settings.at("postprocess").get<std::string>()
     << ", fill: " << settings.at("fill").get<std::string>() << ", baseline repeats: "
     << settings.at("repeats").get<std::size_t>() << "\n";
  md << "- removal schedule: ";
  const auto schedule = settings.at("schedule").get<std::vector<double>>();
  for (std::size_t i = 0; i < schedule.size(); ++i) md << (i ? ", " : "") << format_value(schedule[i], 2);
  md << "\n- oracles: ";
  const json& oracles = report.at("oracles");
  if (oracles.empty()) md << "none";
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    md << (i ? ", " : "") << "`" << oracles[i].at("spec").get<std::string>() << "`";
  }
  md << "\n\n";

  const json& methods = report.at("methods");
  const json& toggles = settings.at("metrics");
  if (!methods.empty() && (toggles.at("faithfulness").get<bool>() || toggles.at("shapley").get<bool>())) {
    md << "## Faithfulness\n\n| Method | diffAUC [-1, 1] | MI correlation [-1, 1] |\n|---|---|---|\n";
    for (const json& m : methods) {
      md << "| " << escape_md(m.at("name").get<std::string>()) << " | ";
      md << (m.contains("faithfulness") ? mean_std(m.at("faithfulness").at("diff_auc")) : "") << " | ";
      md << (m.contains("mi_correlation") ? mean_std(m.at("mi_correlation")) : "") << " |\n";
    }
    md << "\nNaN marks a correlation that is not computable (the heatmap is not modality-specific).\n\n";
  }
  if (!methods.empty() && (toggles.at("plausibility").get<bool>() || toggles.at("informativeness").get<bool>())) {
    md << "## Plausibility\n\n| Method | MSFI [0, 1] | FP [0, 1] | r | U | p | sig. |\n|---|---|---|---|---|---|---|\n";
    for (const json& m : methods) {
      md << "| " << escape_md(m.at("name").get<std::string>()) << " | ";
      if (m.contains("plausibility")) {
        md << mean_std(m.at("plausibility").at("msfi")) << " | " << mean_std(m.at("plausibility").at("fp"));
      } else {
        md << " | ";
      }
      md << " | ";
      if (m.contains("informativeness") && m.at("informativeness").contains("pearson_r")) {
        const json& inf = m.at("informativeness");
        md << format_value(num(inf.at("pearson_r"))) << " | " << format_value(num(inf.at("u")), 1) << " | "
           << format_value(num(inf.at("p")), 4) << " | "
           << (inf.at("stars").is_string() ? inf.at("stars").get<std::string>() : "NaN") << " |\n";
      } else {
        md << " |  |  |  |\n";
      }
    }
    md << "\n★ p < 0.05, ★★ p < 0.01, ★★★ p < 0.001, NS otherwise.\n\n";
  }

  const json& mi = report.at("modality_importance");
  if (mi.at("phi").is_array()) {
    md << "## Modality importance\n\n| |";
    for (const auto& name : modalities) md << " " << escape_md(name) << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < modalities.size(); ++i) md << "---|";
    md << "\n";
    for (const json& o : oracles) {
      if (!o.contains("phi")) continue;
      md << "| `" << o.at("spec").get<std::string>() << "` |";
      for (const json& v : o.at("phi")) md << " " << format_value(num(v)) << " |";
      md << "\n";
    }
    md << "| phi |";
    for (const json& v : mi.at("phi")) md << " " << format_value(num(v)) << " |";
    md << "\n| normalized |";
    if (mi.at("phi_normalized").is_array()) {
      for (const json& v : mi.at("phi_normalized")) md << " " << format_value(num(v)) << " |";
    } else {
      for (std::size_t i = 0; i < modalities.size(); ++i) md << " NaN |";
    }
    md << "\n";
    if (!mi.at("note").get<std::string>().empty()) md << "\n" << mi.at("note").get<std::string>() << "\n";
    md << "\n";
  }

  if (report.contains("agreement")) {
    const json& a = report.at("agreement");
    md << "## Rater agreement\n\n| Items | Raters | Krippendorff's alpha (" << a.at("level").get<std::string>()
       << ") | Fleiss' kappa |\n|---|---|---|---|\n";
    md << "| " << a.at("items").get<std::size_t>() << " | " << a.at("raters").get<std::size_t>() << " | "
       << format_value(num(a.at("krippendorff_alpha"))) << " | " << format_value(num(a.at("fleiss_kappa")))
       << " |\n";
    if (!a.at("note").get<std::string>().empty()) md << "\n" << a.at("note").get<std::string>() << "\n";
    md << "\n";
  }

  if (report.contains("timing")) {
    md << "## Timing\n\n| Method | heatmap generation (s) | stage | wall time (s) | per case (s) |\n|---|---|---|---|---|\n";
    for (const json& m : methods) {
      if (!m.contains("timing")) continue;
      const std::string gen = mean_std(m.at("timing").at("gen_seconds"));
      for (const json& t : m.at("timing").at("stages")) {
        md << "| " << escape_md(m.at("name").get<std::string>()) << " | " << gen << " | "
           << escape_md(t.at("label").get<std::string>()) << " | " << format_value(num(t.at("seconds")), 4)
           << " | " << format_value(num(t.at("per_case_seconds")), 6) << " |\n";
      }
    }
    for (const json& t : report.at("timing").at("stages")) {
      md << "| (run) |  | " << escape_md(t.at("label").get<std::string>()) << " | "
         << format_value(num(t.at("seconds")), 4) << " | " << format_value(num(t.at("per_case_seconds")), 6)
         << " |\n";
    }
    md << "\n";
  }

  bool any_failed = false;
  for (const json& m : methods) any_failed = any_failed || m.at("status") == "failed";
  if (any_failed) {
    md << "## Failures\n\n";
    for (const json& m : methods) {
      if (m.at("status") != "failed") continue;
      md << "- " << escape_md(m.at("name").get<std::string>()) << ": " << escape_md(m.at("error").get<std::string>())
         << "\n";
    }
    md << "\n";
  }
  return md.str();
}

std::string render_curve_csv(const json& report, const json& method) {
  std::ostringstream csv;
  csv << "# " << provenance_line(report) << "\n";
  csv << "oracle,series,q,performance\n";
  const auto fractions = report.at("settings").at("schedule").get<std::vector<double>>();
  const json& oracles = report.at("oracles");
  auto emit = [&](const std::string& oracle, const std::string& series, const json& values) {
    for (std::size_t i = 0; i < values.size() && i < fractions.size(); ++i) {
      csv << csv_field(oracle) << "," << series << "," << csv_number(fractions[i]) << ","
          << csv_number(values[i]) << "\n";
    }
  };
  if (!method.contains("faithfulness")) return csv.str();
  const json& curves = method.at("faithfulness").at("curves");
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const std::string spec = curves[k].at("oracle").get<std::string>();
    emit(spec, "method", curves[k].at("performance"));
    if (k < oracles.size() && oracles[k].contains("baseline")) {
      const json& b = oracles[k].at("baseline");
      emit(spec, "baseline_mean", b.at("performance"));
      emit(spec, "baseline_ci_lo", b.at("ci_lo"));
      emit(spec, "baseline_ci_hi", b.at("ci_hi"));
      for (std::size_t r = 0; r < b.at("repeats").size(); ++r) {
        emit(spec, "baseline_repeat_" + std::to_string(r), b.at("repeats")[r]);
      }
    }
  }
  return csv.str();
}

std::string render_curve_svg(const json& report, const json& method) {
  constexpr double kW = 520, kH = 340, kL = 60, kR = 20, kT = 40, kB = 50;
  const auto fractions = report.at("settings").at("schedule").get<std::vector<double>>();
  auto px = [&](double q) { return kL + q * (kW - kL - kR); };
  auto py = [&](double v) { return kT + (1.0 - std::clamp(v, 0.0, 1.0)) * (kH - kT - kB); };
  auto path = [&](const json& values) {
    std::ostringstream p;
    for (std::size_t i = 0; i < values.size() && i < fractions.size(); ++i) {
      const auto v = num(values[i]);
      if (!v) continue;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", p.tellp() == 0 ? "M" : " L", px(fractions[i]), py(*v));
      p << buf;
    }
    return p.str();
  };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<!-- " << xml_escape(provenance_line(report)) << " -->\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(method.at("name").get<std::string>()) << "</text>\n";
  svg << "<line x1=\"" << kL << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kL << "\" y1=\"" << py(0) << "\" x2=\"" << kL << "\" y2=\"" << py(1)
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    char label[16];
    std::snprintf(label, sizeof(label), "%.2f", v);
    svg << "<text x=\"" << px(v) << "\" y=\"" << py(0) + 16 << "\" text-anchor=\"middle\">" << label << "</text>\n";
    svg << "<text x=\"" << kL - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  svg << "<text x=\"" << px(0.5) << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\">fraction of features removed</text>\n";
  svg << "<text transform=\"translate(16," << py(0.5) << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(report.at("settings").at("task_metric").get<std::string>()) << "</text>\n";

  if (method.contains("faithfulness")) {
    const json& curves = method.at("faithfulness").at("curves");
    const json& oracles = report.at("oracles");
    for (std::size_t k = 0; k < curves.size(); ++k) {
      const char* color = kColors[k % std::size(kColors)];
      if (k < oracles.size() && oracles[k].contains("baseline")) {
        const json& b = oracles[k].at("baseline");
        std::ostringstream band;
        for (std::size_t i = 0; i < fractions.size(); ++i) {
          band << (i ? " " : "") << px(fractions[i]) << "," << py(b.at("ci_hi")[i].get<double>());
        }
        for (std::size_t i = fractions.size(); i-- > 0;) {
          band << " " << px(fractions[i]) << "," << py(b.at("ci_lo")[i].get<double>());
        }
        svg << "<polygon points=\"" << band.str() << "\" fill=\"" << color
            << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
        svg << "<path d=\"" << path(b.at("performance")) << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-dasharray=\"5,4\" stroke-width=\"1.5\"/>\n";
      }
      svg << "<path d=\"" << path(curves[k].at("performance")) << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << px(1) - 4 << "\" y=\"" << kT + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
          << color << "\">" << xml_escape(curves[k].at("oracle").get<std::string>())
          << " (solid: method, dashed: random)</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_plausibility_csv(const json& report) {
  std::ostringstream csv;
  csv << "# " << provenance_line(report) << "\n";
  csv << "case_id,method,fp,msfi,fp_defined,msfi_defined\n";
  const json& ids = report.at("dataset").at("case_ids");
  for (const json& m : report.at("methods")) {
    if (!m.contains("plausibility")) continue;
    const json& fp = m.at("plausibility").at("fp_per_case");
    const json& ms = m.at("plausibility").at("msfi_per_case");
    for (std::size_t i = 0; i < fp.size() && i < ids.size(); ++i) {
      csv << csv_field(ids[i].get<std::string>()) << "," << csv_field(m.at("name").get<std::string>()) << ","
          << csv_number(fp[i]) << "," << csv_number(ms[i]) << "," << (fp[i].is_number() ? 1 : 0) << ","
          << (ms[i].is_number() ? 1 : 0) << "\n";
    }
  }
  return csv.str();
}

std::string render_mi_correlation_csv(const json& report) {
  std::ostringstream csv;
  csv << "# " << provenance_line(report) << "\n";
  csv << "case_id,method,tau_b,defined\n";
  const json& ids = report.at("dataset").at("case_ids");
  for (const json& m : report.at("methods")) {
    if (!m.contains("mi_correlation")) continue;
    const json& tau = m.at("mi_correlation").at("per_case");
    for (std::size_t i = 0; i < tau.size() && i < ids.size(); ++i) {
      csv << csv_field(ids[i].get<std::string>()) << "," << csv_field(m.at("name").get<std::string>()) << ","
          << csv_number(tau[i]) << "," << (tau[i].is_number() ? 1 : 0) << "\n";
    }
  }
  return csv.str();
}

ReportFormats parse_report_formats(const std::string& text) {
  ReportFormats f{false, false, false, false};
  std::stringstream in(text);
  for (std::string tok; std::getline(in, tok, ',');) {
    if (tok == "json") f.json = true;
    else if (tok == "md" || tok == "markdown") f.markdown = true;
    else if (tok == "csv") f.csv = true;
    else if (tok == "svg") f.svg = true;
    else throw ConfigError("unknown report format '" + tok + "' (json, md, csv, svg)");
  }
  return f;
}

void write_report(const json& report, const fs::path& out_dir, ReportFormats formats) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  if (formats.json) write_file(out_dir / "report.json", canonical_dump(report));
  if (formats.markdown) write_file(out_dir / "report.md", render_markdown(report));
  if (formats.csv || formats.svg) {
    const bool curves = report.at("settings").at("metrics").at("faithfulness").get<bool>();
    if (curves && !report.at("methods").empty()) {
      fs::create_directories(out_dir / "curves", ec);
      if (ec) throw DataError("cannot create " + (out_dir / "curves").string() + ": " + ec.message());
      for (const json& m : report.at("methods")) {
        const std::string stem = file_stem(m.at("name").get<std::string>());
        if (formats.csv) write_file(out_dir / "curves" / (stem + ".csv"), render_curve_csv(report, m));
        if (formats.svg) write_file(out_dir / "curves" / (stem + ".svg"), render_curve_svg(report, m));
      }
    }
  }
  if (formats.csv) {
    const json& toggles = report.at("settings").at("metrics");
    if (toggles.at("plausibility").get<bool>()) {
      write_file(out_dir / "plausibility_per_case.csv", render_plausibility_csv(report));
    }
    if (toggles.at("shapley").get<bool>()) {
      write_file(out_dir / "mi_correlation_per_case.csv", render_mi_correlation_csv(report));
    }
  }
}

json load_report(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read report " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    json doc = json::parse(text);
    if (!doc.is_object() || doc.value("schema_version", 0) != kReportSchemaVersion) {
      throw DataError("unsupported report schema in " + path.string());
    }
    return doc;
  } catch (const json::exception& e) {
    throw DataError("malformed report " + path.string() + ": " + e.what());
  }
}

}  // namespace mmxeval
