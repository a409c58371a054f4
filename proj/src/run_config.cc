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


#include "mmxeval/run_config.h"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mmxeval/error.h"
#include "mmxeval/rng.h"

namespace mmxeval {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<std::string> split_command(std::string_view text) {
  std::vector<std::string> argv;
  std::istringstream in{std::string(text)};
  for (std::string tok; in >> tok;) argv.push_back(tok);
  return argv;
}

fs::path resolve_path(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

OracleSpec oracle_from_json(const json& j, const fs::path& base) {
  if (j.is_string()) {
    OracleSpec spec = parse_oracle_spec(j.get<std::string>());
    spec.weights = resolve_path(spec.weights, base);
    return spec;
  }
  const std::string where = "oracle";
  check_keys(j, {"kind", "modality", "weights", "bias", "probs", "command", "host", "port",
                 "batch_size", "max_in_flight", "timeout_seconds"},
             where);
  if (!j.contains("kind")) throw ConfigError("oracle: missing field 'kind'");
  const std::string kind = get<std::string>(j, "kind", where);
  OracleSpec spec;
  if (kind == "builtin-gated") {
    spec.kind = OracleKind::kGated;
    if (j.contains("modality")) spec.modality = get<std::string>(j, "modality", where);
  } else if (kind == "builtin-linear") {
    spec.kind = OracleKind::kLinear;
    if (!j.contains("weights")) throw ConfigError("builtin-linear oracle needs 'weights'");
    spec.weights = resolve_path(get<std::string>(j, "weights", where), base);
    if (j.contains("bias")) spec.bias = get<double>(j, "bias", where);
  } else if (kind == "builtin-constant") {
    spec.kind = OracleKind::kConstant;
    if (!j.contains("probs")) throw ConfigError("builtin-constant oracle needs 'probs'");
    spec.probs = get<std::vector<double>>(j, "probs", where);
  } else if (kind == "subprocess") {
    spec.kind = OracleKind::kSubprocess;
    spec.endpoint.transport = Transport::kSubprocess;
    const json& cmd = j.contains("command") ? j.at("command") : json();
    if (cmd.is_string()) {
      spec.endpoint.command = split_command(cmd.get<std::string>());
    } else if (cmd.is_array()) {
      spec.endpoint.command = get<std::vector<std::string>>(j, "command", where);
    } else {
      throw ConfigError("subprocess oracle needs 'command'");
    }
  } else if (kind == "tcp") {
    spec.kind = OracleKind::kTcp;
    spec.endpoint.transport = Transport::kTcp;
    if (j.contains("host")) spec.endpoint.host = get<std::string>(j, "host", where);
    if (!j.contains("port")) throw ConfigError("tcp oracle needs 'port'");
    spec.endpoint.port = get<int>(j, "port", where);
  } else {
    throw ConfigError("unknown oracle kind '" + kind +
                      "' (builtin-gated, builtin-linear, builtin-constant, subprocess, tcp)");
  }
  if (j.contains("batch_size")) spec.endpoint.batch_size = get<std::size_t>(j, "batch_size", where);
  if (j.contains("max_in_flight")) {
    spec.endpoint.max_in_flight = get<std::size_t>(j, "max_in_flight", where);
  }
  if (j.contains("timeout_seconds")) {
    spec.endpoint.timeout_seconds = get<double>(j, "timeout_seconds", where);
  }
  return spec;
}

json oracle_to_json(const OracleSpec& spec) {
  switch (spec.kind) {
    case OracleKind::kGated:
      return {{"kind", "builtin-gated"}, {"modality", spec.modality}};
    case OracleKind::kLinear:
      return {{"kind", "builtin-linear"}, {"weights", spec.weights.string()}, {"bias", spec.bias}};
    case OracleKind::kConstant:
      return {{"kind", "builtin-constant"}, {"probs", spec.probs}};
    case OracleKind::kSubprocess:
    case OracleKind::kTcp:
      break;
  }
  json j;
  if (spec.kind == OracleKind::kSubprocess) {
    j = {{"kind", "subprocess"}, {"command", spec.endpoint.command}};
  } else {
    j = {{"kind", "tcp"}, {"host", spec.endpoint.host}, {"port", spec.endpoint.port}};
  }
  j["batch_size"] = spec.endpoint.batch_size;
  j["max_in_flight"] = spec.endpoint.max_in_flight;
  j["timeout_seconds"] = spec.endpoint.timeout_seconds;
  return j;
}

}  // namespace

std::string OracleSpec::describe() const {
  switch (kind) {
    case OracleKind::kGated:
      return "builtin:gated:" + modality;
    case OracleKind::kLinear:
      return "builtin:linear:" + weights.filename().string();
    case OracleKind::kConstant: {
      std::string s = "builtin:constant:";
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (i) s += ",";
        std::ostringstream os;
        os << probs[i];
        s += os.str();
      }
      return s;
    }
    case OracleKind::kSubprocess:
    case OracleKind::kTcp:
      break;
  }
  return endpoint.describe();
}

OracleSpec parse_oracle_spec(std::string_view text) {
  OracleSpec spec;
  auto starts = [&](std::string_view p) { return text.substr(0, p.size()) == p; };
  if (starts("builtin:gated")) {
    spec.kind = OracleKind::kGated;
    const auto parts = split(text, ':');
    if (parts.size() > 3) throw ConfigError("bad oracle '" + std::string(text) + "'");
    if (parts.size() == 3) spec.modality = parts[2];
  } else if (starts("builtin:linear:")) {
    spec.kind = OracleKind::kLinear;
    const auto parts = split(text, ':');
    if (parts.size() < 3 || parts.size() > 4 || parts[2].empty()) {
      throw ConfigError("expected builtin:linear:WEIGHTS[:BIAS], got '" + std::string(text) + "'");
    }
    spec.weights = parts[2];
    if (parts.size() == 4) spec.bias = parse_double(parts[3], "linear oracle bias");
  } else if (starts("builtin:constant:")) {
    spec.kind = OracleKind::kConstant;
    for (const auto& p : split(text.substr(17), ',')) {
      spec.probs.push_back(parse_double(p, "constant oracle probability"));
    }
  } else if (starts("stdio:")) {
    spec.kind = OracleKind::kSubprocess;
    spec.endpoint.transport = Transport::kSubprocess;
    spec.endpoint.command = split_command(text.substr(6));
    if (spec.endpoint.command.empty()) throw ConfigError("stdio oracle needs a command");
  } else if (starts("tcp:")) {
    spec.kind = OracleKind::kTcp;
    spec.endpoint.transport = Transport::kTcp;
    const std::string rest(text.substr(4));
    const std::size_t colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw ConfigError("expected tcp:HOST:PORT, got '" + std::string(text) + "'");
    }
    spec.endpoint.host = rest.substr(0, colon);
    const double port = parse_double(rest.substr(colon + 1), "tcp port");
    spec.endpoint.port = static_cast<int>(port);
  } else {
    throw ConfigError("unknown oracle '" + std::string(text) +
                      "' (builtin:gated, builtin:linear, builtin:constant, stdio:, tcp:)");
  }
  return spec;
}

std::string to_string(PhiSource source) {
  switch (source) {
    case PhiSource::kConfig:
      return "config";
    case PhiSource::kProbe:
      return "probe";
    case PhiSource::kShapley:
      break;
  }
  return "shapley";
}

PhiSource parse_phi_source(std::string_view text) {
  if (text == "shapley") return PhiSource::kShapley;
  if (text == "config") return PhiSource::kConfig;
  if (text == "probe") return PhiSource::kProbe;
  throw ConfigError("unknown phi_source '" + std::string(text) + "' (shapley, config, probe)");
}

bool RunConfig::needs_phi() const {
  return metrics.shapley || metrics.plausibility || metrics.informativeness;
}

bool RunConfig::needs_oracle() const {
  if (metrics.faithfulness || metrics.informativeness) return true;
  return needs_phi() && phi_source != PhiSource::kConfig;
}

void RunConfig::validate() const {
  if (!metrics.any()) throw ConfigError("at least one metric must be enabled");
  if (manifest.empty()) throw ConfigError("a manifest is required");
  if (metrics.faithfulness && !seed) {
    throw ConfigError("a seed is required when faithfulness is enabled");
  }
  if (metrics.faithfulness && repeats < 2) {
    throw ConfigError("random baseline needs at least 2 repeats");
  }
  if (needs_oracle() && oracles.empty()) {
    throw ConfigError("the enabled metrics need at least one oracle");
  }
  if (needs_phi() && phi_source == PhiSource::kConfig && phi.empty()) {
    throw ConfigError("phi_source 'config' requires a phi vector");
  }
  if (needs_phi() && phi_source == PhiSource::kProbe && (probe_tic.empty() || probe_flair.empty())) {
    throw ConfigError("phi_source 'probe' requires probe_sets.tic and probe_sets.flair");
  }
  if (chance_threshold && !(*chance_threshold >= 0.0 && *chance_threshold <= 1.0)) {
    throw ConfigError("chance_threshold must be in [0, 1]");
  }
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (!seen.insert(m).second) throw ConfigError("method '" + m + "' listed twice");
  }
  for (const auto& o : oracles) {
    if (o.kind == OracleKind::kSubprocess || o.kind == OracleKind::kTcp) o.endpoint.validate();
    if (o.kind == OracleKind::kConstant && o.probs.empty()) {
      throw ConfigError("builtin-constant oracle needs probabilities");
    }
  }
}

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc,
             {"manifest", "oracles", "methods", "metrics", "schedule", "postprocess", "fill", "seed",
              "repeats", "phi_source", "phi", "probe_sets", "chance_threshold", "agreement_level",
              "timing", "output_dir", "cache_spill"},
             "config");
  const std::string where = "config";
  RunConfig c;
  if (doc.contains("manifest")) c.manifest = resolve_path(get<std::string>(doc, "manifest", where), base_dir);
  if (doc.contains("oracles")) {
    const json& list = doc.at("oracles");
    if (!list.is_array()) throw ConfigError("config.oracles must be a list");
    for (const json& o : list) c.oracles.push_back(oracle_from_json(o, base_dir));
  }
  if (doc.contains("methods")) c.methods = get<std::vector<std::string>>(doc, "methods", where);
  if (doc.contains("metrics")) {
    const json& m = doc.at("metrics");
    check_keys(m, {"faithfulness", "shapley", "plausibility", "informativeness", "agreement"},
               "config.metrics");
    auto flag = [&](const char* key, bool& out) {
      if (m.contains(key)) out = get<bool>(m, key, "config.metrics");
    };
    flag("faithfulness", c.metrics.faithfulness);
    flag("shapley", c.metrics.shapley);
    flag("plausibility", c.metrics.plausibility);
    flag("informativeness", c.metrics.informativeness);
    flag("agreement", c.metrics.agreement);
  }
  if (doc.contains("schedule")) {
    const json& s = doc.at("schedule");
    try {
      if (s.is_string()) {
        c.schedule = RemovalSchedule::parse(s.get<std::string>());
      } else {
        c.schedule = RemovalSchedule(get<std::vector<double>>(doc, "schedule", where));
      }
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("postprocess")) c.postprocess = parse_postprocess(get<std::string>(doc, "postprocess", where));
  if (doc.contains("fill")) c.fill = parse_fill(get<std::string>(doc, "fill", where));
  if (doc.contains("seed") && !doc.at("seed").is_null()) {
    c.seed = get<std::uint64_t>(doc, "seed", where);
  }
  if (doc.contains("repeats")) c.repeats = get<std::size_t>(doc, "repeats", where);
  if (doc.contains("phi_source")) c.phi_source = parse_phi_source(get<std::string>(doc, "phi_source", where));
  if (doc.contains("phi")) c.phi = get<std::vector<double>>(doc, "phi", where);
  if (doc.contains("probe_sets")) {
    const json& p = doc.at("probe_sets");
    check_keys(p, {"tic", "flair"}, "config.probe_sets");
    if (p.contains("tic")) c.probe_tic = resolve_path(get<std::string>(p, "tic", "probe_sets"), base_dir);
    if (p.contains("flair")) {
      c.probe_flair = resolve_path(get<std::string>(p, "flair", "probe_sets"), base_dir);
    }
  }
  if (doc.contains("chance_threshold")) {
    if (doc.at("chance_threshold").is_null()) {
      c.chance_threshold.reset();
    } else {
      c.chance_threshold = get<double>(doc, "chance_threshold", where);
    }
  }
  if (doc.contains("agreement_level")) {
    c.agreement_level = parse_alpha_level(get<std::string>(doc, "agreement_level", where));
  }
  if (doc.contains("timing")) c.timing = get<bool>(doc, "timing", where);
  if (doc.contains("output_dir")) c.output_dir = resolve_path(get<std::string>(doc, "output_dir", where), base_dir);
  if (doc.contains("cache_spill") && !doc.at("cache_spill").is_null()) {
    c.cache_spill = resolve_path(get<std::string>(doc, "cache_spill", where), base_dir);
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_run_config(text, fs::absolute(base));
}

std::string canonical_config_json(const RunConfig& c) {
  json j;
  j["manifest"] = c.manifest.string();
  j["oracles"] = json::array();
  for (const auto& o : c.oracles) j["oracles"].push_back(oracle_to_json(o));
  j["methods"] = c.methods;
  j["metrics"] = {{"faithfulness", c.metrics.faithfulness},
                  {"shapley", c.metrics.shapley},
                  {"plausibility", c.metrics.plausibility},
                  {"informativeness", c.metrics.informativeness},
                  {"agreement", c.metrics.agreement}};
  j["schedule"] = c.schedule.fractions();
  j["postprocess"] = to_string(c.postprocess);
  j["fill"] = to_string(c.fill);
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["repeats"] = c.repeats;
  j["phi_source"] = to_string(c.phi_source);
  j["phi"] = c.phi;
  j["probe_sets"] = {{"tic", c.probe_tic.string()}, {"flair", c.probe_flair.string()}};
  j["chance_threshold"] = c.chance_threshold ? json(*c.chance_threshold) : json(nullptr);
  j["agreement_level"] = to_string(c.agreement_level);
  j["timing"] = c.timing;
  return j.dump();
}

std::string config_hash(const RunConfig& config) { return content_hash(canonical_config_json(config)); }

}  // namespace mmxeval
