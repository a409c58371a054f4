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

#include "mmxeval/manifest.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "mmxeval/error.h"

namespace mmxeval {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError("manifest: missing field '" + std::string(key) + "' in " + where);
  }
  return *it;
}

template <typename T>
T get_as(const json& value, const std::string& what) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw DataError("manifest: field " + what + " has the wrong type");
  }
}

void check_uri(const DatasetManifest& m, const std::string& uri, const std::string& what) {
  if (!std::filesystem::exists(m.resolve(uri))) {
    throw DataError("manifest: dangling URI '" + uri + "' (" + what + ")");
  }
}

}  // namespace

std::filesystem::path DatasetManifest::resolve(const std::string& uri) const {
  std::filesystem::path p(uri);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> DatasetManifest::method_names() const {
  std::set<std::string> names;
  for (const auto& c : cases) {
    for (const auto& [name, ref] : c.heatmaps) names.insert(name);
  }
  return {names.begin(), names.end()};
}

std::size_t DatasetManifest::modality_index(std::string_view name) const {
  auto it = std::find(modalities.begin(), modalities.end(), name);
  if (it == modalities.end()) {
    throw DataError("manifest has no modality named '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - modalities.begin());
}

DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                               bool check_files) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("manifest: top level must be an object");

  DatasetManifest m;
  m.base_dir = base_dir;
  m.schema_version = get_as<int>(require(doc, "schema_version", "manifest"), "schema_version");
  if (m.schema_version != kManifestSchemaVersion) {
    throw DataError("manifest: unsupported schema_version " + std::to_string(m.schema_version));
  }
  m.name = doc.value("name", "");
  m.modalities = get_as<std::vector<std::string>>(require(doc, "modalities", "manifest"),
                                                  "modalities");
  if (m.modalities.empty()) throw DataError("manifest: modalities must be non-empty");
  const int n_classes = get_as<int>(require(doc, "n_classes", "manifest"), "n_classes");
  if (n_classes < 2) throw DataError("manifest: n_classes must be >= 2");
  m.n_classes = static_cast<std::size_t>(n_classes);
  try {
    m.task_metric = parse_task_metric(
        get_as<std::string>(require(doc, "task_metric", "manifest"), "task_metric"));
  } catch (const ConfigError& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
  if (auto it = doc.find("rating_scale"); it != doc.end()) {
    RatingScale scale{get_as<double>(require(*it, "min", "rating_scale"), "rating_scale.min"),
                      get_as<double>(require(*it, "max", "rating_scale"), "rating_scale.max")};
    if (!(scale.min < scale.max)) throw DataError("manifest: rating_scale min must be < max");
    m.rating_scale = scale;
  }
  if (auto it = doc.find("metadata"); it != doc.end()) {
    for (const auto& [k, v] : it->items()) {
      m.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }

  const json& jcases = require(doc, "cases", "manifest");
  if (!jcases.is_array()) throw DataError("manifest: cases must be an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < jcases.size(); ++i) {
    const json& jc = jcases[i];
    const std::string where = "case #" + std::to_string(i);
    CaseRecord c;
    c.id = get_as<std::string>(require(jc, "id", where), where + ".id");
    if (!seen.insert(c.id).second) throw DataError("manifest: duplicate case id '" + c.id + "'");
    const std::string cw = "case '" + c.id + "'";
    c.volume_uri = get_as<std::string>(require(jc, "volume", cw), cw + ".volume");
    c.label = get_as<int>(require(jc, "label", cw), cw + ".label");
    if (c.label < 0 || static_cast<std::size_t>(c.label) >= m.n_classes) {
      throw DataError("manifest: label out of range for " + cw + ": " +
                      std::to_string(c.label) + " with n_classes=" +
                      std::to_string(m.n_classes));
    }
    if (auto it = jc.find("modalities"); it != jc.end()) {
      if (get_as<std::vector<std::string>>(*it, cw + ".modalities") != m.modalities) {
        throw DataError("manifest: inconsistent modality lists in " + cw);
      }
    }
    if (auto it = jc.find("mask"); it != jc.end() && !it->is_null()) {
      c.mask_uri = get_as<std::string>(*it, cw + ".mask");
    }
    if (auto it = jc.find("heatmaps"); it != jc.end()) {
      for (const auto& [method, ref] : it->items()) {
        HeatmapRef h;
        if (ref.is_string()) {
          h.uri = ref.get<std::string>();
        } else {
          const std::string hw = cw + ".heatmaps." + method;
          h.uri = get_as<std::string>(require(ref, "uri", hw), hw + ".uri");
          if (auto g = ref.find("gen_seconds"); g != ref.end()) {
            h.gen_seconds = get_as<double>(*g, hw + ".gen_seconds");
          }
        }
        c.heatmaps.emplace(method, std::move(h));
      }
    }
    if (auto it = jc.find("ratings"); it != jc.end()) {
      for (const auto& [rater, score] : it->items()) {
        const double r = get_as<double>(score, cw + ".ratings." + rater);
        if (m.rating_scale && (r < m.rating_scale->min || r > m.rating_scale->max)) {
          throw DataError("manifest: rating " + std::to_string(r) + " of " + cw +
                          " is outside the rating scale");
        }
        c.ratings[rater] = r;
      }
    }
    m.cases.push_back(std::move(c));
  }

  if (check_files) {
    for (const auto& c : m.cases) {
      check_uri(m, c.volume_uri, "volume of case '" + c.id + "'");
      if (c.mask_uri) check_uri(m, *c.mask_uri, "mask of case '" + c.id + "'");
      for (const auto& [method, ref] : c.heatmaps) {
        check_uri(m, ref.uri, method + " heatmap of case '" + c.id + "'");
      }
    }
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open manifest");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_manifest(text, path.parent_path());
}

std::string manifest_to_json(const DatasetManifest& m) {
  json doc;
  doc["schema_version"] = m.schema_version;
  doc["name"] = m.name;
  doc["modalities"] = m.modalities;
  doc["n_classes"] = m.n_classes;
  doc["task_metric"] = to_string(m.task_metric);
  if (m.rating_scale) doc["rating_scale"] = {{"min", m.rating_scale->min}, {"max", m.rating_scale->max}};
  if (!m.metadata.empty()) doc["metadata"] = m.metadata;
  json cases = json::array();
  for (const auto& c : m.cases) {
    json jc;
    jc["id"] = c.id;
    jc["volume"] = c.volume_uri;
    jc["label"] = c.label;
    if (c.mask_uri) jc["mask"] = *c.mask_uri;
    if (!c.heatmaps.empty()) {
      json hm = json::object();
      for (const auto& [method, ref] : c.heatmaps) {
        if (ref.gen_seconds) {
          hm[method] = {{"uri", ref.uri}, {"gen_seconds", *ref.gen_seconds}};
        } else {
          hm[method] = ref.uri;
        }
      }
      jc["heatmaps"] = std::move(hm);
    }
    if (!c.ratings.empty()) jc["ratings"] = c.ratings;
    cases.push_back(std::move(jc));
  }
  doc["cases"] = std::move(cases);
  return doc.dump(2) + "\n";
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << manifest_to_json(manifest);
}

}  // namespace mmxeval
