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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "mmxeval/error.h"
#include "mmxeval/synthgen.h"
#include "mmxeval/tensor_io.h"

namespace mmxeval {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json one_case_doc() {
  return json{{"schema_version", 1},
              {"name", "tiny"},
              {"modalities", {"T1C", "FLAIR", "T1", "T2"}},
              {"n_classes", 2},
              {"task_metric", "accuracy"},
              {"cases",
               {{{"id", "a"},
                 {"volume", "a.mmxt"},
                 {"label", 1},
                 {"mask", "a_mask.mmxt"},
                 {"heatmaps", {{"gc", "a_gc.mmxt"}, {"ig", {{"uri", "a_ig.mmxt"}, {"gen_seconds", 0.25}}}}},
                 {"ratings", {{"r1", 3}, {"r2", 4}}}}}}};
}

std::string expect_data_error(const json& doc) {
  try {
    parse_manifest(doc.dump(), ".", false);
  } catch (const DataError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected DataError for " << doc.dump();
  return {};
}

TEST(Manifest, ParsesOneCase) {
  const DatasetManifest m = parse_manifest(one_case_doc().dump(), "/data", false);
  EXPECT_EQ(m.name, "tiny");
  ASSERT_EQ(m.modalities.size(), 4u);
  EXPECT_EQ(m.n_classes, 2u);
  EXPECT_EQ(m.task_metric, TaskMetric::kAccuracy);
  ASSERT_EQ(m.cases.size(), 1u);
  const CaseRecord& c = m.cases[0];
  EXPECT_EQ(c.label, 1);
  ASSERT_TRUE(c.mask_uri.has_value());
  EXPECT_EQ(c.heatmaps.at("gc").uri, "a_gc.mmxt");
  EXPECT_FALSE(c.heatmaps.at("gc").gen_seconds.has_value());
  EXPECT_DOUBLE_EQ(*c.heatmaps.at("ig").gen_seconds, 0.25);
  EXPECT_DOUBLE_EQ(c.ratings.at("r2"), 4.0);
  EXPECT_EQ(m.resolve("a.mmxt"), fs::path("/data/a.mmxt"));
  EXPECT_EQ(m.resolve("/abs/x.mmxt"), fs::path("/abs/x.mmxt"));
  EXPECT_EQ(m.method_names(), (std::vector<std::string>{"gc", "ig"}));
  EXPECT_EQ(m.modality_index("T1"), 2u);
  EXPECT_THROW(m.modality_index("DWI"), DataError);
}

TEST(Manifest, LabelOutOfRange) {
  json doc = one_case_doc();
  doc["cases"][0]["label"] = 2;
  EXPECT_NE(expect_data_error(doc).find("label out of range"), std::string::npos);
  doc["cases"][0]["label"] = -1;
  EXPECT_NE(expect_data_error(doc).find("label out of range"), std::string::npos);
}

TEST(Manifest, MissingFields) {
  for (const char* key : {"modalities", "cases"}) {
    json doc = one_case_doc();
    doc.erase(key);
    EXPECT_NE(expect_data_error(doc).find("missing field"), std::string::npos) << key;
  }
  for (const char* key : {"id", "volume", "label"}) {
    json doc = one_case_doc();
    doc["cases"][0].erase(key);
    EXPECT_NE(expect_data_error(doc).find("missing field"), std::string::npos) << key;
  }
}

TEST(Manifest, RejectsStructuralProblems) {
  json doc = one_case_doc();
  doc["cases"][0]["modalities"] = {"T1C", "FLAIR"};
  EXPECT_NE(expect_data_error(doc).find("inconsistent modality lists"), std::string::npos);

  doc = one_case_doc();
  doc["cases"].push_back(doc["cases"][0]);
  EXPECT_NE(expect_data_error(doc).find("duplicate case id"), std::string::npos);

  doc = one_case_doc();
  doc["schema_version"] = 99;
  EXPECT_NE(expect_data_error(doc).find("schema_version"), std::string::npos);

  doc = one_case_doc();
  doc["modalities"] = json::array();
  expect_data_error(doc);

  doc = one_case_doc();
  doc["cases"][0]["label"] = "one";
  EXPECT_NE(expect_data_error(doc).find("wrong type"), std::string::npos);

  doc = one_case_doc();
  doc["rating_scale"] = {{"min", 1}, {"max", 3}};
  EXPECT_NE(expect_data_error(doc).find("outside the rating scale"), std::string::npos);

  doc = one_case_doc();
  doc["task_metric"] = "f1";
  expect_data_error(doc);

  EXPECT_THROW(parse_manifest("{not json", ".", false), DataError);
  EXPECT_THROW(parse_manifest("[1,2]", ".", false), DataError);
}

TEST(Manifest, DanglingUriIsRejectedWhenCheckingFiles) {
  const fs::path dir = fs::temp_directory_path() / "mmxeval_manifest_dangling";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_tensor(dir / "a.mmxt", Tensor({4, 2, 2}));
  json doc = one_case_doc();
  doc["cases"][0].erase("mask");
  doc["cases"][0].erase("heatmaps");
  EXPECT_NO_THROW(parse_manifest(doc.dump(), dir, true));
  doc["cases"][0]["mask"] = "missing.mmxt";
  try {
    parse_manifest(doc.dump(), dir, true);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("dangling URI"), std::string::npos);
  }
}

TEST(Manifest, SaveLoadRoundTrip) {
  const fs::path dir = fs::temp_directory_path() / "mmxeval_manifest_roundtrip";
  fs::remove_all(dir);
  fs::create_directories(dir);
  DatasetManifest m = parse_manifest(one_case_doc().dump(), dir, false);
  m.rating_scale = RatingScale{1, 5};
  m.metadata["k"] = "v";
  m.task_metric = TaskMetric::kRocAuc;
  const std::string text = manifest_to_json(m);
  const DatasetManifest back = parse_manifest(text, dir, false);
  EXPECT_EQ(manifest_to_json(back), text);
  EXPECT_EQ(back.task_metric, TaskMetric::kRocAuc);
  ASSERT_TRUE(back.rating_scale.has_value());
  EXPECT_EQ(back.rating_scale->max, 5.0);
}

TEST(Manifest, PartialMasksAreValid) {
  const fs::path dir = fs::temp_directory_path() / "mmxeval_manifest_partial";
  fs::remove_all(dir);
  SynthConfig cfg;
  cfg.n = 20;
  cfg.height = cfg.width = 32;
  cfg.seed = 5;
  cfg.mask_fraction = 0.5;
  write_dataset(cfg, dir, "partial");
  const DatasetManifest m = load_manifest(dir / "manifest.json");
  std::size_t with_mask = 0;
  for (const auto& c : m.cases) with_mask += c.mask_uri.has_value();
  EXPECT_GT(with_mask, 0u);
  EXPECT_LT(with_mask, m.cases.size());
}

}  // namespace
}  // namespace mmxeval
