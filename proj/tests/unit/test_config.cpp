// Copyright 2026 The tracefault Authors. All Rights Reserved.
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

#include <filesystem>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tracefault/config.hpp"
#include "tracefault/errors.hpp"

namespace tf = tracefault;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = TRACEFAULT_CONFIG_DIR;

json ocr_pipeline() {
  return json::parse(R"({
    "name": "ocr", "initial": "ocr", "terminals": ["ocr"],
    "states": [{"id": "ocr", "component": {"ref": "ocr", "in": "text", "out": "text"},
                "relations": [{"id": "edit", "metric": "levenshtein", "max_distance": 2}]}]
  })");
}

json minimal_campaign() {
  return json{{"id", "mini"},
              {"pipeline", ocr_pipeline()},
              {"dataset", {{"type", "text"}, {"count", 3}}},
              {"perturbations", json::array({{{"id", "f"}, {"kind", "char_flip"}, {"severity", 2}}})},
              {"components", {{"ocr", {{"type", "ocr"}}}}}};
}

}  // namespace

TEST(Config, ShippedConfigsLoadAndValidate) {
  for (const char* name : {"vision.json", "ensemble.json", "ocr.json"}) {
    const auto cfg = tf::load_campaign(kConfigs / name);
    const auto data = tf::build_dataset(cfg.dataset);
    const auto registry = tf::build_registry(cfg.components, data);
    EXPECT_TRUE(tf::validate_pipeline(cfg.pipeline, &registry).ok()) << name;
    EXPECT_FALSE(cfg.perturbations.empty()) << name;
    EXPECT_TRUE(cfg.output_dir.is_absolute()) << name;
  }
  const auto vision = tf::load_campaign(kConfigs / "vision.json");
  EXPECT_EQ(vision.pipeline_file, kConfigs / "vision.pipeline.json");
  EXPECT_EQ(vision.pipeline.states.size(), 6u);
}

TEST(Config, PipelineJsonRoundTrips) {
  for (const auto& spec : {fixture::vision_pipeline(), fixture::vision_pipeline(16, false),
                           tf::load_pipeline(kConfigs / "vision.pipeline.json"),
                           tf::parse_pipeline(ocr_pipeline())}) {
    const json doc = tf::pipeline_json(spec);
    const auto back = tf::parse_pipeline(doc);
    EXPECT_EQ(tf::pipeline_json(back), doc);
    EXPECT_EQ(tf::spec_id(back), tf::spec_id(spec));
  }
}

TEST(Config, ToleranceBecomesNegativeTau) {
  const auto spec = tf::parse_pipeline(ocr_pipeline());
  const auto& rel = spec.states[0].relations.relations[0];
  EXPECT_EQ(rel.metric, tf::Metric::TextEdit);
  EXPECT_EQ(rel.tau, -2.0);
}

TEST(Config, UnknownKeysRejected) {
  auto doc = ocr_pipeline();
  doc["states"][0]["colour"] = "blue";
  EXPECT_THROW(tf::parse_pipeline(doc), tf::ConfigError);
  auto campaign = minimal_campaign();
  campaign["jbos"] = 2;
  EXPECT_THROW(tf::parse_campaign(campaign), tf::ConfigError);
}

TEST(Config, MalformedValuesRejected) {
  auto doc = ocr_pipeline();
  doc["states"][0]["relations"][0]["metric"] = "hamming";
  EXPECT_THROW(tf::parse_pipeline(doc), tf::ConfigError);
  doc = ocr_pipeline();
  doc["states"][0]["component"]["in"] = "tensor[abc]";
  EXPECT_THROW(tf::parse_pipeline(doc), tf::ConfigError);
  auto campaign = minimal_campaign();
  campaign["perturbations"][0]["severity"] = 9;
  EXPECT_THROW(tf::parse_campaign(campaign), tf::ConfigError);
  campaign = minimal_campaign();
  campaign["components"]["ocr"]["fault"] = {{"effect", "explode"}};
  EXPECT_THROW(tf::parse_campaign(campaign), tf::ConfigError);
  EXPECT_THROW(tf::load_campaign(kConfigs / "missing.json"), tf::ConfigError);
}

TEST(Config, OverridesReplaceRelationParameters) {
  auto campaign = minimal_campaign();
  campaign["overrides"] = {{"ocr/edit", {{"tolerance", 4}}}};
  const auto cfg = tf::parse_campaign(campaign);
  EXPECT_EQ(cfg.pipeline.states[0].relations.relations[0].tau, -4.0);

  auto spec = fixture::vision_pipeline();
  tf::RelationOverride o;
  o.tau = 0.8;
  o.strict = false;
  tf::apply_overrides(spec, {{"detector/iou_persist", o}});
  const auto& rel = spec.states[0].relations.relations[1];
  EXPECT_EQ(rel.tau, 0.8);
  EXPECT_FALSE(rel.strict);
  EXPECT_THROW(tf::apply_overrides(spec, {{"detector/nope", o}}), tf::ConfigError);
  EXPECT_THROW(tf::apply_overrides(spec, {{"nowhere/iou_persist", o}}), tf::ConfigError);
}

TEST(Config, DefaultsAndRelativeOutput) {
  const auto cfg = tf::parse_campaign(minimal_campaign(), "/tmp/base");
  EXPECT_EQ(cfg.jobs, 1u);
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_EQ(cfg.output_dir, fs::path("/tmp/base/tracefault-out"));
  EXPECT_EQ(cfg.dataset.text.count, 3u);
}

TEST(Config, RegistryRejectsUnknownMockType) {
  std::map<std::string, tf::MockConfig> components{{"x", tf::MockConfig{"teleporter", {}, {}, {}, {}}}};
  EXPECT_THROW(tf::build_registry(components, nullptr), tf::ConfigError);
}
