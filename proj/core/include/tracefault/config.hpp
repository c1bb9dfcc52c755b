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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracefault/mock_components.hpp"
#include "tracefault/perturbation.hpp"
#include "tracefault/pipeline.hpp"
#include "tracefault/synthetic.hpp"

namespace tracefault {

// Pipeline specs and campaign configs are JSON documents. The schema is
// described in README.md; parse errors raise ConfigError naming the field.

PipelineSpec parse_pipeline(const nlohmann::json& doc);
PipelineSpec load_pipeline(const std::filesystem::path& file);
/// Canonical JSON form; parse_pipeline(pipeline_json(s)) reproduces s.
nlohmann::json pipeline_json(const PipelineSpec& spec);

struct DatasetConfig {
  /// scenes, text, tensors or files.
  std::string type = "scenes";
  SceneOptions scenes;
  TextOptions text;
  TensorOptions tensors;
  std::vector<std::filesystem::path> files;
};

struct MockConfig {
  /// detector, classifier, ocr or identity.
  std::string type;
  FaultProfile fault;
  std::vector<std::string> labels;
  DetectionSet canonical_detections;
  std::string canonical_text;
};

/// Replaces individual parameters of one bound relation.
struct RelationOverride {
  std::optional<double> tau;
  /// Deviation tolerance or maximum edit distance; becomes tau = -tolerance.
  std::optional<double> tolerance;
  std::optional<bool> strict;
  std::optional<double> iou_floor;
  std::optional<double> equality_tolerance;
  std::optional<std::vector<double>> class_thresholds;
};

struct CampaignConfig {
  std::string id = "campaign";
  /// Empty when the pipeline was given inline.
  std::filesystem::path pipeline_file;
  PipelineSpec pipeline;
  DatasetConfig dataset;
  PerturbationSet perturbations;
  std::map<std::string, MockConfig> components;
  /// Keyed "state/relation-id".
  std::map<std::string, RelationOverride> overrides;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::filesystem::path output_dir = "tracefault-out";
};

/// Relative paths resolve against `base_dir`.
CampaignConfig parse_campaign(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
CampaignConfig load_campaign(const std::filesystem::path& file);

/// Applies `overrides` to the bound relations; unknown keys raise
/// ConfigError.
void apply_overrides(PipelineSpec& spec, const std::map<std::string, RelationOverride>& overrides);

std::shared_ptr<Dataset> build_dataset(const DatasetConfig& config);

/// One mock per configured component ref. Detector and OCR mocks read
/// ground truth from `truth`.
ComponentRegistry build_registry(const std::map<std::string, MockConfig>& components,
                                 std::shared_ptr<const GroundTruth> truth);

}  // namespace tracefault
