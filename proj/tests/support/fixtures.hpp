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

// Pipeline builders shared by unit and acceptance tests.

#include <string>
#include <vector>

#include "tracefault/pipeline.hpp"

namespace fixture {

namespace tf = tracefault;

inline tf::PayloadShape shape(tf::PayloadKind kind, std::size_t dim = 0) { return {kind, dim}; }

inline tf::StateSpec state(std::string id, std::string ref, tf::PayloadShape in,
                           tf::PayloadShape out) {
  tf::StateSpec s;
  s.id = std::move(id);
  s.component = {std::move(ref), in, out};
  return s;
}

inline tf::RoutingRule always(const std::string& source, std::vector<std::string> targets) {
  tf::RoutingRule r;
  r.source = source;
  for (auto& t : targets) r.targets.push_back({std::move(t), {}});
  return r;
}

inline tf::RoutingRule label_in(const std::string& source, std::vector<std::string> labels,
                                std::string target,
                                tf::ProjectionKind projection = tf::ProjectionKind::Identity) {
  tf::RoutingRule r;
  r.source = source;
  r.predicate.kind = tf::PredicateKind::LabelIn;
  r.predicate.labels = std::move(labels);
  r.targets.push_back({std::move(target), {projection, 8}});
  return r;
}

inline const std::vector<std::string>& vision_classes() {
  static const std::vector<std::string> classes{"main_signal", "speed_sign",
                                                "road_crossing_signal", "distant_signal",
                                                "shunting_signal"};
  return classes;
}

/// Detector feeding one classifier per signal class through 8x8 crops.
/// Detector composite: subset, IoU persistence (> 0.9) and, unless
/// `check_labels` is false, label preservation.
inline tf::PipelineSpec vision_pipeline(std::size_t image_size = 32, bool check_labels = true) {
  using tf::PayloadKind;
  tf::PipelineSpec spec;
  spec.name = "vision";
  spec.initial = "detector";
  auto det = state("detector", "detector", shape(PayloadKind::Tensor, image_size * image_size),
                   shape(PayloadKind::DetectionSet));
  det.relations.relations.push_back(tf::make_relation("subset", tf::Metric::DetectionSubset));
  auto persist = tf::make_relation("iou_persist", tf::Metric::DetectionIou, 0.9);
  persist.strict = true;
  det.relations.relations.push_back(persist);
  if (check_labels) {
    det.relations.relations.push_back(
        tf::make_relation("labels_kept", tf::Metric::DetectionLabels));
  }
  for (const auto& c : vision_classes()) {
    det.routes.push_back(label_in("detector", {c}, c, tf::ProjectionKind::Crop));
  }
  spec.states.push_back(det);
  for (const auto& c : vision_classes()) {
    auto s = state(c, c, shape(PayloadKind::Tensor, 64), shape(PayloadKind::Label, 1));
    s.relations.relations.push_back(tf::make_relation("label_kept", tf::Metric::LabelMatch));
    spec.states.push_back(s);
    spec.terminals.push_back(c);
  }
  return spec;
}

}  // namespace fixture
