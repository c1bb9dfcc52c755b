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

#include "tracefault/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "spec_codec.hpp"
#include "tracefault/errors.hpp"

namespace tracefault {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return get<T>(j, key, where);
}

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

PayloadShape parse_shape(const std::string& text, const std::string& where) {
  std::string_view name = text;
  std::size_t dim = 0;
  if (const auto open = text.find('['); open != std::string::npos) {
    if (text.back() != ']') throw ConfigError(where + ": malformed shape '" + text + "'");
    name = std::string_view(text).substr(0, open);
    const std::string inner = text.substr(open + 1, text.size() - open - 2);
    if (inner != "*") {
      if (inner.empty() || !std::all_of(inner.begin(), inner.end(), ::isdigit)) {
        throw ConfigError(where + ": malformed shape '" + text + "'");
      }
      dim = std::stoul(inner);
    }
  }
  const auto kind = parse_payload_kind(name);
  if (!kind) throw ConfigError(where + ": unknown payload kind '" + std::string(name) + "'");
  return PayloadShape{*kind, dim};
}

std::string shape_text(const PayloadShape& shape) {
  std::string out(to_string(shape.kind));
  if (shape.dim != 0) out += "[" + std::to_string(shape.dim) + "]";
  return out;
}

MetamorphicRelation parse_relation(const json& j, const std::string& state) {
  const std::string where = "state '" + state + "' relation";
  check_keys(j,
             {"id", "metric", "kind", "tau", "tolerance", "max_distance", "strict",
              "equality_tolerance", "iou_floor", "class_thresholds", "vocabulary"},
             where);
  const auto metric_name = get<std::string>(j, "metric", where);
  const auto metric = parse_metric(metric_name);
  if (!metric) throw ConfigError(where + ": unknown metric '" + metric_name + "'");
  MetamorphicRelation rel = make_relation(get<std::string>(j, "id", where), *metric);
  if (const auto kind = get_opt<std::string>(j, "kind", where)) {
    if (*kind == "delta") {
      rel.kind = RelationKind::Delta;
    } else if (*kind == "heaviside") {
      rel.kind = RelationKind::Heaviside;
    } else {
      throw ConfigError(where + ": kind must be delta or heaviside");
    }
  }
  const int thresholds = static_cast<int>(j.contains("tau")) +
                         static_cast<int>(j.contains("tolerance")) +
                         static_cast<int>(j.contains("max_distance"));
  if (thresholds > 1) throw ConfigError(where + ": give one of tau, tolerance, max_distance");
  if (j.contains("tolerance")) {
    if (!is_deviation_metric(*metric)) {
      throw ConfigError(where + ": tolerance applies to deviation metrics only");
    }
    rel.tau = -get<double>(j, "tolerance", where);
  } else if (j.contains("max_distance")) {
    if (*metric != Metric::TextEdit) {
      throw ConfigError(where + ": max_distance applies to levenshtein only");
    }
    rel.tau = -get<double>(j, "max_distance", where);
  } else {
    rel.tau = get_or<double>(j, "tau", rel.tau, where);
  }
  rel.strict = get_or<bool>(j, "strict", rel.strict, where);
  rel.equality_tolerance = get_or<double>(j, "equality_tolerance", rel.equality_tolerance, where);
  rel.iou_floor = get_or<double>(j, "iou_floor", rel.iou_floor, where);
  rel.class_thresholds =
      get_or<std::vector<double>>(j, "class_thresholds", rel.class_thresholds, where);
  rel.vocabulary = get_or<std::vector<std::string>>(j, "vocabulary", rel.vocabulary, where);
  return rel;
}

RoutePredicate parse_predicate(const json& j, const std::string& where) {
  RoutePredicate p;
  if (j.is_string()) {
    if (j.get<std::string>() != "always") {
      throw ConfigError(where + ": predicate must be \"always\" or an object");
    }
    return p;
  }
  check_keys(j, {"label_in", "confidence_at_least"}, where);
  if (j.size() != 1) throw ConfigError(where + ": predicate needs exactly one condition");
  if (j.contains("label_in")) {
    p.kind = PredicateKind::LabelIn;
    p.labels = get<std::vector<std::string>>(j, "label_in", where);
  } else {
    p.kind = PredicateKind::ConfidenceAtLeast;
    p.bound = get<double>(j, "confidence_at_least", where);
  }
  return p;
}

RouteTarget parse_target(const json& j, const std::string& where) {
  if (j.is_string()) return RouteTarget{j.get<std::string>(), {}};
  check_keys(j, {"state", "project", "crop_size"}, where);
  RouteTarget t{get<std::string>(j, "state", where), {}};
  const auto project = get_or<std::string>(j, "project", "identity", where);
  if (project == "identity") {
    t.projection.kind = ProjectionKind::Identity;
  } else if (project == "crop") {
    t.projection.kind = ProjectionKind::Crop;
  } else if (project == "box") {
    t.projection.kind = ProjectionKind::Box;
  } else if (project == "label") {
    t.projection.kind = ProjectionKind::Label;
  } else {
    throw ConfigError(where + ": unknown projection '" + project + "'");
  }
  t.projection.crop_size = get_or<std::size_t>(j, "crop_size", t.projection.crop_size, where);
  return t;
}

StateSpec parse_state(const json& j) {
  check_keys(j, {"id", "component", "routes", "relations"}, "state");
  StateSpec s;
  s.id = get<std::string>(j, "id", "state");
  const std::string where = "state '" + s.id + "'";
  const json& c = j.contains("component") ? j.at("component") : json();
  check_keys(c, {"ref", "in", "out"}, where + " component");
  s.component.ref = get<std::string>(c, "ref", where + " component");
  s.component.in = parse_shape(get<std::string>(c, "in", where + " component"), where);
  s.component.out = parse_shape(get<std::string>(c, "out", where + " component"), where);
  for (const auto& r : j.value("routes", json::array())) {
    check_keys(r, {"when", "to"}, where + " route");
    RoutingRule rule;
    rule.source = s.id;
    rule.predicate = parse_predicate(r.value("when", json("always")), where + " route");
    const json& to = r.contains("to") ? r.at("to") : json();
    if (!to.is_array() || to.empty()) throw ConfigError(where + " route: 'to' must be a non-empty list");
    for (const auto& t : to) rule.targets.push_back(parse_target(t, where + " route target"));
    s.routes.push_back(std::move(rule));
  }
  for (const auto& r : j.value("relations", json::array())) {
    s.relations.relations.push_back(parse_relation(r, s.id));
  }
  return s;
}

FaultProfile parse_fault(const json& j, const std::string& where) {
  check_keys(j, {"effect", "probability", "trigger", "count", "shift", "rate", "label", "seed"},
             where);
  FaultProfile f;
  const auto effect_name = get_or<std::string>(j, "effect", "none", where);
  const auto effect = parse_fault_effect(effect_name);
  if (!effect) throw ConfigError(where + ": unknown effect '" + effect_name + "'");
  f.effect = *effect;
  f.probability = get_or<double>(j, "probability", f.probability, where);
  if (j.contains("trigger")) {
    const json& t = j.at("trigger");
    check_keys(t, {"kind", "min_severity"}, where + " trigger");
    f.trigger.kind = get_opt<std::string>(t, "kind", where + " trigger");
    f.trigger.min_severity = get_or<int>(t, "min_severity", 1, where + " trigger");
  }
  f.count = get_or<std::size_t>(j, "count", f.count, where);
  f.shift = get_or<double>(j, "shift", f.shift, where);
  f.rate = get_or<double>(j, "rate", f.rate, where);
  f.label = get_or<std::string>(j, "label", f.label, where);
  f.seed = get_or<std::uint64_t>(j, "seed", f.seed, where);
  check_fault_profile(f);
  return f;
}

MockConfig parse_mock(const json& j, const std::string& ref) {
  const std::string where = "component '" + ref + "'";
  check_keys(j, {"type", "labels", "canonical", "fault"}, where);
  MockConfig m;
  m.type = get<std::string>(j, "type", where);
  if (m.type != "detector" && m.type != "classifier" && m.type != "ocr" && m.type != "identity") {
    throw ConfigError(where + ": unknown mock type '" + m.type + "'");
  }
  m.labels = get_or<std::vector<std::string>>(j, "labels", {}, where);
  if (m.type == "classifier" && m.labels.empty()) throw ConfigError(where + ": labels required");
  if (j.contains("canonical")) {
    if (m.type == "detector") {
      try {
        m.canonical_detections = std::get<DetectionSet>(
            payload_from_json_value(json{{"kind", "detections"}, {"items", j.at("canonical")}}));
      } catch (const std::exception& e) {
        throw ConfigError(where + ": bad canonical detections: " + e.what());
      }
    } else if (m.type == "ocr") {
      m.canonical_text = get<std::string>(j, "canonical", where);
    } else {
      throw ConfigError(where + ": canonical output applies to detector and ocr mocks");
    }
  }
  if (j.contains("fault")) m.fault = parse_fault(j.at("fault"), where + " fault");
  return m;
}

PerturbationSpec parse_perturbation(const json& j) {
  check_keys(j, {"id", "kind", "severity", "seed", "magnitude", "target_state"}, "perturbation");
  PerturbationSpec p;
  p.id = get<std::string>(j, "id", "perturbation");
  const std::string where = "perturbation '" + p.id + "'";
  p.kind = get<std::string>(j, "kind", where);
  p.severity = get_or<int>(j, "severity", 1, where);
  p.seed = get_or<std::uint64_t>(j, "seed", 0, where);
  p.magnitude = get_opt<double>(j, "magnitude", where);
  p.target_state = get_opt<std::string>(j, "target_state", where);
  return p;
}

DatasetConfig parse_dataset(const json& j, const fs::path& base_dir) {
  const std::string where = "dataset";
  require_object(j, where);
  DatasetConfig d;
  d.type = get<std::string>(j, "type", where);
  if (d.type == "scenes") {
    check_keys(j, {"type", "count", "seed", "image_size", "labels", "min_objects", "max_objects"},
               where);
    auto& o = d.scenes;
    o.count = get_or<std::size_t>(j, "count", o.count, where);
    o.seed = get_or<std::uint64_t>(j, "seed", o.seed, where);
    o.image_size = get_or<std::size_t>(j, "image_size", o.image_size, where);
    o.labels = get<std::vector<std::string>>(j, "labels", where);
    o.min_objects = get_or<std::size_t>(j, "min_objects", o.min_objects, where);
    o.max_objects = get_or<std::size_t>(j, "max_objects", o.max_objects, where);
  } else if (d.type == "text") {
    check_keys(j, {"type", "count", "seed", "min_length", "max_length"}, where);
    auto& o = d.text;
    o.count = get_or<std::size_t>(j, "count", o.count, where);
    o.seed = get_or<std::uint64_t>(j, "seed", o.seed, where);
    o.min_length = get_or<std::size_t>(j, "min_length", o.min_length, where);
    o.max_length = get_or<std::size_t>(j, "max_length", o.max_length, where);
  } else if (d.type == "tensors") {
    check_keys(j, {"type", "count", "seed", "shape"}, where);
    auto& o = d.tensors;
    o.count = get_or<std::size_t>(j, "count", o.count, where);
    o.seed = get_or<std::uint64_t>(j, "seed", o.seed, where);
    o.shape = get_or<std::vector<std::size_t>>(j, "shape", o.shape, where);
  } else if (d.type == "files") {
    check_keys(j, {"type", "files"}, where);
    for (const auto& f : get<std::vector<std::string>>(j, "files", where)) {
      fs::path path = base_dir / f;
      if (!fs::exists(path)) throw ConfigError("dataset file not found: " + path.string());
      d.files.push_back(std::move(path));
    }
  } else {
    throw ConfigError("dataset: unknown type '" + d.type + "'");
  }
  return d;
}

RelationOverride parse_override(const json& j, const std::string& key) {
  const std::string where = "override '" + key + "'";
  check_keys(j,
             {"tau", "tolerance", "max_distance", "strict", "iou_floor", "equality_tolerance",
              "class_thresholds"},
             where);
  RelationOverride o;
  o.tau = get_opt<double>(j, "tau", where);
  o.tolerance = get_opt<double>(j, "tolerance", where);
  if (const auto d = get_opt<double>(j, "max_distance", where)) o.tolerance = d;
  if (o.tau && o.tolerance) throw ConfigError(where + ": give tau or a tolerance, not both");
  o.strict = get_opt<bool>(j, "strict", where);
  o.iou_floor = get_opt<double>(j, "iou_floor", where);
  o.equality_tolerance = get_opt<double>(j, "equality_tolerance", where);
  o.class_thresholds = get_opt<std::vector<double>>(j, "class_thresholds", where);
  return o;
}

}  // namespace

namespace detail {

json relation_to_json(const MetamorphicRelation& rel) {
  json j{{"id", rel.id},
         {"metric", std::string(to_string(rel.metric))},
         {"kind", rel.kind == RelationKind::Delta ? "delta" : "heaviside"},
         {"tau", rel.tau},
         {"strict", rel.strict},
         {"equality_tolerance", rel.equality_tolerance},
         {"iou_floor", rel.iou_floor}};
  if (!rel.class_thresholds.empty()) j["class_thresholds"] = rel.class_thresholds;
  if (!rel.vocabulary.empty()) j["vocabulary"] = rel.vocabulary;
  return j;
}

json pipeline_to_json(const PipelineSpec& spec) {
  json states = json::array();
  for (const auto& s : spec.states) {
    json routes = json::array();
    for (const auto& rule : s.routes) {
      json when;
      switch (rule.predicate.kind) {
        case PredicateKind::Always:
          when = "always";
          break;
        case PredicateKind::LabelIn:
          when = json{{"label_in", rule.predicate.labels}};
          break;
        case PredicateKind::ConfidenceAtLeast:
          when = json{{"confidence_at_least", rule.predicate.bound}};
          break;
      }
      json to = json::array();
      for (const auto& t : rule.targets) {
        constexpr const char* kProjection[] = {"identity", "crop", "box", "label"};
        json target{{"state", t.state},
                    {"project", kProjection[static_cast<int>(t.projection.kind)]}};
        if (t.projection.kind == ProjectionKind::Crop) target["crop_size"] = t.projection.crop_size;
        to.push_back(std::move(target));
      }
      routes.push_back(json{{"when", std::move(when)}, {"to", std::move(to)}});
    }
    json relations = json::array();
    for (const auto& r : s.relations.relations) relations.push_back(relation_to_json(r));
    states.push_back(json{{"id", s.id},
                          {"component",
                           {{"ref", s.component.ref},
                            {"in", shape_text(s.component.in)},
                            {"out", shape_text(s.component.out)}}},
                          {"routes", std::move(routes)},
                          {"relations", std::move(relations)}});
  }
  return json{{"name", spec.name},
              {"initial", spec.initial},
              {"terminals", spec.terminals},
              {"states", std::move(states)}};
}

}  // namespace detail

PipelineSpec parse_pipeline(const json& doc) {
  check_keys(doc, {"name", "initial", "terminals", "states"}, "pipeline");
  PipelineSpec spec;
  spec.name = get_or<std::string>(doc, "name", "", "pipeline");
  spec.initial = get_or<std::string>(doc, "initial", "", "pipeline");
  spec.terminals = get_or<std::vector<std::string>>(doc, "terminals", {}, "pipeline");
  const json& states = doc.contains("states") ? doc.at("states") : json::array();
  if (!states.is_array()) throw ConfigError("pipeline: 'states' must be a list");
  for (const auto& s : states) spec.states.push_back(parse_state(s));
  return spec;
}

PipelineSpec load_pipeline(const fs::path& file) { return parse_pipeline(read_json(file)); }

json pipeline_json(const PipelineSpec& spec) { return detail::pipeline_to_json(spec); }

void apply_overrides(PipelineSpec& spec, const std::map<std::string, RelationOverride>& overrides) {
  for (const auto& [key, o] : overrides) {
    const auto slash = key.find('/');
    if (slash == std::string::npos) {
      throw ConfigError("override key '" + key + "' must be state/relation");
    }
    const std::string state = key.substr(0, slash);
    const std::string relation = key.substr(slash + 1);
    auto s = std::find_if(spec.states.begin(), spec.states.end(),
                          [&](const StateSpec& st) { return st.id == state; });
    if (s == spec.states.end()) throw ConfigError("override names unknown state '" + state + "'");
    auto& rels = s->relations.relations;
    auto r = std::find_if(rels.begin(), rels.end(),
                          [&](const MetamorphicRelation& m) { return m.id == relation; });
    if (r == rels.end()) throw ConfigError("override names unknown relation '" + key + "'");
    if (o.tau) r->tau = *o.tau;
    if (o.tolerance) {
      if (!is_deviation_metric(r->metric)) {
        throw ConfigError("override '" + key + "': tolerance applies to deviation metrics only");
      }
      r->tau = -*o.tolerance;
    }
    if (o.strict) r->strict = *o.strict;
    if (o.iou_floor) r->iou_floor = *o.iou_floor;
    if (o.equality_tolerance) r->equality_tolerance = *o.equality_tolerance;
    if (o.class_thresholds) r->class_thresholds = *o.class_thresholds;
    check_relation(*r);
  }
}

CampaignConfig parse_campaign(const json& doc, const fs::path& base_dir) {
  check_keys(doc,
             {"id", "pipeline", "dataset", "perturbations", "components", "overrides", "seed",
              "jobs", "output_dir"},
             "campaign");
  CampaignConfig cfg;
  cfg.id = get_or<std::string>(doc, "id", cfg.id, "campaign");
  if (!doc.contains("pipeline")) throw ConfigError("campaign: missing field 'pipeline'");
  const json& pipeline = doc.at("pipeline");
  if (pipeline.is_string()) {
    cfg.pipeline_file = base_dir / pipeline.get<std::string>();
    cfg.pipeline = load_pipeline(cfg.pipeline_file);
  } else {
    cfg.pipeline = parse_pipeline(pipeline);
  }
  if (!doc.contains("dataset")) throw ConfigError("campaign: missing field 'dataset'");
  cfg.dataset = parse_dataset(doc.at("dataset"), base_dir);
  for (const auto& p : doc.value("perturbations", json::array())) {
    cfg.perturbations.push_back(parse_perturbation(p));
  }
  check_perturbation_set(cfg.perturbations);
  if (doc.contains("components")) {
    require_object(doc.at("components"), "components");
    for (const auto& [ref, m] : doc.at("components").items()) {
      cfg.components.emplace(ref, parse_mock(m, ref));
    }
  }
  if (doc.contains("overrides")) {
    require_object(doc.at("overrides"), "overrides");
    for (const auto& [key, o] : doc.at("overrides").items()) {
      cfg.overrides.emplace(key, parse_override(o, key));
    }
  }
  apply_overrides(cfg.pipeline, cfg.overrides);
  cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed, "campaign");
  cfg.jobs = get_or<std::size_t>(doc, "jobs", cfg.jobs, "campaign");
  if (cfg.jobs == 0) throw ConfigError("campaign: jobs must be at least 1");
  cfg.output_dir = base_dir / get_or<std::string>(doc, "output_dir", cfg.output_dir.string(),
                                                  "campaign");
  return cfg;
}

CampaignConfig load_campaign(const fs::path& file) {
  return parse_campaign(read_json(file), file.parent_path());
}

std::shared_ptr<Dataset> build_dataset(const DatasetConfig& config) {
  if (config.type == "scenes") return make_scene_dataset(config.scenes);
  if (config.type == "text") return make_text_dataset(config.text);
  if (config.type == "tensors") return make_tensor_dataset(config.tensors);
  if (config.type == "files") return make_file_dataset(config.files);
  throw ConfigError("dataset: unknown type '" + config.type + "'");
}

ComponentRegistry build_registry(const std::map<std::string, MockConfig>& components,
                                 std::shared_ptr<const GroundTruth> truth) {
  ComponentRegistry registry;
  for (const auto& [ref, m] : components) {
    if (m.type == "detector") {
      registry.add(ref, mock_detector(m.fault, truth, m.canonical_detections));
    } else if (m.type == "classifier") {
      registry.add(ref, mock_classifier(m.fault, m.labels));
    } else if (m.type == "ocr") {
      registry.add(ref, mock_ocr(m.fault, truth, m.canonical_text));
    } else if (m.type == "identity") {
      registry.add(ref, identity_component());
    } else {
      throw ConfigError("component '" + ref + "': unknown mock type '" + m.type + "'");
    }
  }
  return registry;
}

}  // namespace tracefault
