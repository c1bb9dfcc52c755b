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

#include "tracefault/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_map>

#include "spec_codec.hpp"
#include "tracefault/errors.hpp"
#include "tracefault/hash.hpp"

namespace tracefault {

namespace {

bool per_detection(ProjectionKind kind) { return kind != ProjectionKind::Identity; }

bool contains(const std::vector<std::string>& set, const std::string& v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

bool detection_matches(const RoutePredicate& pred, const Detection& det) {
  switch (pred.kind) {
    case PredicateKind::Always:
      return true;
    case PredicateKind::LabelIn:
      return contains(pred.labels, det.label);
    case PredicateKind::ConfidenceAtLeast:
      return det.confidence >= pred.bound;
  }
  return false;
}

bool whole_output_matches(const RoutePredicate& pred, const Payload& output) {
  switch (pred.kind) {
    case PredicateKind::Always:
      return true;
    case PredicateKind::LabelIn:
      if (const auto* l = std::get_if<Label>(&output)) return contains(pred.labels, l->value);
      if (const auto* s = std::get_if<DetectionSet>(&output)) {
        return std::any_of(s->items.begin(), s->items.end(),
                           [&](const Detection& d) { return detection_matches(pred, d); });
      }
      break;
    case PredicateKind::ConfidenceAtLeast:
      if (const auto* d = std::get_if<Distribution>(&output)) {
        return !d->probs.empty() &&
               *std::max_element(d->probs.begin(), d->probs.end()) >= pred.bound;
      }
      if (const auto* s = std::get_if<DetectionSet>(&output)) {
        return std::any_of(s->items.begin(), s->items.end(),
                           [&](const Detection& d) { return detection_matches(pred, d); });
      }
      break;
  }
  throw ConfigError("routing predicate does not apply to " +
                    std::string(to_string(kind_of(output))) + " outputs");
}

bool predicate_fits(const RoutePredicate& pred, ProjectionKind projection, PayloadKind out) {
  if (per_detection(projection) || pred.kind == PredicateKind::Always) return true;
  if (pred.kind == PredicateKind::LabelIn) {
    return out == PayloadKind::Label || out == PayloadKind::DetectionSet;
  }
  return out == PayloadKind::Distribution || out == PayloadKind::DetectionSet;
}

Tensor crop(const Tensor& image, const Box& box, std::size_t size) {
  if (image.shape.size() != 2 || image.shape[0] == 0 || image.shape[1] == 0) {
    throw ConfigError("crop projection needs a non-empty 2-D tensor input");
  }
  const std::size_t rows = image.shape[0];
  const std::size_t cols = image.shape[1];
  auto sample = [](double origin, double extent, std::size_t i, std::size_t n,
                   std::size_t limit) {
    const double pos = origin + (static_cast<double>(i) + 0.5) * extent / static_cast<double>(n);
    const double clamped = std::clamp(std::floor(pos), 0.0, static_cast<double>(limit - 1));
    return static_cast<std::size_t>(clamped);
  };
  Tensor out{std::vector<double>(size * size), {size, size}};
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t r = sample(box.y, box.h, i, size, rows);
    for (std::size_t j = 0; j < size; ++j) {
      const std::size_t c = sample(box.x, box.w, j, size, cols);
      out.data[i * size + j] = image.data[r * cols + c];
    }
  }
  return out;
}

Payload project(const Projection& projection, const Detection& det, const Payload* source_input) {
  switch (projection.kind) {
    case ProjectionKind::Crop: {
      const auto* image = source_input ? std::get_if<Tensor>(source_input) : nullptr;
      if (image == nullptr) throw ConfigError("crop projection needs a tensor source input");
      return crop(*image, det.box, projection.crop_size);
    }
    case ProjectionKind::Box:
      return Tensor{{det.box.x, det.box.y, det.box.w, det.box.h}, {4}};
    case ProjectionKind::Label:
      return Label{det.label};
    case ProjectionKind::Identity:
      break;
  }
  throw ConfigError("identity projection is not per-detection");
}

}  // namespace

void ComponentRegistry::add(std::string ref, ComponentFunction fn) {
  entries_[std::move(ref)] = std::move(fn);
}

bool ComponentRegistry::contains(std::string_view ref) const {
  return entries_.find(ref) != entries_.end();
}

const ComponentFunction& ComponentRegistry::at(std::string_view ref) const {
  const auto it = entries_.find(ref);
  if (it == entries_.end()) throw ConfigError("unknown component '" + std::string(ref) + "'");
  return it->second;
}

const StateSpec* PipelineSpec::find(std::string_view id) const {
  for (const auto& s : states) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<StateId> PipelineSpec::module_ids() const {
  std::vector<StateId> ids;
  ids.reserve(states.size());
  for (const auto& s : states) ids.push_back(s.id);
  return ids;
}

std::vector<CompositeRelation> PipelineSpec::composites() const {
  std::vector<CompositeRelation> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.relations);
  return out;
}

std::uint64_t spec_id(const PipelineSpec& spec) {
  return fnv1a64(detail::pipeline_to_json(spec).dump());
}

std::string_view to_string(IssueCode code) noexcept {
  switch (code) {
    case IssueCode::DuplicateState: return "duplicate-state";
    case IssueCode::MissingInitial: return "missing-initial";
    case IssueCode::MissingTerminals: return "missing-terminals";
    case IssueCode::UnknownState: return "unknown-state";
    case IssueCode::MissingComponent: return "missing-component";
    case IssueCode::DimensionMismatch: return "dimension-mismatch";
    case IssueCode::Cycle: return "cycle";
    case IssueCode::InvalidPredicate: return "invalid-predicate";
    case IssueCode::InvalidProjection: return "invalid-projection";
    case IssueCode::InvalidRelation: return "invalid-relation";
    case IssueCode::Unreachable: return "unreachable";
  }
  return "unknown";
}

bool ValidationReport::ok() const noexcept { return errors() == 0; }

std::size_t ValidationReport::count(IssueCode code) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [&](const ValidationIssue& i) { return i.code == code; }));
}

std::size_t ValidationReport::errors() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(), [](const ValidationIssue& i) {
        return i.severity == IssueSeverity::Error;
      }));
}

std::optional<PayloadShape> projected_shape(const Projection& projection,
                                            const StateSpec& source) {
  const PayloadShape& out = source.component.out;
  if (projection.kind == ProjectionKind::Identity) return out;
  if (out.kind != PayloadKind::DetectionSet) return std::nullopt;
  switch (projection.kind) {
    case ProjectionKind::Crop:
      if (source.component.in.kind != PayloadKind::Tensor || projection.crop_size == 0) {
        return std::nullopt;
      }
      return PayloadShape{PayloadKind::Tensor, projection.crop_size * projection.crop_size};
    case ProjectionKind::Box:
      return PayloadShape{PayloadKind::Tensor, 4};
    case ProjectionKind::Label:
      return PayloadShape{PayloadKind::Label, 1};
    case ProjectionKind::Identity:
      break;
  }
  return std::nullopt;
}

ValidationReport validate_pipeline(const PipelineSpec& spec, const ComponentRegistry* registry) {
  ValidationReport report;
  auto error = [&](IssueCode code, std::string msg) {
    report.issues.push_back({IssueSeverity::Error, code, std::move(msg)});
  };

  std::set<std::string_view> ids;
  for (const auto& s : spec.states) {
    if (s.id.empty()) error(IssueCode::UnknownState, "state with an empty id");
    if (!ids.insert(s.id).second) error(IssueCode::DuplicateState, "duplicate state '" + s.id + "'");
  }
  if (spec.find(spec.initial) == nullptr) {
    error(IssueCode::MissingInitial, "initial state '" + spec.initial + "' is not declared");
  }
  if (spec.terminals.empty()) error(IssueCode::MissingTerminals, "no terminal states declared");
  for (const auto& t : spec.terminals) {
    if (spec.find(t) == nullptr) {
      error(IssueCode::UnknownState, "terminal state '" + t + "' is not declared");
    }
  }

  for (const auto& s : spec.states) {
    const std::string where = "state '" + s.id + "': ";
    if (registry != nullptr && !registry->contains(s.component.ref)) {
      error(IssueCode::MissingComponent, where + "component '" + s.component.ref + "' is not registered");
    }
    for (const auto& rel : s.relations.relations) {
      try {
        check_relation(rel);
        if (required_kind(rel.metric) != s.component.out.kind) {
          error(IssueCode::InvalidRelation,
                where + "relation '" + rel.id + "' needs " +
                    std::string(to_string(required_kind(rel.metric))) + " outputs");
        }
      } catch (const ConfigError& e) {
        error(IssueCode::InvalidRelation, where + e.what());
      }
    }
    for (const auto& rule : s.routes) {
      if (rule.source != s.id) {
        error(IssueCode::UnknownState, where + "routing rule declares source '" + rule.source + "'");
      }
      for (const auto& target : rule.targets) {
        const StateSpec* dst = spec.find(target.state);
        if (dst == nullptr) {
          error(IssueCode::UnknownState, where + "routes to undeclared state '" + target.state + "'");
          continue;
        }
        if (!predicate_fits(rule.predicate, target.projection.kind, s.component.out.kind)) {
          error(IssueCode::InvalidPredicate,
                where + "predicate does not apply to " +
                    std::string(to_string(s.component.out.kind)) + " outputs");
        }
        const auto shape = projected_shape(target.projection, s);
        if (!shape) {
          error(IssueCode::InvalidProjection,
                where + "projection to '" + target.state + "' does not fit " +
                    describe(s.component.in) + " -> " + describe(s.component.out));
          continue;
        }
        if (!compatible(*shape, dst->component.in)) {
          error(IssueCode::DimensionMismatch, where + "delivers " + describe(*shape) + " to '" +
                                                  target.state + "' which expects " +
                                                  describe(dst->component.in));
        }
      }
    }
  }

  // Cycle detection and reachability over declared states only.
  std::unordered_map<std::string_view, std::vector<std::string_view>> edges;
  for (const auto& s : spec.states) {
    auto& out = edges[s.id];
    for (const auto& rule : s.routes) {
      for (const auto& t : rule.targets) {
        if (spec.find(t.state) != nullptr) out.push_back(t.state);
      }
    }
  }
  enum class Mark { White, Grey, Black };
  std::unordered_map<std::string_view, Mark> mark;
  bool cyclic = false;
  std::function<void(std::string_view)> dfs = [&](std::string_view v) {
    mark[v] = Mark::Grey;
    for (auto w : edges[v]) {
      const Mark m = mark[w];
      if (m == Mark::Grey) {
        cyclic = true;
      } else if (m == Mark::White) {
        dfs(w);
      }
    }
    mark[v] = Mark::Black;
  };
  for (const auto& s : spec.states) {
    if (mark[s.id] == Mark::White) dfs(s.id);
  }
  if (cyclic) error(IssueCode::Cycle, "routing graph contains a cycle");

  if (spec.find(spec.initial) != nullptr) {
    std::set<std::string_view> seen{spec.initial};
    std::vector<std::string_view> stack{spec.initial};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : edges[v]) {
        if (seen.insert(w).second) stack.push_back(w);
      }
    }
    for (const auto& s : spec.states) {
      if (!seen.contains(s.id)) {
        report.issues.push_back({IssueSeverity::Warning, IssueCode::Unreachable,
                                 "state '" + s.id + "' is unreachable from the initial state"});
      }
    }
  }
  return report;
}

std::vector<Activation> route(const RoutingRule& rule, const Payload& output,
                              const Payload* source_input) {
  std::vector<Activation> out;
  for (const auto& target : rule.targets) {
    if (per_detection(target.projection.kind) &&
        !std::holds_alternative<DetectionSet>(output)) {
      throw ConfigError("per-detection projection needs a detection-set output");
    }
  }
  const bool any_per_detection =
      std::any_of(rule.targets.begin(), rule.targets.end(),
                  [](const RouteTarget& t) { return per_detection(t.projection.kind); });

  if (!any_per_detection) {
    if (whole_output_matches(rule.predicate, output)) {
      for (const auto& target : rule.targets) out.emplace_back(target.state, output);
    }
    return out;
  }

  const auto& detections = std::get<DetectionSet>(output);
  const bool whole = whole_output_matches(rule.predicate, output);
  for (const auto& det : detections.items) {
    if (!detection_matches(rule.predicate, det)) continue;
    for (const auto& target : rule.targets) {
      if (per_detection(target.projection.kind)) {
        out.emplace_back(target.state, project(target.projection, det, source_input));
      }
    }
  }
  // Identity targets mixed into a per-detection rule fire once.
  if (whole) {
    for (const auto& target : rule.targets) {
      if (!per_detection(target.projection.kind)) out.emplace_back(target.state, output);
    }
  }
  return out;
}

namespace {

class Executor {
 public:
  Executor(const PipelineSpec& spec, const ComponentRegistry& registry, std::uint64_t seed,
           const RunOptions& options, TraceTree& tree)
      : spec_(spec), registry_(registry), seed_(seed), options_(options), tree_(tree) {}

  void visit(const StateSpec& state, Payload input, const TracePath& path) {
    const std::string key = path_key(path);
    const PerturbationSpec* pert = options_.perturbation;
    if (pert != nullptr && pert->target_state && *pert->target_state == state.id) {
      const auto& catalog = options_.catalog ? *options_.catalog : PerturbationCatalog::builtin();
      input = catalog.apply(*pert, input, options_.campaign_seed, options_.input_ref, key);
    }

    const std::size_t index = tree_.nodes.size();
    tree_.nodes.push_back(TraceNode{state.id, path, digest(input), std::nullopt, false});

    const ComponentFunction& fn = registry_.at(state.component.ref);
    std::optional<Payload> output;
    if (accepts(state.component.in, input)) {
      const NodeContext ctx{state.id, key, options_.input_ref, seed_, pert};
      try {
        Payload y = fn(input, ctx);
        check_invariants(y);
        if (accepts(state.component.out, y)) output = std::move(y);
      } catch (const std::exception&) {
        output.reset();
      }
    }
    if (!output) {
      tree_.nodes[index].component_error = true;
      return;
    }

    std::vector<Activation> children;
    for (const auto& rule : state.routes) {
      auto acts = route(rule, *output, &input);
      std::move(acts.begin(), acts.end(), std::back_inserter(children));
    }
    tree_.nodes[index].output = std::move(output);

    std::unordered_map<std::string, std::uint32_t> ordinals;
    for (auto& [target, payload] : children) {
      const StateSpec* next = spec_.find(target);
      if (next == nullptr) throw ConfigError("route to undeclared state '" + target + "'");
      TracePath child = path;
      child.push_back({target, ordinals[target]++});
      visit(*next, std::move(payload), child);
    }
  }

 private:
  const PipelineSpec& spec_;
  const ComponentRegistry& registry_;
  std::uint64_t seed_;
  const RunOptions& options_;
  TraceTree& tree_;
};

}  // namespace

TraceTree execute(const PipelineSpec& spec, const Payload& input,
                  const ComponentRegistry& registry, std::uint64_t seed,
                  const RunOptions& options) {
  const StateSpec* root = spec.find(spec.initial);
  if (root == nullptr) throw ConfigError("initial state '" + spec.initial + "' is not declared");
  if (!accepts(root->component.in, input)) {
    throw ConfigError("input " + std::string(to_string(kind_of(input))) +
                      " does not fit initial state shape " + describe(root->component.in));
  }
  TraceTree tree;
  tree.run_id = options.run_id;
  tree.spec_id = spec_id(spec);
  tree.seed = seed;
  tree.input_ref = options.input_ref;
  if (options.perturbation != nullptr) tree.perturbation_ref = options.perturbation->id;
  Executor(spec, registry, seed, options, tree).visit(*root, input, {});
  return tree;
}

}  // namespace tracefault
