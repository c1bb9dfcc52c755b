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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tracefault/metamorphic.hpp"
#include "tracefault/payload.hpp"
#include "tracefault/perturbation.hpp"
#include "tracefault/trace.hpp"

namespace tracefault {

// A pipeline is a state-transition system: each state wraps one black-box
// component, a list of routing rules choosing successor states from the
// component's output, and the composite relation that scores it.

/// What a component sees besides its input.
struct NodeContext {
  std::string_view state;
  std::string_view path;
  std::uint64_t input_ref = 0;
  std::uint64_t seed = 0;
  /// Null on reference runs.
  const PerturbationSpec* perturbation = nullptr;
};

using ComponentFunction = std::function<Payload(const Payload&, const NodeContext&)>;

/// Maps component refs to implementations. Immutable once handed to
/// execute(); share freely across threads.
class ComponentRegistry {
 public:
  void add(std::string ref, ComponentFunction fn);
  bool contains(std::string_view ref) const;
  /// Throws ConfigError for unknown refs.
  const ComponentFunction& at(std::string_view ref) const;

 private:
  std::map<std::string, ComponentFunction, std::less<>> entries_;
};

struct ComponentBinding {
  std::string ref;
  PayloadShape in;
  PayloadShape out;
};

enum class PredicateKind { Always, LabelIn, ConfidenceAtLeast };

struct RoutePredicate {
  PredicateKind kind = PredicateKind::Always;
  std::vector<std::string> labels;
  double bound = 0.0;
};

/// How a routed payload is derived from the source output. Crop, Box and
/// Label act per detection and need a detection-set output.
enum class ProjectionKind { Identity, Crop, Box, Label };

struct Projection {
  ProjectionKind kind = ProjectionKind::Identity;
  /// Crop edge length; crops are resampled to crop_size x crop_size.
  std::size_t crop_size = 8;
};

struct RouteTarget {
  StateId state;
  Projection projection;
};

struct RoutingRule {
  StateId source;
  RoutePredicate predicate;
  std::vector<RouteTarget> targets;
};

struct StateSpec {
  StateId id;
  ComponentBinding component;
  std::vector<RoutingRule> routes;
  CompositeRelation relations;
};

struct PipelineSpec {
  std::string name;
  std::vector<StateSpec> states;
  StateId initial;
  std::vector<StateId> terminals;

  const StateSpec* find(std::string_view id) const;
  std::vector<StateId> module_ids() const;
  std::vector<CompositeRelation> composites() const;
};

/// Stable content hash of the spec; trace trees carry it so traces from
/// different specs are never compared.
std::uint64_t spec_id(const PipelineSpec& spec);

enum class IssueSeverity { Error, Warning };

enum class IssueCode {
  DuplicateState,
  MissingInitial,
  MissingTerminals,
  UnknownState,
  MissingComponent,
  DimensionMismatch,
  Cycle,
  InvalidPredicate,
  InvalidProjection,
  InvalidRelation,
  Unreachable,
};

std::string_view to_string(IssueCode code) noexcept;

struct ValidationIssue {
  IssueSeverity severity = IssueSeverity::Error;
  IssueCode code = IssueCode::UnknownState;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  /// True when the spec is executable (warnings allowed).
  bool ok() const noexcept;
  std::size_t count(IssueCode code) const noexcept;
  std::size_t errors() const noexcept;
};

/// Static checks. Pass a null registry to skip component-ref resolution.
ValidationReport validate_pipeline(const PipelineSpec& spec,
                                   const ComponentRegistry* registry);

/// Shape of the payload a projection delivers from `source`.
std::optional<PayloadShape> projected_shape(const Projection& projection,
                                            const StateSpec& source);

using Activation = std::pair<StateId, Payload>;

/// Activations selected by one rule. Per-detection projections yield one
/// activation per matching detection, in detection order. `source_input` is
/// the payload the source component consumed (crops are cut from it).
/// Throws ConfigError when the predicate or projection does not fit the
/// payload kinds.
std::vector<Activation> route(const RoutingRule& rule, const Payload& output,
                              const Payload* source_input = nullptr);

struct RunOptions {
  std::string run_id;
  std::uint64_t input_ref = 0;
  /// Perturbation injected into payloads entering its target state. Only
  /// perturbations with a target_state are applied by execute(); input-space
  /// perturbations are applied by the caller.
  const PerturbationSpec* perturbation = nullptr;
  const PerturbationCatalog* catalog = nullptr;
  std::uint64_t campaign_seed = 0;
};

/// Runs the pipeline on `input`, unrolling the execution trace tree. The
/// result depends only on (spec, input, seed, options). Component failures
/// are recorded as flagged nodes, never propagated. Throws ConfigError if
/// `input` does not fit the initial state.
TraceTree execute(const PipelineSpec& spec, const Payload& input,
                  const ComponentRegistry& registry, std::uint64_t seed,
                  const RunOptions& options = {});

}  // namespace tracefault
