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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tracefault/metamorphic.hpp"
#include "tracefault/payload.hpp"

namespace tracefault {

using StateId = std::string;

/// One edge from a parent to a child. `ordinal` counts earlier activations
/// of the same child state from the same parent, in routing order.
struct PathStep {
  StateId state;
  std::uint32_t ordinal = 0;
  bool operator==(const PathStep&) const = default;
};

using TracePath = std::vector<PathStep>;

/// "a#0/b#1"; the root path is the empty string.
std::string path_key(const TracePath& path);
TracePath parse_path_key(std::string_view key);

struct TraceNode {
  StateId state;
  TracePath path;
  std::uint64_t input_digest = 0;
  /// Absent when the component failed.
  std::optional<Payload> output;
  bool component_error = false;

  bool operator==(const TraceNode&) const = default;
};

/// Execution trace of one run. Nodes are stored in pre-order, root first.
struct TraceTree {
  std::string run_id;
  std::uint64_t spec_id = 0;
  std::uint64_t seed = 0;
  std::uint64_t input_ref = 0;
  std::optional<std::string> perturbation_ref;
  std::vector<TraceNode> nodes;

  const TraceNode* find(std::string_view key) const;
  bool operator==(const TraceTree&) const = default;
};

/// Throws IntegrityError unless the tree has exactly one root first and
/// every other node's parent path precedes it.
void check_structure(const TraceTree& tree);

using ActivationSet = std::set<StateId>;

ActivationSet activated_modules(const TraceTree& tree);

struct NodeAlignment {
  /// Index pairs into ref.nodes / pert.nodes.
  std::vector<std::pair<std::size_t, std::size_t>> aligned;
  std::vector<std::size_t> ref_only;
  std::vector<std::size_t> pert_only;
};

/// Pairs nodes with identical path and state. Throws ConfigError when the
/// trees come from different pipeline specs.
NodeAlignment align(const TraceTree& ref, const TraceTree& pert);

/// bit[i] = [modules[i] in ref] XOR [modules[i] in pert].
std::vector<std::uint8_t> phantom_flags(const ActivationSet& ref, const ActivationSet& pert,
                                        std::span<const StateId> modules);

enum class ModuleStatus {
  NotApplicable,  // absent from both trees
  Pass,           // every aligned pair satisfies the composite relation
  Deviation,      // an aligned pair violates it, a component failed, or the
                  // module ran in both trees without any aligned pair
  Unpaired,       // present in exactly one tree; S_i = 0, but no relation
                  // was violated
};

struct ModuleScore {
  ModuleStatus status = ModuleStatus::NotApplicable;
  std::optional<std::string> failed_relation;
  std::vector<RelationObservation> observations;

  bool applicable() const noexcept { return status != ModuleStatus::NotApplicable; }
  /// S_i as a bit; meaningful only when applicable.
  bool bit() const noexcept { return status == ModuleStatus::Pass; }
};

inline constexpr std::string_view kComponentErrorRelation = "component-error";
inline constexpr std::string_view kUnalignedRelation = "unaligned";

/// `composites[i]` is the relation bound to `modules[i]`.
std::vector<ModuleScore> module_scores(const TraceTree& ref, const TraceTree& pert,
                                       const NodeAlignment& alignment,
                                       std::span<const StateId> modules,
                                       std::span<const CompositeRelation> composites);

/// Product over applicable modules of (S_i and not phantom_i).
bool system_score(std::span<const ModuleScore> scores, std::span<const std::uint8_t> phantom);

/// Canonical single-line serialization; equal trees give equal strings.
std::string canonical_json(const TraceTree& tree);

}  // namespace tracefault
