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

#include "tracefault/trace.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "tracefault/errors.hpp"
#include "tracefault/hash.hpp"

namespace tracefault {

std::string path_key(const TracePath& path) {
  std::string key;
  for (const auto& step : path) {
    if (!key.empty()) key += '/';
    key += step.state;
    key += '#';
    key += std::to_string(step.ordinal);
  }
  return key;
}

TracePath parse_path_key(std::string_view key) {
  TracePath path;
  while (!key.empty()) {
    const auto slash = key.find('/');
    const std::string_view step = key.substr(0, slash);
    const auto hash = step.rfind('#');
    if (hash == std::string_view::npos || hash == 0) {
      throw IntegrityError("malformed path step '" + std::string(step) + "'");
    }
    std::uint32_t ordinal = 0;
    const auto digits = step.substr(hash + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ordinal);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw IntegrityError("malformed path ordinal '" + std::string(step) + "'");
    }
    path.push_back({StateId(step.substr(0, hash)), ordinal});
    if (slash == std::string_view::npos) break;
    key.remove_prefix(slash + 1);
  }
  return path;
}

const TraceNode* TraceTree::find(std::string_view key) const {
  for (const auto& n : nodes) {
    if (path_key(n.path) == key) return &n;
  }
  return nullptr;
}

void check_structure(const TraceTree& tree) {
  if (tree.nodes.empty()) throw IntegrityError("trace tree has no nodes");
  if (!tree.nodes.front().path.empty()) throw IntegrityError("first node is not the root");
  std::unordered_set<std::string> seen;
  for (const auto& node : tree.nodes) {
    const std::string key = path_key(node.path);
    if (!seen.insert(key).second) throw IntegrityError("duplicate node path '" + key + "'");
    if (node.path.empty()) {
      if (&node != &tree.nodes.front()) throw IntegrityError("more than one root");
      continue;
    }
    if (node.path.back().state != node.state) {
      throw IntegrityError("node state does not match its path '" + key + "'");
    }
    TracePath parent(node.path.begin(), node.path.end() - 1);
    if (!seen.contains(path_key(parent))) {
      throw IntegrityError("node '" + key + "' precedes or lacks its parent");
    }
  }
}

ActivationSet activated_modules(const TraceTree& tree) {
  ActivationSet out;
  for (const auto& n : tree.nodes) out.insert(n.state);
  return out;
}

NodeAlignment align(const TraceTree& ref, const TraceTree& pert) {
  if (ref.spec_id != pert.spec_id) {
    throw ConfigError("cannot align traces produced by different pipeline specs");
  }
  std::unordered_map<std::string, std::size_t> pert_index;
  for (std::size_t i = 0; i < pert.nodes.size(); ++i) {
    pert_index.emplace(path_key(pert.nodes[i].path), i);
  }
  NodeAlignment out;
  std::vector<bool> pert_used(pert.nodes.size(), false);
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    const auto it = pert_index.find(path_key(ref.nodes[i].path));
    if (it != pert_index.end() && pert.nodes[it->second].state == ref.nodes[i].state) {
      out.aligned.emplace_back(i, it->second);
      pert_used[it->second] = true;
    } else {
      out.ref_only.push_back(i);
    }
  }
  for (std::size_t j = 0; j < pert.nodes.size(); ++j) {
    if (!pert_used[j]) out.pert_only.push_back(j);
  }
  return out;
}

std::vector<std::uint8_t> phantom_flags(const ActivationSet& ref, const ActivationSet& pert,
                                        std::span<const StateId> modules) {
  std::vector<std::uint8_t> bits(modules.size(), 0);
  for (std::size_t i = 0; i < modules.size(); ++i) {
    bits[i] = (ref.contains(modules[i]) != pert.contains(modules[i])) ? 1 : 0;
  }
  return bits;
}

std::vector<ModuleScore> module_scores(const TraceTree& ref, const TraceTree& pert,
                                       const NodeAlignment& alignment,
                                       std::span<const StateId> modules,
                                       std::span<const CompositeRelation> composites) {
  if (modules.size() != composites.size()) {
    throw ConfigError("one composite relation per module is required");
  }
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < modules.size(); ++i) index.emplace(modules[i], i);
  auto lookup = [&](const StateId& s) {
    const auto it = index.find(s);
    if (it == index.end()) throw ConfigError("trace references unknown state '" + s + "'");
    return it->second;
  };

  std::vector<ModuleScore> scores(modules.size());
  std::vector<bool> has_pair(modules.size(), false);

  for (const auto& [ri, pi] : alignment.aligned) {
    const TraceNode& a = ref.nodes[ri];
    const TraceNode& b = pert.nodes[pi];
    const std::size_t m = lookup(a.state);
    ModuleScore& score = scores[m];
    if (!has_pair[m]) {
      has_pair[m] = true;
      score.status = ModuleStatus::Pass;
    }
    if (score.status == ModuleStatus::Deviation) continue;
    if (a.component_error || b.component_error || !a.output || !b.output) {
      score.status = ModuleStatus::Deviation;
      score.failed_relation = std::string(kComponentErrorRelation);
      continue;
    }
    auto outcome = composite_score(composites[m], *a.output, *b.output);
    for (auto& obs : outcome.observations) score.observations.push_back(std::move(obs));
    if (!outcome.pass) {
      score.status = ModuleStatus::Deviation;
      score.failed_relation = std::move(outcome.failed_relation);
    }
  }

  std::vector<bool> in_ref(modules.size(), false);
  std::vector<bool> in_pert(modules.size(), false);
  for (const auto& n : ref.nodes) in_ref[lookup(n.state)] = true;
  for (const auto& n : pert.nodes) in_pert[lookup(n.state)] = true;
  for (std::size_t m = 0; m < modules.size(); ++m) {
    if (has_pair[m] || (!in_ref[m] && !in_pert[m])) continue;
    if (in_ref[m] && in_pert[m]) {
      // Activated on both sides, but never at the same position.
      scores[m].status = ModuleStatus::Deviation;
      scores[m].failed_relation = std::string(kUnalignedRelation);
    } else {
      scores[m].status = ModuleStatus::Unpaired;
    }
  }
  return scores;
}

bool system_score(std::span<const ModuleScore> scores, std::span<const std::uint8_t> phantom) {
  if (scores.size() != phantom.size()) {
    throw ConfigError("module scores and phantom flags differ in length");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].applicable()) continue;
    if (!scores[i].bit() || phantom[i] != 0) return false;
  }
  return true;
}

std::string canonical_json(const TraceTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({{"state", n.state},
                     {"path", path_key(n.path)},
                     {"input_digest", to_hex(n.input_digest)},
                     {"output", n.output ? to_json_value(*n.output) : nlohmann::json()},
                     {"component_error", n.component_error}});
  }
  nlohmann::json out{{"run_id", tree.run_id},
                     {"spec", to_hex(tree.spec_id)},
                     {"seed", tree.seed},
                     {"input_ref", tree.input_ref},
                     {"perturbation_ref", tree.perturbation_ref
                                              ? nlohmann::json(*tree.perturbation_ref)
                                              : nlohmann::json()},
                     {"nodes", std::move(nodes)}};
  return out.dump();
}

}  // namespace tracefault
