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

#include "tracefault/attribution.hpp"

#include <algorithm>

#include "tracefault/errors.hpp"

namespace tracefault {

FCAccumulator::FCAccumulator(std::vector<StateId> module_ids)
    : modules(std::move(module_ids)),
      fc(modules.size(), 0),
      activations(modules.size(), 0),
      violations(modules.size(), 0),
      divergences(modules.size(), 0) {}

std::size_t FCAccumulator::index_of(std::string_view module) const {
  const auto it = std::find(modules.begin(), modules.end(), module);
  if (it == modules.end()) throw ConfigError("unknown module '" + std::string(module) + "'");
  return static_cast<std::size_t>(it - modules.begin());
}

void accumulate(FCAccumulator& acc, const RunEvaluation& run) {
  if (run.scores.size() != acc.modules.size()) {
    throw ConfigError("run evaluation does not cover every module");
  }
  ++acc.runs;
  if (!run.system_pass) ++acc.total_failures;
  for (std::size_t i = 0; i < acc.modules.size(); ++i) {
    const bool in_ref = run.activated_ref.contains(acc.modules[i]);
    const bool in_pert = run.activated_pert.contains(acc.modules[i]);
    if (!in_ref && !in_pert) continue;
    ++acc.activations[i];
    const ModuleScore& score = run.scores[i];
    const bool deviation = !score.bit();
    const bool diverged = in_ref != in_pert;
    if (score.status == ModuleStatus::Deviation) {
      ++acc.violations[i];
      if (score.failed_relation) {
        ++acc.relation_violations[acc.modules[i] + "/" + *score.failed_relation];
      }
    }
    if (diverged) ++acc.divergences[i];
    if (!run.system_pass) {
      acc.fc[i] += (deviation ? 1u : 0u) + (diverged ? 1u : 0u);
    }
  }
}

void merge(FCAccumulator& into, const FCAccumulator& from) {
  if (into.modules != from.modules) throw ConfigError("cannot merge accumulators over different modules");
  for (std::size_t i = 0; i < into.modules.size(); ++i) {
    into.fc[i] += from.fc[i];
    into.activations[i] += from.activations[i];
    into.violations[i] += from.violations[i];
    into.divergences[i] += from.divergences[i];
  }
  into.total_failures += from.total_failures;
  into.runs += from.runs;
  for (const auto& [k, v] : from.relation_violations) into.relation_violations[k] += v;
}

AttributionReport finalize(const FCAccumulator& acc, const CampaignMetadata& metadata) {
  AttributionReport r;
  const std::size_t n = acc.modules.size();
  r.modules = acc.modules;
  r.fc = acc.fc;
  r.total_failures = acc.total_failures;
  r.runs = acc.runs;
  r.activations = acc.activations;
  r.violations = acc.violations;
  r.divergences = acc.divergences;
  r.relation_violations = acc.relation_violations;
  r.metadata = metadata;
  r.alpha.assign(n, 0.0);
  r.fc_normalized.assign(n, 0.0);
  r.no_failures = acc.total_failures == 0;
  if (r.no_failures) return r;

  const double failures = static_cast<double>(acc.total_failures);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.fc_normalized[i] = static_cast<double>(acc.fc[i]) / failures;
    total += r.fc_normalized[i];
  }
  if (total <= 0.0) {
    throw IntegrityError("system failures recorded without any module contribution");
  }
  for (std::size_t i = 0; i < n; ++i) r.alpha[i] = r.fc_normalized[i] / total;
  return r;
}

std::optional<double> predicted_accuracy(const FCAccumulator& acc, std::string_view module) {
  const std::size_t i = acc.index_of(module);
  if (acc.activations[i] == 0) return std::nullopt;
  return 1.0 - static_cast<double>(acc.violations[i]) / static_cast<double>(acc.activations[i]);
}

std::optional<StateId> least_accurate(const FCAccumulator& acc,
                                      std::span<const StateId> candidates) {
  std::span<const StateId> pool = candidates.empty() ? std::span<const StateId>(acc.modules)
                                                     : candidates;
  std::optional<StateId> worst;
  double worst_accuracy = 2.0;
  for (const auto& m : pool) {
    const auto a = predicted_accuracy(acc, m);
    if (a && *a < worst_accuracy) {
      worst_accuracy = *a;
      worst = m;
    }
  }
  return worst;
}

}  // namespace tracefault
