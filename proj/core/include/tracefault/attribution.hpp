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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracefault/trace.hpp"

namespace tracefault {

/// Everything the accumulator needs from one (reference, perturbed) pair.
/// Vectors are indexed like the module list.
struct RunEvaluation {
  std::vector<ModuleScore> scores;
  ActivationSet activated_ref;
  ActivationSet activated_pert;
  bool system_pass = true;
};

/// Failure-contribution counters. FC entries are integral until
/// normalization, so merging is exact.
struct FCAccumulator {
  std::vector<StateId> modules;
  std::vector<std::uint64_t> fc;
  std::uint64_t total_failures = 0;
  std::uint64_t runs = 0;
  /// Runs where the module was activated in the reference or perturbed trace.
  std::vector<std::uint64_t> activations;
  /// Runs where the module's composite relation was violated (ModuleStatus
  /// Deviation). Runs on one side only are counted in `divergences`.
  std::vector<std::uint64_t> violations;
  /// Runs where the module ran on exactly one side.
  std::vector<std::uint64_t> divergences;
  /// "state/relation" -> violation count.
  std::map<std::string, std::uint64_t> relation_violations;

  FCAccumulator() = default;
  explicit FCAccumulator(std::vector<StateId> module_ids);

  std::size_t index_of(std::string_view module) const;
  bool operator==(const FCAccumulator&) const = default;
};

/// One iteration of the inner loop: on a system failure, every module that
/// ran on either side gains [S_i = 0] + (activatedRef xor activatedPert).
/// A module that ran on only one side has S_i = 0 and gains 2.
void accumulate(FCAccumulator& acc, const RunEvaluation& run);

/// Element-wise sum. Throws ConfigError when module lists differ.
void merge(FCAccumulator& into, const FCAccumulator& from);

struct CampaignMetadata {
  std::string campaign_id;
  std::size_t dataset_size = 0;
  std::size_t perturbation_count = 0;
  std::uint64_t seed = 0;
};

struct AttributionReport {
  std::vector<StateId> modules;
  std::vector<double> alpha;
  std::vector<double> fc_normalized;
  std::vector<std::uint64_t> fc;
  std::uint64_t total_failures = 0;
  std::uint64_t runs = 0;
  std::vector<std::uint64_t> activations;
  std::vector<std::uint64_t> violations;
  std::vector<std::uint64_t> divergences;
  std::map<std::string, std::uint64_t> relation_violations;
  bool no_failures = true;
  CampaignMetadata metadata;

  /// No perturbed run was evaluated.
  bool empty() const noexcept { return runs == 0; }
};

/// Normalizes FC by the failure count, then into attribution weights.
/// Throws IntegrityError when failures were counted without any module
/// contribution.
AttributionReport finalize(const FCAccumulator& acc, const CampaignMetadata& metadata = {});

/// 1 - violations/activations; nullopt when the module never ran.
std::optional<double> predicted_accuracy(const FCAccumulator& acc, std::string_view module);

/// Module with the lowest predicted accuracy among `candidates` (all modules
/// when empty); ties go to the earlier module.
std::optional<StateId> least_accurate(const FCAccumulator& acc,
                                      std::span<const StateId> candidates = {});

}  // namespace tracefault
