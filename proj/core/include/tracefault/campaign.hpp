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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tracefault/attribution.hpp"
#include "tracefault/config.hpp"
#include "tracefault/perturbation.hpp"
#include "tracefault/pipeline.hpp"
#include "tracefault/report.hpp"
#include "tracefault/synthetic.hpp"

namespace tracefault {

/// Scores one perturbed trace against its reference: alignment, module
/// scores, phantom-call flags and the system score.
RunEvaluation evaluate_pair(const PipelineSpec& spec, const TraceTree& ref,
                            const TraceTree& pert);

/// A campaign over already-built parts. Pointers are borrowed.
struct Campaign {
  std::string id = "campaign";
  const PipelineSpec* pipeline = nullptr;
  const ComponentRegistry* registry = nullptr;
  const Dataset* dataset = nullptr;
  PerturbationSet perturbations;
  /// Stock kinds when null.
  const PerturbationCatalog* catalog = nullptr;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  /// Receives the event log when set.
  std::ostream* events = nullptr;
};

struct CampaignResult {
  AttributionReport report;
  FCAccumulator accumulator;
  std::vector<InputRobustness> robustness;
};

/// "x3:ref" for the reference run of input 3, "x3:<perturbation id>"
/// otherwise.
std::string run_id(std::size_t input_ref, const PerturbationSpec* perturbation);

/// Runs the reference trace of every input and one perturbed trace per
/// (input, perturbation), accumulating failure contributions. Input-space
/// perturbations are applied to the dataset input; perturbations with a
/// target state are injected by the executor. Results and the event log do
/// not depend on `jobs`. Throws ConfigError before executing anything when
/// the pipeline or perturbation set does not validate.
CampaignResult run_campaign(const Campaign& campaign);

/// Builds the dataset and mock registry from `config`, runs the campaign and
/// writes the event log and reports into config.output_dir.
CampaignResult run_campaign(const CampaignConfig& config);

}  // namespace tracefault
