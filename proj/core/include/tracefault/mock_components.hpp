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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracefault/payload.hpp"
#include "tracefault/pipeline.hpp"

namespace tracefault {

// Deterministic stand-ins for learned components. Each mock derives its
// output from embedded ground truth and misbehaves only when its fault
// profile triggers on the run's perturbation. All randomness is a seeded
// hash of (profile seed, input, perturbation, node path).

enum class FaultEffect {
  None,
  FlipLabel,
  DropDetections,
  AddSpuriousDetection,
  ShiftBoxes,
  CorruptText,
  Reroute,
};

std::string_view to_string(FaultEffect effect) noexcept;
std::optional<FaultEffect> parse_fault_effect(std::string_view name) noexcept;

struct FaultTrigger {
  /// Perturbation kind that arms the fault; any kind when unset.
  std::optional<std::string> kind;
  int min_severity = 1;
};

struct FaultProfile {
  FaultTrigger trigger;
  FaultEffect effect = FaultEffect::None;
  double probability = 1.0;
  /// drop_detections: how many detections to drop.
  std::size_t count = 1;
  /// shift_boxes: horizontal offset added to every box.
  double shift = 2.0;
  /// corrupt_text: fraction of characters substituted.
  double rate = 0.0;
  /// add_spurious_detection / reroute / flip_label: label to emit.
  std::string label;
  std::uint64_t seed = 0;
};

/// Throws ConfigError for probabilities outside [0,1], negative rates, or a
/// reroute without a label.
void check_fault_profile(const FaultProfile& profile);

/// True when the profile arms on this node's run and the seeded draw falls
/// below its probability. Never true on reference runs.
bool fault_fires(const FaultProfile& profile, const NodeContext& ctx);

/// Ground truth embedded in synthetic datasets, looked up by input index.
class GroundTruth {
 public:
  virtual ~GroundTruth() = default;
  virtual std::optional<DetectionSet> detections(std::uint64_t /*input_ref*/) const {
    return std::nullopt;
  }
  virtual std::optional<std::string> text(std::uint64_t /*input_ref*/) const {
    return std::nullopt;
  }
};

/// Tensor -> DetectionSet. Emits the ground-truth detections for the input
/// (or `canonical` when no ground truth covers it).
ComponentFunction mock_detector(FaultProfile profile, std::shared_ptr<const GroundTruth> truth,
                                DetectionSet canonical = {});

/// Any payload -> Label. The label is a hash of (input, node path) over
/// `labels`, so it is stable under perturbations that keep the node's
/// position in the trace.
ComponentFunction mock_classifier(FaultProfile profile, std::vector<std::string> labels);

/// Any payload -> Text. Echoes the ground-truth text; corrupt_text replaces
/// round(rate * length) characters with symbols absent from the text, which
/// raises the edit distance by exactly that many.
ComponentFunction mock_ocr(FaultProfile profile, std::shared_ptr<const GroundTruth> truth,
                           std::string canonical = {});

ComponentFunction identity_component();

}  // namespace tracefault
