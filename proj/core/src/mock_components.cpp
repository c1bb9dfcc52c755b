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

#include "tracefault/mock_components.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tracefault/errors.hpp"
#include "tracefault/hash.hpp"
#include "tracefault/metamorphic.hpp"

namespace tracefault {

namespace {

constexpr std::string_view kEffectNames[] = {
    "none", "flip_label", "drop_detections", "add_spurious_detection",
    "shift_boxes", "corrupt_text", "reroute",
};

std::uint64_t node_hash(std::uint64_t salt, const NodeContext& ctx) {
  std::uint64_t h = hash_combine(salt, ctx.input_ref);
  h = hash_combine(h, ctx.path);
  if (ctx.perturbation != nullptr) h = hash_combine(h, std::string_view(ctx.perturbation->id));
  return h;
}

Box spurious_box(const DetectionSet& set) {
  double extent = 8.0;
  for (const auto& d : set.items) {
    extent = std::max({extent, d.box.x + d.box.w, d.box.y + d.box.h});
  }
  constexpr double kSide = 2.0;
  for (double y = 0.0; y + kSide <= extent; y += kSide) {
    for (double x = 0.0; x + kSide <= extent; x += kSide) {
      const Box candidate{x, y, kSide, kSide};
      const bool clear = std::none_of(set.items.begin(), set.items.end(), [&](const Detection& d) {
        return bbox_iou(candidate, d.box) > 0.0;
      });
      if (clear) return candidate;
    }
  }
  return Box{extent + kSide, extent + kSide, kSide, kSide};
}

char absent_char(std::string_view text) {
  for (char c : std::string_view("~#@%&*^|")) {
    if (text.find(c) == std::string_view::npos) return c;
  }
  for (int c = 33; c < 127; ++c) {
    if (text.find(static_cast<char>(c)) == std::string_view::npos) return static_cast<char>(c);
  }
  return '\x7f';
}

std::string pick_other(const std::string& current, const std::string& preferred) {
  if (!preferred.empty() && preferred != current) return preferred;
  return current + "'";
}

}  // namespace

std::string_view to_string(FaultEffect effect) noexcept {
  return kEffectNames[static_cast<std::size_t>(effect)];
}

std::optional<FaultEffect> parse_fault_effect(std::string_view name) noexcept {
  for (std::size_t i = 0; i < std::size(kEffectNames); ++i) {
    if (kEffectNames[i] == name) return static_cast<FaultEffect>(i);
  }
  return std::nullopt;
}

void check_fault_profile(const FaultProfile& p) {
  if (!(p.probability >= 0.0 && p.probability <= 1.0)) {
    throw ConfigError("fault probability must be in [0,1]");
  }
  if (!(p.rate >= 0.0 && p.rate <= 1.0)) throw ConfigError("corrupt_text rate must be in [0,1]");
  if (!std::isfinite(p.shift)) throw ConfigError("shift must be finite");
  if (p.effect == FaultEffect::Reroute && p.label.empty()) {
    throw ConfigError("reroute needs the label to emit");
  }
}

bool fault_fires(const FaultProfile& p, const NodeContext& ctx) {
  if (p.effect == FaultEffect::None || ctx.perturbation == nullptr) return false;
  if (p.trigger.kind && *p.trigger.kind != ctx.perturbation->kind) return false;
  if (ctx.perturbation->severity < p.trigger.min_severity) return false;
  return unit_interval(node_hash(hash_combine(p.seed, 0x6661756c74ULL), ctx)) < p.probability;
}

ComponentFunction mock_detector(FaultProfile profile, std::shared_ptr<const GroundTruth> truth,
                                DetectionSet canonical) {
  check_fault_profile(profile);
  return [profile = std::move(profile), truth = std::move(truth),
          canonical = std::move(canonical)](const Payload& input, const NodeContext& ctx) {
    if (!std::holds_alternative<Tensor>(input)) {
      throw EvaluationError("mock detector expects a tensor input");
    }
    std::optional<DetectionSet> gt = truth ? truth->detections(ctx.input_ref) : std::nullopt;
    DetectionSet out = gt ? std::move(*gt) : canonical;
    if (!fault_fires(profile, ctx)) return Payload(std::move(out));

    switch (profile.effect) {
      case FaultEffect::FlipLabel:
        if (!out.items.empty()) {
          auto& det = out.items[node_hash(profile.seed, ctx) % out.items.size()];
          det.label = pick_other(det.label, profile.label);
        }
        break;
      case FaultEffect::DropDetections:
        out.items.resize(out.items.size() - std::min(profile.count, out.items.size()));
        break;
      case FaultEffect::AddSpuriousDetection:
        out.items.push_back(Detection{spurious_box(out),
                                      profile.label.empty() ? "spurious" : profile.label, 0.5});
        break;
      case FaultEffect::ShiftBoxes:
        for (auto& d : out.items) d.box.x += profile.shift;
        break;
      case FaultEffect::Reroute:
        if (!out.items.empty()) out.items.front().label = profile.label;
        break;
      case FaultEffect::CorruptText:
      case FaultEffect::None:
        break;
    }
    return Payload(std::move(out));
  };
}

ComponentFunction mock_classifier(FaultProfile profile, std::vector<std::string> labels) {
  check_fault_profile(profile);
  if (labels.empty()) throw ConfigError("mock classifier needs at least one label");
  return [profile = std::move(profile), labels = std::move(labels)](const Payload&,
                                                                    const NodeContext& ctx) {
    const std::uint64_t base = hash_combine(hash_combine(0x6c6162656cULL, ctx.input_ref), ctx.path);
    std::size_t index = base % labels.size();
    if (labels.size() > 1 && profile.effect == FaultEffect::FlipLabel && fault_fires(profile, ctx)) {
      index = (index + 1 + node_hash(profile.seed, ctx) % (labels.size() - 1)) % labels.size();
    }
    return Payload(Label{labels[index]});
  };
}

ComponentFunction mock_ocr(FaultProfile profile, std::shared_ptr<const GroundTruth> truth,
                           std::string canonical) {
  check_fault_profile(profile);
  return [profile = std::move(profile), truth = std::move(truth),
          canonical = std::move(canonical)](const Payload&, const NodeContext& ctx) {
    std::optional<std::string> gt = truth ? truth->text(ctx.input_ref) : std::nullopt;
    std::string text = gt ? std::move(*gt) : canonical;
    if (profile.effect != FaultEffect::CorruptText || text.empty() || !fault_fires(profile, ctx)) {
      return Payload(Text{std::move(text)});
    }
    const auto n = std::min<std::size_t>(
        text.size(),
        static_cast<std::size_t>(std::llround(profile.rate * static_cast<double>(text.size()))));
    // Substitutes with a character the text never contains, so each
    // substitution costs exactly one edit.
    const char fill = absent_char(text);
    std::vector<std::size_t> positions(text.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    SplitMix64 rng(node_hash(profile.seed, ctx));
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(positions[i], positions[i + rng.below(positions.size() - i)]);
      text[positions[i]] = fill;
    }
    return Payload(Text{std::move(text)});
  };
}

ComponentFunction identity_component() {
  return [](const Payload& input, const NodeContext&) { return input; };
}

}  // namespace tracefault
