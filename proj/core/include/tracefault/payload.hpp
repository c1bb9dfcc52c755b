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
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace tracefault {

// Runtime values exchanged between pipeline components.

enum class PayloadKind : std::uint8_t {
  Label,
  Distribution,
  DetectionSet,
  MaskStack,
  Text,
  Tensor,
};

std::string_view to_string(PayloadKind kind) noexcept;
std::optional<PayloadKind> parse_payload_kind(std::string_view name) noexcept;

struct Label {
  std::string value;
  bool operator==(const Label&) const = default;
};

struct Distribution {
  std::vector<double> probs;
  bool operator==(const Distribution&) const = default;
};

/// Axis-aligned box; (x, y) is the lower-left corner, (w, h) the extents.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  bool operator==(const Box&) const = default;
};

struct Detection {
  Box box;
  std::string label;
  double confidence = 1.0;
  bool operator==(const Detection&) const = default;
};

struct DetectionSet {
  std::vector<Detection> items;
  bool operator==(const DetectionSet&) const = default;
};

/// k binary masks of height x width, stored class-major, row-major.
struct MaskStack {
  std::size_t classes = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> bits;

  static MaskStack zeros(std::size_t classes, std::size_t height, std::size_t width) {
    return MaskStack{classes, height, width,
                     std::vector<std::uint8_t>(classes * height * width, 0)};
  }
  std::size_t plane_size() const noexcept { return height * width; }
  std::span<const std::uint8_t> mask(std::size_t cls) const {
    return std::span<const std::uint8_t>(bits).subspan(cls * plane_size(), plane_size());
  }
  std::span<std::uint8_t> mask(std::size_t cls) {
    return std::span<std::uint8_t>(bits).subspan(cls * plane_size(), plane_size());
  }
  bool operator==(const MaskStack&) const = default;
};

struct Text {
  std::string value;
  bool operator==(const Text&) const = default;
};

/// Flat row-major array with an explicit shape.
struct Tensor {
  std::vector<double> data;
  std::vector<std::size_t> shape;
  bool operator==(const Tensor&) const = default;
};

using Payload = std::variant<Label, Distribution, DetectionSet, MaskStack, Text, Tensor>;

PayloadKind kind_of(const Payload& payload) noexcept;

/// Declared dimensionality of a payload. Zero means "variable" (detection
/// sets and text have no fixed size).
std::size_t dimensionality(const Payload& payload) noexcept;

/// Throws EvaluationError when a payload violates its kind's invariants.
void check_invariants(const Payload& payload);

/// Kind plus dimensionality as declared on a component's input or output.
/// `dim == 0` accepts any size.
struct PayloadShape {
  PayloadKind kind = PayloadKind::Tensor;
  std::size_t dim = 0;
  bool operator==(const PayloadShape&) const = default;
};

bool accepts(const PayloadShape& declared, const Payload& payload) noexcept;
bool compatible(const PayloadShape& produced, const PayloadShape& expected) noexcept;
std::string describe(const PayloadShape& shape);

// Canonical serialization. Object keys are sorted and doubles are printed
// in shortest round-trip form, so serialize(parse(s)) == s.
nlohmann::json to_json_value(const Payload& payload);
Payload payload_from_json_value(const nlohmann::json& value);
std::string canonical_json(const Payload& payload);
Payload parse_payload(std::string_view text);

/// Content hash of the canonical serialization.
std::uint64_t digest(const Payload& payload);

}  // namespace tracefault
