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

#include "tracefault/payload.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "tracefault/errors.hpp"
#include "tracefault/hash.hpp"

namespace tracefault {

namespace {

constexpr std::string_view kKindNames[] = {"label", "distribution", "detections",
                                           "masks", "text",         "tensor"};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw EvaluationError(std::string(what) + " must be finite");
  }
}

}  // namespace

std::string to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

bool from_hex(std::string_view text, std::uint64_t& out) noexcept {
  if (text.size() != 16) return false;
  std::uint64_t v = 0;
  for (char c : text) {
    v <<= 4;
    if (c >= '0' && c <= '9') {
      v |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      return false;
    }
  }
  out = v;
  return true;
}

std::string_view to_string(PayloadKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<PayloadKind> parse_payload_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == name) return static_cast<PayloadKind>(i);
  }
  return std::nullopt;
}

PayloadKind kind_of(const Payload& payload) noexcept {
  return static_cast<PayloadKind>(payload.index());
}

std::size_t dimensionality(const Payload& payload) noexcept {
  return std::visit(
      overloaded{
          [](const Label&) -> std::size_t { return 1; },
          [](const Distribution& d) -> std::size_t { return d.probs.size(); },
          [](const DetectionSet&) -> std::size_t { return 0; },
          [](const MaskStack& m) -> std::size_t { return m.classes * m.plane_size(); },
          [](const Text&) -> std::size_t { return 0; },
          [](const Tensor& t) -> std::size_t { return t.data.size(); },
      },
      payload);
}

void check_invariants(const Payload& payload) {
  std::visit(
      overloaded{
          [](const Label&) {},
          [](const Distribution& d) {
            for (double p : d.probs) {
              require_finite(p, "distribution entry");
              if (p < 0.0 || p > 1.0) {
                throw EvaluationError("distribution entry outside [0,1]");
              }
            }
          },
          [](const DetectionSet& s) {
            for (const auto& det : s.items) {
              require_finite(det.box.x, "box x");
              require_finite(det.box.y, "box y");
              require_finite(det.box.w, "box width");
              require_finite(det.box.h, "box height");
              require_finite(det.confidence, "confidence");
              if (det.box.w < 0.0 || det.box.h < 0.0) {
                throw EvaluationError("detection with negative width or height");
              }
            }
          },
          [](const MaskStack& m) {
            if (m.bits.size() != m.classes * m.plane_size()) {
              throw EvaluationError("mask stack size does not match k*h*w");
            }
            for (auto b : m.bits) {
              if (b > 1) throw EvaluationError("mask entry not binary");
            }
          },
          [](const Text&) {},
          [](const Tensor& t) {
            if (shape_product(t.shape) != t.data.size()) {
              throw EvaluationError("tensor shape product does not match length");
            }
            for (double v : t.data) require_finite(v, "tensor entry");
          },
      },
      payload);
}

bool accepts(const PayloadShape& declared, const Payload& payload) noexcept {
  return kind_of(payload) == declared.kind &&
         (declared.dim == 0 || dimensionality(payload) == declared.dim);
}

bool compatible(const PayloadShape& produced, const PayloadShape& expected) noexcept {
  return produced.kind == expected.kind &&
         (expected.dim == 0 || produced.dim == 0 || produced.dim == expected.dim);
}

std::string describe(const PayloadShape& shape) {
  std::string out(to_string(shape.kind));
  out += shape.dim == 0 ? "[*]" : "[" + std::to_string(shape.dim) + "]";
  return out;
}

nlohmann::json to_json_value(const Payload& payload) {
  using nlohmann::json;
  json out = json::object();
  out["kind"] = std::string(to_string(kind_of(payload)));
  std::visit(
      overloaded{
          [&](const Label& l) { out["value"] = l.value; },
          [&](const Distribution& d) { out["probs"] = d.probs; },
          [&](const DetectionSet& s) {
            json items = json::array();
            for (const auto& det : s.items) {
              items.push_back(json{{"box", {det.box.x, det.box.y, det.box.w, det.box.h}},
                                   {"label", det.label},
                                   {"confidence", det.confidence}});
            }
            out["items"] = std::move(items);
          },
          [&](const MaskStack& m) {
            std::string bits(m.bits.size(), '0');
            for (std::size_t i = 0; i < m.bits.size(); ++i) {
              if (m.bits[i]) bits[i] = '1';
            }
            out["shape"] = {m.classes, m.height, m.width};
            out["bits"] = std::move(bits);
          },
          [&](const Text& t) { out["value"] = t.value; },
          [&](const Tensor& t) {
            out["shape"] = t.shape;
            out["data"] = t.data;
          },
      },
      payload);
  return out;
}

Payload payload_from_json_value(const nlohmann::json& value) {
  try {
    const auto kind = parse_payload_kind(value.at("kind").get<std::string>());
    if (!kind) throw EvaluationError("unknown payload kind");
    Payload out;
    switch (*kind) {
      case PayloadKind::Label:
        out = Label{value.at("value").get<std::string>()};
        break;
      case PayloadKind::Distribution:
        out = Distribution{value.at("probs").get<std::vector<double>>()};
        break;
      case PayloadKind::DetectionSet: {
        DetectionSet set;
        for (const auto& item : value.at("items")) {
          const auto& b = item.at("box");
          if (b.size() != 4) throw EvaluationError("box needs 4 coordinates");
          set.items.push_back(Detection{
              Box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                  b[3].get<double>()},
              item.at("label").get<std::string>(),
              item.value("confidence", 1.0)});
        }
        out = std::move(set);
        break;
      }
      case PayloadKind::MaskStack: {
        const auto shape = value.at("shape").get<std::vector<std::size_t>>();
        if (shape.size() != 3) throw EvaluationError("mask shape needs [k,h,w]");
        const auto bits = value.at("bits").get<std::string>();
        MaskStack m = MaskStack::zeros(shape[0], shape[1], shape[2]);
        if (bits.size() != m.bits.size()) {
          throw EvaluationError("mask bit string does not match shape");
        }
        for (std::size_t i = 0; i < bits.size(); ++i) {
          if (bits[i] != '0' && bits[i] != '1') {
            throw EvaluationError("mask bits must be 0 or 1");
          }
          m.bits[i] = bits[i] == '1' ? 1 : 0;
        }
        out = std::move(m);
        break;
      }
      case PayloadKind::Text:
        out = Text{value.at("value").get<std::string>()};
        break;
      case PayloadKind::Tensor:
        out = Tensor{value.at("data").get<std::vector<double>>(),
                     value.at("shape").get<std::vector<std::size_t>>()};
        break;
    }
    check_invariants(out);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw EvaluationError(std::string("malformed payload: ") + e.what());
  }
}

std::string canonical_json(const Payload& payload) { return to_json_value(payload).dump(); }

Payload parse_payload(std::string_view text) {
  try {
    return payload_from_json_value(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw EvaluationError(std::string("malformed payload: ") + e.what());
  }
}

std::uint64_t digest(const Payload& payload) { return fnv1a64(canonical_json(payload)); }

}  // namespace tracefault
