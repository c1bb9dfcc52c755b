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
#include <vector>

#include "tracefault/hash.hpp"
#include "tracefault/payload.hpp"

namespace tracefault {

inline constexpr int kMinSeverity = 1;
inline constexpr int kMaxSeverity = 5;

struct PerturbationSpec {
  std::string id;
  /// gaussian_noise, brightness_scale, occlusion_patch, mask_dropout,
  /// latent_jitter, char_flip, or a kind registered by the user.
  std::string kind;
  int severity = 1;
  std::uint64_t seed = 0;
  /// Overrides the severity table (noise sigma, scale factor, area, rate).
  std::optional<double> magnitude;
  /// When set, the perturbation is injected into the payload entering this
  /// state instead of the external input.
  std::optional<std::string> target_state;
};

using PerturbationSet = std::vector<PerturbationSpec>;

/// Throws ConfigError on duplicate ids, empty kinds or severities outside 1..5.
void check_perturbation_set(const PerturbationSet& set);

/// Magnitude used for `spec`: the override if present, else the kind's
/// severity table entry (0 for kinds without a table).
double effective_magnitude(const PerturbationSpec& spec);

/// Seed of the pseudo-random stream for one application. Depends on the
/// campaign seed, the perturbation id and seed, the input and the site, so
/// adding inputs never shifts other inputs' streams.
std::uint64_t stream_seed(const PerturbationSpec& spec, std::uint64_t campaign_seed,
                          std::uint64_t input_ref, std::string_view site);

using PerturbationFn =
    std::function<Payload(const Payload&, const PerturbationSpec&, double magnitude,
                          SplitMix64& rng)>;

/// Registry of perturbation kinds. `builtin()` holds the six stock kinds.
class PerturbationCatalog {
 public:
  static const PerturbationCatalog& builtin();

  PerturbationCatalog() = default;

  /// Adds or replaces a kind. `accepts` lists the payload kinds it handles.
  void add(std::string kind, std::vector<PayloadKind> accepts, PerturbationFn fn);
  bool contains(std::string_view kind) const;
  bool accepts(std::string_view kind, PayloadKind payload) const;

  /// Output has the same kind and shape as `payload`. ConfigError when the
  /// kind is unknown or cannot handle the payload kind.
  Payload apply(const PerturbationSpec& spec, const Payload& payload,
                std::uint64_t campaign_seed, std::uint64_t input_ref = 0,
                std::string_view site = {}) const;

 private:
  struct Entry {
    std::vector<PayloadKind> accepts;
    PerturbationFn fn;
  };
  std::map<std::string, Entry, std::less<>> kinds_;
};

/// Applies a stock perturbation.
Payload apply(const PerturbationSpec& spec, const Payload& payload,
              std::uint64_t campaign_seed, std::uint64_t input_ref = 0,
              std::string_view site = {});

struct PerturbationPair {
  std::size_t input_ref = 0;
  std::size_t perturbation = 0;  // index into the set
  bool operator==(const PerturbationPair&) const = default;
};

/// Input-major cross product of inputs and perturbations.
std::vector<PerturbationPair> enumerate_pairs(std::size_t dataset_size,
                                              const PerturbationSet& set);

}  // namespace tracefault
