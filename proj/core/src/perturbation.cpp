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

#include "tracefault/perturbation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "tracefault/errors.hpp"

namespace tracefault {

namespace {

using Table = std::array<double, kMaxSeverity>;

const std::map<std::string, Table, std::less<>>& severity_tables() {
  static const std::map<std::string, Table, std::less<>> tables{
      {"gaussian_noise", {0.08, 0.12, 0.18, 0.26, 0.38}},
      {"brightness_scale", {1.1, 1.2, 1.3, 1.4, 1.5}},
      {"occlusion_patch", {0.02, 0.05, 0.10, 0.15, 0.25}},
      {"mask_dropout", {0.05, 0.10, 0.20, 0.30, 0.50}},
      {"latent_jitter", {0.01, 0.02, 0.05, 0.10, 0.20}},
      {"char_flip", {0.10, 0.20, 0.30, 0.40, 0.50}},
  };
  return tables;
}

constexpr std::string_view kFlipAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";

Payload gaussian_noise(const Payload& p, const PerturbationSpec&, double sigma,
                       SplitMix64& rng) {
  Tensor t = std::get<Tensor>(p);
  for (double& v : t.data) v += sigma * rng.normal();
  return t;
}

Payload brightness_scale(const Payload& p, const PerturbationSpec&, double factor,
                         SplitMix64&) {
  Tensor t = std::get<Tensor>(p);
  for (double& v : t.data) v *= factor;
  return t;
}

Payload occlusion_patch(const Payload& p, const PerturbationSpec&, double fraction,
                        SplitMix64& rng) {
  Tensor t = std::get<Tensor>(p);
  if (t.data.empty() || fraction <= 0.0) return t;
  fraction = std::min(fraction, 1.0);
  if (t.shape.size() < 2) {
    const std::size_t n = t.data.size();
    const auto len = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n))), 1, n);
    const std::size_t start = rng.below(n - len + 1);
    std::fill_n(t.data.begin() + static_cast<std::ptrdiff_t>(start), len, 0.0);
    return t;
  }
  const std::size_t h = t.shape[0];
  const std::size_t w = t.shape[1];
  const std::size_t inner = t.data.size() / (h * w);
  const double side = std::sqrt(fraction);
  const auto ph = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(side * static_cast<double>(h))), 1, h);
  const auto pw = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(side * static_cast<double>(w))), 1, w);
  const std::size_t r0 = rng.below(h - ph + 1);
  const std::size_t c0 = rng.below(w - pw + 1);
  for (std::size_t r = r0; r < r0 + ph; ++r) {
    for (std::size_t c = c0; c < c0 + pw; ++c) {
      std::fill_n(t.data.begin() + static_cast<std::ptrdiff_t>((r * w + c) * inner), inner, 0.0);
    }
  }
  return t;
}

Payload mask_dropout(const Payload& p, const PerturbationSpec&, double rate,
                     SplitMix64& rng) {
  if (const auto* m = std::get_if<MaskStack>(&p)) {
    MaskStack out = *m;
    for (auto& b : out.bits) {
      if (rng.uniform() < rate) b = 0;
    }
    return out;
  }
  Tensor t = std::get<Tensor>(p);
  for (double& v : t.data) {
    if (rng.uniform() < rate) v = 0.0;
  }
  return t;
}

Payload latent_jitter(const Payload& p, const PerturbationSpec&, double amplitude,
                      SplitMix64& rng) {
  auto jitter = [&] { return amplitude * (2.0 * rng.uniform() - 1.0); };
  if (const auto* d = std::get_if<Distribution>(&p)) {
    Distribution out = *d;
    for (double& v : out.probs) v = std::clamp(v + jitter(), 0.0, 1.0);
    return out;
  }
  Tensor t = std::get<Tensor>(p);
  for (double& v : t.data) v += jitter();
  return t;
}

Payload char_flip(const Payload& p, const PerturbationSpec&, double rate, SplitMix64& rng) {
  Text t = std::get<Text>(p);
  for (char& c : t.value) {
    if (rng.uniform() >= rate) continue;
    char replacement = c;
    while (replacement == c) {
      replacement = kFlipAlphabet[rng.below(kFlipAlphabet.size())];
    }
    c = replacement;
  }
  return t;
}

}  // namespace

void check_perturbation_set(const PerturbationSet& set) {
  std::set<std::string_view> ids;
  for (const auto& spec : set) {
    if (spec.id.empty()) throw ConfigError("perturbation without an id");
    if (!ids.insert(spec.id).second) {
      throw ConfigError("duplicate perturbation id '" + spec.id + "'");
    }
    if (spec.kind.empty()) throw ConfigError("perturbation '" + spec.id + "' has no kind");
    if (spec.severity < kMinSeverity || spec.severity > kMaxSeverity) {
      throw ConfigError("perturbation '" + spec.id + "' severity must be in 1..5");
    }
    if (spec.magnitude && !std::isfinite(*spec.magnitude)) {
      throw ConfigError("perturbation '" + spec.id + "' magnitude must be finite");
    }
  }
}

double effective_magnitude(const PerturbationSpec& spec) {
  if (spec.magnitude) return *spec.magnitude;
  const auto& tables = severity_tables();
  const auto it = tables.find(spec.kind);
  if (it == tables.end()) return 0.0;
  const int s = std::clamp(spec.severity, kMinSeverity, kMaxSeverity);
  return it->second[static_cast<std::size_t>(s - 1)];
}

std::uint64_t stream_seed(const PerturbationSpec& spec, std::uint64_t campaign_seed,
                          std::uint64_t input_ref, std::string_view site) {
  std::uint64_t h = hash_combine(campaign_seed, std::string_view(spec.id));
  h = hash_combine(h, spec.seed);
  h = hash_combine(h, input_ref);
  return hash_combine(h, site);
}

const PerturbationCatalog& PerturbationCatalog::builtin() {
  static const PerturbationCatalog catalog = [] {
    PerturbationCatalog c;
    c.add("gaussian_noise", {PayloadKind::Tensor}, gaussian_noise);
    c.add("brightness_scale", {PayloadKind::Tensor}, brightness_scale);
    c.add("occlusion_patch", {PayloadKind::Tensor}, occlusion_patch);
    c.add("mask_dropout", {PayloadKind::Tensor, PayloadKind::MaskStack}, mask_dropout);
    c.add("latent_jitter", {PayloadKind::Tensor, PayloadKind::Distribution}, latent_jitter);
    c.add("char_flip", {PayloadKind::Text}, char_flip);
    return c;
  }();
  return catalog;
}

void PerturbationCatalog::add(std::string kind, std::vector<PayloadKind> accepts,
                              PerturbationFn fn) {
  kinds_[std::move(kind)] = Entry{std::move(accepts), std::move(fn)};
}

bool PerturbationCatalog::contains(std::string_view kind) const {
  return kinds_.find(kind) != kinds_.end();
}

bool PerturbationCatalog::accepts(std::string_view kind, PayloadKind payload) const {
  const auto it = kinds_.find(kind);
  if (it == kinds_.end()) return false;
  const auto& a = it->second.accepts;
  return std::find(a.begin(), a.end(), payload) != a.end();
}

Payload PerturbationCatalog::apply(const PerturbationSpec& spec, const Payload& payload,
                                   std::uint64_t campaign_seed, std::uint64_t input_ref,
                                   std::string_view site) const {
  const auto it = kinds_.find(spec.kind);
  if (it == kinds_.end()) {
    throw ConfigError("unknown perturbation kind '" + spec.kind + "'");
  }
  if (!accepts(spec.kind, kind_of(payload))) {
    throw ConfigError("perturbation '" + spec.id + "' (" + spec.kind + ") cannot apply to " +
                      std::string(to_string(kind_of(payload))) + " payloads");
  }
  SplitMix64 rng(stream_seed(spec, campaign_seed, input_ref, site));
  Payload out = it->second.fn(payload, spec, effective_magnitude(spec), rng);
  if (kind_of(out) != kind_of(payload) || dimensionality(out) != dimensionality(payload)) {
    throw ConfigError("perturbation '" + spec.id + "' changed the payload shape");
  }
  return out;
}

Payload apply(const PerturbationSpec& spec, const Payload& payload,
              std::uint64_t campaign_seed, std::uint64_t input_ref, std::string_view site) {
  return PerturbationCatalog::builtin().apply(spec, payload, campaign_seed, input_ref, site);
}

std::vector<PerturbationPair> enumerate_pairs(std::size_t dataset_size,
                                              const PerturbationSet& set) {
  std::vector<PerturbationPair> out;
  out.reserve(dataset_size * set.size());
  for (std::size_t x = 0; x < dataset_size; ++x) {
    for (std::size_t g = 0; g < set.size(); ++g) out.push_back({x, g});
  }
  return out;
}

}  // namespace tracefault
