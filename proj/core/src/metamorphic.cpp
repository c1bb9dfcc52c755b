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

#include "tracefault/metamorphic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tracefault/errors.hpp"

namespace tracefault {

namespace {

struct MetricInfo {
  std::string_view name;
  PayloadKind kind;
  RelationKind relation;
  bool deviation;
};

constexpr MetricInfo kMetrics[] = {
    {"label", PayloadKind::Label, RelationKind::Delta, false},
    {"distribution_linf", PayloadKind::Distribution, RelationKind::Heaviside, true},
    {"tensor_linf", PayloadKind::Tensor, RelationKind::Heaviside, true},
    {"box_iou", PayloadKind::DetectionSet, RelationKind::Heaviside, false},
    {"detection_subset", PayloadKind::DetectionSet, RelationKind::Delta, false},
    {"detection_iou", PayloadKind::DetectionSet, RelationKind::Heaviside, false},
    {"detection_labels", PayloadKind::DetectionSet, RelationKind::Delta, false},
    {"detection_confidence", PayloadKind::DetectionSet, RelationKind::Heaviside, true},
    {"mask_equal", PayloadKind::MaskStack, RelationKind::Delta, false},
    {"mask_iou", PayloadKind::MaskStack, RelationKind::Heaviside, false},
    {"levenshtein", PayloadKind::Text, RelationKind::Heaviside, true},
};

const MetricInfo& info(Metric m) { return kMetrics[static_cast<std::size_t>(m)]; }

void require_not_nan(double v, const char* what) {
  if (std::isnan(v)) throw EvaluationError(std::string(what) + " is NaN");
}

void require_same_shape(const MaskStack& a, const MaskStack& b) {
  if (a.classes != b.classes || a.height != b.height || a.width != b.width) {
    throw EvaluationError("mask stacks have different shapes");
  }
  if (a.bits.size() != a.classes * a.plane_size() ||
      b.bits.size() != b.classes * b.plane_size()) {
    throw EvaluationError("mask stack storage does not match its shape");
  }
}

void check_box(const Box& b) {
  if (b.w < 0.0 || b.h < 0.0) {
    throw EvaluationError("box with negative width or height");
  }
}

template <class T>
const T& expect(const MetamorphicRelation& rel, const Payload& p) {
  const T* v = std::get_if<T>(&p);
  if (v == nullptr) {
    throw ConfigError("relation '" + rel.id + "' expects " +
                      std::string(to_string(info(rel.metric).kind)) + " payloads, got " +
                      std::string(to_string(kind_of(p))));
  }
  return *v;
}

}  // namespace

bool kronecker(double theta, double tau, double tolerance) {
  require_not_nan(theta, "metric");
  require_not_nan(tau, "threshold");
  return std::fabs(theta - tau) <= tolerance;
}

bool heaviside(double theta, double tau) {
  require_not_nan(theta, "metric");
  require_not_nan(tau, "threshold");
  return theta >= tau;
}

bool mr_label(const Label& ref, const Label& pert, std::span<const std::string> vocabulary) {
  if (!vocabulary.empty()) {
    auto known = [&](const std::string& l) {
      return std::find(vocabulary.begin(), vocabulary.end(), l) != vocabulary.end();
    };
    if (!known(ref.value) || !known(pert.value)) {
      throw ConfigError("label outside the declared vocabulary");
    }
  }
  return ref.value == pert.value;
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw EvaluationError("vectors have different lengths");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::fabs(a[i] - b[i]);
    require_not_nan(d, "vector difference");
    worst = std::max(worst, d);
  }
  return worst;
}

bool mr_distribution(const Distribution& ref, const Distribution& pert, double tolerance) {
  if (!(tolerance >= 0.0)) throw ConfigError("distribution tolerance must be >= 0");
  return heaviside(-linf_distance(ref.probs, pert.probs), -tolerance);
}

double bbox_iou(const Box& a, const Box& b) {
  check_box(a);
  check_box(b);
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool mr_iou(const Box& a, const Box& b, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("IoU threshold must be in [0,1]");
  return heaviside(bbox_iou(a, b), tau);
}

DetectionMatch match_detections(const DetectionSet& ref, const DetectionSet& pert,
                                double iou_floor) {
  std::vector<DetectionPair> candidates;
  for (std::size_t r = 0; r < ref.items.size(); ++r) {
    for (std::size_t p = 0; p < pert.items.size(); ++p) {
      const double iou = bbox_iou(ref.items[r].box, pert.items[p].box);
      if (iou > 0.0 && iou >= iou_floor) candidates.push_back({r, p, iou});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const DetectionPair& l, const DetectionPair& r) {
              if (l.iou != r.iou) return l.iou > r.iou;
              if (l.ref != r.ref) return l.ref < r.ref;
              return l.pert < r.pert;
            });

  DetectionMatch match;
  std::vector<bool> ref_used(ref.items.size(), false);
  std::vector<bool> pert_used(pert.items.size(), false);
  for (const auto& c : candidates) {
    if (ref_used[c.ref] || pert_used[c.pert]) continue;
    ref_used[c.ref] = true;
    pert_used[c.pert] = true;
    match.pairs.push_back(c);
  }
  for (std::size_t p = 0; p < pert.items.size(); ++p) {
    if (!pert_used[p]) match.unmatched_pert.push_back(p);
  }
  return match;
}

DetectorVerdict mr_detector_composite(const DetectionSet& ref, const DetectionSet& pert,
                                      const DetectorParams& params) {
  const DetectionMatch match = match_detections(ref, pert, params.iou_floor);
  if (!match.unmatched_pert.empty()) return {false, DetectorCheck::Subset};
  for (const auto& pair : match.pairs) {
    const bool ok = params.strict_persist ? pair.iou > params.iou_persist
                                          : pair.iou >= params.iou_persist;
    if (!ok) return {false, DetectorCheck::IouPersist};
  }
  for (const auto& pair : match.pairs) {
    if (ref.items[pair.ref].label != pert.items[pair.pert].label) {
      return {false, DetectorCheck::LabelsKept};
    }
  }
  if (params.confidence_tolerance) {
    for (const auto& pair : match.pairs) {
      const double delta = std::fabs(ref.items[pair.ref].confidence -
                                     pert.items[pair.pert].confidence);
      if (delta > *params.confidence_tolerance) return {false, DetectorCheck::Confidence};
    }
  }
  return {};
}

double mask_iou(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw EvaluationError("masks have different sizes");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0;
    const bool y = b[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

bool mr_segmentation(const MaskStack& ref, const MaskStack& pert, SegmentationMode mode,
                     std::span<const double> tau_per_class) {
  require_same_shape(ref, pert);
  if (mode == SegmentationMode::StrictEqual) {
    for (std::size_t i = 0; i < ref.bits.size(); ++i) {
      if ((ref.bits[i] != 0) != (pert.bits[i] != 0)) return false;
    }
    return true;
  }
  if (tau_per_class.size() != ref.classes) {
    throw EvaluationError("need one IoU threshold per class");
  }
  for (std::size_t k = 0; k < ref.classes; ++k) {
    if (!heaviside(mask_iou(ref.mask(k), pert.mask(k)), tau_per_class[k])) return false;
  }
  return true;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool mr_ocr(std::string_view ref, std::string_view pert, long tau) {
  if (tau > 0) throw ConfigError("edit-distance threshold must be <= 0");
  return heaviside(-static_cast<double>(levenshtein(ref, pert)), static_cast<double>(tau));
}

std::string_view to_string(Metric metric) noexcept { return info(metric).name; }

std::optional<Metric> parse_metric(std::string_view name) noexcept {
  for (std::size_t i = 0; i < std::size(kMetrics); ++i) {
    if (kMetrics[i].name == name) return static_cast<Metric>(i);
  }
  return std::nullopt;
}

PayloadKind required_kind(Metric metric) noexcept { return info(metric).kind; }
RelationKind default_kind(Metric metric) noexcept { return info(metric).relation; }
bool is_deviation_metric(Metric metric) noexcept { return info(metric).deviation; }

MetamorphicRelation make_relation(std::string id, Metric metric, double tau) {
  MetamorphicRelation rel;
  rel.id = std::move(id);
  rel.metric = metric;
  rel.kind = default_kind(metric);
  rel.tau = tau;
  return rel;
}

void check_relation(const MetamorphicRelation& rel) {
  const std::string where = "relation '" + rel.id + "': ";
  if (rel.id.empty()) throw ConfigError("relation without an id");
  if (!std::isfinite(rel.tau)) throw ConfigError(where + "threshold must be finite");
  if (!(rel.equality_tolerance >= 0.0)) {
    throw ConfigError(where + "equality tolerance must be >= 0");
  }
  if (!(rel.iou_floor >= 0.0 && rel.iou_floor <= 1.0)) {
    throw ConfigError(where + "iou_floor must be in [0,1]");
  }
  for (double t : rel.class_thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError(where + "class thresholds must be in [0,1]");
  }
  switch (rel.metric) {
    case Metric::BoxIou:
    case Metric::DetectionIou:
      if (rel.tau < 0.0 || rel.tau > 1.0) throw ConfigError(where + "IoU tau must be in [0,1]");
      break;
    case Metric::MaskIou:
      if (rel.class_thresholds.empty() && (rel.tau < 0.0 || rel.tau > 1.0)) {
        throw ConfigError(where + "IoU tau must be in [0,1]");
      }
      break;
    case Metric::TextEdit:
      if (rel.tau > 0.0 || std::trunc(rel.tau) != rel.tau) {
        throw ConfigError(where + "edit-distance tau must be a non-positive integer");
      }
      break;
    case Metric::DistributionLinf:
    case Metric::TensorLinf:
    case Metric::DetectionConfidence:
      if (rel.tau > 0.0) throw ConfigError(where + "tolerance must be >= 0");
      break;
    default:
      break;
  }
}

double extract_metric(const MetamorphicRelation& rel, const Payload& ref,
                      const Payload& pert) {
  switch (rel.metric) {
    case Metric::LabelMatch: {
      const auto& a = expect<Label>(rel, ref);
      const auto& b = expect<Label>(rel, pert);
      return mr_label(a, b, rel.vocabulary) ? 0.0 : 1.0;
    }
    case Metric::DistributionLinf:
      return -linf_distance(expect<Distribution>(rel, ref).probs,
                            expect<Distribution>(rel, pert).probs);
    case Metric::TensorLinf: {
      const auto& a = expect<Tensor>(rel, ref);
      const auto& b = expect<Tensor>(rel, pert);
      if (a.shape != b.shape) throw EvaluationError("tensors have different shapes");
      return -linf_distance(a.data, b.data);
    }
    case Metric::BoxIou: {
      const auto& a = expect<DetectionSet>(rel, ref);
      const auto& b = expect<DetectionSet>(rel, pert);
      if (a.items.size() != b.items.size()) return 0.0;
      double worst = 1.0;
      for (std::size_t i = 0; i < a.items.size(); ++i) {
        worst = std::min(worst, bbox_iou(a.items[i].box, b.items[i].box));
      }
      return worst;
    }
    case Metric::DetectionSubset: {
      const auto m = match_detections(expect<DetectionSet>(rel, ref),
                                      expect<DetectionSet>(rel, pert), rel.iou_floor);
      return -static_cast<double>(m.unmatched_pert.size());
    }
    case Metric::DetectionIou: {
      const auto m = match_detections(expect<DetectionSet>(rel, ref),
                                      expect<DetectionSet>(rel, pert), rel.iou_floor);
      double worst = 1.0;
      for (const auto& p : m.pairs) worst = std::min(worst, p.iou);
      return worst;
    }
    case Metric::DetectionLabels: {
      const auto& a = expect<DetectionSet>(rel, ref);
      const auto& b = expect<DetectionSet>(rel, pert);
      const auto m = match_detections(a, b, rel.iou_floor);
      std::size_t changed = 0;
      for (const auto& p : m.pairs) {
        if (a.items[p.ref].label != b.items[p.pert].label) ++changed;
      }
      return -static_cast<double>(changed);
    }
    case Metric::DetectionConfidence: {
      const auto& a = expect<DetectionSet>(rel, ref);
      const auto& b = expect<DetectionSet>(rel, pert);
      const auto m = match_detections(a, b, rel.iou_floor);
      double worst = 0.0;
      for (const auto& p : m.pairs) {
        worst = std::max(worst, std::fabs(a.items[p.ref].confidence -
                                          b.items[p.pert].confidence));
      }
      return -worst;
    }
    case Metric::MaskEqual: {
      const auto& a = expect<MaskStack>(rel, ref);
      const auto& b = expect<MaskStack>(rel, pert);
      require_same_shape(a, b);
      std::size_t diff = 0;
      for (std::size_t i = 0; i < a.bits.size(); ++i) {
        if ((a.bits[i] != 0) != (b.bits[i] != 0)) ++diff;
      }
      return -static_cast<double>(diff);
    }
    case Metric::MaskIou: {
      const auto& a = expect<MaskStack>(rel, ref);
      const auto& b = expect<MaskStack>(rel, pert);
      require_same_shape(a, b);
      const bool per_class = !rel.class_thresholds.empty();
      if (per_class && rel.class_thresholds.size() != a.classes) {
        throw EvaluationError("relation '" + rel.id + "' needs one threshold per class");
      }
      double worst = per_class ? std::numeric_limits<double>::infinity() : 1.0;
      for (std::size_t k = 0; k < a.classes; ++k) {
        const double iou = mask_iou(a.mask(k), b.mask(k));
        worst = std::min(worst, per_class ? iou - rel.class_thresholds[k] : iou);
      }
      if (per_class && a.classes == 0) worst = 0.0;
      return worst;
    }
    case Metric::TextEdit:
      return -static_cast<double>(
          levenshtein(expect<Text>(rel, ref).value, expect<Text>(rel, pert).value));
  }
  throw ConfigError("unknown metric");
}

RelationOutcome evaluate(const MetamorphicRelation& rel, const Payload& ref,
                         const Payload& pert) {
  const double theta = extract_metric(rel, ref, pert);
  // Per-class mask thresholds are folded into theta as margins.
  const double tau =
      (rel.metric == Metric::MaskIou && !rel.class_thresholds.empty()) ? 0.0 : rel.tau;
  bool holds = false;
  if (rel.kind == RelationKind::Delta) {
    holds = kronecker(theta, tau, rel.equality_tolerance);
  } else if (rel.strict) {
    holds = heaviside(theta, tau) && theta != tau;
  } else {
    holds = heaviside(theta, tau);
  }
  return {holds, theta};
}

CompositeOutcome composite_score(const CompositeRelation& composite, const Payload& ref,
                                 const Payload& pert) {
  CompositeOutcome out;
  for (const auto& rel : composite.relations) {
    const auto r = evaluate(rel, ref, pert);
    out.observations.push_back({rel.id, rel.metric, r.theta});
    if (!r.holds) {
      out.pass = false;
      out.failed_relation = rel.id;
      return out;
    }
  }
  return out;
}

}  // namespace tracefault
