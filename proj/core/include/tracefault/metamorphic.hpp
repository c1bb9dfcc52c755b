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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracefault/payload.hpp"

namespace tracefault {

// Metamorphic relations over (reference output, perturbed output) pairs.
//
// Every relation reduces to one of two primitives applied to an extracted
// metric theta and a threshold tau:
//   kronecker(theta, tau) = [theta == tau]
//   heaviside(theta, tau) = [theta >= tau]
// Deviation-style metrics (L-inf distance, edit distance, confidence drift)
// are negated before comparison so that every relation passes iff the
// deviation stays within tolerance.

inline constexpr double kDefaultEqualityTolerance = 1e-9;

/// [theta == tau] within an absolute tolerance. Throws EvaluationError on NaN.
bool kronecker(double theta, double tau, double tolerance = kDefaultEqualityTolerance);

/// [theta >= tau]. Throws EvaluationError on NaN.
bool heaviside(double theta, double tau);

/// Label invariance. When `vocabulary` is non-empty both labels must belong
/// to it, otherwise ConfigError.
bool mr_label(const Label& ref, const Label& pert,
              std::span<const std::string> vocabulary = {});

double linf_distance(std::span<const double> a, std::span<const double> b);

/// Passes iff ||ref - pert||_inf <= tolerance.
bool mr_distribution(const Distribution& ref, const Distribution& pert, double tolerance);

double bbox_iou(const Box& a, const Box& b);
bool mr_iou(const Box& a, const Box& b, double tau);

struct DetectionPair {
  std::size_t ref = 0;
  std::size_t pert = 0;
  double iou = 0.0;
  bool operator==(const DetectionPair&) const = default;
};

struct DetectionMatch {
  std::vector<DetectionPair> pairs;
  std::vector<std::size_t> unmatched_pert;
};

/// Greedy one-to-one matching by descending IoU, ties broken by lower ref
/// index then lower pert index. A pair needs positive overlap and
/// IoU >= iou_floor.
DetectionMatch match_detections(const DetectionSet& ref, const DetectionSet& pert,
                                double iou_floor);

struct DetectorParams {
  double iou_floor = 0.3;
  double iou_persist = 0.9;
  /// true: persisting boxes need IoU > iou_persist; false: IoU >= iou_persist.
  bool strict_persist = true;
  std::optional<double> confidence_tolerance;
};

enum class DetectorCheck { Subset, IouPersist, LabelsKept, Confidence };

struct DetectorVerdict {
  bool pass = true;
  std::optional<DetectorCheck> failed;
};

/// Subset, IoU persistence, label preservation and the optional confidence
/// bound, checked in that order.
DetectorVerdict mr_detector_composite(const DetectionSet& ref, const DetectionSet& pert,
                                      const DetectorParams& params = {});

/// |A and B| / |A or B|; two empty masks agree vacuously (returns 1).
double mask_iou(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

enum class SegmentationMode { StrictEqual, Iou };

bool mr_segmentation(const MaskStack& ref, const MaskStack& pert, SegmentationMode mode,
                     std::span<const double> tau_per_class = {});

std::size_t levenshtein(std::string_view a, std::string_view b);

/// H(-d(ref, pert), tau); tau must be a non-positive integer.
bool mr_ocr(std::string_view ref, std::string_view pert, long tau);

// Declarative relations, as bound to pipeline states.

enum class Metric {
  LabelMatch,           // theta = [labels differ], delta against 0
  DistributionLinf,     // theta = -||y - y~||_inf
  TensorLinf,           // theta = -||y - y~||_inf
  BoxIou,               // theta = min IoU over index-aligned detections
  DetectionSubset,      // theta = -|unmatched perturbed detections|
  DetectionIou,         // theta = min IoU over matched pairs (1 if none)
  DetectionLabels,      // theta = -|matched pairs with differing labels|
  DetectionConfidence,  // theta = -max |confidence delta| over matched pairs
  MaskEqual,            // theta = -|differing pixels|
  MaskIou,              // theta = min IoU, or min (IoU_i - tau_i) per class
  TextEdit,             // theta = -levenshtein
};

enum class RelationKind { Delta, Heaviside };

std::string_view to_string(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view name) noexcept;
PayloadKind required_kind(Metric metric) noexcept;
RelationKind default_kind(Metric metric) noexcept;
/// Metrics whose theta is a negated deviation; thresholds are given as
/// tolerances and stored as tau = -tolerance.
bool is_deviation_metric(Metric metric) noexcept;

struct MetamorphicRelation {
  std::string id;
  Metric metric = Metric::LabelMatch;
  RelationKind kind = RelationKind::Delta;
  double tau = 0.0;
  /// Heaviside only: theta > tau instead of theta >= tau.
  bool strict = false;
  double equality_tolerance = kDefaultEqualityTolerance;
  double iou_floor = 0.3;
  std::vector<double> class_thresholds;
  std::vector<std::string> vocabulary;
};

/// Builds a relation with the metric's default kind.
MetamorphicRelation make_relation(std::string id, Metric metric, double tau = 0.0);

/// Throws ConfigError when the relation's parameters are inconsistent
/// (positive edit-distance tau, thresholds outside [0,1], ...).
void check_relation(const MetamorphicRelation& relation);

struct RelationOutcome {
  bool holds = false;
  double theta = 0.0;
};

/// Extracts theta from the two payloads. ConfigError when a payload kind
/// does not match the metric; EvaluationError on shape mismatches.
double extract_metric(const MetamorphicRelation& relation, const Payload& ref,
                      const Payload& pert);
RelationOutcome evaluate(const MetamorphicRelation& relation, const Payload& ref,
                         const Payload& pert);

/// Conjunction of relations for one component. Empty means unbound, which
/// passes vacuously.
struct CompositeRelation {
  std::vector<MetamorphicRelation> relations;
};

struct RelationObservation {
  std::string relation_id;
  Metric metric = Metric::LabelMatch;
  double theta = 0.0;
};

struct CompositeOutcome {
  bool pass = true;
  std::optional<std::string> failed_relation;
  /// Relations evaluated up to and including the first failure.
  std::vector<RelationObservation> observations;
};

CompositeOutcome composite_score(const CompositeRelation& composite, const Payload& ref,
                                 const Payload& pert);

}  // namespace tracefault
