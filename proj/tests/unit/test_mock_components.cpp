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

#include <gtest/gtest.h>

#include "tracefault/errors.hpp"
#include "tracefault/metamorphic.hpp"
#include "tracefault/mock_components.hpp"
#include "tracefault/perturbation.hpp"
#include "tracefault/synthetic.hpp"

namespace tf = tracefault;

namespace {

const tf::PerturbationSpec kNoise3{"noise3", "gaussian_noise", 3, 0, {}, {}};
const tf::PerturbationSpec kNoise1{"noise1", "gaussian_noise", 1, 0, {}, {}};
const tf::PerturbationSpec kBright3{"bright3", "brightness_scale", 3, 0, {}, {}};

tf::NodeContext ctx(std::uint64_t input, const tf::PerturbationSpec* p,
                    std::string_view path = "det#0") {
  return tf::NodeContext{"det", path, input, 0, p};
}

tf::FaultProfile profile(tf::FaultEffect effect, double probability,
                         std::optional<std::string> kind = "gaussian_noise", int min_severity = 3) {
  tf::FaultProfile p;
  p.effect = effect;
  p.probability = probability;
  p.trigger = tf::FaultTrigger{std::move(kind), min_severity};
  p.seed = 17;
  return p;
}

tf::DetectionSet two_boxes() {
  return tf::DetectionSet{{{{0, 0, 4, 4}, "car", 0.9}, {{10, 10, 4, 4}, "stop_sign", 0.9}}};
}

}  // namespace

TEST(FaultFires, ProbabilityExtremes) {
  const auto never = profile(tf::FaultEffect::FlipLabel, 0.0);
  const auto always = profile(tf::FaultEffect::FlipLabel, 1.0);
  for (std::uint64_t i = 0; i < 500; ++i) {
    EXPECT_FALSE(tf::fault_fires(never, ctx(i, &kNoise3)));
    EXPECT_TRUE(tf::fault_fires(always, ctx(i, &kNoise3)));
  }
}

TEST(FaultFires, TriggerGatesKindSeverityAndReference) {
  const auto always = profile(tf::FaultEffect::FlipLabel, 1.0);
  EXPECT_FALSE(tf::fault_fires(always, ctx(0, nullptr)));
  EXPECT_FALSE(tf::fault_fires(always, ctx(0, &kNoise1)));
  EXPECT_FALSE(tf::fault_fires(always, ctx(0, &kBright3)));
  const auto any_kind = profile(tf::FaultEffect::FlipLabel, 1.0, std::nullopt, 1);
  EXPECT_TRUE(tf::fault_fires(any_kind, ctx(0, &kBright3)));
  EXPECT_FALSE(tf::fault_fires(any_kind, ctx(0, nullptr)));
}

TEST(FaultFires, RateMatchesProbability) {
  const auto p = profile(tf::FaultEffect::FlipLabel, 0.2);
  std::size_t fired = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) fired += tf::fault_fires(p, ctx(i, &kNoise3)) ? 1 : 0;
  // Binomial(1000, 0.2): mean 200, sd 12.6; five standard deviations either way.
  EXPECT_GE(fired, 137u);
  EXPECT_LE(fired, 263u);
  EXPECT_EQ(fired, 226u);
}

TEST(FaultProfile, Validation) {
  auto p = profile(tf::FaultEffect::FlipLabel, 1.5);
  EXPECT_THROW(tf::check_fault_profile(p), tf::ConfigError);
  p = profile(tf::FaultEffect::CorruptText, 1.0);
  p.rate = -0.1;
  EXPECT_THROW(tf::check_fault_profile(p), tf::ConfigError);
  p = profile(tf::FaultEffect::Reroute, 1.0);
  EXPECT_THROW(tf::check_fault_profile(p), tf::ConfigError);
  p.label = "pole";
  EXPECT_NO_THROW(tf::check_fault_profile(p));
}

TEST(FaultEffect, NamesRoundTrip) {
  for (auto e : {tf::FaultEffect::None, tf::FaultEffect::FlipLabel, tf::FaultEffect::DropDetections,
                 tf::FaultEffect::AddSpuriousDetection, tf::FaultEffect::ShiftBoxes,
                 tf::FaultEffect::CorruptText, tf::FaultEffect::Reroute}) {
    EXPECT_EQ(tf::parse_fault_effect(tf::to_string(e)), e);
  }
  EXPECT_FALSE(tf::parse_fault_effect("explode"));
}

TEST(MockDetector, CanonicalWithoutFault) {
  const auto det = tf::mock_detector(profile(tf::FaultEffect::DropDetections, 1.0), nullptr,
                                     two_boxes());
  const tf::Payload img = tf::Tensor{std::vector<double>(4, 0.0), {2, 2}};
  EXPECT_EQ(det(img, ctx(0, nullptr)), tf::Payload(two_boxes()));
  EXPECT_EQ(det(img, ctx(0, &kNoise1)), tf::Payload(two_boxes()));
  EXPECT_THROW(det(tf::Text{"x"}, ctx(0, nullptr)), tf::EvaluationError);
}

TEST(MockDetector, EffectsBreakTheExpectedCheck) {
  const tf::Payload img = tf::Tensor{std::vector<double>(4, 0.0), {2, 2}};
  auto run = [&](tf::FaultProfile p) {
    const auto det = tf::mock_detector(std::move(p), nullptr, two_boxes());
    return tf::mr_detector_composite(two_boxes(),
                                     std::get<tf::DetectionSet>(det(img, ctx(1, &kNoise3))));
  };
  EXPECT_EQ(run(profile(tf::FaultEffect::AddSpuriousDetection, 1.0)).failed,
            tf::DetectorCheck::Subset);
  // Dropping detections keeps the subset property; downstream modules see it.
  EXPECT_TRUE(run(profile(tf::FaultEffect::DropDetections, 1.0)).pass);
  EXPECT_EQ(run(profile(tf::FaultEffect::FlipLabel, 1.0)).failed, tf::DetectorCheck::LabelsKept);
  auto shift = profile(tf::FaultEffect::ShiftBoxes, 1.0);
  shift.shift = 1.0;
  EXPECT_EQ(run(shift).failed, tf::DetectorCheck::IouPersist);
}

TEST(MockDetector, SpuriousBoxOverlapsNothing) {
  const tf::Payload img = tf::Tensor{std::vector<double>(4, 0.0), {2, 2}};
  const auto det =
      tf::mock_detector(profile(tf::FaultEffect::AddSpuriousDetection, 1.0), nullptr, two_boxes());
  const auto out = std::get<tf::DetectionSet>(det(img, ctx(3, &kNoise3)));
  ASSERT_EQ(out.items.size(), 3u);
  EXPECT_EQ(out.items.back().label, "spurious");
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(tf::bbox_iou(out.items.back().box, out.items[i].box), 0.0);
  }
}

TEST(MockDetector, RerouteRelabelsFirstDetection) {
  auto p = profile(tf::FaultEffect::Reroute, 1.0);
  p.label = "pole";
  const auto det = tf::mock_detector(p, nullptr, two_boxes());
  const auto out = std::get<tf::DetectionSet>(
      det(tf::Tensor{std::vector<double>(4, 0.0), {2, 2}}, ctx(0, &kNoise3)));
  EXPECT_EQ(out.items[0].label, "pole");
  EXPECT_EQ(out.items[1].label, "stop_sign");
}

TEST(MockDetector, UsesGroundTruthPerInput) {
  tf::SceneOptions opts;
  opts.count = 4;
  opts.seed = 8;
  opts.labels = {"car", "truck"};
  const auto data = tf::make_scene_dataset(opts);
  const auto det = tf::mock_detector({}, data);
  for (std::size_t i = 0; i < data->size(); ++i) {
    EXPECT_EQ(det(data->input(i), ctx(i, nullptr)), tf::Payload(*data->detections(i)));
  }
}

TEST(MockClassifier, StableWithoutFaultAndFlipsWhenFired) {
  const std::vector<std::string> labels{"a", "b", "c"};
  const auto stable = tf::mock_classifier(profile(tf::FaultEffect::FlipLabel, 0.0), labels);
  const auto flips = tf::mock_classifier(profile(tf::FaultEffect::FlipLabel, 1.0), labels);
  const tf::Payload in = tf::Tensor{{1.0}, {1}};
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto ref = stable(in, ctx(i, nullptr, "det#0/cls#0"));
    EXPECT_EQ(stable(tf::Tensor{{2.0}, {1}}, ctx(i, &kNoise3, "det#0/cls#0")), ref);
    EXPECT_EQ(flips(in, ctx(i, nullptr, "det#0/cls#0")), ref);
    EXPECT_NE(flips(in, ctx(i, &kNoise3, "det#0/cls#0")), ref);
  }
  EXPECT_THROW(tf::mock_classifier({}, {}), tf::ConfigError);
}

TEST(MockOcr, CorruptionCostsExactlyOneEditPerCharacter) {
  for (const auto& [rate, expected] : std::vector<std::pair<double, std::size_t>>{
           {0.0, 0}, {0.2, 2}, {0.3, 3}, {1.0, 10}}) {
    auto p = profile(tf::FaultEffect::CorruptText, 1.0);
    p.rate = rate;
    const auto ocr = tf::mock_ocr(p, nullptr, "hello12345");
    const auto out = std::get<tf::Text>(ocr(tf::Text{"x"}, ctx(0, &kNoise3))).value;
    EXPECT_EQ(tf::levenshtein("hello12345", out), expected) << rate;
    EXPECT_EQ(tf::mr_ocr("hello12345", out, -2), expected <= 2) << rate;
  }
}

TEST(MockOcr, EchoesGroundTruth) {
  tf::TextOptions opts;
  opts.count = 5;
  opts.seed = 3;
  const auto data = tf::make_text_dataset(opts);
  const auto ocr = tf::mock_ocr({}, data);
  for (std::size_t i = 0; i < data->size(); ++i) {
    EXPECT_EQ(ocr(data->input(i), ctx(i, nullptr)), data->input(i));
  }
}

TEST(Synthetic, DatasetsAreDeterministic) {
  tf::SceneOptions opts;
  opts.count = 3;
  opts.seed = 1;
  opts.labels = {"car"};
  const auto a = tf::make_scene_dataset(opts);
  const auto b = tf::make_scene_dataset(opts);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a->input(i), b->input(i));
    EXPECT_EQ(a->detections(i), b->detections(i));
    const auto n = a->detections(i)->items.size();
    EXPECT_GE(n, opts.min_objects);
    EXPECT_LE(n, opts.max_objects);
  }
  EXPECT_THROW(a->input(3), std::out_of_range);
}
