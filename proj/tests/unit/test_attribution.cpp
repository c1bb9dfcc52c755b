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

#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tracefault/attribution.hpp"
#include "tracefault/errors.hpp"
#include "tracefault/hash.hpp"

namespace tf = tracefault;

namespace {

tf::ModuleScore status(tf::ModuleStatus s) {
  tf::ModuleScore m;
  m.status = s;
  if (s == tf::ModuleStatus::Deviation) m.failed_relation = "label";
  return m;
}

tf::RunEvaluation run(std::vector<tf::ModuleStatus> statuses, tf::ActivationSet ref,
                      tf::ActivationSet pert, bool pass) {
  tf::RunEvaluation r;
  for (auto s : statuses) r.scores.push_back(status(s));
  r.activated_ref = std::move(ref);
  r.activated_pert = std::move(pert);
  r.system_pass = pass;
  return r;
}

tf::FCAccumulator with_counts(std::vector<std::uint64_t> fc, std::uint64_t failures) {
  std::vector<tf::StateId> ids;
  for (std::size_t i = 0; i < fc.size(); ++i) ids.push_back("q" + std::to_string(i));
  tf::FCAccumulator acc(ids);
  acc.fc = std::move(fc);
  acc.total_failures = failures;
  acc.runs = failures;
  return acc;
}

tf::RunEvaluation random_run(tf::SplitMix64& rng) {
  using S = tf::ModuleStatus;
  tf::RunEvaluation r;
  bool pass = true;
  for (int i = 0; i < 3; ++i) {
    const std::string id = "q" + std::to_string(i);
    const auto pick = rng.below(4);
    S s = S::NotApplicable;
    if (pick == 1) s = S::Pass;
    if (pick == 2) s = S::Deviation;
    if (pick == 3) s = S::Unpaired;
    if (s == S::Pass || s == S::Deviation) {
      r.activated_ref.insert(id);
      r.activated_pert.insert(id);
    } else if (s == S::Unpaired) {
      (rng.below(2) ? r.activated_ref : r.activated_pert).insert(id);
    }
    if (s == S::Deviation || s == S::Unpaired) pass = false;
    r.scores.push_back(status(s));
  }
  r.system_pass = pass;
  return r;
}

const std::vector<tf::StateId> kIds{"q0", "q1", "q2"};

}  // namespace

TEST(Accumulate, SystemPassLeavesFcUnchanged) {
  tf::FCAccumulator acc(kIds);
  tf::accumulate(acc, run({tf::ModuleStatus::Pass, tf::ModuleStatus::Pass,
                           tf::ModuleStatus::NotApplicable},
                          {"q0", "q1"}, {"q0", "q1"}, true));
  EXPECT_EQ(acc.fc, (std::vector<std::uint64_t>{0, 0, 0}));
  EXPECT_EQ(acc.total_failures, 0u);
  EXPECT_EQ(acc.activations, (std::vector<std::uint64_t>{1, 1, 0}));
  EXPECT_EQ(acc.runs, 1u);
}

TEST(Accumulate, DeviationAddsOne) {
  tf::FCAccumulator acc(kIds);
  tf::accumulate(acc, run({tf::ModuleStatus::Pass, tf::ModuleStatus::Deviation,
                           tf::ModuleStatus::NotApplicable},
                          {"q0", "q1"}, {"q0", "q1"}, false));
  EXPECT_EQ(acc.fc, (std::vector<std::uint64_t>{0, 1, 0}));
  EXPECT_EQ(acc.total_failures, 1u);
  EXPECT_EQ(acc.violations, (std::vector<std::uint64_t>{0, 1, 0}));
  EXPECT_EQ(acc.relation_violations.at("q1/label"), 1u);
}

TEST(Accumulate, DisappearingModuleAddsScoreAndXor) {
  tf::FCAccumulator acc(kIds);
  tf::accumulate(acc, run({tf::ModuleStatus::Pass, tf::ModuleStatus::Unpaired,
                           tf::ModuleStatus::NotApplicable},
                          {"q0", "q1"}, {"q0"}, false));
  EXPECT_EQ(acc.fc, (std::vector<std::uint64_t>{0, 2, 0}));
  EXPECT_EQ(acc.divergences, (std::vector<std::uint64_t>{0, 1, 0}));
  EXPECT_EQ(acc.violations, (std::vector<std::uint64_t>{0, 0, 0}));
}

TEST(Accumulate, ScoreVectorMustCoverModules) {
  tf::FCAccumulator acc(kIds);
  EXPECT_THROW(tf::accumulate(acc, run({tf::ModuleStatus::Pass}, {"q0"}, {"q0"}, true)),
               tf::ConfigError);
}

TEST(Finalize, Examples) {
  auto r = tf::finalize(with_counts({2, 0, 0}, 2));
  EXPECT_EQ(r.alpha, (std::vector<double>{1, 0, 0}));
  EXPECT_FALSE(r.no_failures);

  r = tf::finalize(with_counts({3, 1}, 4));
  EXPECT_EQ(r.alpha, (std::vector<double>{0.75, 0.25}));
  EXPECT_EQ(r.fc_normalized, (std::vector<double>{0.75, 0.25}));

  r = tf::finalize(with_counts({0, 0, 0}, 0));
  EXPECT_EQ(r.alpha, (std::vector<double>{0, 0, 0}));
  EXPECT_TRUE(r.no_failures);
}

TEST(Finalize, FailuresWithoutContributionIsIntegrityError) {
  EXPECT_THROW(tf::finalize(with_counts({0, 0}, 3)), tf::IntegrityError);
}

TEST(Finalize, EmptyAccumulator) {
  const auto r = tf::finalize(tf::FCAccumulator(kIds));
  EXPECT_TRUE(r.empty());
  EXPECT_TRUE(r.no_failures);
}

TEST(Finalize, MatchesRationalOracle) {
  tf::SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> fc(1 + rng.below(5));
    std::uint64_t sum = 0;
    for (auto& f : fc) sum += (f = rng.below(20));
    if (sum == 0) fc[0] = sum = 1;
    const std::uint64_t failures = 1 + rng.below(30);
    const auto r = tf::finalize(with_counts(fc, failures));
    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < fc.size(); ++i) {
      ASSERT_EQ(r.fc_normalized[i], static_cast<double>(fc[i]) / static_cast<double>(failures));
      ASSERT_NEAR(r.alpha[i], oracle::Rational::of(fc[i], sum).value(), 1e-12);
      alpha_sum += r.alpha[i];
    }
    ASSERT_NEAR(alpha_sum, 1.0, 1e-12);
  }
}

TEST(Finalize, AlphaIsScaleInvariant) {
  tf::SplitMix64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint64_t> fc{rng.below(10) + 1, rng.below(10), rng.below(10)};
    const auto base = tf::finalize(with_counts(fc, 7));
    const std::uint64_t k = 2 + rng.below(50);
    for (auto& f : fc) f *= k;
    const auto scaled = tf::finalize(with_counts(fc, 7 * k));
    for (std::size_t i = 0; i < fc.size(); ++i) ASSERT_NEAR(base.alpha[i], scaled.alpha[i], 1e-12);
    const auto rescaled = tf::finalize(with_counts(fc, 7));
    for (std::size_t i = 0; i < fc.size(); ++i) {
      ASSERT_NEAR(base.alpha[i], rescaled.alpha[i], 1e-12);
    }
  }
}

TEST(Merge, EqualsAccumulatingTheUnion) {
  tf::SplitMix64 rng(21);
  std::vector<tf::RunEvaluation> runs;
  for (int i = 0; i < 300; ++i) runs.push_back(random_run(rng));
  tf::FCAccumulator whole(kIds);
  for (const auto& r : runs) tf::accumulate(whole, r);

  for (int split = 0; split < 10; ++split) {
    tf::FCAccumulator a(kIds);
    tf::FCAccumulator b(kIds);
    tf::FCAccumulator c(kIds);
    for (const auto& r : runs) {
      const auto pick = rng.below(3);
      tf::accumulate(pick == 0 ? a : pick == 1 ? b : c, r);
    }
    tf::FCAccumulator left = a;
    tf::merge(left, b);
    tf::merge(left, c);
    tf::FCAccumulator right = c;
    tf::FCAccumulator bc = b;
    tf::merge(bc, a);
    tf::merge(right, bc);
    EXPECT_EQ(left, whole);
    EXPECT_EQ(right, whole);
  }
}

TEST(Merge, DifferentModulesRejected) {
  tf::FCAccumulator a(kIds);
  tf::FCAccumulator b(std::vector<tf::StateId>{"q0"});
  EXPECT_THROW(tf::merge(a, b), tf::ConfigError);
}

TEST(Attribution, NeverActivatedModulesGetZero) {
  tf::SplitMix64 rng(4);
  tf::FCAccumulator acc(std::vector<tf::StateId>{"q0", "q1", "q2", "never"});
  for (int i = 0; i < 200; ++i) {
    auto r = random_run(rng);
    r.scores.push_back(status(tf::ModuleStatus::NotApplicable));
    tf::accumulate(acc, r);
  }
  const auto rep = tf::finalize(acc);
  EXPECT_EQ(rep.fc[3], 0u);
  EXPECT_EQ(rep.alpha[3], 0.0);
  EXPECT_EQ(rep.activations[3], 0u);
}

TEST(PredictedAccuracy, Examples) {
  tf::FCAccumulator acc(kIds);
  acc.activations = {100, 100, 0};
  acc.violations = {0, 17, 0};
  EXPECT_EQ(tf::predicted_accuracy(acc, "q0"), 1.0);
  EXPECT_NEAR(*tf::predicted_accuracy(acc, "q1"), 0.83, 1e-12);
  EXPECT_FALSE(tf::predicted_accuracy(acc, "q2"));
  EXPECT_EQ(tf::least_accurate(acc), "q1");
  const std::vector<tf::StateId> subset{"q0", "q2"};
  EXPECT_EQ(tf::least_accurate(acc, subset), "q0");
  EXPECT_THROW(tf::predicted_accuracy(acc, "nope"), tf::ConfigError);
}

TEST(PredictedAccuracy, TiesGoToEarlierModule) {
  tf::FCAccumulator acc(kIds);
  acc.activations = {10, 10, 10};
  acc.violations = {1, 3, 3};
  EXPECT_EQ(tf::least_accurate(acc), "q1");
}
