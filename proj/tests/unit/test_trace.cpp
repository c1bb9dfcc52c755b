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
#include "tracefault/trace.hpp"

namespace tf = tracefault;

namespace {

tf::TraceNode node(const std::string& key, std::string label, bool error = false) {
  tf::TracePath path = tf::parse_path_key(key);
  std::string state = path.empty() ? "q0" : path.back().state;
  tf::TraceNode n{state, path, 0, std::nullopt, error};
  if (!error) n.output = tf::Label{std::move(label)};
  return n;
}

tf::TraceTree tree(std::vector<tf::TraceNode> nodes) {
  tf::TraceTree t;
  t.run_id = "r";
  t.spec_id = 99;
  t.nodes = std::move(nodes);
  return t;
}

const std::vector<tf::StateId> kModules{"q0", "q1", "q3"};

std::vector<tf::CompositeRelation> label_composites() {
  return std::vector<tf::CompositeRelation>(
      kModules.size(), tf::CompositeRelation{{tf::make_relation("label", tf::Metric::LabelMatch)}});
}

std::vector<tf::ModuleScore> score(const tf::TraceTree& a, const tf::TraceTree& b) {
  const auto comps = label_composites();
  return tf::module_scores(a, b, tf::align(a, b), kModules, comps);
}

}  // namespace

TEST(PathKey, RoundTrip) {
  const tf::TracePath p{{"a", 0}, {"b", 1}};
  EXPECT_EQ(tf::path_key(p), "a#0/b#1");
  EXPECT_EQ(tf::parse_path_key("a#0/b#1"), p);
  EXPECT_EQ(tf::path_key({}), "");
  EXPECT_TRUE(tf::parse_path_key("").empty());
  EXPECT_THROW(tf::parse_path_key("a"), tf::IntegrityError);
  EXPECT_THROW(tf::parse_path_key("a#x"), tf::IntegrityError);
  EXPECT_THROW(tf::parse_path_key("a#0//b#1"), tf::IntegrityError);
}

TEST(CheckStructure, AcceptsWellFormedTrees) {
  EXPECT_NO_THROW(tf::check_structure(tree({node("", "a"), node("q1#0", "b"), node("q1#0/q3#0", "c")})));
}

TEST(CheckStructure, RejectsBrokenTrees) {
  EXPECT_THROW(tf::check_structure(tree({})), tf::IntegrityError);
  EXPECT_THROW(tf::check_structure(tree({node("q1#0", "b")})), tf::IntegrityError);
  EXPECT_THROW(tf::check_structure(tree({node("", "a"), node("", "a")})), tf::IntegrityError);
  EXPECT_THROW(tf::check_structure(tree({node("", "a"), node("q1#0/q3#0", "c")})),
               tf::IntegrityError);
  EXPECT_THROW(tf::check_structure(tree({node("", "a"), node("q1#0", "b"), node("q1#0", "b")})),
               tf::IntegrityError);
}

TEST(ActivatedModules, Examples) {
  EXPECT_EQ(tf::activated_modules(tree({node("", "a")})), (tf::ActivationSet{"q0"}));
  EXPECT_EQ(tf::activated_modules(tree({node("", "a"), node("q1#0", "b"), node("q3#0", "c")})),
            (tf::ActivationSet{"q0", "q1", "q3"}));
  EXPECT_EQ(tf::activated_modules(tree({node("", "a"), node("q1#0", "b"), node("q1#1", "b")})).size(),
            2u);
}

TEST(Align, Examples) {
  const auto ref = tree({node("", "a"), node("q1#0", "b"), node("q3#0", "c")});
  const auto same = tf::align(ref, ref);
  EXPECT_EQ(same.aligned.size(), 3u);
  EXPECT_TRUE(same.ref_only.empty());
  EXPECT_TRUE(same.pert_only.empty());

  const auto missing = tf::align(ref, tree({node("", "a"), node("q1#0", "b")}));
  EXPECT_EQ(missing.aligned.size(), 2u);
  EXPECT_EQ(missing.ref_only, std::vector<std::size_t>{2});

  const auto extra = tf::align(ref, tree({node("", "a"), node("q1#0", "b"), node("q3#0", "c"),
                                          node("q3#1", "c")}));
  EXPECT_EQ(extra.pert_only, std::vector<std::size_t>{3});
  for (const auto& a : {same, missing, extra}) {
    EXPECT_EQ(a.aligned.size() + a.ref_only.size(), ref.nodes.size());
  }
}

TEST(Align, DifferentSpecsRejected) {
  auto a = tree({node("", "a")});
  auto b = a;
  b.spec_id = 1;
  EXPECT_THROW(tf::align(a, b), tf::ConfigError);
}

TEST(PhantomFlags, Examples) {
  const tf::ActivationSet both{"q0", "q1"};
  EXPECT_EQ(tf::phantom_flags(both, both, kModules), (std::vector<std::uint8_t>{0, 0, 0}));
  EXPECT_EQ(tf::phantom_flags(both, {"q0"}, kModules), (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_EQ(tf::phantom_flags({"q0"}, {"q0", "q3"}, kModules), (std::vector<std::uint8_t>{0, 0, 1}));
  EXPECT_EQ(tf::phantom_flags({"q0", "q3"}, both, kModules),
            tf::phantom_flags(both, {"q0", "q3"}, kModules));
}

TEST(ModuleScores, Examples) {
  const auto ref = tree({node("", "a"), node("q1#0", "b"), node("q3#0", "c")});
  auto s = score(ref, ref);
  for (const auto& m : s) EXPECT_EQ(m.status, tf::ModuleStatus::Pass);

  s = score(ref, tree({node("", "a"), node("q1#0", "b"), node("q3#0", "X")}));
  EXPECT_EQ(s[2].status, tf::ModuleStatus::Deviation);
  EXPECT_EQ(s[2].failed_relation, "label");
  EXPECT_TRUE(s[0].bit());

  s = score(ref, tree({node("", "a"), node("q1#0", "b")}));
  EXPECT_EQ(s[2].status, tf::ModuleStatus::Unpaired);
  EXPECT_FALSE(s[2].bit());
  EXPECT_TRUE(s[2].applicable());
}

TEST(ModuleScores, ConjunctionOverRepeatedActivations) {
  const auto ref = tree({node("", "a"), node("q1#0", "b"), node("q1#1", "b")});
  const auto pert = tree({node("", "a"), node("q1#0", "b"), node("q1#1", "Z")});
  EXPECT_EQ(score(ref, pert)[1].status, tf::ModuleStatus::Deviation);
}

TEST(ModuleScores, NotApplicableWhenAbsent) {
  const auto t = tree({node("", "a")});
  const auto s = score(t, t);
  EXPECT_FALSE(s[1].applicable());
  EXPECT_FALSE(s[2].applicable());
}

TEST(ModuleScores, ComponentErrorIsDeviation) {
  const auto ref = tree({node("", "a"), node("q1#0", "b")});
  const auto pert = tree({node("", "a"), node("q1#0", "", true)});
  const auto s = score(ref, pert);
  EXPECT_EQ(s[1].status, tf::ModuleStatus::Deviation);
  EXPECT_EQ(s[1].failed_relation, std::string(tf::kComponentErrorRelation));
}

TEST(ModuleScores, BothSidesWithoutPairIsDeviation) {
  const auto ref = tree({node("", "a"), node("q1#0", "b"), node("q1#0/q3#0", "c")});
  const auto pert = tree({node("", "a"), node("q3#0", "c")});
  const auto s = score(ref, pert);
  EXPECT_EQ(s[2].status, tf::ModuleStatus::Deviation);
  EXPECT_EQ(s[2].failed_relation, std::string(tf::kUnalignedRelation));
}

TEST(SystemScore, Examples) {
  const auto ref = tree({node("", "a"), node("q1#0", "b")});
  const std::vector<std::uint8_t> none{0, 0, 0};
  EXPECT_TRUE(tf::system_score(score(ref, ref), none));

  const auto bad = score(ref, tree({node("", "a"), node("q1#0", "X")}));
  EXPECT_FALSE(tf::system_score(bad, none));

  // All module scores pass, yet one phantom flag fails the system.
  const auto good = score(ref, ref);
  EXPECT_FALSE(tf::system_score(good, std::vector<std::uint8_t>{0, 1, 0}));
}

TEST(SystemScore, SelfConsistency) {
  const auto t = tree({node("", "a"), node("q1#0", "b"), node("q1#0/q3#0", "c")});
  const auto a = tf::activated_modules(t);
  EXPECT_TRUE(tf::system_score(score(t, t), tf::phantom_flags(a, a, kModules)));
}

TEST(CanonicalJson, EqualTreesEqualStrings) {
  const auto a = tree({node("", "a"), node("q1#0", "b")});
  auto b = a;
  EXPECT_EQ(tf::canonical_json(a), tf::canonical_json(b));
  b.nodes[1].output = tf::Label{"c"};
  EXPECT_NE(tf::canonical_json(a), tf::canonical_json(b));
}
