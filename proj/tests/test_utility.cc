// Copyright 2026 The cmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <gtest/gtest.h>

#include "cmdp/priors.h"
#include "cmdp/utility.h"
#include "oracles.h"

namespace cmdp {
namespace {

using testing::PathGraph;

// Path A-B-C (ids 1-2-3) with unit edges in both directions.
TEST(CostFromNext, PathGraphHandCase) {
  const RoadGraph g = PathGraph(3);
  const auto c = CostFromNextDistributions(g, {{3, 1.0}}, {SecretKey(1)},
                                           {{{1, 1.0}}}, {1, 2, 3});
  EXPECT_EQ(c.at(0, 0), 0.0);  // perfect report
  EXPECT_EQ(c.at(0, 1), 1.0);  // |2 - 1|
  EXPECT_EQ(c.at(0, 2), 2.0);
}

TEST(CostFromNext, PerTaskErrorsOneAndThreeAverageToTwo) {
  // next = 1, y = 4. Task 1: |0 - 3| = 3. Task 2: |1 - 2| = 1.
  const RoadGraph g = PathGraph(5);
  const auto c = CostFromNextDistributions(g, {{1, 0.5}, {2, 0.5}},
                                           {SecretKey(1)}, {{{1, 1.0}}}, {4});
  EXPECT_DOUBLE_EQ(c.at(0, 0), 2.0);
}

TEST(CostFromNext, UnreachableTermsAreSkippedAndRenormalized) {
  // 1 -> 2 one way only; 3 isolated.
  const RoadGraph g({{1, testing::AlongEquator(0)},
                     {2, testing::AlongEquator(1)},
                     {3, testing::AlongEquator(2)}},
                    {{1, 2, 1.0}});
  CostDiagnostics diag;
  // Tasks 2 and 3: task 3 is unreachable from everything but itself.
  const auto c = CostFromNextDistributions(g, {{2, 0.5}, {3, 0.5}},
                                           {SecretKey(1)}, {{{1, 1.0}}}, {2},
                                           &diag);
  EXPECT_EQ(c.at(0, 0), 1.0);
  EXPECT_GT(diag.skipped_terms, 0);
  EXPECT_THROW(CostFromNextDistributions(g, {{3, 1.0}}, {SecretKey(1)},
                                         {{{1, 1.0}}}, {2}),
               InvalidArgument);
}

TEST(CostFromNext, Errors) {
  const RoadGraph g = PathGraph(3);
  EXPECT_THROW(CostFromNextDistributions(g, {}, {SecretKey(1)}, {{{1, 1.0}}},
                                         {1}),
               InvalidArgument);
  EXPECT_THROW(CostFromNextDistributions(g, {{1, 1.0}}, {SecretKey(1)}, {{}},
                                         {1}),
               InvalidArgument);
  EXPECT_THROW(CostFromNextDistributions(g, {{1, 1.0}}, {SecretKey(1)},
                                         {{{1, 1.0}}}, {9}),
               InvalidArgument);
}

TEST(CostContextFree, UniformPriorOverEnds) {
  // Prior uniform over {A, C}, task at C, y = B: 0.5 |2-1| + 0.5 |0-1| = 1.
  const RoadGraph g = PathGraph(3);
  auto m = EstimatePriorsFromSequences({{1}, {3}}, {1, 2, 3}, 0);
  m.set_task_prior({{3, 1.0}});
  const LocationDomain dom(
      {g.nodes()[0], g.nodes()[2]}, g.nodes());
  const auto c = CostContextFree(g, m, dom);
  ASSERT_EQ(c.num_keys(), 2u);
  const std::size_t b = 1;
  EXPECT_DOUBLE_EQ(c.at(0, b), 1.0);
  // All rows coincide: the next location ignores the secret.
  for (std::size_t y = 0; y < 3; ++y) EXPECT_EQ(c.at(0, y), c.at(1, y));
}

TEST(CostContextFree, SingleSecretDomain) {
  const RoadGraph g = PathGraph(3);
  auto m = EstimatePriorsFromSequences({{2}}, {1, 2, 3}, 0);
  const LocationDomain dom({g.nodes()[1]}, g.nodes());
  const auto c = CostContextFree(g, m, dom);
  ASSERT_EQ(c.num_keys(), 1u);
  EXPECT_EQ(c.at(0, 1), 0.0);
}

TEST(CostContextFree, ArgminMatchesExhaustiveScan) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    RoadGraph g = testing::RandomGraph(12, 60, rng);
    std::vector<std::vector<LocationId>> seqs(20);
    std::uniform_int_distribution<LocationId> id(1, 12);
    for (auto& s : seqs) s = {id(rng), id(rng), id(rng)};
    const auto m = EstimatePriorsFromSequences(seqs, g.node_ids(), 0);
    std::vector<Location> secrets;
    for (const auto& l : g.nodes()) {
      if (m.p_x().count(l.id)) secrets.push_back(l);
    }
    const LocationDomain dom(secrets, g.nodes());
    CostTensor c;
    try {
      c = CostContextFree(g, m, dom);
    } catch (const InvalidArgument&) {
      continue;  // some output reaches no task at all
    }
    std::size_t best = 0;
    for (std::size_t y = 0; y < c.num_outputs(); ++y) {
      if (c.at(0, y) < c.at(0, best)) best = y;
    }
    double oracle_best = testing::kInf;
    std::size_t oracle_arg = 0;
    for (std::size_t y = 0; y < c.num_outputs(); ++y) {
      const double v =
          testing::NaiveCost(g, m.p_task(), m.p_x(), c.outputs()[y]);
      if (v < oracle_best) {
        oracle_best = v;
        oracle_arg = y;
      }
    }
    EXPECT_EQ(best, oracle_arg);
  }
}

TEST(CostMarkov1, EqualsBlanketCostWithLagOne) {
  const RoadGraph g = PathGraph(4);
  const auto m = EstimatePriorsFromSequences(
      {{1, 2, 3, 4}, {4, 3, 2, 1}, {2, 3, 2, 1}}, {1, 2, 3, 4}, 2);
  const LocationDomain dom(g.nodes());
  const auto a = CostMarkov1(g, m, dom);
  std::vector<SecretKey> keys;
  for (const auto& [k, p] : m.BlanketPrior({1})) keys.push_back(k);
  const auto b = CostContextBlanket(g, m, dom, keys, {1});
  ASSERT_EQ(a.keys(), b.keys());
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
  }
  EXPECT_THROW(CostMarkov1(g, EstimatePriorsFromSequences({{1, 2}}, {1, 2}, 0),
                           dom),
               InvalidArgument);
}

TEST(CostMarkov1, DeterministicChainCostsNothingAtTheSuccessor) {
  const RoadGraph g = PathGraph(4);
  const auto m = EstimatePriorsFromSequences({{1, 2, 3, 4}, {1, 2, 3, 4}},
                                             {1, 2, 3, 4}, 1);
  const LocationDomain dom(g.nodes());
  const auto c = CostMarkov1(g, m, dom);
  const std::size_t k = c.KeyIndex(SecretKey(2, {1}));
  EXPECT_EQ(c.at(k, 2), 0.0);  // successor of 2 is 3
  EXPECT_GT(c.at(k, 1), 0.0);
}

TEST(CostMarkov1, ThreeStateChainByHand) {
  // 1 -> 2 -> {1: 1/2, 3: 1/2} on the path 1-2-3, task 3, key (2|1).
  const RoadGraph g = PathGraph(3);
  auto m = EstimatePriorsFromSequences({{1, 2, 1}, {1, 2, 3}}, {1, 2, 3}, 1);
  m.set_task_prior({{3, 1.0}});
  const LocationDomain dom(g.nodes());
  const auto c = CostMarkov1(g, m, dom);
  const std::size_t k = c.KeyIndex(SecretKey(2, {1}));
  // y = 2 (dist 1): 0.5 |2 - 1| + 0.5 |0 - 1| = 1.
  EXPECT_DOUBLE_EQ(c.at(k, 1), 1.0);
  // y = 3 (dist 0): 0.5 * 2 + 0.5 * 0 = 1.
  EXPECT_DOUBLE_EQ(c.at(k, 2), 1.0);
  // y = 1 (dist 2): 0.5 * 0 + 0.5 * 2 = 1.
  EXPECT_DOUBLE_EQ(c.at(k, 0), 1.0);
}

TEST(CostContextBlanket, MatchesNaiveOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const RoadGraph g = testing::RandomGraph(10 + trial * 2, 80, rng);
    std::vector<std::vector<LocationId>> seqs(30);
    std::uniform_int_distribution<LocationId> id(1, static_cast<LocationId>(g.num_nodes()));
    for (auto& s : seqs) {
      for (int i = 0; i < 6; ++i) s.push_back(id(rng));
    }
    const auto m = EstimatePriorsFromSequences(seqs, g.node_ids(), 2);
    const LocationDomain dom(g.nodes());
    for (const LagSet& lags : {LagSet{1}, LagSet{1, 2}}) {
      std::vector<SecretKey> keys;
      for (const auto& [k, p] : m.BlanketPrior(lags)) keys.push_back(k);
      keys.resize(std::min<std::size_t>(keys.size(), 12));
      CostTensor c;
      try {
        c = CostContextBlanket(g, m, dom, keys, lags);
      } catch (const InvalidArgument&) {
        continue;
      }
      for (std::size_t k = 0; k < c.num_keys(); ++k) {
        const auto next = m.NextLocation(keys[k], lags);
        for (std::size_t y = 0; y < c.num_outputs(); ++y) {
          ASSERT_NEAR(c.at(k, y),
                      testing::NaiveCost(g, m.p_task(), next, c.outputs()[y]),
                      1e-9);
        }
      }
    }
  }
}

TEST(CostTensor, ValidatesAndRoundTrips) {
  EXPECT_THROW(CostTensor({SecretKey(1)}, {1, 2}, {0.0}), InvalidArgument);
  EXPECT_THROW(CostTensor({SecretKey(1)}, {1}, {-1.0}), InvalidArgument);
  EXPECT_THROW(CostTensor({SecretKey(1)}, {1}, {NAN}), InvalidArgument);
  EXPECT_THROW(CostTensor({SecretKey(1), SecretKey(1)}, {1}, {0.0, 0.0}),
               InvalidArgument);
  const CostTensor c({SecretKey(1, {2}), SecretKey(2, {1})}, {5, 6},
                     {0.1, 1.0 / 3.0, 2e-17, 123456.789});
  const CostTensor d = ParseCostTensor(FormatCostTensor(c), FormatCostIndex(c));
  EXPECT_EQ(d.keys(), c.keys());
  EXPECT_EQ(d.outputs(), c.outputs());
  EXPECT_EQ(d.values(), c.values());
  EXPECT_EQ(c.KeyIndex(SecretKey(2, {1})), 1u);
  EXPECT_THROW(c.KeyIndex(SecretKey(3)), InvalidArgument);
}

TEST(CostTensor, OutputPermutationOnlyReindexes) {
  const RoadGraph g = PathGraph(4);
  const auto m = EstimatePriorsFromSequences({{1, 2, 3}, {3, 4, 1}}, {1, 2, 3, 4}, 1);
  std::vector<SecretKey> keys;
  for (const auto& [k, p] : m.p_joint()) keys.push_back(k);
  std::vector<Distribution> next;
  for (const auto& k : keys) next.push_back(m.NextLocationFull(k));
  const auto a = CostFromNextDistributions(g, m.p_task(), keys, next, {1, 2, 3, 4});
  const auto b = CostFromNextDistributions(g, m.p_task(), keys, next, {4, 2, 1, 3});
  const std::vector<std::size_t> perm = {3, 1, 0, 2};
  for (std::size_t k = 0; k < keys.size(); ++k) {
    for (std::size_t y = 0; y < 4; ++y) EXPECT_EQ(b.at(k, y), a.at(k, perm[y]));
  }
}

TEST(SampleTasks, SubsetIsDeterministicAndNormalized) {
  const Distribution p = UniformTaskPrior({1, 2, 3, 4, 5, 6});
  const auto a = SampleTasks(p, 3, 77), b = SampleTasks(p, 3, 77);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 3u);
  double s = 0.0;
  for (const auto& [id, w] : a) s += w;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_EQ(SampleTasks(p, 0, 1), p);
  EXPECT_EQ(SampleTasks(p, 10, 1), p);
}

}  // namespace
}  // namespace cmdp
