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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "cmdp/priors.h"
#include "oracles.h"

namespace cmdp {
namespace {

double Sum(const Distribution& d) {
  double s = 0.0;
  for (const auto& [k, v] : d) s += v;
  return s;
}

double Sum(const KeyDistribution& d) {
  double s = 0.0;
  for (const auto& [k, v] : d) s += v;
  return s;
}

TEST(Trajectories, SortsRowsAndKeepsFirstAppearanceOrder) {
  const auto log = ParseTrajectories(
      "vehicle_id,trajectory_id,timestamp,lat,lon\n"
      "v2,b,20,41.9,12.5\n"
      "v1,a,30,41.9,12.6\n"
      "v1,a,10,41.9,12.4\n"
      "v2,b,5,41.8,12.5\n");
  ASSERT_EQ(log.trajectories.size(), 2u);
  EXPECT_EQ(log.trajectories[0].trajectory_id, "b");
  EXPECT_EQ(log.trajectories[1].records[0].timestamp, 10.0);
  EXPECT_EQ(log.trajectories[1].records[1].point.lon(), 12.6);
  EXPECT_EQ(log.num_records(), 4u);
  const auto again = ParseTrajectories(FormatTrajectories(log));
  ASSERT_EQ(again.trajectories.size(), 2u);
  EXPECT_EQ(again.trajectories[1].records[1].timestamp, 30.0);
}

TEST(Trajectories, RepeatedTimestampIsLocated) {
  try {
    ParseTrajectories(
        "vehicle_id,trajectory_id,timestamp,lat,lon\n"
        "v,a,1,41.9,12.5\nv,a,2,41.9,12.5\nv,a,1,41.9,12.6\n",
        "log.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("log.csv:"), std::string::npos);
  }
  EXPECT_THROW(ParseTrajectories("vehicle_id,trajectory_id,timestamp,lat,lon\n"
                                 "v,a,1,95,12.5\n"),
               ParseError);
  EXPECT_THROW(LoadTrajectories("/nonexistent.csv"), IoError);
}

// A=1, B=2, C=3, D=4.
TEST(EstimatePriors, SingleTrajectoryHandCount) {
  const auto m = EstimatePriorsFromSequences({{1, 2, 3}}, {1, 2, 3}, 1,
                                             {.smoothing = false});
  ASSERT_EQ(m.p_joint().size(), 2u);
  EXPECT_DOUBLE_EQ(m.p_joint().at(SecretKey(2, {1})), 0.5);
  EXPECT_DOUBLE_EQ(m.p_joint().at(SecretKey(3, {2})), 0.5);
  // Smoothing adds one to each observed tuple; still 1/2 each here.
  const auto s = EstimatePriorsFromSequences({{1, 2, 3}}, {1, 2, 3}, 1);
  EXPECT_DOUBLE_EQ(s.p_joint().at(SecretKey(2, {1})), 0.5);
}

TEST(EstimatePriors, SmoothingOverObservedSupportOnly) {
  // Tuples (2|1) x3 and (3|2) x1: counts 4 and 2 after add-one.
  const auto m = EstimatePriorsFromSequences({{1, 2}, {1, 2}, {1, 2, 3}},
                                             {1, 2, 3}, 1);
  ASSERT_EQ(m.p_joint().size(), 2u);
  EXPECT_DOUBLE_EQ(m.p_joint().at(SecretKey(2, {1})), 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.p_joint().at(SecretKey(3, {2})), 2.0 / 6.0);
  EXPECT_EQ(m.occupancy_counts().at(SecretKey(2, {1})), 3);
}

TEST(EstimatePriors, GammaZeroDegeneratesToPx) {
  const auto m = EstimatePriorsFromSequences({{1, 2, 2, 3}}, {1, 2, 3}, 0,
                                             {.smoothing = false});
  ASSERT_EQ(m.p_joint().size(), m.p_x().size());
  for (const auto& [x, p] : m.p_x()) {
    EXPECT_EQ(m.p_joint().at(SecretKey(x)), p);
  }
  EXPECT_DOUBLE_EQ(m.p_x().at(2), 0.5);
}

TEST(EstimatePriors, Errors) {
  EXPECT_THROW(EstimatePriorsFromSequences({}, {1}, 1), InvalidArgument);
  EXPECT_THROW(EstimatePriorsFromSequences({{}}, {1}, 1), InvalidArgument);
  EXPECT_THROW(EstimatePriorsFromSequences({{1, 2}}, {1, 2}, -1),
               InvalidArgument);
  EXPECT_THROW(EstimatePriorsFromSequences({{1, 2}, {2, 1}}, {1, 2}, 2),
               InvalidArgument);
  EXPECT_THROW(EstimatePriors(TrajectoryLog{}, testing::PathGraph(3), 1),
               InvalidArgument);
}

TEST(EstimatePriors, SnapsRecordsToNodes) {
  const RoadGraph g = testing::PathGraph(3);
  TrajectoryLog log;
  Trajectory t{"v", "t", {}};
  for (double km : {0.1, 0.95, 2.2}) {
    t.records.push_back({km * 100, testing::AlongEquator(km)});
  }
  log.trajectories.push_back(t);
  EXPECT_EQ(SnapTrajectories(log, g),
            (std::vector<std::vector<LocationId>>{{1, 2, 3}}));
  const auto m = EstimatePriors(log, g, 1);
  EXPECT_EQ(m.p_joint().size(), 2u);
}

TEST(NextLocation, DeterministicChainAndUniformSuccessors) {
  // 1 -> 2 always; 2 -> 3 or 4 equally.
  const auto m = EstimatePriorsFromSequences(
      {{1, 2, 3}, {1, 2, 4}, {1, 2, 3}, {1, 2, 4}}, {1, 2, 3, 4}, 0);
  EXPECT_EQ(m.NextLocation(SecretKey(1), {}), (Distribution{{2, 1.0}}));
  const auto d = m.NextLocation(SecretKey(2), {});
  EXPECT_DOUBLE_EQ(d.at(3), 0.5);
  EXPECT_DOUBLE_EQ(d.at(4), 0.5);
}

TEST(NextLocation, UnseenKeyWithoutSmoothingIsAnError) {
  const auto m = EstimatePriorsFromSequences({{1, 2, 3}}, {1, 2, 3}, 1,
                                             {.smoothing = false});
  EXPECT_THROW(m.NextLocation(SecretKey(3, {2}), {1}), InvalidArgument);
  EXPECT_THROW(m.NextLocation(SecretKey(1, {3}), {1}), InvalidArgument);
  EXPECT_NO_THROW(m.NextLocation(SecretKey(2, {1}), {1}));
}

TEST(NextLocation, BlanketIsJointWeightedMixture) {
  // Gamma 2; blanket {1} mixes the full keys sharing (x, v1).
  const std::vector<std::vector<LocationId>> seqs = {
      {1, 2, 3, 4}, {1, 2, 3, 5}, {5, 2, 3, 4}, {5, 2, 3, 4}};
  const auto m = EstimatePriorsFromSequences(seqs, {1, 2, 3, 4, 5}, 2);
  // Full keys (3|2,1): count 2 -> 3 smoothed, successors {4,5};
  //           (3|2,5): count 2 -> 3 smoothed, successors {4,4}.
  const auto a = m.NextLocationFull(SecretKey(3, {2, 1}));
  EXPECT_DOUBLE_EQ(a.at(4), 0.5);
  const auto mix = m.NextLocation(SecretKey(3, {2}), {1});
  EXPECT_DOUBLE_EQ(mix.at(4), 0.75);
  EXPECT_DOUBLE_EQ(mix.at(5), 0.25);
  EXPECT_NEAR(Sum(mix), 1.0, 1e-12);
}

TEST(PriorModel, DistributionsAreNormalizedAndMarginalize) {
  std::mt19937_64 rng(4);
  std::vector<std::vector<LocationId>> seqs(40);
  std::uniform_int_distribution<LocationId> id(1, 6);
  for (auto& s : seqs) {
    for (int i = 0; i < 12; ++i) s.push_back(id(rng));
  }
  const auto m = EstimatePriorsFromSequences(seqs, {1, 2, 3, 4, 5, 6}, 2);
  EXPECT_NEAR(Sum(m.p_x()), 1.0, 1e-9);
  EXPECT_NEAR(Sum(m.p_joint()), 1.0, 1e-9);
  EXPECT_NEAR(Sum(m.p_task()), 1.0, 1e-9);
  std::map<LocationId, double> marg;
  for (const auto& [k, p] : m.p_joint()) {
    EXPECT_GE(p, 0.0);
    marg[k.current] += p;
    EXPECT_NEAR(Sum(m.NextLocationFull(k)), 1.0, 1e-9);
  }
  for (const auto& [x, p] : m.p_x()) EXPECT_NEAR(marg[x], p, 1e-9);
  for (const LagSet& lags : {LagSet{}, LagSet{1}, LagSet{2}, LagSet{1, 2}}) {
    const auto bp = m.BlanketPrior(lags);
    EXPECT_NEAR(Sum(bp), 1.0, 1e-9);
    for (const auto& [k, p] : bp) {
      EXPECT_NEAR(Sum(m.NextLocation(k, lags)), 1.0, 1e-9);
    }
  }
}

TEST(TaskPrior, UniformAndEmpirical) {
  const auto u = UniformTaskPrior({1, 2, 3, 4});
  for (const auto& [id, p] : u) EXPECT_EQ(p, 0.25);
  const auto e = EmpiricalTaskPrior({{1, 3.0}, {2, 1.0}});
  EXPECT_EQ(e.at(1), 0.75);
  EXPECT_EQ(e.at(2), 0.25);
  EXPECT_THROW(UniformTaskPrior({}), InvalidArgument);
  EXPECT_THROW(EmpiricalTaskPrior({}), InvalidArgument);
  EXPECT_THROW(ParseTaskPriorMode("zipf"), InvalidArgument);
  const auto m = EstimatePriorsFromSequences({{1, 1, 1, 2}}, {1, 2, 3}, 0);
  EXPECT_EQ(TaskPrior(m, TaskPriorMode::kUniform).size(), 3u);
  EXPECT_EQ(TaskPrior(m, TaskPriorMode::kEmpirical).at(1), 0.75);
}

TEST(ProjectKey, SelectsLagsInOrder) {
  const SecretKey full(9, {1, 2, 3});
  EXPECT_EQ(ProjectKey(full, {}), SecretKey(9));
  EXPECT_EQ(ProjectKey(full, {1, 3}), SecretKey(9, {1, 3}));
  EXPECT_THROW(ProjectKey(full, {4}), InvalidArgument);
}

TEST(PriorModel, FromDistributionsValidates) {
  EXPECT_THROW(PriorModel::FromDistributions(1, {{SecretKey(1), 1.0}}, {}, {1},
                                             {{1, 1.0}}),
               InvalidArgument);
  EXPECT_THROW(PriorModel::FromDistributions(1, {{SecretKey(1, {1}), 1.0}}, {},
                                             {1}, {{1, 1.0}}),
               InvalidArgument);
  const auto m = PriorModel::FromDistributions(
      1, {{SecretKey(1, {2}), 3.0}, {SecretKey(2, {1}), 1.0}},
      {{SecretKey(1, {2}), {{2, 2.0}}}, {SecretKey(2, {1}), {{1, 1.0}}}},
      {1, 2}, {{1, 1.0}});
  EXPECT_EQ(m.p_x().at(1), 0.75);
  EXPECT_EQ(m.NextLocationFull(SecretKey(1, {2})).at(2), 1.0);
}

}  // namespace
}  // namespace cmdp
