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
#include <random>

#include <gtest/gtest.h>

#include "cmdp/roadnet.h"
#include "oracles.h"

namespace cmdp {
namespace {

constexpr char kNodes[] = "id,lat,lon\n1,41.90,12.50\n2,41.91,12.50\n3,41.92,12.50\n";

TEST(LoadGraph, PathGraphParses) {
  const RoadGraph g =
      ParseGraph(kNodes, "from,to,length_km\n1,2,1\n2,3,2\n");
  EXPECT_EQ(g.num_nodes(), 3u);
  ASSERT_EQ(g.edges().size(), 2u);
  EXPECT_EQ(g.edges()[1].from, 2);
  EXPECT_EQ(g.edges()[1].to, 3);
  EXPECT_EQ(g.edges()[1].length_km, 2.0);
  EXPECT_EQ(g.outgoing(g.IndexOf(1)).size(), 1u);
  EXPECT_EQ(g.incoming(g.IndexOf(3)).size(), 1u);
}

TEST(LoadGraph, NoEdgesLeavesEverythingUnreachable) {
  const RoadGraph g = ParseGraph(kNodes, "from,to,length_km\n");
  for (LocationId root : g.node_ids()) {
    const auto tree = BuildShortestPathTree(g, root);
    for (LocationId v : g.node_ids()) {
      if (v == root) {
        EXPECT_EQ(tree.DistanceFrom(g, v), 0.0);
      } else {
        EXPECT_FALSE(tree.DistanceFrom(g, v).has_value());
      }
    }
  }
}

TEST(LoadGraph, DanglingEdgeNamesTheId) {
  try {
    ParseGraph(kNodes, "from,to,length_km\n1,2,1\n2,42,1\n");
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("42"), std::string::npos);
    EXPECT_NE(msg.find(":3:"), std::string::npos);
  }
}

TEST(LoadGraph, RejectsBadLengthsAndRows) {
  EXPECT_THROW(ParseGraph(kNodes, "from,to,length_km\n1,2,0\n"), ParseError);
  EXPECT_THROW(ParseGraph(kNodes, "from,to,length_km\n1,2,-3\n"), ParseError);
  EXPECT_THROW(ParseGraph(kNodes, "from,to,length_km\n1,2,inf\n"), ParseError);
  EXPECT_THROW(ParseGraph(kNodes, "from,to,length_km\n1,2\n"), ParseError);
  EXPECT_THROW(ParseGraph(kNodes, "a,b,c\n1,2,1\n"), ParseError);
  EXPECT_THROW(LoadGraph("/nonexistent/n.csv", "/nonexistent/e.csv"), IoError);
  EXPECT_THROW(RoadGraph({{1, GeoPoint(0, 0)}, {1, GeoPoint(0, 0)}}, {}),
               InvalidArgument);
}

TEST(ShortestPathTree, HandRelaxation) {
  // A->B (1), B->C (2); tree rooted at C.
  const RoadGraph g = ParseGraph(kNodes, "from,to,length_km\n1,2,1\n2,3,2\n");
  const auto tree = BuildShortestPathTree(g, 3);
  EXPECT_EQ(tree.root(), 3);
  EXPECT_EQ(tree.DistanceFrom(g, 3), 0.0);
  EXPECT_EQ(tree.DistanceFrom(g, 2), 2.0);
  EXPECT_EQ(tree.DistanceFrom(g, 1), 3.0);
  // Direction matters: nothing reaches node 1.
  const auto back = BuildShortestPathTree(g, 1);
  EXPECT_FALSE(back.DistanceFrom(g, 3).has_value());
  EXPECT_THROW(BuildShortestPathTree(g, 99), InvalidArgument);
}

TEST(ShortestPathTree, MatchesFloydWarshall) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    const RoadGraph g = testing::RandomGraph(n, n * 3, rng);
    const auto fw = testing::FloydWarshall(g);
    for (std::size_t r = 0; r < n; ++r) {
      const auto tree = BuildShortestPathTree(g, g.nodes()[r].id);
      for (std::size_t v = 0; v < n; ++v) {
        const double got = tree.DistanceByIndex(v);
        if (std::isinf(fw[v][r])) {
          ASSERT_TRUE(std::isinf(got)) << "trial " << trial;
        } else {
          ASSERT_NEAR(got, fw[v][r], 1e-12) << "trial " << trial;
        }
      }
    }
  }
}

TEST(ShortestPathTree, EdgeRelaxationHolds) {
  std::mt19937_64 rng(7);
  const RoadGraph g = testing::RandomGraph(30, 90, rng);
  for (LocationId root : g.node_ids()) {
    const auto tree = BuildShortestPathTree(g, root);
    EXPECT_EQ(tree.DistanceFrom(g, root), 0.0);
    for (const RoadEdge& e : g.edges()) {
      // dist(u -> root) <= len(u, v) + dist(v -> root)
      EXPECT_LE(tree.DistanceByIndex(g.IndexOf(e.from)),
                e.length_km + tree.DistanceByIndex(g.IndexOf(e.to)));
    }
  }
}

TEST(SnapToNode, ExactAndTies) {
  const RoadGraph g = ParseGraph(kNodes, "from,to,length_km\n");
  EXPECT_EQ(SnapToNode(GeoPoint(41.91, 12.50), g), 2);
  // Equidistant between ids 7 and 3 picks 3.
  const RoadGraph h({{7, testing::AlongEquator(0.0)},
                     {3, testing::AlongEquator(2.0)}},
                    {});
  EXPECT_EQ(SnapToNode(testing::AlongEquator(1.0), h), 3);
  EXPECT_THROW(SnapToNode(GeoPoint(0, 0), RoadGraph()), InvalidArgument);
}

TEST(SnapToNode, MatchesLinearScan) {
  std::mt19937_64 rng(3);
  const RoadGraph g = testing::RandomGraph(40, 0, rng);
  std::uniform_real_distribution<double> lat(41.8, 42.0), lon(12.4, 12.6);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p(lat(rng), lon(rng));
    LocationId best = 0;
    double bd = testing::kInf;
    for (const Location& n : g.nodes()) {
      const double d = testing::CosinesKm(p, n.point);
      if (d < bd) {
        bd = d;
        best = n.id;
      }
    }
    EXPECT_EQ(SnapToNode(p, g), best);
  }
}

TEST(FormatEdges, RoundTrips) {
  const RoadGraph g = ParseGraph(kNodes, "from,to,length_km\n1,2,0.1\n2,3,1e-3\n");
  const RoadGraph h = ParseGraph(kNodes, FormatEdges(g.edges()));
  ASSERT_EQ(h.edges().size(), 2u);
  EXPECT_EQ(h.edges()[0].length_km, 0.1);
  EXPECT_EQ(h.edges()[1].length_km, 1e-3);
}

}  // namespace
}  // namespace cmdp
