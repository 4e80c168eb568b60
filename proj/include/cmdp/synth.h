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

// Seeded synthetic road grids and trajectories from a location process of
// known Markov order.

#ifndef CMDP_SYNTH_H_
#define CMDP_SYNTH_H_

#include <cstdint>
#include <vector>

#include "cmdp/common.h"
#include "cmdp/geo.h"
#include "cmdp/priors.h"
#include "cmdp/roadnet.h"

namespace cmdp {

struct SynthOptions {
  int rows = 3;
  int cols = 3;
  double spacing_km = 1.0;
  double origin_lat = 41.90;
  double origin_lon = 12.50;
  // 1: node-specific random transitions; 2: keep the previous heading with
  // probability `persistence`, otherwise move to a uniformly chosen
  // neighbor.
  int order = 1;
  double persistence = 0.85;
  // Order 2 for trajectories at or above `fast_mph`, order 1 below.
  bool heterogeneous = false;
  double fast_mph = 30.0;
  int count = 100;    // trajectories
  int length = 20;    // records per trajectory
  int vehicles = 10;
  std::vector<double> speeds_mph = {10.0, 40.0};
  std::vector<int> start_hours = {8};
  std::uint64_t seed = 1;
};

struct SynthData {
  std::vector<Location> nodes;
  std::vector<RoadEdge> edges;
  TrajectoryLog log;

  RoadGraph Graph() const { return RoadGraph(nodes, edges); }
};

// Grid with bidirectional 4-neighbor edges of haversine length. Node ids are
// row * cols + col + 1. Throws InvalidArgument for invalid sizes, a zero
// count, or an order other than 1 or 2.
SynthData Synthesize(const SynthOptions& options);

// Node sequences of a process of the given order on the grid graph, for
// direct use in CI experiments.
std::vector<std::vector<LocationId>> SynthesizeSequences(
    const RoadGraph& graph, int order, int count, int length,
    double persistence, std::uint64_t seed);

}  // namespace cmdp

#endif  // CMDP_SYNTH_H_
