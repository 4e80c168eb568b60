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

// The privacy-budget sweep: builds every mechanism at every epsilon on one
// dataset, audits it, and evaluates its expected utility loss on held-out
// records.

#ifndef CMDP_SWEEP_H_
#define CMDP_SWEEP_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmdp/blanket.h"
#include "cmdp/priors.h"
#include "cmdp/roadnet.h"

namespace cmdp {

inline const std::vector<std::string> kSweepMechanisms = {
    "LP", "ExpMech", "LP+Markov1", "LP+C-mDP", "LP+TrueMB"};

struct SweepConfig {
  int gamma = 2;
  double eta = 5.0;
  std::vector<double> epsilons = {0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> weights;  // empty: 0.5^tau for tau = 1..gamma
  std::vector<std::string> mechanisms = kSweepMechanisms;
  std::uint64_t seed = 1;
  TaskPriorMode task_mode = TaskPriorMode::kUniform;
  std::size_t task_count = 0;  // 0: every node is a task
  std::optional<RegionGrid> grid;  // default: box around the graph
  int grid_rows = 1;
  int grid_cols = 1;
  double eval_fraction = 0.3;
  bool disjoint_split = true;
  int permutations = kMinPermutations;
  bool timing = false;
  int workers = 1;

  // Throws InvalidArgument on out-of-range values.
  void Validate() const;
};

struct SweepCell {
  std::string mechanism;
  double epsilon = 0.0;
  std::optional<double> expected_loss;
  double max_pl = 0.0;
  bool pass = false;
  std::optional<double> build_s;
  std::optional<double> solve_s;
  std::string error;  // empty on success
};

struct SweepResult {
  std::vector<SweepCell> cells;  // epsilon-major, mechanisms in config order
  // Output file name -> contents.
  std::map<std::string, std::string> files;
};

// Failures of individual cells are recorded in the cell and in errors.csv;
// the sweep continues. Throws for invalid configuration or inputs.
SweepResult RunSweep(const RoadGraph& graph, const TrajectoryLog& log,
                     const SweepConfig& config);

// `mechanism,epsilon,expected_loss_km,max_pl,pass,build_s,solve_s`; missing
// values are written as NA.
std::string FormatSweepTable(const std::vector<SweepCell>& cells);

}  // namespace cmdp

#endif  // CMDP_SWEEP_H_
