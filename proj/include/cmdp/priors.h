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

// Trajectory ingestion and the probability inputs of the mechanism LPs:
// secret priors, joint secret/context priors, next-location conditionals and
// task priors.

#ifndef CMDP_PRIORS_H_
#define CMDP_PRIORS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cmdp/common.h"
#include "cmdp/geo.h"
#include "cmdp/roadnet.h"

namespace cmdp {

struct TrajectoryRecord {
  double timestamp = 0.0;  // seconds since the Unix epoch, UTC
  GeoPoint point;
};

struct Trajectory {
  std::string vehicle_id;
  std::string trajectory_id;
  std::vector<TrajectoryRecord> records;  // strictly increasing timestamps
};

struct TrajectoryLog {
  std::vector<Trajectory> trajectories;

  std::size_t num_records() const;
};

// Reads `vehicle_id,trajectory_id,timestamp,lat,lon`. Rows of a trajectory
// may appear in any order; they are sorted by timestamp, and repeated
// timestamps within a trajectory are rejected. Trajectories keep the order of
// their first appearance.
TrajectoryLog LoadTrajectories(const std::string& path);
TrajectoryLog ParseTrajectories(const std::string& text,
                                const std::string& source = "<memory>");
std::string FormatTrajectories(const TrajectoryLog& log);

// Node-id sequence of every trajectory after nearest-node snapping.
std::vector<std::vector<LocationId>> SnapTrajectories(const TrajectoryLog& log,
                                                      const RoadGraph& graph);

enum class TaskPriorMode { kUniform, kEmpirical };

TaskPriorMode ParseTaskPriorMode(const std::string& text);

// Uniform over `nodes`; throws on an empty set.
Distribution UniformTaskPrior(const std::vector<LocationId>& nodes);
// Visit frequencies normalized; throws when there are no visits.
Distribution EmpiricalTaskPrior(const std::map<LocationId, double>& visits);

using KeyDistribution = std::map<SecretKey, double>;

// Restriction of a full-context key to the given lags (1-based, increasing).
SecretKey ProjectKey(const SecretKey& full, const LagSet& lags);

struct PriorOptions {
  bool smoothing = true;
  TaskPriorMode task_mode = TaskPriorMode::kUniform;
};

// Prior statistics of (x_t, x_{t-1}, ..., x_{t-Gamma}) tuples.
//
// The joint prior is stored over full-context keys; priors and next-location
// conditionals for any blanket (lag subset) are derived by marginalizing it,
// so blanket-level quantities are always exact mixtures of full-context ones.
class PriorModel {
 public:
  PriorModel() = default;

  // Builds a model from explicit distributions. `next_by_key` must hold a
  // conditional next-location distribution for every key of `joint`.
  static PriorModel FromDistributions(
      int gamma, KeyDistribution joint,
      std::map<SecretKey, Distribution> next_by_key,
      std::vector<LocationId> nodes, Distribution task_prior);

  int gamma() const { return gamma_; }
  bool smoothing() const { return smoothing_; }
  const std::vector<LocationId>& nodes() const { return nodes_; }

  const Distribution& p_x() const { return p_x_; }
  const KeyDistribution& p_joint() const { return p_joint_; }
  const Distribution& p_task() const { return p_task_; }
  void set_task_prior(Distribution p_task);

  // Raw counts backing the distributions (empty for FromDistributions).
  const std::map<SecretKey, std::int64_t>& occupancy_counts() const {
    return occupancy_;
  }
  const std::map<SecretKey, std::map<LocationId, std::int64_t>>&
  transition_counts() const {
    return transitions_;
  }
  const std::map<LocationId, std::int64_t>& visit_counts() const {
    return visits_;
  }

  // p over blanket keys (x, b): the joint prior marginalized onto `lags`.
  KeyDistribution BlanketPrior(const LagSet& lags) const;

  // Conditional distribution of the next-slot location given the blanket key
  // (x, b) whose context holds the values of `lags`. Throws InvalidArgument
  // for an unseen key when smoothing is disabled.
  Distribution NextLocation(const SecretKey& blanket_key,
                            const LagSet& lags) const;

  // Conditional next-location distribution of a full-context key.
  const Distribution& NextLocationFull(const SecretKey& full_key) const;

 private:
  friend PriorModel EstimatePriors(const TrajectoryLog&, const RoadGraph&,
                                   int, const PriorOptions&);
  friend PriorModel EstimatePriorsFromSequences(
      const std::vector<std::vector<LocationId>>&, std::vector<LocationId>,
      int, const PriorOptions&);

  Distribution Backoff(LocationId x) const;
  void Finalize();

  int gamma_ = 0;
  bool smoothing_ = true;
  std::vector<LocationId> nodes_;
  KeyDistribution p_joint_;
  Distribution p_x_;
  Distribution p_task_;
  std::map<SecretKey, Distribution> next_full_;
  std::map<SecretKey, std::int64_t> occupancy_;
  std::map<SecretKey, std::map<LocationId, std::int64_t>> transitions_;
  std::map<LocationId, std::int64_t> visits_;
};

// Snaps every record to its nearest node and counts context tuples with
// add-one smoothing over the observed support. Throws InvalidArgument for an
// empty log, a negative gamma, or a gamma longer than every trajectory.
PriorModel EstimatePriors(const TrajectoryLog& log, const RoadGraph& graph,
                          int gamma, const PriorOptions& options = {});

// Same as EstimatePriors on already snapped node sequences.
PriorModel EstimatePriorsFromSequences(
    const std::vector<std::vector<LocationId>>& sequences,
    std::vector<LocationId> nodes, int gamma,
    const PriorOptions& options = {});

// Uniform over the model's nodes or empirical visit frequency.
Distribution TaskPrior(const PriorModel& model, TaskPriorMode mode);

// Writes `kind,key,prob` rows (kind is p_x, p_joint or p_task).
std::string FormatPriors(const PriorModel& model);

}  // namespace cmdp

#endif  // CMDP_PRIORS_H_
