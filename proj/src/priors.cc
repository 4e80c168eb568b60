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

#include "cmdp/priors.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <utility>

#include "cmdp/csv.h"

namespace cmdp {
namespace {

template <typename Map>
void NormalizeInPlace(Map& dist) {
  double total = 0.0;
  for (const auto& [k, v] : dist) total += v;
  if (!(total > 0.0)) throw InvalidArgument("distribution has no mass");
  for (auto& [k, v] : dist) v /= total;
}

}  // namespace

std::size_t TrajectoryLog::num_records() const {
  std::size_t n = 0;
  for (const Trajectory& t : trajectories) n += t.records.size();
  return n;
}

TrajectoryLog ParseTrajectories(const std::string& text,
                                const std::string& source) {
  const CsvTable table = CsvTable::Parse(
      text, {"vehicle_id", "trajectory_id", "timestamp", "lat", "lon"},
      source);
  TrajectoryLog log;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::vector<std::vector<std::size_t>> lines;
  for (const CsvRow& row : table.rows()) {
    TrajectoryRecord rec;
    try {
      rec.timestamp = ParseDouble(row.fields[2]);
      if (!std::isfinite(rec.timestamp)) {
        throw ParseError("timestamp must be finite");
      }
      rec.point =
          GeoPoint(ParseDouble(row.fields[3]), ParseDouble(row.fields[4]));
    } catch (const Error& e) {
      throw ParseError(Where(source, row.line) + e.what());
    }
    const auto key = std::make_pair(row.fields[0], row.fields[1]);
    auto [it, inserted] = index.emplace(key, log.trajectories.size());
    if (inserted) {
      log.trajectories.push_back(Trajectory{row.fields[0], row.fields[1], {}});
      lines.emplace_back();
    }
    log.trajectories[it->second].records.push_back(rec);
    lines[it->second].push_back(row.line);
  }
  for (std::size_t t = 0; t < log.trajectories.size(); ++t) {
    auto& recs = log.trajectories[t].records;
    std::vector<std::size_t> order(recs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return recs[a].timestamp < recs[b].timestamp;
                     });
    std::vector<TrajectoryRecord> sorted;
    sorted.reserve(recs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && recs[order[i]].timestamp == recs[order[i - 1]].timestamp) {
        throw ParseError(Where(source, lines[t][order[i]]) +
                         "repeated timestamp in trajectory '" +
                         log.trajectories[t].trajectory_id + "'");
      }
      sorted.push_back(recs[order[i]]);
    }
    recs = std::move(sorted);
  }
  return log;
}

TrajectoryLog LoadTrajectories(const std::string& path) {
  return ParseTrajectories(ReadTextFile(path), path);
}

std::string FormatTrajectories(const TrajectoryLog& log) {
  std::string out = "vehicle_id,trajectory_id,timestamp,lat,lon\n";
  for (const Trajectory& t : log.trajectories) {
    for (const TrajectoryRecord& r : t.records) {
      out += t.vehicle_id + ',' + t.trajectory_id + ',' +
             FormatDouble(r.timestamp) + ',' + FormatDouble(r.point.lat()) +
             ',' + FormatDouble(r.point.lon()) + '\n';
    }
  }
  return out;
}

std::vector<std::vector<LocationId>> SnapTrajectories(const TrajectoryLog& log,
                                                      const RoadGraph& graph) {
  std::vector<std::vector<LocationId>> out;
  out.reserve(log.trajectories.size());
  for (const Trajectory& t : log.trajectories) {
    std::vector<LocationId> seq;
    seq.reserve(t.records.size());
    for (const TrajectoryRecord& r : t.records) {
      seq.push_back(SnapToNode(r.point, graph));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

TaskPriorMode ParseTaskPriorMode(const std::string& text) {
  if (text == "uniform") return TaskPriorMode::kUniform;
  if (text == "empirical") return TaskPriorMode::kEmpirical;
  throw InvalidArgument("unknown task prior mode '" + text + "'");
}

Distribution UniformTaskPrior(const std::vector<LocationId>& nodes) {
  if (nodes.empty()) throw InvalidArgument("task prior over an empty node set");
  Distribution d;
  for (LocationId n : nodes) d[n] = 1.0;
  NormalizeInPlace(d);
  return d;
}

Distribution EmpiricalTaskPrior(const std::map<LocationId, double>& visits) {
  Distribution d;
  for (const auto& [id, count] : visits) {
    if (count < 0.0) throw InvalidArgument("negative visit count");
    if (count > 0.0) d[id] = count;
  }
  if (d.empty()) throw InvalidArgument("task prior over an empty node set");
  NormalizeInPlace(d);
  return d;
}

SecretKey ProjectKey(const SecretKey& full, const LagSet& lags) {
  SecretKey out(full.current);
  out.context.reserve(lags.size());
  for (int lag : lags) {
    if (lag < 1 || static_cast<std::size_t>(lag) > full.context.size()) {
      throw InvalidArgument("lag " + std::to_string(lag) +
                            " outside the context of " + FormatKey(full));
    }
    out.context.push_back(full.context[static_cast<std::size_t>(lag - 1)]);
  }
  return out;
}

PriorModel PriorModel::FromDistributions(
    int gamma, KeyDistribution joint,
    std::map<SecretKey, Distribution> next_by_key,
    std::vector<LocationId> nodes, Distribution task_prior) {
  PriorModel m;
  m.gamma_ = gamma;
  m.smoothing_ = true;
  m.nodes_ = std::move(nodes);
  for (const auto& [key, p] : joint) {
    if (static_cast<int>(key.context.size()) != gamma) {
      throw InvalidArgument("key " + FormatKey(key) +
                            " does not carry gamma context values");
    }
    if (p < 0.0) throw InvalidArgument("negative prior mass");
    auto it = next_by_key.find(key);
    if (it == next_by_key.end()) {
      throw InvalidArgument("no next-location distribution for " +
                            FormatKey(key));
    }
    NormalizeInPlace(it->second);
  }
  NormalizeInPlace(joint);
  m.p_joint_ = std::move(joint);
  for (const auto& [key, p] : m.p_joint_) m.p_x_[key.current] += p;
  m.next_full_ = std::move(next_by_key);
  m.set_task_prior(std::move(task_prior));
  return m;
}

void PriorModel::set_task_prior(Distribution p_task) {
  NormalizeInPlace(p_task);
  p_task_ = std::move(p_task);
}

void PriorModel::Finalize() {
  p_joint_.clear();
  for (const auto& [key, n] : occupancy_) {
    p_joint_[key] = static_cast<double>(n) + (smoothing_ ? 1.0 : 0.0);
  }
  NormalizeInPlace(p_joint_);
  p_x_.clear();
  for (const auto& [key, p] : p_joint_) p_x_[key.current] += p;

  // Raw successor counts of each current location over all contexts.
  std::map<LocationId, Distribution> from_current;
  for (const auto& [key, succ] : transitions_) {
    for (const auto& [to, n] : succ) {
      from_current[key.current][to] += static_cast<double>(n);
    }
  }
  next_full_.clear();
  for (const auto& [key, p] : p_joint_) {
    auto it = transitions_.find(key);
    Distribution d;
    if (it != transitions_.end()) {
      for (const auto& [to, n] : it->second) d[to] = static_cast<double>(n);
    } else if (!smoothing_) {
      continue;
    } else if (auto fc = from_current.find(key.current);
               fc != from_current.end()) {
      d = fc->second;
    } else {
      d = p_x_;
    }
    NormalizeInPlace(d);
    next_full_.emplace(key, std::move(d));
  }
}

KeyDistribution PriorModel::BlanketPrior(const LagSet& lags) const {
  KeyDistribution out;
  for (const auto& [key, p] : p_joint_) out[ProjectKey(key, lags)] += p;
  return out;
}

const Distribution& PriorModel::NextLocationFull(
    const SecretKey& full_key) const {
  auto it = next_full_.find(full_key);
  if (it == next_full_.end()) {
    throw InvalidArgument("no next-location support for " +
                          FormatKey(full_key));
  }
  return it->second;
}

Distribution PriorModel::Backoff(LocationId x) const {
  Distribution mix;
  double mass = 0.0;
  for (const auto& [key, p] : p_joint_) {
    if (key.current != x) continue;
    auto it = next_full_.find(key);
    if (it == next_full_.end()) continue;
    for (const auto& [to, q] : it->second) mix[to] += p * q;
    mass += p;
  }
  if (mass > 0.0) {
    NormalizeInPlace(mix);
    return mix;
  }
  return p_x_;
}

Distribution PriorModel::NextLocation(const SecretKey& blanket_key,
                                      const LagSet& lags) const {
  if (blanket_key.context.size() != lags.size()) {
    throw InvalidArgument("blanket key " + FormatKey(blanket_key) +
                          " does not match its lag set");
  }
  if (!smoothing_) {
    Distribution counts;
    for (const auto& [key, succ] : transitions_) {
      if (ProjectKey(key, lags) != blanket_key) continue;
      for (const auto& [to, n] : succ) counts[to] += static_cast<double>(n);
    }
    if (counts.empty()) {
      throw InvalidArgument("no observed successor for " +
                            FormatKey(blanket_key) +
                            " and smoothing is disabled");
    }
    NormalizeInPlace(counts);
    return counts;
  }
  Distribution mix;
  double mass = 0.0;
  for (const auto& [key, p] : p_joint_) {
    if (key.current != blanket_key.current) continue;
    if (ProjectKey(key, lags) != blanket_key) continue;
    const Distribution& next = next_full_.at(key);
    for (const auto& [to, q] : next) mix[to] += p * q;
    mass += p;
  }
  if (mass > 0.0) {
    NormalizeInPlace(mix);
    return mix;
  }
  return Backoff(blanket_key.current);
}

PriorModel EstimatePriorsFromSequences(
    const std::vector<std::vector<LocationId>>& sequences,
    std::vector<LocationId> nodes, int gamma, const PriorOptions& options) {
  if (gamma < 0) throw InvalidArgument("gamma must be >= 0");
  std::size_t total = 0;
  for (const auto& s : sequences) total += s.size();
  if (total == 0) throw InvalidArgument("trajectory log is empty");
  PriorModel m;
  m.gamma_ = gamma;
  m.smoothing_ = options.smoothing;
  std::sort(nodes.begin(), nodes.end());
  m.nodes_ = std::move(nodes);
  const std::size_t g = static_cast<std::size_t>(gamma);
  for (const auto& seq : sequences) {
    for (LocationId v : seq) ++m.visits_[v];
    for (std::size_t t = g; t < seq.size(); ++t) {
      SecretKey key(seq[t]);
      key.context.reserve(g);
      for (std::size_t lag = 1; lag <= g; ++lag) {
        key.context.push_back(seq[t - lag]);
      }
      ++m.occupancy_[key];
      if (t + 1 < seq.size()) ++m.transitions_[key][seq[t + 1]];
    }
  }
  if (m.occupancy_.empty()) {
    throw InvalidArgument("gamma " + std::to_string(gamma) +
                          " is longer than every trajectory");
  }
  m.Finalize();
  m.set_task_prior(TaskPrior(m, options.task_mode));
  return m;
}

PriorModel EstimatePriors(const TrajectoryLog& log, const RoadGraph& graph,
                          int gamma, const PriorOptions& options) {
  if (log.num_records() == 0) {
    throw InvalidArgument("trajectory log is empty");
  }
  return EstimatePriorsFromSequences(SnapTrajectories(log, graph),
                                     graph.node_ids(), gamma, options);
}

Distribution TaskPrior(const PriorModel& model, TaskPriorMode mode) {
  if (mode == TaskPriorMode::kUniform) return UniformTaskPrior(model.nodes());
  std::map<LocationId, double> visits;
  for (const auto& [id, n] : model.visit_counts()) {
    visits[id] = static_cast<double>(n);
  }
  return EmpiricalTaskPrior(visits);
}

std::string FormatPriors(const PriorModel& model) {
  std::string out = "kind,key,prob\n";
  for (const auto& [id, p] : model.p_x()) {
    out += "p_x," + std::to_string(id) + ',' + FormatDouble(p) + '\n';
  }
  for (const auto& [key, p] : model.p_joint()) {
    out += "p_joint," + FormatKey(key) + ',' + FormatDouble(p) + '\n';
  }
  for (const auto& [id, p] : model.p_task()) {
    out += "p_task," + std::to_string(id) + ',' + FormatDouble(p) + '\n';
  }
  return out;
}

}  // namespace cmdp
