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

#include "cmdp/utility.h"

#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "cmdp/csv.h"
#include "cmdp/rng.h"

namespace cmdp {

CostTensor::CostTensor(std::vector<SecretKey> keys,
                       std::vector<LocationId> outputs,
                       std::vector<double> values)
    : keys_(std::move(keys)),
      outputs_(std::move(outputs)),
      values_(std::move(values)) {
  if (values_.size() != keys_.size() * outputs_.size()) {
    throw InvalidArgument("cost tensor size does not match keys x outputs");
  }
  if (std::set<SecretKey>(keys_.begin(), keys_.end()).size() != keys_.size()) {
    throw InvalidArgument("duplicate key in cost tensor");
  }
  if (std::set<LocationId>(outputs_.begin(), outputs_.end()).size() !=
      outputs_.size()) {
    throw InvalidArgument("duplicate output in cost tensor");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("cost entries must be finite and >= 0");
    }
  }
}

std::size_t CostTensor::KeyIndex(const SecretKey& key) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return i;
  }
  throw InvalidArgument("key " + FormatKey(key) + " not in cost tensor");
}

TaskTrees BuildTaskTrees(const RoadGraph& graph, const Distribution& p_task) {
  TaskTrees out;
  for (const auto& [task, w] : p_task) {
    if (!(w > 0.0)) continue;
    out.weights.push_back(w);
    out.trees.push_back(BuildShortestPathTree(graph, task));
  }
  if (out.trees.empty()) throw InvalidArgument("task prior is empty");
  return out;
}

CostTensor CostFromNextDistributions(const RoadGraph& graph,
                                     const Distribution& p_task,
                                     std::vector<SecretKey> keys,
                                     const std::vector<Distribution>& next,
                                     std::vector<LocationId> outputs,
                                     CostDiagnostics* diagnostics) {
  if (next.size() != keys.size()) {
    throw InvalidArgument("one next-location distribution per key required");
  }
  const TaskTrees tasks = BuildTaskTrees(graph, p_task);
  std::vector<std::size_t> out_index;
  out_index.reserve(outputs.size());
  for (LocationId y : outputs) {
    if (!graph.HasNode(y)) {
      throw InvalidArgument("output " + std::to_string(y) +
                            " is not a road-graph node");
    }
    out_index.push_back(graph.IndexOf(y));
  }
  const std::size_t ny = outputs.size();
  std::vector<double> values(keys.size() * ny, 0.0);
  std::int64_t skipped = 0;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (next[k].empty()) {
      throw InvalidArgument("no next-location distribution for " +
                            FormatKey(keys[k]));
    }
    std::vector<std::pair<std::size_t, double>> support;
    for (const auto& [loc, p] : next[k]) {
      if (p <= 0.0) continue;
      if (!graph.HasNode(loc)) {
        throw InvalidArgument("next location " + std::to_string(loc) +
                              " is not a road-graph node");
      }
      support.emplace_back(graph.IndexOf(loc), p);
    }
    for (std::size_t j = 0; j < ny; ++j) {
      double sum = 0.0;
      double weight = 0.0;
      for (std::size_t t = 0; t < tasks.trees.size(); ++t) {
        const ShortestPathTree& tree = tasks.trees[t];
        const double py = tree.DistanceByIndex(out_index[j]);
        for (const auto& [li, p] : support) {
          const double pl = tree.DistanceByIndex(li);
          if (std::isinf(py) || std::isinf(pl)) {
            ++skipped;
            continue;
          }
          const double w = tasks.weights[t] * p;
          sum += w * std::abs(pl - py);
          weight += w;
        }
      }
      if (!(weight > 0.0)) {
        throw InvalidArgument("no reachable task for key " +
                              FormatKey(keys[k]) + " and output " +
                              std::to_string(outputs[j]));
      }
      values[k * ny + j] = sum / weight;
    }
  }
  if (diagnostics != nullptr) diagnostics->skipped_terms = skipped;
  return CostTensor(std::move(keys), std::move(outputs), std::move(values));
}

CostTensor CostContextBlanket(const RoadGraph& graph, const PriorModel& model,
                              const LocationDomain& domain,
                              std::vector<SecretKey> keys, const LagSet& lags,
                              CostDiagnostics* diagnostics) {
  std::vector<Distribution> next;
  next.reserve(keys.size());
  for (const SecretKey& key : keys) {
    next.push_back(model.NextLocation(key, lags));
  }
  return CostFromNextDistributions(graph, model.p_task(), std::move(keys),
                                   next, domain.output_ids(), diagnostics);
}

CostTensor CostFullContext(const RoadGraph& graph, const PriorModel& model,
                           const LocationDomain& domain,
                           std::vector<SecretKey> keys,
                           CostDiagnostics* diagnostics) {
  std::vector<Distribution> next;
  next.reserve(keys.size());
  for (const SecretKey& key : keys) next.push_back(model.NextLocationFull(key));
  return CostFromNextDistributions(graph, model.p_task(), std::move(keys),
                                   next, domain.output_ids(), diagnostics);
}

CostTensor CostContextFree(const RoadGraph& graph, const PriorModel& model,
                           const LocationDomain& domain,
                           CostDiagnostics* diagnostics) {
  std::vector<SecretKey> keys;
  for (LocationId x : domain.secret_ids()) keys.emplace_back(x);
  const std::vector<Distribution> next(keys.size(), model.p_x());
  return CostFromNextDistributions(graph, model.p_task(), std::move(keys),
                                   next, domain.output_ids(), diagnostics);
}

CostTensor CostMarkov1(const RoadGraph& graph, const PriorModel& model,
                       const LocationDomain& domain,
                       CostDiagnostics* diagnostics) {
  if (model.gamma() < 1) {
    throw InvalidArgument("first-order costs need priors with gamma >= 1");
  }
  const LagSet lags = {1};
  std::vector<SecretKey> keys;
  for (const auto& [key, p] : model.BlanketPrior(lags)) keys.push_back(key);
  return CostContextBlanket(graph, model, domain, std::move(keys), lags,
                            diagnostics);
}

Distribution SampleTasks(const Distribution& p_task, std::size_t count,
                         std::uint64_t seed) {
  std::vector<std::pair<LocationId, double>> pool;
  for (const auto& [id, p] : p_task) {
    if (p > 0.0) pool.emplace_back(id, p);
  }
  if (count == 0 || count >= pool.size()) return p_task;
  SplitMix64 rng(seed);
  Distribution out;
  double total = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    double mass = 0.0;
    for (const auto& [id, p] : pool) mass += p;
    const double u = rng.Uniform() * mass;
    std::size_t pick = pool.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      acc += pool[i].second;
      if (u < acc) {
        pick = i;
        break;
      }
    }
    out[pool[pick].first] = pool[pick].second;
    total += pool[pick].second;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  for (auto& [id, p] : out) p /= total;
  return out;
}

std::string FormatCostTensor(const CostTensor& tensor) {
  std::string out = "key,output,cost_km\n";
  for (std::size_t k = 0; k < tensor.num_keys(); ++k) {
    const std::string key = FormatKey(tensor.keys()[k]);
    for (std::size_t j = 0; j < tensor.num_outputs(); ++j) {
      out += key + ',' + std::to_string(tensor.outputs()[j]) + ',' +
             FormatDouble(tensor.at(k, j)) + '\n';
    }
  }
  return out;
}

std::string FormatCostIndex(const CostTensor& tensor) {
  std::string out = "kind,position,id\n";
  for (std::size_t k = 0; k < tensor.num_keys(); ++k) {
    out += "key," + std::to_string(k) + ',' + FormatKey(tensor.keys()[k]) +
           '\n';
  }
  for (std::size_t j = 0; j < tensor.num_outputs(); ++j) {
    out += "output," + std::to_string(j) + ',' +
           std::to_string(tensor.outputs()[j]) + '\n';
  }
  return out;
}

CostTensor ParseCostTensor(const std::string& tensor_text,
                           const std::string& index_text) {
  const CsvTable index =
      CsvTable::Parse(index_text, {"kind", "position", "id"}, "<cost index>");
  std::vector<SecretKey> keys;
  std::vector<LocationId> outputs;
  for (const CsvRow& row : index.rows()) {
    const auto pos = static_cast<std::size_t>(ParseInt(row.fields[1]));
    if (row.fields[0] == "key") {
      if (pos != keys.size()) {
        throw ParseError(Where(index.source(), row.line) + "key out of order");
      }
      keys.push_back(ParseKey(row.fields[2]));
    } else if (row.fields[0] == "output") {
      if (pos != outputs.size()) {
        throw ParseError(Where(index.source(), row.line) +
                         "output out of order");
      }
      outputs.push_back(ParseInt(row.fields[2]));
    } else {
      throw ParseError(Where(index.source(), row.line) + "unknown kind '" +
                       row.fields[0] + "'");
    }
  }
  std::map<SecretKey, std::size_t> key_pos;
  for (std::size_t i = 0; i < keys.size(); ++i) key_pos[keys[i]] = i;
  std::map<LocationId, std::size_t> out_pos;
  for (std::size_t j = 0; j < outputs.size(); ++j) out_pos[outputs[j]] = j;

  const CsvTable table = CsvTable::Parse(
      tensor_text, {"key", "output", "cost_km"}, "<cost tensor>");
  std::vector<double> values(keys.size() * outputs.size(), 0.0);
  std::vector<bool> seen(values.size(), false);
  for (const CsvRow& row : table.rows()) {
    auto k = key_pos.find(ParseKey(row.fields[0]));
    auto j = out_pos.find(ParseInt(row.fields[1]));
    if (k == key_pos.end() || j == out_pos.end()) {
      throw ParseError(Where(table.source(), row.line) +
                       "cell not listed in the index");
    }
    const std::size_t cell = k->second * outputs.size() + j->second;
    if (seen[cell]) {
      throw ParseError(Where(table.source(), row.line) + "repeated cell");
    }
    seen[cell] = true;
    values[cell] = ParseDouble(row.fields[2]);
  }
  for (bool s : seen) {
    if (!s) throw ParseError("cost tensor is missing cells");
  }
  return CostTensor(std::move(keys), std::move(outputs), std::move(values));
}

}  // namespace cmdp
