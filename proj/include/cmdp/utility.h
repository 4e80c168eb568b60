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

// Utility-loss tensors: the expected absolute error in travel cost to a task
// location when the next position is estimated from a reported location
// instead of the true one.

#ifndef CMDP_UTILITY_H_
#define CMDP_UTILITY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cmdp/common.h"
#include "cmdp/geo.h"
#include "cmdp/priors.h"
#include "cmdp/roadnet.h"

namespace cmdp {

// Dense keys x outputs table of kilometers, row-major.
class CostTensor {
 public:
  CostTensor() = default;
  // Throws InvalidArgument on a size mismatch, duplicate keys/outputs, or a
  // negative or non-finite entry.
  CostTensor(std::vector<SecretKey> keys, std::vector<LocationId> outputs,
             std::vector<double> values);

  const std::vector<SecretKey>& keys() const { return keys_; }
  const std::vector<LocationId>& outputs() const { return outputs_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t num_keys() const { return keys_.size(); }
  std::size_t num_outputs() const { return outputs_.size(); }

  double at(std::size_t key, std::size_t output) const {
    return values_[key * outputs_.size() + output];
  }
  std::size_t KeyIndex(const SecretKey& key) const;

 private:
  std::vector<SecretKey> keys_;
  std::vector<LocationId> outputs_;
  std::vector<double> values_;
};

struct CostDiagnostics {
  // (task, next location) or (task, output) terms dropped because a path
  // does not exist.
  std::int64_t skipped_terms = 0;
};

// Reverse shortest-path trees for every task with positive prior mass.
struct TaskTrees {
  std::vector<double> weights;
  std::vector<ShortestPathTree> trees;
};
TaskTrees BuildTaskTrees(const RoadGraph& graph, const Distribution& p_task);

// c(k, y) = sum_task p_task sum_l next_k(l) |path(l, task) - path(y, task)|.
// Terms with an unreachable path are skipped and the remaining weight is
// renormalized. Throws InvalidArgument for an empty task prior, ids missing
// from the graph, or a cell left without any reachable term.
CostTensor CostFromNextDistributions(const RoadGraph& graph,
                                     const Distribution& p_task,
                                     std::vector<SecretKey> keys,
                                     const std::vector<Distribution>& next,
                                     std::vector<LocationId> outputs,
                                     CostDiagnostics* diagnostics = nullptr);

// Keys (x, b) with b the values of `lags`; next-location law p(. | x, b).
CostTensor CostContextBlanket(const RoadGraph& graph, const PriorModel& model,
                              const LocationDomain& domain,
                              std::vector<SecretKey> keys, const LagSet& lags,
                              CostDiagnostics* diagnostics = nullptr);

// Full-context keys (x, v); next-location law p(. | x, v).
CostTensor CostFullContext(const RoadGraph& graph, const PriorModel& model,
                           const LocationDomain& domain,
                           std::vector<SecretKey> keys,
                           CostDiagnostics* diagnostics = nullptr);

// Plain keys x over the domain's secrets; the next location is drawn from
// the prior p_x, so every row is the same.
CostTensor CostContextFree(const RoadGraph& graph, const PriorModel& model,
                           const LocationDomain& domain,
                           CostDiagnostics* diagnostics = nullptr);

// Keys (x_t, x_{t-1}) with first-order transitions. Requires gamma >= 1.
CostTensor CostMarkov1(const RoadGraph& graph, const PriorModel& model,
                       const LocationDomain& domain,
                       CostDiagnostics* diagnostics = nullptr);

// `count` tasks drawn without replacement (weighted by p_task), renormalized.
// Returns p_task unchanged when count is 0 or not smaller than its support.
Distribution SampleTasks(const Distribution& p_task, std::size_t count,
                         std::uint64_t seed);

// `key,output,cost_km` rows and a sidecar `kind,position,id` index listing the
// key and output orders.
std::string FormatCostTensor(const CostTensor& tensor);
std::string FormatCostIndex(const CostTensor& tensor);
CostTensor ParseCostTensor(const std::string& tensor_text,
                           const std::string& index_text);

}  // namespace cmdp

#endif  // CMDP_UTILITY_H_
