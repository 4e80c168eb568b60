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

// The mechanism-design LPs: context-free mDP, full-context C-mDP, the
// blanket-reduced C-mDP and its marginal-preserving refinement.
//
// Variables are q(k, y) for every key k and output y, stored at column
// k * |outputs| + y. For every neighbor pair (i, j) with distance d <= eta and
// every output y the LP carries both
//   q(i, y) - e^{eps d} q(j, y) <= 0   and   q(j, y) - e^{eps d} q(i, y) <= 0,
// plus one unit-measure equality per key.

#ifndef CMDP_LP_H_
#define CMDP_LP_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cmdp/common.h"
#include "cmdp/geo.h"
#include "cmdp/mechanisms.h"
#include "cmdp/priors.h"
#include "cmdp/simplex.h"
#include "cmdp/utility.h"

namespace cmdp {

// Pairs with eps * d above this are left out: their constraint is implied by
// 0 <= q <= 1 and e^{eps d} would overflow.
inline constexpr double kMaxExponent = 700.0;

struct MechanismLp {
  std::vector<SecretKey> keys;
  std::vector<LocationId> outputs;
  LinearProgram program;
  double epsilon = 0.0;
  double eta = 0.0;
  std::string metric;
  std::string builder;

  std::size_t Column(std::size_t key, std::size_t output) const {
    return key * outputs.size() + output;
  }
  bool operator==(const MechanismLp&) const = default;
};

// Context-free mDP over the keys of `cost` (usually plain x).
// Throws InvalidArgument for eps <= 0, a negative eta, or a key of `cost`
// without prior mass.
MechanismLp BuildMdpLp(const CostTensor& cost, const KeyDistribution& prior,
                       const KeyMetric& metric, double eps, double eta);

// C-mDP over full-context keys with the augmented metric.
MechanismLp BuildCmdpFullLp(const CostTensor& cost,
                            const KeyDistribution& prior,
                            const LocationDomain& domain,
                            const ContextWeights& weights, double eps,
                            double eta);

// C-mDP over blanket keys (x, b). `metric` must not exceed the augmented
// distance of any pair of full keys projecting onto the two blanket keys.
MechanismLp BuildCmdpReducedLp(const CostTensor& cost,
                               const KeyDistribution& prior,
                               const KeyMetric& metric, double eps,
                               double eta);

// Full C-mDP plus, for every blanket key b = pi(x, v) and output y,
//   sum_{v: pi(x,v) = b} p(x, v) q((x,v), y) = p(x, b) q*(b, y),
// with p(x, b) the sum of p(x, v) over that group. pi keeps `lags`.
// Throws InvalidArgument when q* lacks a projected key, uses different
// outputs, or violates the reduced constraints under `blanket_metric` by
// more than 1e-8.
MechanismLp BuildRefinedLp(const CostTensor& cost, const KeyDistribution& prior,
                           const KeyMetric& metric, double eps, double eta,
                           const PerturbationMatrix& qstar, const LagSet& lags,
                           const KeyMetric& blanket_metric);

// Forces q(k, .) = q(k', .) whenever group(k) == group(k'): each key is tied
// to the first key of its group.
void TieRows(MechanismLp& lp,
             const std::function<SecretKey(const SecretKey&)>& group);
// Rows invariant across contexts (group by the current location).
void AddInvarianceEqualities(MechanismLp& lp);
// Rows depending on the context only through `lags`.
void AddBlanketTying(MechanismLp& lp, const LagSet& lags);

struct LpSolution {
  SolveStatus status = SolveStatus::kNumerical;
  PerturbationMatrix q;  // set only when status is optimal
  double objective = 0.0;
  double max_infeasibility = 0.0;
  std::int64_t iterations = 0;
};

// Solves and converts the optimum to a matrix: entries are clamped to [0, 1],
// raised where needed so that pairwise ratio rows hold exactly, and rows are
// renormalized.
LpSolution Solve(const MechanismLp& lp, const SimplexOptions& options = {});

// "x", "x|v1|...|vG" for uniform context length G, "x|prefix" otherwise.
std::string KeySchema(const std::vector<SecretKey>& keys);

// Self-describing text form: `section,row,column,value` with sections
// objective, upper, le, le_rhs, eq, eq_rhs; '#' lines name the variables.
std::string FormatLp(const MechanismLp& lp);
LinearProgram ParseLinearProgram(const std::string& text,
                                 const std::string& source = "<memory>");

}  // namespace cmdp

#endif  // CMDP_LP_H_
