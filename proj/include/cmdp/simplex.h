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

// A generic bounded linear program and a dense revised simplex for it.
//
//   minimize c'x  subject to  A_le x <= b_le,  A_eq x = b_eq,  0 <= x <= u.
//
// The solver runs the primal simplex on the dual of this problem. The dual
// has one equality row per primal variable, so the basis is |x| x |x| no
// matter how many inequality rows there are, and the all-slack basis is
// feasible from the start, so no phase one is needed. Primal values are read
// off the simplex multipliers.

#ifndef CMDP_SIMPLEX_H_
#define CMDP_SIMPLEX_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cmdp {

// Sparse row: terms sorted by column, no repeated columns.
struct LinearConstraint {
  std::vector<std::pair<std::size_t, double>> terms;
  double rhs = 0.0;

  bool operator==(const LinearConstraint&) const = default;
};

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> cost;   // size num_vars
  std::vector<double> upper;  // size num_vars, finite and >= 0
  std::vector<LinearConstraint> inequalities;  // a.x <= rhs
  std::vector<LinearConstraint> equalities;    // a.x == rhs

  bool operator==(const LinearProgram&) const = default;

  // Throws InvalidArgument when sizes, column indices or numbers are invalid.
  void Validate() const;
};

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kNumerical,
};

std::string StatusName(SolveStatus status);

struct SimplexOptions {
  double optimality_tolerance = 1e-9;  // on reduced costs
  double pivot_tolerance = 1e-9;       // on entering-column entries
  double feasibility_tolerance = 1e-8;  // on the reported primal point
  std::int64_t max_iterations = 0;     // 0: chosen from the problem size
  // Pivots between refactorizations; 0 picks max(256, 4 x basis size).
  int refactor_interval = 0;
  // Consecutive degenerate pivots after which pricing switches from Devex
  // to Bland's smallest-index rule.
  int stall_limit = 40;
};

struct SimplexResult {
  SolveStatus status = SolveStatus::kNumerical;
  std::vector<double> x;
  double objective = 0.0;
  double max_infeasibility = 0.0;
  std::int64_t iterations = 0;
};

SimplexResult SolveSimplex(const LinearProgram& lp,
                           const SimplexOptions& options = {});

// Largest violation of any row or bound of `lp` at `x`.
double MaxInfeasibility(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace cmdp

#endif  // CMDP_SIMPLEX_H_
