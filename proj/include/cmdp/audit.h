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

// Constraint audits and posterior-leakage diagnostics for mechanisms.

#ifndef CMDP_AUDIT_H_
#define CMDP_AUDIT_H_

#include <cstddef>
#include <string>
#include <vector>

#include "cmdp/common.h"
#include "cmdp/geo.h"
#include "cmdp/mechanisms.h"
#include "cmdp/priors.h"

namespace cmdp {

inline constexpr double kDefaultAuditTolerance = 1e-8;

struct ConstraintViolation {
  std::size_t first = 0;  // key indices into the matrix
  std::size_t second = 0;
  LocationId output = 0;
  double distance = 0.0;
  double amount = 0.0;  // q(first, y) - e^{eps d} q(second, y)
};

struct PairLeakage {
  std::size_t first = 0;
  std::size_t second = 0;
  double distance = 0.0;
  double pl = 0.0;           // +inf when some output separates the pair
  double expected_pl = 0.0;  // under the pair's output mixture
  bool neighbor = false;     // distance <= eta; only these are gated
};

struct AuditReport {
  std::vector<SecretKey> keys;
  double epsilon = 0.0;
  double eta = 0.0;
  double tolerance = kDefaultAuditTolerance;

  double max_violation = 0.0;
  std::vector<ConstraintViolation> violations;  // amount > tolerance
  bool constraints_pass = true;

  std::vector<PairLeakage> pairs;
  double expected_pl = 0.0;  // mean over neighbor pairs
  double max_pl = 0.0;       // max over neighbor pairs
  bool pl_pass = true;
  double pl_margin = 0.0;    // min over neighbor pairs of eps d - PL

  std::vector<std::string> warnings;
  bool pass = true;
};

// Checks q(i, y) <= e^{eps d} q(j, y) + tol in both directions for every
// neighbor pair. Fills the constraint fields of the report.
AuditReport VerifyMdp(const PerturbationMatrix& q, const KeyMetric& metric,
                      double eps, double eta,
                      double tol = kDefaultAuditTolerance);

struct LeakageSummary {
  std::vector<PairLeakage> pairs;
  double expected_pl = 0.0;
  std::vector<std::string> warnings;
};

// PL(i, j) = sup_y |ln((P(i|y) / P(j|y)) / (p_i / p_j))| from posteriors
// computed by Bayes' rule, for every pair of keys with positive prior mass.
// Outputs impossible under both rows are skipped. Pairs whose distance is
// <= eta are marked as neighbors; expected_pl averages their per-pair
// expectations.
LeakageSummary PosteriorLeakage(const PerturbationMatrix& q,
                                const KeyDistribution& prior,
                                const KeyMetric& metric, double eta);

struct BoundCheck {
  bool pass = true;
  double margin = 0.0;  // min of eps d + tol - PL over neighbor pairs
  std::size_t worst = 0;  // index into the pair list
};

// PL(i, j) <= eps d(i, j) + tol for every neighbor pair with finite d.
BoundCheck CheckPlBound(const std::vector<PairLeakage>& pairs, double eps,
                        double tol = kDefaultAuditTolerance);

// Constraint audit plus leakage bound; pass requires both.
AuditReport Audit(const PerturbationMatrix& q, const KeyMetric& metric,
                  const KeyDistribution& prior, double eps, double eta,
                  double tol = kDefaultAuditTolerance);

// `key_i,key_j,distance_km,pl,bound,slack` rows followed by a '#' summary.
std::string FormatAuditReport(const AuditReport& report);

}  // namespace cmdp

#endif  // CMDP_AUDIT_H_
