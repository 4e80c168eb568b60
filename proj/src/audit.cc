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

#include "cmdp/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmdp/lp.h"

namespace cmdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string Flag(bool b) { return b ? "true" : "false"; }

}  // namespace

AuditReport VerifyMdp(const PerturbationMatrix& q, const KeyMetric& metric,
                      double eps, double eta, double tol) {
  AuditReport report;
  report.keys = q.keys();
  report.epsilon = eps;
  report.eta = eta;
  report.tolerance = tol;
  for (const NeighborPair& pair : NeighborPairs(q.keys(), metric, eta)) {
    const double exponent = eps * pair.distance;
    if (exponent > kMaxExponent) continue;
    const double bound = std::exp(exponent);
    for (std::size_t y = 0; y < q.num_outputs(); ++y) {
      const double a = q.at(pair.first, y);
      const double b = q.at(pair.second, y);
      const double forward = a - bound * b;
      const double backward = b - bound * a;
      report.max_violation = std::max({report.max_violation, forward, backward});
      if (forward > tol) {
        report.violations.push_back(
            {pair.first, pair.second, q.outputs()[y], pair.distance, forward});
      }
      if (backward > tol) {
        report.violations.push_back(
            {pair.second, pair.first, q.outputs()[y], pair.distance, backward});
      }
    }
  }
  report.constraints_pass = report.max_violation <= tol;
  report.pass = report.constraints_pass;
  return report;
}

LeakageSummary PosteriorLeakage(const PerturbationMatrix& q,
                                const KeyDistribution& prior,
                                const KeyMetric& metric, double eta) {
  LeakageSummary out;
  const std::size_t nk = q.num_keys();
  const std::size_t ny = q.num_outputs();
  std::vector<double> p(nk, 0.0);
  std::vector<std::size_t> live;
  for (std::size_t k = 0; k < nk; ++k) {
    auto it = prior.find(q.keys()[k]);
    if (it != prior.end()) p[k] = it->second;
    if (p[k] > 0.0) {
      live.push_back(k);
    } else {
      out.warnings.push_back("key " + FormatKey(q.keys()[k]) +
                             " has no prior mass; excluded from leakage");
    }
  }
  double total = 0.0;
  for (std::size_t k : live) total += p[k];
  // Marginal output law and posteriors P(k | y).
  std::vector<double> py(ny, 0.0);
  for (std::size_t k : live) {
    for (std::size_t y = 0; y < ny; ++y) py[y] += p[k] / total * q.at(k, y);
  }
  auto posterior = [&](std::size_t k, std::size_t y) {
    return p[k] / total * q.at(k, y) / py[y];
  };
  double sum_expected = 0.0;
  std::size_t neighbors = 0;
  for (std::size_t a = 0; a < live.size(); ++a) {
    for (std::size_t b = a + 1; b < live.size(); ++b) {
      const std::size_t i = live[a];
      const std::size_t j = live[b];
      PairLeakage pl;
      pl.first = i;
      pl.second = j;
      pl.distance = metric(q.keys()[i], q.keys()[j]);
      pl.neighbor = pl.distance <= eta;
      const double prior_ratio = p[i] / p[j];
      const double mix = p[i] + p[j];
      for (std::size_t y = 0; y < ny; ++y) {
        const double qi = q.at(i, y);
        const double qj = q.at(j, y);
        if (qi == 0.0 && qj == 0.0) continue;
        const double w = (p[i] * qi + p[j] * qj) / mix;
        double loss;
        if (qi == 0.0 || qj == 0.0) {
          loss = kInf;
        } else {
          loss = std::abs(
              std::log(posterior(i, y) / posterior(j, y) / prior_ratio));
        }
        pl.pl = std::max(pl.pl, loss);
        pl.expected_pl += w * loss;
      }
      if (pl.neighbor) {
        sum_expected += pl.expected_pl;
        ++neighbors;
      }
      out.pairs.push_back(pl);
    }
  }
  out.expected_pl = neighbors > 0 ? sum_expected / neighbors : 0.0;
  return out;
}

BoundCheck CheckPlBound(const std::vector<PairLeakage>& pairs, double eps,
                        double tol) {
  BoundCheck check;
  check.margin = kInf;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const PairLeakage& pl = pairs[i];
    if (!pl.neighbor || !std::isfinite(pl.distance)) continue;
    const double margin =
        std::isinf(pl.pl) ? -kInf : eps * pl.distance + tol - pl.pl;
    if (margin < check.margin) {
      check.margin = margin;
      check.worst = i;
    }
  }
  check.pass = !(check.margin < 0.0);
  return check;
}

AuditReport Audit(const PerturbationMatrix& q, const KeyMetric& metric,
                  const KeyDistribution& prior, double eps, double eta,
                  double tol) {
  AuditReport report = VerifyMdp(q, metric, eps, eta, tol);
  LeakageSummary leak = PosteriorLeakage(q, prior, metric, eta);
  report.pairs = std::move(leak.pairs);
  report.expected_pl = leak.expected_pl;
  report.warnings = std::move(leak.warnings);
  report.max_pl = 0.0;
  for (const PairLeakage& pl : report.pairs) {
    if (pl.neighbor) report.max_pl = std::max(report.max_pl, pl.pl);
  }
  const BoundCheck check = CheckPlBound(report.pairs, eps, tol);
  report.pl_pass = check.pass;
  report.pl_margin = check.margin;
  report.pass = report.constraints_pass && report.pl_pass;
  return report;
}

std::string FormatAuditReport(const AuditReport& r) {
  std::string out = "key_i,key_j,distance_km,pl,bound,slack\n";
  for (const PairLeakage& pl : r.pairs) {
    const double bound = r.epsilon * pl.distance;
    const double slack = std::isinf(pl.pl) ? -kInf : bound - pl.pl;
    out += FormatKey(r.keys[pl.first]) + ',' + FormatKey(r.keys[pl.second]) +
           ',' + FormatDouble(pl.distance) + ',' + FormatDouble(pl.pl) + ',' +
           FormatDouble(bound) + ',' + FormatDouble(slack) + '\n';
  }
  out += "# pass=" + Flag(r.pass) + '\n';
  out += "# constraints_pass=" + Flag(r.constraints_pass) + '\n';
  out += "# pl_pass=" + Flag(r.pl_pass) + '\n';
  out += "# epsilon=" + FormatDouble(r.epsilon) + '\n';
  out += "# eta=" + FormatDouble(r.eta) + '\n';
  out += "# tolerance=" + FormatDouble(r.tolerance) + '\n';
  out += "# max_violation=" + FormatDouble(r.max_violation) + '\n';
  out += "# max_pl=" + FormatDouble(r.max_pl) + '\n';
  out += "# expected_pl=" + FormatDouble(r.expected_pl) + '\n';
  out += "# pl_margin=" + FormatDouble(r.pl_margin) + '\n';
  for (const ConstraintViolation& v : r.violations) {
    out += "# violation " + FormatKey(r.keys[v.first]) + ' ' +
           FormatKey(r.keys[v.second]) + " output=" + std::to_string(v.output) +
           " amount=" + FormatDouble(v.amount) + '\n';
  }
  for (const std::string& w : r.warnings) out += "# warning " + w + '\n';
  return out;
}

}  // namespace cmdp
