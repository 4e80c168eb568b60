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

#include "cmdp/lp.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <utility>

#include "cmdp/csv.h"

namespace cmdp {
namespace {

void CheckBudget(double eps, double eta) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("epsilon must be positive and finite");
  }
  if (std::isnan(eta) || eta < 0.0) {
    throw InvalidArgument("eta must be >= 0");
  }
}

MechanismLp BuildPrivacyLp(const CostTensor& cost,
                           const KeyDistribution& prior,
                           const KeyMetric& metric, double eps, double eta,
                           std::string builder) {
  CheckBudget(eps, eta);
  MechanismLp lp;
  lp.keys = cost.keys();
  lp.outputs = cost.outputs();
  lp.epsilon = eps;
  lp.eta = eta;
  lp.metric = metric.id;
  lp.builder = std::move(builder);
  if (lp.outputs.empty()) throw InvalidArgument("no outputs");
  const std::size_t nk = lp.keys.size();
  const std::size_t ny = lp.outputs.size();
  LinearProgram& p = lp.program;
  p.num_vars = nk * ny;
  p.cost.assign(p.num_vars, 0.0);
  p.upper.assign(p.num_vars, 1.0);
  for (std::size_t k = 0; k < nk; ++k) {
    auto it = prior.find(lp.keys[k]);
    if (it == prior.end()) {
      throw InvalidArgument("no prior mass for key " + FormatKey(lp.keys[k]));
    }
    if (!(it->second >= 0.0) || !std::isfinite(it->second)) {
      throw InvalidArgument("invalid prior mass for key " +
                            FormatKey(lp.keys[k]));
    }
    LinearConstraint unit;
    unit.rhs = 1.0;
    for (std::size_t y = 0; y < ny; ++y) {
      p.cost[lp.Column(k, y)] = it->second * cost.at(k, y);
      unit.terms.emplace_back(lp.Column(k, y), 1.0);
    }
    p.equalities.push_back(std::move(unit));
  }
  for (const NeighborPair& pair : NeighborPairs(lp.keys, metric, eta)) {
    const double exponent = eps * pair.distance;
    if (exponent > kMaxExponent) continue;
    const double bound = std::exp(exponent);
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t ci = lp.Column(pair.first, y);
      const std::size_t cj = lp.Column(pair.second, y);
      p.inequalities.push_back({{{ci, 1.0}, {cj, -bound}}, 0.0});
      p.inequalities.push_back({{{ci, -bound}, {cj, 1.0}}, 0.0});
    }
  }
  return lp;
}

}  // namespace

MechanismLp BuildMdpLp(const CostTensor& cost, const KeyDistribution& prior,
                       const KeyMetric& metric, double eps, double eta) {
  return BuildPrivacyLp(cost, prior, metric, eps, eta, "mdp");
}

MechanismLp BuildCmdpFullLp(const CostTensor& cost,
                            const KeyDistribution& prior,
                            const LocationDomain& domain,
                            const ContextWeights& weights, double eps,
                            double eta) {
  return BuildPrivacyLp(cost, prior, ContextKeyMetric(domain, weights), eps,
                        eta, "cmdp_full");
}

MechanismLp BuildCmdpReducedLp(const CostTensor& cost,
                               const KeyDistribution& prior,
                               const KeyMetric& metric, double eps,
                               double eta) {
  return BuildPrivacyLp(cost, prior, metric, eps, eta, "cmdp_reduced");
}

MechanismLp BuildRefinedLp(const CostTensor& cost, const KeyDistribution& prior,
                           const KeyMetric& metric, double eps, double eta,
                           const PerturbationMatrix& qstar, const LagSet& lags,
                           const KeyMetric& blanket_metric) {
  if (qstar.outputs() != cost.outputs()) {
    throw InvalidArgument("q* and the cost tensor use different outputs");
  }
  // q* must satisfy the reduced constraints it is meant to carry over.
  for (const NeighborPair& pair :
       NeighborPairs(qstar.keys(), blanket_metric, eta)) {
    const double exponent = eps * pair.distance;
    if (exponent > kMaxExponent) continue;
    const double bound = std::exp(exponent);
    for (std::size_t y = 0; y < qstar.num_outputs(); ++y) {
      const double a = qstar.at(pair.first, y);
      const double b = qstar.at(pair.second, y);
      if (a - bound * b > 1e-8 || b - bound * a > 1e-8) {
        throw InvalidArgument(
            "q* violates the reduced constraints between " +
            FormatKey(qstar.keys()[pair.first]) + " and " +
            FormatKey(qstar.keys()[pair.second]));
      }
    }
  }
  MechanismLp lp = BuildPrivacyLp(cost, prior, metric, eps, eta, "refined");
  const std::size_t ny = lp.outputs.size();
  std::map<SecretKey, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < lp.keys.size(); ++k) {
    groups[ProjectKey(lp.keys[k], lags)].push_back(k);
  }
  for (const auto& [b, members] : groups) {
    if (!qstar.HasKey(b)) {
      throw InvalidArgument("q* has no row for blanket key " + FormatKey(b));
    }
    const std::size_t bi = qstar.KeyIndex(b);
    double pb = 0.0;
    for (std::size_t k : members) pb += prior.at(lp.keys[k]);
    if (pb == 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      LinearConstraint row;
      row.rhs = pb * qstar.at(bi, y);
      for (std::size_t k : members) {
        const double pk = prior.at(lp.keys[k]);
        if (pk != 0.0) row.terms.emplace_back(lp.Column(k, y), pk);
      }
      std::sort(row.terms.begin(), row.terms.end());
      lp.program.equalities.push_back(std::move(row));
    }
  }
  return lp;
}

void TieRows(MechanismLp& lp,
             const std::function<SecretKey(const SecretKey&)>& group) {
  std::map<SecretKey, std::size_t> leader;
  const std::size_t ny = lp.outputs.size();
  for (std::size_t k = 0; k < lp.keys.size(); ++k) {
    auto [it, first] = leader.emplace(group(lp.keys[k]), k);
    if (first) continue;
    const std::size_t l = it->second;
    for (std::size_t y = 0; y < ny; ++y) {
      // l < k, so the terms are already in column order.
      lp.program.equalities.push_back(
          {{{lp.Column(l, y), 1.0}, {lp.Column(k, y), -1.0}}, 0.0});
    }
  }
}

void AddInvarianceEqualities(MechanismLp& lp) {
  TieRows(lp, [](const SecretKey& k) { return SecretKey(k.current); });
}

void AddBlanketTying(MechanismLp& lp, const LagSet& lags) {
  TieRows(lp, [&lags](const SecretKey& k) { return ProjectKey(k, lags); });
}

std::string KeySchema(const std::vector<SecretKey>& keys) {
  if (keys.empty()) return "x";
  const std::size_t len = keys.front().context.size();
  for (const SecretKey& k : keys) {
    if (k.context.size() != len) return "x|prefix";
  }
  std::string s = "x";
  for (std::size_t i = 1; i <= len; ++i) s += "|v" + std::to_string(i);
  return s;
}

namespace {

// Raises entries so that every two-term ratio row x_a - c x_b <= 0 (c >= 1)
// holds with exact ratios rather than up to the solver tolerance. Without
// this, an entry of 1e-13 facing a clamped 0 would read as infinite leakage.
void CloseRatios(const LinearProgram& p, std::vector<double>& x) {
  std::vector<std::vector<std::pair<std::size_t, double>>> out(x.size());
  for (const LinearConstraint& row : p.inequalities) {
    if (row.terms.size() != 2 || row.rhs != 0.0) continue;
    auto [a, b] = std::pair(row.terms[0], row.terms[1]);
    if (a.second < 0.0) std::swap(a, b);
    if (a.second != 1.0 || !(-b.second >= 1.0)) continue;
    out[a.first].emplace_back(b.first, -b.second);
  }
  std::deque<std::size_t> queue;
  std::vector<bool> queued(x.size(), true);
  for (std::size_t j = 0; j < x.size(); ++j) queue.push_back(j);
  while (!queue.empty()) {
    const std::size_t a = queue.front();
    queue.pop_front();
    queued[a] = false;
    for (const auto& [b, c] : out[a]) {
      const double need = x[a] / c;
      if (need > x[b]) {
        x[b] = need;
        if (!queued[b]) {
          queued[b] = true;
          queue.push_back(b);
        }
      }
    }
  }
}

}  // namespace

LpSolution Solve(const MechanismLp& lp, const SimplexOptions& options) {
  const SimplexResult r = SolveSimplex(lp.program, options);
  LpSolution out;
  out.status = r.status;
  out.objective = r.objective;
  out.max_infeasibility = r.max_infeasibility;
  out.iterations = r.iterations;
  if (r.status != SolveStatus::kOptimal) return out;
  const std::size_t ny = lp.outputs.size();
  std::vector<double> probs(r.x.size());
  for (std::size_t j = 0; j < r.x.size(); ++j) {
    probs[j] = std::clamp(r.x[j], 0.0, 1.0);
  }
  CloseRatios(lp.program, probs);
  for (std::size_t k = 0; k < lp.keys.size(); ++k) {
    double sum = 0.0;
    for (std::size_t y = 0; y < ny; ++y) sum += probs[lp.Column(k, y)];
    for (std::size_t y = 0; y < ny; ++y) probs[lp.Column(k, y)] /= sum;
  }
  MechanismMetadata meta;
  meta.epsilon = lp.epsilon;
  meta.eta = lp.eta;
  meta.metric = lp.metric;
  meta.builder = lp.builder;
  meta.key_schema = KeySchema(lp.keys);
  out.q = PerturbationMatrix(lp.keys, lp.outputs, std::move(probs),
                             std::move(meta));
  return out;
}

std::string FormatLp(const MechanismLp& lp) {
  const LinearProgram& p = lp.program;
  std::string out;
  out += "# builder=" + lp.builder + " metric=" + lp.metric +
         " epsilon=" + FormatDouble(lp.epsilon) +
         " eta=" + FormatDouble(lp.eta) + '\n';
  out += "# minimize objective.x subject to le rows <= le_rhs, eq rows == "
         "eq_rhs, 0 <= x <= upper\n";
  for (std::size_t k = 0; k < lp.keys.size(); ++k) {
    for (std::size_t y = 0; y < lp.outputs.size(); ++y) {
      out += "# var " + std::to_string(lp.Column(k, y)) + " q(" +
             FormatKey(lp.keys[k]) + "," + std::to_string(lp.outputs[y]) +
             ")\n";
    }
  }
  out += "section,row,column,value\n";
  for (std::size_t j = 0; j < p.num_vars; ++j) {
    out += "objective,," + std::to_string(j) + ',' + FormatDouble(p.cost[j]) +
           '\n';
  }
  for (std::size_t j = 0; j < p.num_vars; ++j) {
    out += "upper,," + std::to_string(j) + ',' + FormatDouble(p.upper[j]) +
           '\n';
  }
  auto rows = [&out](const std::vector<LinearConstraint>& rs,
                     const std::string& name) {
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string r = std::to_string(i);
      for (const auto& [j, v] : rs[i].terms) {
        out += name + ',' + r + ',' + std::to_string(j) + ',' +
               FormatDouble(v) + '\n';
      }
      out += name + "_rhs," + r + ",," + FormatDouble(rs[i].rhs) + '\n';
    }
  };
  rows(p.inequalities, "le");
  rows(p.equalities, "eq");
  return out;
}

LinearProgram ParseLinearProgram(const std::string& text,
                                 const std::string& source) {
  const CsvTable table =
      CsvTable::Parse(text, {"section", "row", "column", "value"}, source);
  LinearProgram p;
  auto row_at = [](std::vector<LinearConstraint>& rows, std::size_t i) ->
      LinearConstraint& {
        if (rows.size() <= i) rows.resize(i + 1);
        return rows[i];
      };
  for (const CsvRow& r : table.rows()) {
    try {
      const std::string& s = r.fields[0];
      const double v = ParseDouble(r.fields[3]);
      if (s == "objective" || s == "upper") {
        const auto j = static_cast<std::size_t>(ParseInt(r.fields[2]));
        std::vector<double>& vec = s == "objective" ? p.cost : p.upper;
        if (vec.size() <= j) vec.resize(j + 1, 0.0);
        vec[j] = v;
      } else if (s == "le" || s == "eq") {
        auto& rows = s == "le" ? p.inequalities : p.equalities;
        row_at(rows, static_cast<std::size_t>(ParseInt(r.fields[1])))
            .terms.emplace_back(static_cast<std::size_t>(ParseInt(r.fields[2])),
                                v);
      } else if (s == "le_rhs" || s == "eq_rhs") {
        auto& rows = s == "le_rhs" ? p.inequalities : p.equalities;
        row_at(rows, static_cast<std::size_t>(ParseInt(r.fields[1]))).rhs = v;
      } else {
        throw ParseError("unknown section '" + s + "'");
      }
    } catch (const Error& e) {
      throw ParseError(Where(source, r.line) + e.what());
    }
  }
  p.num_vars = p.cost.size();
  p.Validate();
  return p;
}

}  // namespace cmdp
