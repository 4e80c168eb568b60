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

// Randomized mechanism-design instances and brute-force oracles used by the
// LP, audit and acceptance tests.

#ifndef CMDP_TESTS_FIXTURES_H_
#define CMDP_TESTS_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "cmdp/geo.h"
#include "cmdp/lp.h"
#include "cmdp/mechanisms.h"
#include "cmdp/priors.h"
#include "cmdp/utility.h"

namespace cmdp::testing {

struct Instance {
  LocationDomain domain;
  ContextWeights weights;
  std::vector<SecretKey> keys;
  KeyDistribution prior;
  CostTensor cost;
};

// `n` points scattered in a box of `span_km` around Rome.
inline std::vector<Location> ScatteredLocations(std::size_t n, double span_km,
                                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, span_km);
  std::vector<Location> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({static_cast<LocationId>(i + 1),
                   GeoPoint(41.9 + u(rng) / 111.2, 12.5 + u(rng) / 82.8)});
  }
  return out;
}

inline std::vector<double> RandomSimplex(std::size_t n, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& v : w) s += (v = g(rng) + 1e-3);
  for (auto& v : w) v /= s;
  return w;
}

inline CostTensor RandomCost(const std::vector<SecretKey>& keys,
                             const std::vector<LocationId>& outputs,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> v(keys.size() * outputs.size());
  for (auto& x : v) x = u(rng);
  return CostTensor(keys, outputs, v);
}

// Plain keys over `n_keys` of `n_points` scattered locations; every point is
// an output.
inline Instance RandomPlainInstance(std::size_t n_keys, std::size_t n_points,
                                    std::mt19937_64& rng) {
  n_points = std::max(n_points, n_keys);
  Instance in;
  const auto locs = ScatteredLocations(n_points, 4.0, rng);
  in.domain = LocationDomain(
      std::vector<Location>(locs.begin(), locs.begin() + n_keys), locs);
  for (std::size_t i = 0; i < n_keys; ++i) in.keys.emplace_back(locs[i].id);
  const auto w = RandomSimplex(n_keys, rng);
  for (std::size_t i = 0; i < n_keys; ++i) in.prior[in.keys[i]] = w[i];
  in.cost = RandomCost(in.keys, in.domain.output_ids(), rng);
  return in;
}

// Full-context keys (x, v_1..v_gamma) drawn from the product of `n_points`
// locations, `n_keys` of them distinct.
inline Instance RandomContextInstance(std::size_t n_keys, std::size_t n_points,
                                      int gamma, std::mt19937_64& rng) {
  Instance in;
  const auto locs = ScatteredLocations(n_points, 4.0, rng);
  in.domain = LocationDomain(locs);
  in.weights = ContextWeights::Decay(gamma);
  std::uniform_int_distribution<LocationId> id(
      1, static_cast<LocationId>(n_points));
  std::size_t total = n_points;
  for (int g = 0; g < gamma; ++g) total *= n_points;
  n_keys = std::min(n_keys, total);
  std::set<SecretKey> seen;
  while (seen.size() < n_keys) {
    SecretKey k(id(rng));
    for (int g = 0; g < gamma; ++g) k.context.push_back(id(rng));
    seen.insert(k);
  }
  in.keys.assign(seen.begin(), seen.end());
  const auto w = RandomSimplex(in.keys.size(), rng);
  for (std::size_t i = 0; i < in.keys.size(); ++i) in.prior[in.keys[i]] = w[i];
  in.cost = RandomCost(in.keys, in.domain.output_ids(), rng);
  return in;
}

// Posterior leakage by Bayes' rule straight from the matrix, for one pair:
// sup over outputs of |ln(P(i|y) P(j) / (P(j|y) P(i)))|. Outputs with zero
// mass under both rows are skipped; one-sided support gives +inf.
inline double BayesPl(const PerturbationMatrix& q,
                      const std::vector<double>& prior, std::size_t i,
                      std::size_t j) {
  double worst = 0.0;
  for (std::size_t y = 0; y < q.num_outputs(); ++y) {
    double marginal = 0.0;
    for (std::size_t k = 0; k < q.num_keys(); ++k) {
      marginal += prior[k] * q.at(k, y);
    }
    if (marginal <= 0.0) continue;
    const double post_i = prior[i] * q.at(i, y) / marginal;
    const double post_j = prior[j] * q.at(j, y) / marginal;
    if (post_i == 0.0 && post_j == 0.0) continue;
    if (post_i == 0.0 || post_j == 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst,
                     std::abs(std::log((post_i / post_j) / (prior[i] / prior[j]))));
  }
  return worst;
}

// Minimum of a tiny LP by enumerating every basic solution: the equalities
// plus any choice of active inequalities or bounds that pins all variables.
// Returns nothing when no vertex is feasible.
inline std::optional<double> VertexOptimum(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  struct Row {
    std::vector<double> a;
    double b;
  };
  auto dense = [n](const LinearConstraint& c) {
    Row r{std::vector<double>(n, 0.0), c.rhs};
    for (const auto& [col, v] : c.terms) r.a[col] = v;
    return r;
  };
  std::vector<Row> fixed, optional_rows;
  for (const auto& c : lp.equalities) fixed.push_back(dense(c));
  for (const auto& c : lp.inequalities) optional_rows.push_back(dense(c));
  for (std::size_t j = 0; j < n; ++j) {
    Row lo{std::vector<double>(n, 0.0), 0.0};
    lo.a[j] = 1.0;
    optional_rows.push_back(lo);
    Row hi = lo;
    hi.b = lp.upper[j];
    optional_rows.push_back(hi);
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] < -1e-9 || x[j] > lp.upper[j] + 1e-9) return false;
    }
    for (const auto& c : lp.inequalities) {
      double s = 0.0;
      for (const auto& [col, v] : c.terms) s += v * x[col];
      if (s > c.rhs + 1e-9) return false;
    }
    for (const auto& c : lp.equalities) {
      double s = 0.0;
      for (const auto& [col, v] : c.terms) s += v * x[col];
      if (std::abs(s - c.rhs) > 1e-9) return false;
    }
    return true;
  };
  std::optional<double> best;
  const std::size_t m = optional_rows.size();
  std::vector<bool> pick(m, false);
  if (fixed.size() > n) return best;
  const std::size_t need = n - std::min(n, fixed.size());
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(need), pick.end(), true);
  do {
    std::vector<Row> sys = fixed;
    for (std::size_t r = 0; r < m; ++r) {
      if (pick[r]) sys.push_back(optional_rows[r]);
    }
    // Gaussian elimination with partial pivoting on the square system.
    bool singular = false;
    for (std::size_t c = 0; c < n && !singular; ++c) {
      std::size_t p = c;
      for (std::size_t r = c; r < n; ++r) {
        if (std::abs(sys[r].a[c]) > std::abs(sys[p].a[c])) p = r;
      }
      if (std::abs(sys[p].a[c]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(sys[c], sys[p]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = sys[r].a[c] / sys[c].a[c];
        for (std::size_t k = 0; k < n; ++k) sys[r].a[k] -= f * sys[c].a[k];
        sys[r].b -= f * sys[c].b;
      }
    }
    if (singular) continue;
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = sys[j].b / sys[j].a[j];
    if (!feasible(x)) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.cost[j] * x[j];
    if (!best || obj < *best) best = obj;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace cmdp::testing

#endif  // CMDP_TESTS_FIXTURES_H_
