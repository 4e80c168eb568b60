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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cmdp/audit.h"
#include "cmdp/lp.h"
#include "fixtures.h"
#include "oracles.h"

namespace cmdp {
namespace {

const LocationDomain& Line2() {
  static const LocationDomain dom(testing::LineLocations({0.0, 1.0}));
  return dom;
}

TEST(VerifyMdp, IdenticalRowsPass) {
  const PerturbationMatrix q({SecretKey(1), SecretKey(2)}, {1, 2},
                             {0.3, 0.7, 0.3, 0.7}, {});
  const auto r = VerifyMdp(q, BaseKeyMetric(Line2()), 0.01, 5.0);
  EXPECT_TRUE(r.constraints_pass);
  EXPECT_EQ(r.max_violation, 0.0);
}

TEST(VerifyMdp, IdentityMatrixViolatesByOne) {
  const PerturbationMatrix q({SecretKey(1), SecretKey(2)}, {1, 2},
                             {1.0, 0.0, 0.0, 1.0}, {});
  const auto r = VerifyMdp(q, BaseKeyMetric(Line2()), 1.0, 5.0);
  EXPECT_FALSE(r.constraints_pass);
  EXPECT_DOUBLE_EQ(r.max_violation, 1.0);
  ASSERT_FALSE(r.violations.empty());
  // Out of range pairs are not checked.
  EXPECT_TRUE(VerifyMdp(q, BaseKeyMetric(Line2()), 1.0, 0.5).constraints_pass);
}

TEST(PosteriorLeakage, TwoByTwoIsLnTwo) {
  const PerturbationMatrix q({SecretKey(1), SecretKey(2)}, {1, 2},
                             {2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0}, {});
  const KeyDistribution prior = {{SecretKey(1), 0.5}, {SecretKey(2), 0.5}};
  const auto s = PosteriorLeakage(q, prior, BaseKeyMetric(Line2()), 5.0);
  ASSERT_EQ(s.pairs.size(), 1u);
  EXPECT_NEAR(s.pairs[0].pl, std::numbers::ln2, 1e-12);
  EXPECT_TRUE(s.pairs[0].neighbor);
  EXPECT_LE(s.pairs[0].expected_pl, s.pairs[0].pl + 1e-12);
  const auto full = Audit(q, BaseKeyMetric(Line2()), prior, std::numbers::ln2, 5.0);
  EXPECT_TRUE(full.pass);
  EXPECT_FALSE(Audit(q, BaseKeyMetric(Line2()), prior, 0.5, 5.0).pass);
}

TEST(PosteriorLeakage, SeparatingOutputIsInfinite) {
  const PerturbationMatrix q({SecretKey(1), SecretKey(2)}, {1, 2},
                             {1.0, 0.0, 0.5, 0.5}, {});
  const auto s = PosteriorLeakage(
      q, {{SecretKey(1), 0.5}, {SecretKey(2), 0.5}}, BaseKeyMetric(Line2()), 5.0);
  EXPECT_TRUE(std::isinf(s.pairs[0].pl));
  EXPECT_FALSE(CheckPlBound(s.pairs, 1.0).pass);
}

class SolvedSuite : public ::testing::Test {
 protected:
  struct Case {
    testing::Instance in;
    KeyMetric metric;
    PerturbationMatrix q;
    double eps, eta;
  };
  static std::vector<Case> Build() {
    std::vector<Case> out;
    std::mt19937_64 rng(404);
    for (int i = 0; i < 12; ++i) {
      auto in = testing::RandomPlainInstance(3 + rng() % 10, 14, rng);
      const auto metric = BaseKeyMetric(in.domain);
      const double eps = 0.2 + 0.1 * (i % 5), eta = 1.0 + (i % 4);
      const auto s = Solve(BuildMdpLp(in.cost, in.prior, metric, eps, eta));
      out.push_back({in, metric, s.q, eps, eta});
    }
    return out;
  }
};

TEST_F(SolvedSuite, LeakageMatchesBayesOracle) {
  for (const auto& c : Build()) {
    std::vector<double> p;
    for (const auto& k : c.q.keys()) p.push_back(c.in.prior.at(k));
    const auto s = PosteriorLeakage(c.q, c.in.prior, c.metric, c.eta);
    for (const auto& pair : s.pairs) {
      const double oracle = testing::BayesPl(c.q, p, pair.first, pair.second);
      if (std::isinf(oracle)) {
        EXPECT_TRUE(std::isinf(pair.pl));
      } else {
        EXPECT_NEAR(pair.pl, oracle, 1e-9);
      }
      EXPECT_LE(pair.expected_pl, pair.pl + 1e-12);
    }
    const auto r = Audit(c.q, c.metric, c.in.prior, c.eps, c.eta);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.expected_pl, r.max_pl + 1e-12);
  }
}

TEST_F(SolvedSuite, CorruptedMatrixFails) {
  for (const auto& c : Build()) {
    // Point masses on different outputs for keys 0 and 1.
    std::vector<double> probs = c.q.probs();
    const std::size_t ny = c.q.num_outputs();
    for (std::size_t y = 0; y < ny; ++y) probs[y] = y == 0 ? 1.0 : 0.0;
    for (std::size_t y = 0; y < ny; ++y) probs[ny + y] = y == 1 ? 1.0 : 0.0;
    const PerturbationMatrix bad(c.q.keys(), c.q.outputs(), probs,
                                 c.q.metadata());
    bool has_neighbor = false;
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t k = 0; k < c.q.num_keys(); ++k) {
        if (k != a) has_neighbor |= c.metric(c.q.keys()[a], c.q.keys()[k]) <= c.eta;
      }
    }
    EXPECT_EQ(VerifyMdp(bad, c.metric, c.eps, c.eta).constraints_pass,
              !has_neighbor);
    EXPECT_FALSE(VerifyMdp(bad, c.metric, c.eps, kInfiniteEta).constraints_pass);
  }
}

TEST(PlIdentity, LeakageEqualsLikelihoodRatio) {
  // For any prior, ln((P(i|y)/P(j|y)) / (p_i/p_j)) = ln(q_iy / q_jy).
  std::mt19937_64 rng(19);
  const auto locs = testing::ScatteredLocations(5, 3.0, rng);
  const LocationDomain dom(locs);
  std::vector<SecretKey> keys;
  for (const auto& l : locs) keys.emplace_back(l.id);
  const auto q = ExpMechanism(keys, dom, 0.8);
  const auto w = testing::RandomSimplex(5, rng);
  KeyDistribution prior;
  for (std::size_t i = 0; i < 5; ++i) prior[keys[i]] = w[i];
  const auto s = PosteriorLeakage(q, prior, BaseKeyMetric(dom), kInfiniteEta);
  for (const auto& pair : s.pairs) {
    double lr = 0.0;
    for (std::size_t y = 0; y < 5; ++y) {
      lr = std::max(lr, std::abs(std::log(q.at(pair.first, y) /
                                          q.at(pair.second, y))));
    }
    EXPECT_NEAR(pair.pl, lr, 1e-12);
    EXPECT_LE(pair.pl, 0.8 * pair.distance + 1e-12);
  }
}

TEST(AuditReport, FormatsRowsAndSummary) {
  const PerturbationMatrix q({SecretKey(1), SecretKey(2)}, {1, 2},
                             {2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0}, {});
  const auto r = Audit(q, BaseKeyMetric(Line2()),
                       {{SecretKey(1), 0.5}, {SecretKey(2), 0.5}}, 1.0, 5.0);
  const std::string text = FormatAuditReport(r);
  EXPECT_EQ(text.rfind("key_i,key_j,distance_km,pl,bound,slack\n", 0), 0u);
  EXPECT_NE(text.find("\n1,2,"), std::string::npos);
  EXPECT_NE(text.find("# "), std::string::npos);
}

}  // namespace
}  // namespace cmdp
