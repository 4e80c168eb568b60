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

#include "cmdp/simplex.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmdp/common.h"

namespace cmdp {
namespace {

// Columns of the dual standard form  M zeta = c, zeta >= 0, stored
// column-compressed. Order fixes the index used by Bland's rule: slack,
// upper, inequality, equality(+), equality(-).
class DualSimplex {
 public:
  DualSimplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), opt_(options), n_(lp.num_vars) {
    ptr_.push_back(0);
    auto add = [this](double cost) {
      cost_.push_back(cost);
      ptr_.push_back(row_.size());
    };
    for (std::size_t j = 0; j < n_; ++j) {
      row_.push_back(j);
      val_.push_back(1.0);
      add(0.0);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      row_.push_back(j);
      val_.push_back(-1.0);
      add(lp.upper[j]);
    }
    for (const LinearConstraint& c : lp.inequalities) {
      for (const auto& [j, v] : c.terms) {
        row_.push_back(j);
        val_.push_back(-v);
      }
      add(c.rhs);
    }
    for (const LinearConstraint& c : lp.equalities) {
      for (const auto& [j, v] : c.terms) {
        row_.push_back(j);
        val_.push_back(v);
      }
      add(-c.rhs);
    }
    for (const LinearConstraint& c : lp.equalities) {
      for (const auto& [j, v] : c.terms) {
        row_.push_back(j);
        val_.push_back(-v);
      }
      add(c.rhs);
    }
    ncols_ = cost_.size();
    max_iterations_ = opt_.max_iterations > 0
                          ? opt_.max_iterations
                          : 100000 + 50 * static_cast<std::int64_t>(ncols_);
    refactor_interval_ = opt_.refactor_interval > 0
                             ? opt_.refactor_interval
                             : std::max<int>(256, 4 * static_cast<int>(n_));
  }

  SimplexResult Run() {
    SimplexResult result;
    if (n_ == 0) {
      result.status = SolveStatus::kOptimal;
      result.max_infeasibility = MaxInfeasibility(lp_, {});
      if (result.max_infeasibility > opt_.feasibility_tolerance) {
        result.status = SolveStatus::kInfeasible;
      }
      return result;
    }
    InitialBasis();
    int since_refactor = 0;
    int degenerate_run = 0;
    bool bland = false;
    std::int64_t it = 0;
    for (;; ++it) {
      if (it >= max_iterations_) {
        result.status = SolveStatus::kIterationLimit;
        break;
      }
      if (since_refactor >= refactor_interval_) {
        if (!Refactor()) {
          result.status = SolveStatus::kNumerical;
          break;
        }
        since_refactor = 0;
      }
      std::size_t q = Price(bland);
      if (q == kNone) {
        // Confirm on a fresh factorization before declaring optimality.
        if (since_refactor > 0) {
          if (!Refactor()) {
            result.status = SolveStatus::kNumerical;
            break;
          }
          since_refactor = 0;
          q = Price(bland);
        }
        if (q == kNone) {
          result.status = SolveStatus::kOptimal;
          break;
        }
      }
      const Eigen::VectorXd d = Ftran(q);
      const std::size_t r = RatioTest(d, bland);
      if (r == kNone) {
        result.status = SolveStatus::kInfeasible;
        break;
      }
      const double theta = std::max(0.0, xb_(Idx(r))) / d(Idx(r));
      if (theta <= 1e-13) {
        if (++degenerate_run >= opt_.stall_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      Pivot(q, r, d, theta);
      ++since_refactor;
    }
    result.iterations = it;
    result.x.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) result.x[j] = -pi_(Idx(j));
    result.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      result.objective += lp_.cost[j] * result.x[j];
    }
    result.max_infeasibility = MaxInfeasibility(lp_, result.x);
    if (result.status == SolveStatus::kOptimal &&
        result.max_infeasibility > opt_.feasibility_tolerance) {
      result.status = SolveStatus::kNumerical;
    }
    return result;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  static Eigen::Index Idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

  double Dot(std::size_t q, const Eigen::VectorXd& v) const {
    double s = 0.0;
    for (std::size_t k = ptr_[q]; k < ptr_[q + 1]; ++k) {
      s += val_[k] * v(Idx(row_[k]));
    }
    return s;
  }

  void InitialBasis() {
    basis_.assign(n_, 0);
    in_basis_.assign(ncols_, false);
    weights_.assign(ncols_, 1.0);
    binv_ = Eigen::MatrixXd::Zero(Idx(n_), Idx(n_));
    xb_.resize(Idx(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      const double c = lp_.cost[j];
      if (c >= 0.0) {
        basis_[j] = j;  // slack
        binv_(Idx(j), Idx(j)) = 1.0;
        xb_(Idx(j)) = c;
      } else {
        basis_[j] = n_ + j;  // upper-bound multiplier
        binv_(Idx(j), Idx(j)) = -1.0;
        xb_(Idx(j)) = -c;
      }
      in_basis_[basis_[j]] = true;
    }
    ComputeDuals();
  }

  void ComputeDuals() {
    Eigen::VectorXd fb(Idx(n_));
    for (std::size_t i = 0; i < n_; ++i) fb(Idx(i)) = cost_[basis_[i]];
    pi_ = binv_.transpose() * fb;
    rc_.resize(ncols_);
    for (std::size_t q = 0; q < ncols_; ++q) {
      rc_[q] = in_basis_[q] ? 0.0 : cost_[q] - Dot(q, pi_);
    }
  }

  bool Refactor() {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(Idx(n_), Idx(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t q = basis_[i];
      for (std::size_t k = ptr_[q]; k < ptr_[q + 1]; ++k) {
        b(Idx(row_[k]), Idx(i)) += val_[k];
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    binv_ = lu.inverse();
    if (!binv_.allFinite()) return false;
    Eigen::VectorXd rhs(Idx(n_));
    for (std::size_t j = 0; j < n_; ++j) rhs(Idx(j)) = lp_.cost[j];
    xb_ = binv_ * rhs;
    ComputeDuals();
    return true;
  }

  // Devex: largest rc^2 / w among negative reduced costs.
  std::size_t Price(bool bland) const {
    std::size_t best = kNone;
    double best_score = 0.0;
    for (std::size_t q = 0; q < ncols_; ++q) {
      const double rc = rc_[q];
      if (in_basis_[q] || rc >= -opt_.optimality_tolerance) continue;
      if (bland) return q;
      const double score = rc * rc / weights_[q];
      if (score > best_score) {
        best = q;
        best_score = score;
      }
    }
    return best;
  }

  Eigen::VectorXd Ftran(std::size_t q) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(Idx(n_));
    for (std::size_t k = ptr_[q]; k < ptr_[q + 1]; ++k) {
      d += val_[k] * binv_.col(Idx(row_[k]));
    }
    return d;
  }

  std::size_t RatioTest(const Eigen::VectorXd& d, bool bland) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      if (d(Idx(i)) > opt_.pivot_tolerance) {
        best = std::min(best, std::max(0.0, xb_(Idx(i))) / d(Idx(i)));
      }
    }
    if (std::isinf(best)) return kNone;
    const double slack = 1e-12 * std::max(1.0, best);
    std::size_t pick = kNone;
    for (std::size_t i = 0; i < n_; ++i) {
      const double di = d(Idx(i));
      if (di <= opt_.pivot_tolerance) continue;
      if (std::max(0.0, xb_(Idx(i))) / di > best + slack) continue;
      if (pick == kNone) {
        pick = i;
      } else if (bland) {
        if (basis_[i] < basis_[pick]) pick = i;
      } else if (di > d(Idx(pick))) {
        pick = i;
      }
    }
    return pick;
  }

  // One pass over the pivot row updates reduced costs and Devex weights.
  void Pivot(std::size_t q, std::size_t r, const Eigen::VectorXd& d,
             double theta) {
    const Eigen::Index ri = Idx(r);
    const double dr = d(ri);
    const double rcq = rc_[q];
    const double wq = weights_[q];
    const Eigen::VectorXd rho = binv_.row(ri).transpose() / dr;
    const std::size_t leaving = basis_[r];
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (in_basis_[j] || j == q) continue;
      const double a = Dot(j, rho);
      if (a == 0.0) continue;
      rc_[j] -= rcq * a;
      weights_[j] = std::max(weights_[j], a * a * wq);
    }
    rc_[leaving] = -rcq / dr;
    rc_[q] = 0.0;
    weights_[leaving] = std::max(wq / (dr * dr), 1.0);
    pi_ += rcq * rho;
    xb_ -= theta * d;
    xb_(ri) = theta;
    Eigen::VectorXd dcol = d;
    dcol(ri) = 0.0;
    // Rank-one update column by column; rows of B^-1 are often sparse.
    for (Eigen::Index c = 0; c < binv_.cols(); ++c) {
      const double v = rho(c);
      if (v == 0.0) continue;
      binv_.col(c) -= v * dcol;
      binv_(ri, c) = v;
    }
    in_basis_[leaving] = false;
    basis_[r] = q;
    in_basis_[q] = true;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  std::size_t n_;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> ptr_;
  std::vector<std::size_t> row_;
  std::vector<double> val_;
  std::vector<double> cost_;
  std::int64_t max_iterations_ = 0;
  int refactor_interval_ = 128;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
  std::vector<double> rc_;
  std::vector<double> weights_;  // Devex reference weights
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  Eigen::VectorXd pi_;
};

void CheckRow(const LinearConstraint& row, std::size_t n, const char* what) {
  if (!std::isfinite(row.rhs)) {
    throw InvalidArgument(std::string(what) + " row has a non-finite rhs");
  }
  for (std::size_t t = 0; t < row.terms.size(); ++t) {
    if (row.terms[t].first >= n) {
      throw InvalidArgument(std::string(what) + " row references column " +
                            std::to_string(row.terms[t].first));
    }
    if (t > 0 && row.terms[t].first <= row.terms[t - 1].first) {
      throw InvalidArgument(std::string(what) +
                            " row terms must be sorted and distinct");
    }
    if (!std::isfinite(row.terms[t].second)) {
      throw InvalidArgument(std::string(what) +
                            " row has a non-finite coefficient");
    }
  }
}

}  // namespace

void LinearProgram::Validate() const {
  if (cost.size() != num_vars || upper.size() != num_vars) {
    throw InvalidArgument("objective and bounds must have num_vars entries");
  }
  for (std::size_t j = 0; j < num_vars; ++j) {
    if (!std::isfinite(cost[j])) {
      throw InvalidArgument("non-finite objective coefficient");
    }
    if (!std::isfinite(upper[j]) || upper[j] < 0.0) {
      throw InvalidArgument("upper bounds must be finite and >= 0");
    }
  }
  for (const LinearConstraint& r : inequalities) CheckRow(r, num_vars, "<=");
  for (const LinearConstraint& r : equalities) CheckRow(r, num_vars, "==");
}

std::string StatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kIterationLimit:
      return "iteration_limit";
    case SolveStatus::kNumerical:
      return "numerical";
  }
  return "unknown";
}

double MaxInfeasibility(const LinearProgram& lp,
                        const std::vector<double>& x) {
  double worst = 0.0;
  auto activity = [&x](const LinearConstraint& row) {
    double s = 0.0;
    for (const auto& [j, a] : row.terms) s += a * x[j];
    return s;
  };
  for (const LinearConstraint& row : lp.inequalities) {
    worst = std::max(worst, activity(row) - row.rhs);
  }
  for (const LinearConstraint& row : lp.equalities) {
    worst = std::max(worst, std::abs(activity(row) - row.rhs));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max({worst, -x[j], x[j] - lp.upper[j]});
  }
  return worst;
}

SimplexResult SolveSimplex(const LinearProgram& lp,
                           const SimplexOptions& options) {
  lp.Validate();
  DualSimplex solver(lp, options);
  return solver.Run();
}

}  // namespace cmdp
