// Copyright 2026 The possplan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace possplan::milp::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTolerance = 1e-9;
constexpr double kDualTolerance = 1e-9;
constexpr double kPivotTolerance = 1e-9;
constexpr double kDropTolerance = 1e-14;
constexpr std::size_t kRefactorInterval = 80;
constexpr int kDegenerateRunBeforeBland = 60;

}  // namespace

BoundedSimplex::BoundedSimplex(CscMatrix a, std::vector<double> cost,
                               std::vector<double> col_lo, std::vector<double> col_hi,
                               const std::vector<double>& row_lo,
                               const std::vector<double>& row_hi)
    : m_(a.rows), n_(a.cols), total_(a.rows + a.cols), a_(std::move(a)) {
  cost_ = std::move(cost);
  cost_.resize(total_, 0.0);
  lo_ = std::move(col_lo);
  hi_ = std::move(col_hi);
  lo_.insert(lo_.end(), row_lo.begin(), row_lo.end());
  hi_.insert(hi_.end(), row_hi.begin(), row_hi.end());
  x_.assign(total_, 0.0);
  reset_to_slack_basis();
}

void BoundedSimplex::reset_to_slack_basis() {
  basis_.head.resize(m_);
  basis_.state.assign(total_, VarState::kAtLower);
  position_.assign(total_, -1);
  for (int i = 0; i < m_; ++i) {
    basis_.head[i] = n_ + i;
    basis_.state[n_ + i] = VarState::kBasic;
    position_[n_ + i] = i;
  }
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
  factored_ = false;
  values_stale_ = true;
}

void BoundedSimplex::load_basis(const Basis& basis) {
  if (static_cast<int>(basis.head.size()) != m_ ||
      static_cast<int>(basis.state.size()) != total_) {
    throw std::invalid_argument("basis dimensions do not match the LP");
  }
  basis_ = basis;
  position_.assign(total_, -1);
  for (int i = 0; i < m_; ++i) position_[basis_.head[i]] = i;
  for (int j = 0; j < total_; ++j) {
    if (basis_.state[j] != VarState::kBasic) place_nonbasic(j);
  }
  factored_ = false;
  values_stale_ = true;
}

void BoundedSimplex::set_column_bounds(int j, double lo, double hi) {
  lo_[j] = lo;
  hi_[j] = hi;
  if (basis_.state[j] != VarState::kBasic) {
    place_nonbasic(j);
    values_stale_ = true;
  }
}

// Puts a nonbasic column on the bound its state names, repairing the state
// when that bound is infinite.
void BoundedSimplex::place_nonbasic(int j) {
  VarState& s = basis_.state[j];
  const bool has_lo = std::isfinite(lo_[j]);
  const bool has_hi = std::isfinite(hi_[j]);
  if (!has_lo && !has_hi) {
    s = VarState::kFree;
    x_[j] = 0.0;
    return;
  }
  if (s == VarState::kAtUpper && has_hi) {
    x_[j] = hi_[j];
  } else if (has_lo) {
    s = VarState::kAtLower;
    x_[j] = lo_[j];
  } else {
    s = VarState::kAtUpper;
    x_[j] = hi_[j];
  }
}

double BoundedSimplex::column_dot(int j, const std::vector<double>& y) const {
  if (j >= n_) return -y[j - n_];
  double s = 0.0;
  for (int k = a_.start[j]; k < a_.start[j + 1]; ++k) s += a_.value[k] * y[a_.index[k]];
  return s;
}

void BoundedSimplex::load_column(int j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  if (j >= n_) {
    dense[j - n_] = -1.0;
    return;
  }
  for (int k = a_.start[j]; k < a_.start[j + 1]; ++k) dense[a_.index[k]] = a_.value[k];
}

bool BoundedSimplex::refactor() {
  etas_.clear();
  factored_ = false;
  if (m_ == 0) {
    factored_ = true;
    return true;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m_) * 4);
  for (int i = 0; i < m_; ++i) {
    const int j = basis_.head[i];
    if (j >= n_) {
      triplets.emplace_back(j - n_, i, -1.0);
    } else {
      for (int k = a_.start[j]; k < a_.start[j + 1]; ++k) {
        triplets.emplace_back(a_.index[k], i, a_.value[k]);
      }
    }
  }
  Eigen::SparseMatrix<double> b(m_, m_);
  b.setFromTriplets(triplets.begin(), triplets.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  if (lu_.info() != Eigen::Success) return false;
  factored_ = true;
  return true;
}

void BoundedSimplex::refactor_or_reset() {
  if (refactor()) return;
  reset_to_slack_basis();
  if (!refactor()) throw std::runtime_error("slack basis failed to factorize");
}

void BoundedSimplex::ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  Eigen::Map<Eigen::VectorXd> vec(v.data(), m_);
  Eigen::VectorXd solved = lu_.solve(vec);
  vec = solved;
  for (const Eta& e : etas_) {
    const double vr = v[e.row] / e.pivot;
    v[e.row] = vr;
    if (vr == 0.0) continue;
    for (std::size_t k = 0; k < e.index.size(); ++k) v[e.index[k]] -= e.value[k] * vr;
  }
}

void BoundedSimplex::btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->row];
    for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
    v[it->row] = s / it->pivot;
  }
  Eigen::Map<Eigen::VectorXd> vec(v.data(), m_);
  Eigen::VectorXd solved = lu_.transpose().solve(vec);
  vec = solved;
}

void BoundedSimplex::compute_basic_values() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < total_; ++j) {
    if (basis_.state[j] == VarState::kBasic || x_[j] == 0.0) continue;
    if (j >= n_) {
      rhs[j - n_] += x_[j];
    } else {
      for (int k = a_.start[j]; k < a_.start[j + 1]; ++k) {
        rhs[a_.index[k]] -= a_.value[k] * x_[j];
      }
    }
  }
  ftran(rhs);
  for (int i = 0; i < m_; ++i) x_[basis_.head[i]] = rhs[i];
  values_stale_ = false;
}

double BoundedSimplex::feasibility_tolerance(double bound) const {
  return kPrimalTolerance * std::max(1.0, std::fabs(bound));
}

double BoundedSimplex::basic_infeasibility() const {
  double sum = 0.0;
  for (int i = 0; i < m_; ++i) {
    const int j = basis_.head[i];
    const double v = x_[j];
    if (v < lo_[j] - feasibility_tolerance(lo_[j])) sum += lo_[j] - v;
    if (v > hi_[j] + feasibility_tolerance(hi_[j])) sum += v - hi_[j];
  }
  return sum;
}

double BoundedSimplex::objective() const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
  return s;
}

LpStatus BoundedSimplex::solve(std::int64_t iteration_limit) {
  if (!factored_) refactor_or_reset();
  if (values_stale_) compute_basic_values();

  std::vector<double> y(m_);
  std::vector<double> alpha(m_);
  int degenerate_run = 0;
  bool bland = false;
  bool verified = false;  // a fresh factorization has confirmed the phase
  std::int64_t iterations = 0;

  for (;;) {
    if (iterations >= iteration_limit) return LpStatus::kIterationLimit;
    if (etas_.size() >= kRefactorInterval) {
      refactor_or_reset();
      compute_basic_values();
    }

    // Phase selection and basic costs.
    bool phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const int j = basis_.head[i];
      const double v = x_[j];
      if (v < lo_[j] - feasibility_tolerance(lo_[j])) {
        y[i] = -1.0;
        phase1 = true;
      } else if (v > hi_[j] + feasibility_tolerance(hi_[j])) {
        y[i] = 1.0;
        phase1 = true;
      } else {
        y[i] = 0.0;
      }
    }
    if (!phase1) {
      for (int i = 0; i < m_; ++i) y[i] = cost_[basis_.head[i]];
    }
    btran(y);

    // Pricing: Dantzig, or lowest index under Bland's rule.
    int entering = -1;
    int direction = 0;
    double best_score = 0.0;
    for (int j = 0; j < total_; ++j) {
      const VarState s = basis_.state[j];
      if (s == VarState::kBasic || lo_[j] == hi_[j]) continue;
      const double cj = phase1 ? 0.0 : cost_[j];
      const double d = cj - column_dot(j, y);
      int dir = 0;
      if (d < -kDualTolerance && (s == VarState::kAtLower || s == VarState::kFree)) {
        dir = 1;
      } else if (d > kDualTolerance && (s == VarState::kAtUpper || s == VarState::kFree)) {
        dir = -1;
      }
      if (dir == 0) continue;
      if (bland) {
        entering = j;
        direction = dir;
        break;
      }
      if (std::fabs(d) > best_score) {
        best_score = std::fabs(d);
        entering = j;
        direction = dir;
      }
    }

    if (entering < 0) {
      if (!verified && !etas_.empty()) {
        // Confirm on a fresh factorization before reporting a terminal state.
        refactor_or_reset();
        compute_basic_values();
        verified = true;
        continue;
      }
      if (phase1) return LpStatus::kInfeasible;
      return LpStatus::kOptimal;
    }
    verified = false;

    load_column(entering, alpha);
    ftran(alpha);

    // Ratio test. `rate` is the change of each basic value per unit step.
    const double range = hi_[entering] - lo_[entering];
    double harris_bound = kInf;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha[i];
      if (std::fabs(a) < kPivotTolerance) continue;
      const double rate = -direction * a;
      const int j = basis_.head[i];
      const double v = x_[j];
      double target;
      if (rate < 0) {
        if (phase1 && v > hi_[j] + feasibility_tolerance(hi_[j])) {
          target = hi_[j];
        } else if (phase1 && v < lo_[j] - feasibility_tolerance(lo_[j])) {
          continue;
        } else {
          target = lo_[j];
        }
        if (!std::isfinite(target)) continue;
        harris_bound = std::min(harris_bound,
                                (v - target + feasibility_tolerance(target)) / -rate);
      } else {
        if (phase1 && v < lo_[j] - feasibility_tolerance(lo_[j])) {
          target = lo_[j];
        } else if (phase1 && v > hi_[j] + feasibility_tolerance(hi_[j])) {
          continue;
        } else {
          target = hi_[j];
        }
        if (!std::isfinite(target)) continue;
        harris_bound = std::min(harris_bound,
                                (target - v + feasibility_tolerance(target)) / rate);
      }
    }

    int leave_pos = -1;
    double leave_target = 0.0;
    double step = kInf;
    double best_pivot = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha[i];
      if (std::fabs(a) < kPivotTolerance) continue;
      const double rate = -direction * a;
      const int j = basis_.head[i];
      const double v = x_[j];
      double target;
      if (rate < 0) {
        if (phase1 && v > hi_[j] + feasibility_tolerance(hi_[j])) {
          target = hi_[j];
        } else if (phase1 && v < lo_[j] - feasibility_tolerance(lo_[j])) {
          continue;
        } else {
          target = lo_[j];
        }
      } else {
        if (phase1 && v < lo_[j] - feasibility_tolerance(lo_[j])) {
          target = lo_[j];
        } else if (phase1 && v > hi_[j] + feasibility_tolerance(hi_[j])) {
          continue;
        } else {
          target = hi_[j];
        }
      }
      if (!std::isfinite(target)) continue;
      const double limit = std::max(0.0, (target - v) / rate);
      if (bland) {
        if (limit < step || (limit == step && leave_pos >= 0 && j < basis_.head[leave_pos])) {
          step = limit;
          leave_pos = i;
          leave_target = target;
        }
      } else if (limit <= harris_bound && std::fabs(a) > best_pivot) {
        best_pivot = std::fabs(a);
        step = limit;
        leave_pos = i;
        leave_target = target;
      }
    }

    const bool flip = std::isfinite(range) && range <= step;
    if (flip) {
      step = range;
      leave_pos = -1;
    }
    if (leave_pos < 0 && !flip) {
      if (!phase1) return LpStatus::kUnbounded;
      // Phase 1 always has a blocking row; losing it means the factors have
      // drifted. Start over from a fresh factorization.
      refactor_or_reset();
      compute_basic_values();
      ++iterations;
      ++total_iterations_;
      continue;
    }

    // Update primal values.
    if (step != 0.0) {
      x_[entering] += direction * step;
      for (int i = 0; i < m_; ++i) {
        if (alpha[i] != 0.0) x_[basis_.head[i]] -= direction * step * alpha[i];
      }
    }
    if (step <= 1e-12) {
      if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    ++iterations;
    ++total_iterations_;

    if (flip) {
      basis_.state[entering] = direction > 0 ? VarState::kAtUpper : VarState::kAtLower;
      x_[entering] = direction > 0 ? hi_[entering] : lo_[entering];
      continue;
    }

    const int leaving = basis_.head[leave_pos];
    x_[leaving] = leave_target;
    basis_.state[leaving] =
        (leave_target == lo_[leaving]) ? VarState::kAtLower : VarState::kAtUpper;
    position_[leaving] = -1;
    basis_.head[leave_pos] = entering;
    basis_.state[entering] = VarState::kBasic;
    position_[entering] = leave_pos;

    Eta eta;
    eta.row = leave_pos;
    eta.pivot = alpha[leave_pos];
    for (int i = 0; i < m_; ++i) {
      if (i != leave_pos && std::fabs(alpha[i]) > kDropTolerance) {
        eta.index.push_back(i);
        eta.value.push_back(alpha[i]);
      }
    }
    etas_.push_back(std::move(eta));
    if (std::fabs(alpha[leave_pos]) < 1e-7) {
      refactor_or_reset();
      compute_basic_values();
    }
  }
}

}  // namespace possplan::milp::detail
