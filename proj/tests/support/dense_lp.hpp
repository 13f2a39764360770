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

// Test-only oracles: a textbook dense two-phase tableau simplex (Bland's rule
// throughout) and exhaustive binary enumeration on top of it. Deliberately
// shares no code with the library's revised simplex.

#ifndef POSSPLAN_TESTS_SUPPORT_DENSE_LP_HPP_
#define POSSPLAN_TESTS_SUPPORT_DENSE_LP_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "possplan/milp/model.hpp"

namespace possplan::testing {

enum class OracleStatus { kOptimal, kInfeasible, kUnbounded };

struct OracleResult {
  OracleStatus status = OracleStatus::kInfeasible;
  double objective = std::numeric_limits<double>::infinity();
};

// minimize c.x  s.t. rows, lo <= x <= hi, every lo finite.
struct DenseLp {
  std::vector<double> cost;
  std::vector<std::vector<double>> rows;
  std::vector<milp::RowSense> sense;
  std::vector<double> rhs;
  std::vector<double> lo;
  std::vector<double> hi;
};

inline OracleResult solve_dense_lp(const DenseLp& lp) {
  constexpr double eps = 1e-10;
  const int n = static_cast<int>(lp.cost.size());
  // Shift to y = x - lo >= 0 and turn finite upper bounds into rows.
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<milp::RowSense> s;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    double shift = 0.0;
    for (int j = 0; j < n; ++j) shift += lp.rows[r][j] * lp.lo[j];
    a.push_back(lp.rows[r]);
    b.push_back(lp.rhs[r] - shift);
    s.push_back(lp.sense[r]);
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lo[j])) throw std::invalid_argument("oracle needs finite lower bounds");
    if (std::isfinite(lp.hi[j])) {
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      a.push_back(row);
      b.push_back(lp.hi[j] - lp.lo[j]);
      s.push_back(milp::RowSense::kLessEqual);
    }
  }
  const int m = static_cast<int>(a.size());
  for (int r = 0; r < m; ++r) {
    if (b[r] < 0) {
      for (double& v : a[r]) v = -v;
      b[r] = -b[r];
      if (s[r] == milp::RowSense::kLessEqual) {
        s[r] = milp::RowSense::kGreaterEqual;
      } else if (s[r] == milp::RowSense::kGreaterEqual) {
        s[r] = milp::RowSense::kLessEqual;
      }
    }
  }
  // Columns: n structurals, one slack/surplus per inequality, one artificial
  // per >= or = row.
  int n_slack = 0, n_art = 0;
  for (int r = 0; r < m; ++r) {
    if (s[r] != milp::RowSense::kEqual) ++n_slack;
    if (s[r] != milp::RowSense::kLessEqual) ++n_art;
  }
  const int cols = n + n_slack + n_art;
  std::vector<std::vector<double>> t(m, std::vector<double>(cols + 1, 0.0));
  std::vector<int> basic(m, -1);
  std::vector<bool> artificial(cols, false);
  int next_slack = n, next_art = n + n_slack;
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) t[r][j] = a[r][j];
    t[r][cols] = b[r];
    if (s[r] == milp::RowSense::kLessEqual) {
      t[r][next_slack] = 1.0;
      basic[r] = next_slack++;
    } else {
      if (s[r] == milp::RowSense::kGreaterEqual) t[r][next_slack++] = -1.0;
      t[r][next_art] = 1.0;
      artificial[next_art] = true;
      basic[r] = next_art++;
    }
  }

  auto pivot = [&](int pr, int pc) {
    const double p = t[pr][pc];
    for (double& v : t[pr]) v /= p;
    for (int r = 0; r < m; ++r) {
      if (r == pr || t[r][pc] == 0.0) continue;
      const double f = t[r][pc];
      for (int j = 0; j <= cols; ++j) t[r][j] -= f * t[pr][j];
    }
    basic[pr] = pc;
  };

  // Returns false on unboundedness.
  auto optimize = [&](const std::vector<double>& c, bool allow_artificial) -> bool {
    for (int guard = 0; guard < 100000; ++guard) {
      int enter = -1;
      for (int j = 0; j < cols; ++j) {
        if (!allow_artificial && artificial[j]) continue;
        bool is_basic = false;
        for (int r = 0; r < m; ++r) is_basic |= basic[r] == j;
        if (is_basic) continue;
        double d = c[j];
        for (int r = 0; r < m; ++r) d -= c[basic[r]] * t[r][j];
        if (d < -eps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < m; ++r) {
        if (t[r][enter] <= eps) continue;
        const double ratio = t[r][cols] / t[r][enter];
        if (leave < 0 || ratio < best - eps ||
            (std::fabs(ratio - best) <= eps && basic[r] < basic[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("oracle simplex did not terminate");
  };

  std::vector<double> phase1(cols, 0.0);
  for (int j = 0; j < cols; ++j) phase1[j] = artificial[j] ? 1.0 : 0.0;
  optimize(phase1, true);
  double infeas = 0.0;
  for (int r = 0; r < m; ++r) {
    if (artificial[basic[r]]) infeas += t[r][cols];
  }
  if (infeas > 1e-7) return {OracleStatus::kInfeasible, std::numeric_limits<double>::infinity()};
  // Drive remaining (zero-valued) artificials out of the basis.
  for (int r = 0; r < m; ++r) {
    if (!artificial[basic[r]]) continue;
    for (int j = 0; j < cols; ++j) {
      if (!artificial[j] && std::fabs(t[r][j]) > 1e-9) {
        pivot(r, j);
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = lp.cost[j];
  if (!optimize(phase2, false)) {
    return {OracleStatus::kUnbounded, -std::numeric_limits<double>::infinity()};
  }
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += lp.cost[j] * lp.lo[j];
  for (int r = 0; r < m; ++r) {
    if (basic[r] < n) obj += lp.cost[basic[r]] * t[r][cols];
  }
  return {OracleStatus::kOptimal, obj};
}

// Enumerates every assignment of the binary columns and solves the remaining
// LP with the dense oracle. Only for models with a handful of binaries.
inline OracleResult enumerate_milp(const milp::MilpModel& model) {
  const int n = model.num_variables();
  std::vector<int> binaries;
  for (int j = 0; j < n; ++j) {
    if (model.variables()[j].kind == milp::VarKind::kBinary) binaries.push_back(j);
  }
  if (binaries.size() > 20) throw std::invalid_argument("too many binaries to enumerate");
  DenseLp base;
  base.cost = model.objective();
  for (const auto& row : model.constraints()) {
    std::vector<double> dense(n, 0.0);
    for (const auto& t : row.terms) dense[t.var.index()] += t.coef;
    base.rows.push_back(dense);
    base.sense.push_back(row.sense);
    base.rhs.push_back(row.rhs);
  }
  for (const auto& v : model.variables()) {
    base.lo.push_back(v.lo);
    base.hi.push_back(v.hi);
  }
  OracleResult best;
  const std::uint64_t count = 1ULL << binaries.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    DenseLp lp = base;
    bool skip = false;
    for (std::size_t k = 0; k < binaries.size(); ++k) {
      const double v = (mask >> k) & 1ULL ? 1.0 : 0.0;
      const int j = binaries[k];
      if (v < base.lo[j] || v > base.hi[j]) skip = true;
      lp.lo[j] = lp.hi[j] = v;
    }
    if (skip) continue;
    const OracleResult r = solve_dense_lp(lp);
    if (r.status == OracleStatus::kUnbounded) return r;
    if (r.status == OracleStatus::kOptimal && r.objective < best.objective) {
      best = r;
    }
  }
  if (std::isfinite(best.objective)) {
    best.status = OracleStatus::kOptimal;
    best.objective += model.objective_constant();
  }
  return best;
}

}  // namespace possplan::testing

#endif  // POSSPLAN_TESTS_SUPPORT_DENSE_LP_HPP_
