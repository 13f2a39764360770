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

#ifndef POSSPLAN_SRC_MILP_SIMPLEX_HPP_
#define POSSPLAN_SRC_MILP_SIMPLEX_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace possplan::milp::detail {

// Column-compressed constraint matrix.
struct CscMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> start{0};
  std::vector<int> index;
  std::vector<double> value;
};

enum class VarState : std::int8_t { kBasic, kAtLower, kAtUpper, kFree };

struct Basis {
  std::vector<int> head;  // basic column per row position
  std::vector<VarState> state;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

// Primal simplex on  A x - r = 0,  lo <= (x, r) <= hi  with bounded columns.
// Row activities r are the logical columns n..n+m-1. Phase 1 minimizes the
// sum of bound infeasibilities of basic columns, so any basis is a valid
// starting point; this is what branch-and-bound uses to re-solve children
// from the parent's optimal basis.
class BoundedSimplex {
 public:
  BoundedSimplex(CscMatrix a, std::vector<double> cost, std::vector<double> col_lo,
                 std::vector<double> col_hi, const std::vector<double>& row_lo,
                 const std::vector<double>& row_hi);

  int rows() const { return m_; }
  int structural_columns() const { return n_; }

  void set_column_bounds(int j, double lo, double hi);
  double lower(int j) const { return lo_[j]; }
  double upper(int j) const { return hi_[j]; }

  LpStatus solve(std::int64_t iteration_limit);

  const Basis& basis() const { return basis_; }
  void load_basis(const Basis& basis);
  void reset_to_slack_basis();

  double objective() const;
  double value(int j) const { return x_[j]; }
  std::int64_t total_iterations() const { return total_iterations_; }

 private:
  struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
  };

  double column_dot(int j, const std::vector<double>& y) const;
  void load_column(int j, std::vector<double>& dense) const;

  bool refactor();
  void refactor_or_reset();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void compute_basic_values();
  void place_nonbasic(int j);
  double feasibility_tolerance(double bound) const;
  double basic_infeasibility() const;

  int m_ = 0;
  int n_ = 0;
  int total_ = 0;
  CscMatrix a_;
  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> x_;
  Basis basis_;
  std::vector<int> position_;  // row position of basic columns, -1 otherwise

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  bool factored_ = false;
  bool values_stale_ = true;
  std::int64_t total_iterations_ = 0;
};

}  // namespace possplan::milp::detail

#endif  // POSSPLAN_SRC_MILP_SIMPLEX_HPP_
