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

#ifndef POSSPLAN_MILP_MODEL_HPP_
#define POSSPLAN_MILP_MODEL_HPP_

#include <compare>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace possplan::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { kContinuous, kBinary };
enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

// Handle to a model column. Only meaningful for the model that issued it.
class VarRef {
 public:
  constexpr VarRef() = default;
  explicit constexpr VarRef(int index) : index_(index) {}

  constexpr int index() const { return index_; }
  constexpr bool valid() const { return index_ >= 0; }

  friend constexpr auto operator<=>(VarRef, VarRef) = default;

 private:
  int index_ = -1;
};

struct Term {
  VarRef var;
  double coef = 0.0;
};

struct Variable {
  VarKind kind = VarKind::kContinuous;
  double lo = 0.0;
  double hi = kInfinity;
  std::string name;
};

// Sparse row. Terms are kept sorted by variable index with duplicates merged.
struct LinearConstraint {
  std::vector<Term> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

class InvalidBounds : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A minimization MILP over continuous and binary columns.
class MilpModel {
 public:
  VarRef add_variable(VarKind kind, double lo, double hi, std::string name = {});
  VarRef add_binary(std::string name = {}) {
    return add_variable(VarKind::kBinary, 0.0, 1.0, std::move(name));
  }
  VarRef add_continuous(double lo, double hi, std::string name = {}) {
    return add_variable(VarKind::kContinuous, lo, hi, std::move(name));
  }

  // Returns the row index. Duplicate references are summed; zero
  // coefficients are dropped.
  int add_constraint(std::vector<Term> terms, RowSense sense, double rhs,
                     std::string name = {});

  void add_objective_term(VarRef var, double coef);
  void set_objective_coefficient(VarRef var, double coef);
  void set_objective_constant(double constant) { objective_constant_ = constant; }

  // Tightens both bounds to `value`.
  void fix(VarRef var, double value);
  void set_bounds(VarRef var, double lo, double hi);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;
  std::size_t num_nonzeros() const;

  const Variable& variable(VarRef var) const;
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<double>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }

 private:
  void check_ref(VarRef var) const;

  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<double> objective_;
  double objective_constant_ = 0.0;
};

}  // namespace possplan::milp

#endif  // POSSPLAN_MILP_MODEL_HPP_
