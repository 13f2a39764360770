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

#include "possplan/milp/model.hpp"

#include <algorithm>
#include <cmath>

namespace possplan::milp {

VarRef MilpModel::add_variable(VarKind kind, double lo, double hi, std::string name) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw InvalidBounds("variable '" + name + "': lower bound " + std::to_string(lo) +
                        " exceeds upper bound " + std::to_string(hi));
  }
  if (kind == VarKind::kBinary && (lo < 0.0 || hi > 1.0)) {
    throw InvalidBounds("binary variable '" + name + "' must have bounds within [0, 1]");
  }
  if (lo == kInfinity || hi == -kInfinity) {
    throw InvalidBounds("variable '" + name + "' has an empty domain");
  }
  variables_.push_back(Variable{kind, lo, hi, std::move(name)});
  objective_.push_back(0.0);
  return VarRef(static_cast<int>(variables_.size()) - 1);
}

int MilpModel::add_constraint(std::vector<Term> terms, RowSense sense, double rhs,
                              std::string name) {
  if (!std::isfinite(rhs)) throw ModelError("constraint '" + name + "' has non-finite rhs");
  for (const Term& t : terms) {
    check_ref(t.var);
    if (!std::isfinite(t.coef)) {
      throw ModelError("constraint '" + name + "' has a non-finite coefficient");
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  constraints_.push_back(LinearConstraint{std::move(merged), sense, rhs, std::move(name)});
  return static_cast<int>(constraints_.size()) - 1;
}

void MilpModel::add_objective_term(VarRef var, double coef) {
  check_ref(var);
  objective_[var.index()] += coef;
}

void MilpModel::set_objective_coefficient(VarRef var, double coef) {
  check_ref(var);
  objective_[var.index()] = coef;
}

void MilpModel::fix(VarRef var, double value) { set_bounds(var, value, value); }

void MilpModel::set_bounds(VarRef var, double lo, double hi) {
  check_ref(var);
  Variable& v = variables_[var.index()];
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw InvalidBounds("variable '" + v.name + "': invalid bounds");
  }
  if (v.kind == VarKind::kBinary && (lo < 0.0 || hi > 1.0)) {
    throw InvalidBounds("binary variable '" + v.name + "' must stay within [0, 1]");
  }
  v.lo = lo;
  v.hi = hi;
}

int MilpModel::num_binaries() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) {
    return v.kind == VarKind::kBinary;
  }));
}

std::size_t MilpModel::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const auto& c : constraints_) nnz += c.terms.size();
  return nnz;
}

const Variable& MilpModel::variable(VarRef var) const {
  check_ref(var);
  return variables_[var.index()];
}

void MilpModel::check_ref(VarRef var) const {
  if (!var.valid() || var.index() >= num_variables()) {
    throw ModelError("reference to undeclared variable " + std::to_string(var.index()));
  }
}

}  // namespace possplan::milp
