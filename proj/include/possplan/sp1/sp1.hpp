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

#ifndef POSSPLAN_SP1_SP1_HPP_
#define POSSPLAN_SP1_SP1_HPP_

#include <stdexcept>
#include <vector>

#include "possplan/core/instance.hpp"
#include "possplan/milp/model.hpp"
#include "possplan/milp/solver.hpp"
#include "possplan/sp1/plan.hpp"

namespace possplan::sp1 {

// Linearized repulsion term over (maintenance link, week) cells. For every
// cell, `on_one` weighs choosing x = 1 and `on_zero` weighs choosing x = 0;
// both are nonnegative. The affine form is coefficient() * x + constant().
class TabuCoefficients {
 public:
  TabuCoefficients() = default;
  TabuCoefficients(std::vector<LinkId> links, int horizon);

  const std::vector<LinkId>& links() const { return links_; }
  int horizon() const { return horizon_; }

  double on_one(LinkId link, int week) const { return on_one_[cell(link, week)]; }
  double on_zero(LinkId link, int week) const { return on_zero_[cell(link, week)]; }
  void add(LinkId link, int week, double on_one, double on_zero);

  double coefficient(LinkId link, int week) const {
    return on_one(link, week) - on_zero(link, week);
  }
  double constant() const;
  bool is_zero() const;
  // Value of the term for a concrete plan.
  double evaluate(const PossessionPlan& plan) const;

 private:
  std::size_t cell(LinkId link, int week) const;

  std::vector<LinkId> links_;
  int horizon_ = 0;
  std::vector<double> on_one_;
  std::vector<double> on_zero_;
};

struct Sp1Objective {
  double completion = 0.0;  // sum of priority * (start + duration)
  double disruption = 0.0;  // sum of g * x over maintenance links
  double tabu = 0.0;
  double total = 0.0;       // weighted
};

Sp1Objective evaluate_sp1(const Instance& instance, const PossessionPlan& plan,
                          const TabuCoefficients& tabu = {});

class InfeasibleByConstruction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Sp1Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Column handles of a built model, for extraction and tests.
struct Sp1Model {
  milp::MilpModel model;
  std::vector<LinkId> links;                       // metro links
  std::vector<std::vector<milp::VarRef>> x;        // [link][week - 1]
  std::vector<std::vector<milp::VarRef>> y;        // [intervention][week - 1]
  std::vector<milp::VarRef> t;                     // [intervention]
};

Sp1Model build_sp1(const Instance& instance, const TabuCoefficients& tabu = {});

struct Sp1Result {
  PossessionPlan plan;
  Sp1Objective objective;
  milp::MilpSolution solution;
};

Sp1Result solve_sp1(const Instance& instance, const TabuCoefficients& tabu = {},
                    const milp::SolveOptions& options = milp::options_from_environment());

}  // namespace possplan::sp1

#endif  // POSSPLAN_SP1_SP1_HPP_
