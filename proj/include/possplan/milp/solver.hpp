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

#ifndef POSSPLAN_MILP_SOLVER_HPP_
#define POSSPLAN_MILP_SOLVER_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "possplan/milp/model.hpp"

namespace possplan::milp {

inline constexpr double kFeasibilityTolerance = 1e-6;
inline constexpr double kIntegralityTolerance = 1e-6;

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kGapLimit };

const char* to_string(SolveStatus status);

struct SolveOptions {
  // Absolute gap between incumbent and best bound at which search stops.
  double gap_tolerance = 1e-6;
  std::optional<std::int64_t> node_limit;
  std::optional<double> time_limit_seconds;
};

struct SolveStats {
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  double root_bound = 0.0;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = kInfinity;
  // Best proven lower bound.
  double bound = -kInfinity;
  double gap = kInfinity;
  // Meaningful only when has_assignment().
  std::vector<double> values;
  SolveStats stats;

  bool has_assignment() const { return std::isfinite(objective); }
  double value(VarRef var) const { return values.at(var.index()); }
};

// Raised when the simplex cannot make progress even after refactorization
// and a restart from the slack basis.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Branch-and-bound over the LP relaxation. Deterministic: branching picks
// the lowest-index fractional binary and the floor child is explored first.
MilpSolution solve(const MilpModel& model, const SolveOptions& options = {});

// Solves the continuous relaxation only (binaries relaxed to [0, 1]).
MilpSolution solve_relaxation(const MilpModel& model);

struct Violation {
  std::string what;
  double amount = 0.0;
};

// Evaluates rows, bounds and integrality directly from the model data.
// Shares no state with the solver.
std::vector<Violation> check_assignment(const MilpModel& model,
                                        std::span<const double> values,
                                        double tolerance = kFeasibilityTolerance);

double evaluate_objective(const MilpModel& model, std::span<const double> values);

// Reads POSSPLAN_NODE_LIMIT and POSSPLAN_TIME_LIMIT (seconds) when set.
SolveOptions options_from_environment(SolveOptions base = {});

}  // namespace possplan::milp

#endif  // POSSPLAN_MILP_SOLVER_HPP_
