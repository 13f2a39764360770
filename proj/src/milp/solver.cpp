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

#include "possplan/milp/solver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <queue>
#include <string>

#include "simplex.hpp"

namespace possplan::milp {
namespace {

using detail::BoundedSimplex;
using detail::CscMatrix;
using detail::LpStatus;

struct BoundChange {
  int column;
  double lo;
  double hi;
};

struct Node {
  std::int64_t id = 0;
  int depth = 0;
  double bound = -kInfinity;
  std::vector<BoundChange> changes;  // cumulative from the root
  std::shared_ptr<const detail::Basis> warm;
};

// Best bound first; among equal bounds the deeper node, then the older one.
struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

BoundedSimplex make_lp(const MilpModel& model) {
  const int n = model.num_variables();
  const int m = model.num_constraints();
  std::vector<int> count(n, 0);
  for (const auto& row : model.constraints()) {
    for (const Term& t : row.terms) ++count[t.var.index()];
  }
  CscMatrix a;
  a.rows = m;
  a.cols = n;
  a.start.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) a.start[j + 1] = a.start[j] + count[j];
  a.index.resize(a.start[n]);
  a.value.resize(a.start[n]);
  std::vector<int> fill(a.start.begin(), a.start.end() - 1);
  std::vector<double> row_lo(m), row_hi(m);
  for (int r = 0; r < m; ++r) {
    const auto& row = model.constraints()[r];
    for (const Term& t : row.terms) {
      const int k = fill[t.var.index()]++;
      a.index[k] = r;
      a.value[k] = t.coef;
    }
    switch (row.sense) {
      case RowSense::kLessEqual: row_lo[r] = -kInfinity; row_hi[r] = row.rhs; break;
      case RowSense::kEqual: row_lo[r] = row_hi[r] = row.rhs; break;
      case RowSense::kGreaterEqual: row_lo[r] = row.rhs; row_hi[r] = kInfinity; break;
    }
  }
  std::vector<double> lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = model.variables()[j].lo;
    hi[j] = model.variables()[j].hi;
  }
  return BoundedSimplex(std::move(a), model.objective(), std::move(lo), std::move(hi),
                        row_lo, row_hi);
}

std::int64_t iteration_budget(const MilpModel& model) {
  return 50LL * (model.num_variables() + model.num_constraints()) + 20000;
}

LpStatus run_lp(BoundedSimplex& lp, const MilpModel& model) {
  LpStatus status = lp.solve(iteration_budget(model));
  if (status == LpStatus::kIterationLimit) {
    // One cold restart before giving up.
    lp.reset_to_slack_basis();
    status = lp.solve(iteration_budget(model));
  }
  if (status == LpStatus::kIterationLimit) {
    throw NumericalFailure("simplex iteration limit reached on a model with " +
                           std::to_string(model.num_variables()) + " columns");
  }
  return status;
}

int first_fractional(const MilpModel& model, const BoundedSimplex& lp) {
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].kind != VarKind::kBinary) continue;
    const double v = lp.value(j);
    if (std::fabs(v - std::round(v)) > kIntegralityTolerance) return j;
  }
  return -1;
}

std::vector<double> extract(const MilpModel& model, const BoundedSimplex& lp) {
  std::vector<double> values(model.num_variables());
  for (int j = 0; j < model.num_variables(); ++j) {
    double v = lp.value(j);
    const auto& var = model.variables()[j];
    if (var.kind == VarKind::kBinary) v = std::round(v);
    // Clamp round-off outside the declared box.
    v = std::clamp(v, var.lo, var.hi);
    values[j] = v;
  }
  return values;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kGapLimit: return "gap_limit";
  }
  return "unknown";
}

MilpSolution solve_relaxation(const MilpModel& model) {
  BoundedSimplex lp = make_lp(model);
  MilpSolution sol;
  const LpStatus status = run_lp(lp, model);
  sol.stats.lp_iterations = lp.total_iterations();
  sol.stats.nodes = 1;
  if (status == LpStatus::kInfeasible) {
    sol.status = SolveStatus::kInfeasible;
    return sol;
  }
  if (status == LpStatus::kUnbounded) {
    sol.status = SolveStatus::kUnbounded;
    sol.objective = -kInfinity;
    return sol;
  }
  sol.status = SolveStatus::kOptimal;
  sol.values.resize(model.num_variables());
  for (int j = 0; j < model.num_variables(); ++j) sol.values[j] = lp.value(j);
  sol.objective = lp.objective() + model.objective_constant();
  sol.bound = sol.objective;
  sol.gap = 0.0;
  sol.stats.root_bound = sol.objective;
  return sol;
}

MilpSolution solve(const MilpModel& model, const SolveOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  BoundedSimplex lp = make_lp(model);
  const double constant = model.objective_constant();

  MilpSolution best;
  best.status = SolveStatus::kInfeasible;
  double incumbent = kInfinity;
  bool have_incumbent = false;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::vector<Node> dive;  // depth-first stack used until the first incumbent
  std::int64_t next_id = 0;
  {
    Node root;
    root.id = next_id++;
    dive.push_back(std::move(root));
  }

  std::vector<int> touched;  // columns whose bounds differ from the model's
  bool budget_hit = false;
  bool root_done = false;

  auto pop_node = [&]() -> Node {
    if (!dive.empty()) {
      Node node = std::move(dive.back());
      dive.pop_back();
      return node;
    }
    Node node = open.top();
    open.pop();
    return node;
  };

  auto open_bound = [&]() {
    double b = kInfinity;
    for (const Node& n : dive) b = std::min(b, n.bound);
    if (!open.empty()) b = std::min(b, open.top().bound);
    return b;
  };

  while (!dive.empty() || !open.empty()) {
    if (options.node_limit && best.stats.nodes >= *options.node_limit) {
      budget_hit = true;
      break;
    }
    if (options.time_limit_seconds) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      if (elapsed.count() >= *options.time_limit_seconds) {
        budget_hit = true;
        break;
      }
    }

    Node node = pop_node();
    if (node.bound >= incumbent - options.gap_tolerance) continue;

    for (int j : touched) {
      lp.set_column_bounds(j, model.variables()[j].lo, model.variables()[j].hi);
    }
    touched.clear();
    for (const BoundChange& c : node.changes) {
      lp.set_column_bounds(c.column, c.lo, c.hi);
      touched.push_back(c.column);
    }
    if (node.warm) lp.load_basis(*node.warm);

    ++best.stats.nodes;
    const LpStatus status = run_lp(lp, model);
    if (status == LpStatus::kInfeasible) {
      root_done = true;
      continue;
    }
    if (status == LpStatus::kUnbounded) {
      // Binaries are bounded, so an unbounded relaxation at any node means
      // the continuous part is unbounded for that binary assignment.
      best.status = SolveStatus::kUnbounded;
      best.objective = -kInfinity;
      best.values.clear();
      best.stats.lp_iterations = lp.total_iterations();
      return best;
    }
    const double value = lp.objective() + constant;
    assert(value >= node.bound - 1e-6 * (1.0 + std::fabs(node.bound)));
    if (!root_done) {
      best.stats.root_bound = value;
      root_done = true;
    }
    if (value >= incumbent - options.gap_tolerance) continue;

    const int branch = first_fractional(model, lp);
    if (branch < 0) {
      std::vector<double> values = extract(model, lp);
      incumbent = evaluate_objective(model, values);
      best.values = std::move(values);
      best.objective = incumbent;
      have_incumbent = true;
      // Remaining dive nodes now compete by bound.
      for (Node& n : dive) open.push(std::move(n));
      dive.clear();
      continue;
    }

    auto warm = std::make_shared<const detail::Basis>(lp.basis());
    Node floor_child;
    floor_child.id = next_id++;
    floor_child.depth = node.depth + 1;
    floor_child.bound = value;
    floor_child.changes = node.changes;
    floor_child.changes.push_back({branch, model.variables()[branch].lo, 0.0});
    floor_child.warm = warm;

    Node ceil_child;
    ceil_child.id = next_id++;
    ceil_child.depth = node.depth + 1;
    ceil_child.bound = value;
    ceil_child.changes = std::move(node.changes);
    ceil_child.changes.push_back({branch, 1.0, model.variables()[branch].hi});
    ceil_child.warm = std::move(warm);

    if (!have_incumbent) {
      // Stack order: the floor child is popped first.
      dive.push_back(std::move(ceil_child));
      dive.push_back(std::move(floor_child));
    } else {
      open.push(std::move(floor_child));
      open.push(std::move(ceil_child));
    }
  }

  best.stats.lp_iterations = lp.total_iterations();
  if (budget_hit) {
    best.status = SolveStatus::kGapLimit;
    best.bound = std::min(open_bound(), incumbent);
    best.gap = !have_incumbent ? kInfinity : incumbent - best.bound;
    return best;
  }
  if (!have_incumbent) {
    best.status = SolveStatus::kInfeasible;
    return best;
  }
  best.status = SolveStatus::kOptimal;
  best.bound = incumbent;
  best.gap = 0.0;
  return best;
}

std::vector<Violation> check_assignment(const MilpModel& model, std::span<const double> values,
                                        double tolerance) {
  std::vector<Violation> out;
  if (static_cast<int>(values.size()) != model.num_variables()) {
    out.push_back({"assignment size " + std::to_string(values.size()) + " != " +
                       std::to_string(model.num_variables()),
                   kInfinity});
    return out;
  }
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variables()[j];
    const double x = values[j];
    if (!std::isfinite(x)) {
      out.push_back({"column " + v.name + " is not finite", kInfinity});
      continue;
    }
    if (x < v.lo - tolerance) out.push_back({"column " + v.name + " below lower bound", v.lo - x});
    if (x > v.hi + tolerance) out.push_back({"column " + v.name + " above upper bound", x - v.hi});
    if (v.kind == VarKind::kBinary && std::fabs(x - std::round(x)) > tolerance) {
      out.push_back({"binary " + v.name + " is fractional", std::fabs(x - std::round(x))});
    }
  }
  for (int r = 0; r < model.num_constraints(); ++r) {
    const auto& row = model.constraints()[r];
    double activity = 0.0;
    for (const Term& t : row.terms) activity += t.coef * values[t.var.index()];
    const double scale = std::max(1.0, std::fabs(row.rhs));
    double excess = 0.0;
    switch (row.sense) {
      case RowSense::kLessEqual: excess = activity - row.rhs; break;
      case RowSense::kGreaterEqual: excess = row.rhs - activity; break;
      case RowSense::kEqual: excess = std::fabs(activity - row.rhs); break;
    }
    if (excess > tolerance * scale) {
      out.push_back({"row " + (row.name.empty() ? std::to_string(r) : row.name) + " violated",
                     excess});
    }
  }
  return out;
}

double evaluate_objective(const MilpModel& model, std::span<const double> values) {
  double s = model.objective_constant();
  for (int j = 0; j < model.num_variables(); ++j) s += model.objective()[j] * values[j];
  return s;
}

SolveOptions options_from_environment(SolveOptions base) {
  if (const char* nodes = std::getenv("POSSPLAN_NODE_LIMIT"); nodes && *nodes) {
    base.node_limit = std::strtoll(nodes, nullptr, 10);
  }
  if (const char* secs = std::getenv("POSSPLAN_TIME_LIMIT"); secs && *secs) {
    base.time_limit_seconds = std::strtod(secs, nullptr);
  }
  return base;
}

}  // namespace possplan::milp
