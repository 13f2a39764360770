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

#ifndef POSSPLAN_NEGOTIATION_NEGOTIATION_HPP_
#define POSSPLAN_NEGOTIATION_NEGOTIATION_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "possplan/core/instance.hpp"
#include "possplan/milp/solver.hpp"
#include "possplan/sp1/plan.hpp"
#include "possplan/sp1/sp1.hpp"
#include "possplan/sp2/sp2.hpp"
#include "possplan/sp3/sp3.hpp"

namespace possplan::negotiation {

// Feedback of one iteration to the allocation step.
struct Kpis {
  double unmet_ratio = 0.0;      // chi: summed unmet fraction over all cells
  double activation_cost = 0.0;  // c: sum of c * z
  double surplus = 0.0;          // mu: summed line surplus

  double sum() const { return unmet_ratio + activation_cost + surplus; }
};

// Mitigation and line design of one (week, period).
struct CellResult {
  int week = 0;
  std::string period;
  sp2::MitigationSolution mitigation;
  sp3::ServiceDesign design;
};

struct SolveCounts {
  int sp1 = 0;
  int sp2 = 0;
  int sp3 = 0;
  // Solves actually run; lower than the above when cells repeat.
  int sp1_distinct = 0;
  int sp2_distinct = 0;
  int sp3_distinct = 0;

  int total() const { return sp1 + sp2 + sp3; }
};

struct IterationRecord {
  int r = 0;
  sp1::PossessionPlan plan;
  sp1::Sp1Objective sp1_objective;
  std::vector<CellResult> cells;  // week-major, periods in instance order
  Kpis kpis;
  double sp2_aggregate = 0.0;  // sum of cell SP2 objectives
  SolveCounts counts;
};

struct NegotiationResult {
  std::vector<IterationRecord> history;
  int best = 0;  // index into history

  const IterationRecord& best_record() const {
    return history.at(static_cast<std::size_t>(best));
  }
};

class NegotiationError : public std::runtime_error {
 public:
  NegotiationError(int iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// gamma[p] for p = 0..r-1; gamma[0] = 0 and gamma[p] = kpi_sum(p) / (r - p).
std::vector<double> gamma(const std::vector<IterationRecord>& history, int r);

sp1::TabuCoefficients tabu_coefficients(const Instance& instance,
                                        const std::vector<IterationRecord>& history, int r);

// Minimum aggregate SP2 objective, lowest index on ties.
int select_best(const std::vector<IterationRecord>& history);

Kpis compute_kpis(const Instance& instance, const std::vector<CellResult>& cells);

// Plan fixed from outside (baselines, replays): SP2 and SP3 over every cell.
class CellSolver {
 public:
  CellSolver(const Instance& instance, std::vector<DemandMatrix> demand,
             milp::SolveOptions options = milp::options_from_environment());

  std::vector<CellResult> solve(const sp1::PossessionPlan& plan, SolveCounts& counts);
  const std::vector<DemandMatrix>& demand() const { return demand_; }

 private:
  using Key = std::tuple<std::size_t, double, std::vector<LinkId>>;
  const CellResult& cell(const sp1::PossessionPlan& plan, int week, std::size_t period,
                         SolveCounts& counts);

  const Instance& instance_;
  std::vector<DemandMatrix> demand_;
  milp::SolveOptions options_;
  std::map<Key, CellResult> cache_;
};

struct RunOptions {
  int iterations = 0;  // R; instance params when 0
  // Per-period demand; the instance's nominal matrices when empty.
  std::vector<DemandMatrix> demand;
  milp::SolveOptions solve_options = milp::options_from_environment();
  // Iterations already done (plan, objective, KPIs); their cells are
  // recomputed and must reproduce the stored KPIs.
  std::vector<IterationRecord> resume;
  // One JSON object per iteration, resumed ones included.
  std::ostream* log = nullptr;
  bool log_wall_time = false;
  // Cell cache shared with baseline evaluations; must hold the same demand.
  CellSolver* cells = nullptr;
  // Tabu-free allocation shared by runs on the same instance.
  const sp1::Sp1Result* first_allocation = nullptr;
  // Called with the history after every iteration.
  std::function<void(const std::vector<IterationRecord>&)> on_iteration;
};

NegotiationResult run(const Instance& instance, const RunOptions& options);

// Sampled demand of instance `index` (1-based) of a run seeded with `seed`.
std::vector<DemandMatrix> instance_demand(const Instance& instance, std::uint64_t seed, int index);

// History file: plan starts, SP1 objective, KPIs and aggregate per iteration.
std::string history_json(const Instance& instance, const std::vector<IterationRecord>& history);
std::vector<IterationRecord> parse_history_json(const Instance& instance, std::string_view text);

// Scalar digest of one cell, the unit of the exported cells.csv.
struct CellSummary {
  int week = 0;
  std::string period;
  double sp2_objective = 0.0;
  double generalized_cost = 0.0;
  double activation_cost = 0.0;
  double activations = 0.0;
  double unmet = 0.0;
  double unmet_fraction = 0.0;
  double kpi_activation_cost = 0.0;
  // Generalized cost split by service.
  double gc_walk = 0.0;
  double gc_metro = 0.0;
  double gc_bus = 0.0;
  double gc_train = 0.0;
  double gc_additional = 0.0;
  int lines = 0;
  double line_capacity = 0.0;
  double link_capacity = 0.0;
  double surplus = 0.0;
  double sp3_objective = 0.0;
};

CellSummary summarize_cell(const Instance& instance, const CellResult& cell);

void write_cells_csv_header(std::ostream& out);
void write_cells_csv(std::ostream& out, const CellSummary& cell);
std::vector<CellSummary> read_cells_csv(std::istream& in);

// Activation cost as counted by the KPI (scope from the instance params).
double kpi_activation_cost(const Instance& instance, const sp2::MitigationSolution& solution);

}  // namespace possplan::negotiation

#endif  // POSSPLAN_NEGOTIATION_NEGOTIATION_HPP_
