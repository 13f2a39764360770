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

#ifndef POSSPLAN_SP2_SP2_HPP_
#define POSSPLAN_SP2_SP2_HPP_

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "possplan/core/instance.hpp"
#include "possplan/milp/model.hpp"
#include "possplan/milp/solver.hpp"
#include "possplan/sp1/plan.hpp"

namespace possplan::sp2 {

enum class Sp2Form {
  // One commodity per origin; twin activatable links share their unit and
  // activation variables.
  kAggregated,
  // One commodity per o/d pair with explicit f, q, z and w for every link.
  kLiteral,
};

struct Sp2Options {
  Sp2Form form = Sp2Form::kAggregated;
  // Adds z_j >= z_{j+1} on every unit ladder.
  bool order_units = true;
};

// Flow of one o/d pair over the network.
struct CommodityFlow {
  NodeId origin = 0;
  NodeId destination = 0;
  double demand = 0.0;
  double unmet = 0.0;
  std::vector<std::pair<LinkId, double>> links;  // positive flows only
};

// Unweighted objective terms.
struct Sp2Components {
  double generalized_cost = 0.0;  // sum of eta * f
  double activation_cost = 0.0;   // sum of c * z over activatable and bus links
  double activations = 0.0;       // number of activated links
  double unmet = 0.0;             // sum of phi
};

struct MitigationSolution {
  int week = 0;
  std::string period;
  // Indexed like instance.links.
  std::vector<double> flow;
  std::vector<double> capacity;
  std::vector<bool> activated;
  std::vector<int> units;
  std::vector<CommodityFlow> commodities;
  Sp2Components components;
  double objective = 0.0;
  milp::SolveStats stats;
};

double weighted_objective(const Instance& instance, const Sp2Components& components);

milp::MilpModel build_sp2(const Instance& instance, const sp1::PossessionPlan& plan, int week,
                          const DemandMatrix& demand, const Sp2Options& options = {});

class Sp2SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MitigationSolution solve_sp2(const Instance& instance, const sp1::PossessionPlan& plan, int week,
                             const DemandMatrix& demand, const Sp2Options& options = {},
                             const milp::SolveOptions& solve_options =
                                 milp::options_from_environment());

// Independent audit of every solution invariant; empty when all hold.
std::vector<std::string> audit_solution(const Instance& instance,
                                        const sp1::PossessionPlan& plan,
                                        const DemandMatrix& demand,
                                        const MitigationSolution& solution,
                                        double tolerance = 1e-6);

// Sum over pairs with positive demand of unmet / demand.
double unmet_fraction(const MitigationSolution& solution);

// Capacities of activated activatable links, the requirement handed to the
// line design step.
std::map<LinkId, double> required_capacities(const Instance& instance,
                                             const MitigationSolution& solution);

// CSV exports. Link rows: week, period, link, flow, capacity, activated, units.
// Unmet rows: week, period, origin, destination, unmet.
void write_link_csv_header(std::ostream& out);
void write_link_csv(std::ostream& out, const Instance& instance,
                    const MitigationSolution& solution);
void write_unmet_csv_header(std::ostream& out);
void write_unmet_csv(std::ostream& out, const MitigationSolution& solution);

}  // namespace possplan::sp2

#endif  // POSSPLAN_SP2_SP2_HPP_
