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

#include "possplan/sp2/sp2.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include "core/csv.hpp"

namespace possplan::sp2 {

using milp::MilpModel;
using milp::RowSense;
using milp::Term;
using milp::VarRef;

namespace {

bool upgradable(const Link& l) { return l.mode == Mode::kBus || l.mode == Mode::kActivatable; }

bool link_closed(const sp1::PossessionPlan& plan, const Link& l, int week) {
  return l.mode == Mode::kMetro && plan.interrupted(l.id, week);
}

double big_m(const Instance& instance) {
  return instance.params.big_m.value_or(instance.params.max_units *
                                        instance.params.unit_capacity);
}

struct Pair {
  int o = 0;  // node indices
  int d = 0;
  double demand = 0.0;
};

// Variable handles shared by both forms. Entries are invalid refs when the
// variable does not exist in the chosen form.
struct Built {
  MilpModel model;
  Sp2Form form = Sp2Form::kAggregated;
  std::vector<Pair> pairs;
  std::vector<VarRef> phi;                     // [pair]
  std::vector<int> origins;                    // node indices (aggregated form)
  std::vector<std::vector<VarRef>> h;          // [commodity][link]
  std::vector<std::vector<VarRef>> z;          // [link][unit]
  std::vector<VarRef> w;                       // [link]
};

std::vector<Pair> demand_pairs(const DemandMatrix& demand) {
  std::vector<Pair> pairs;
  const int n = demand.size();
  for (int o = 0; o < n; ++o) {
    for (int d = 0; d < n; ++d) {
      if (o != d && demand.at(o, d) > 0.0) pairs.push_back({o, d, demand.at(o, d)});
    }
  }
  return pairs;
}

void add_unit_ladder(Built& b, const std::vector<VarRef>& units, const std::string& name,
                     bool order) {
  if (!order) return;
  for (std::size_t j = 0; j + 1 < units.size(); ++j) {
    b.model.add_constraint({{units[j], 1.0}, {units[j + 1], -1.0}}, RowSense::kGreaterEqual, 0.0,
                           "order_" + name + "_" + std::to_string(j + 1));
  }
}

Built build(const Instance& instance, const sp1::PossessionPlan& plan, int week,
            const DemandMatrix& demand, const Sp2Options& options) {
  if (demand.size() != static_cast<int>(instance.nodes.size())) {
    throw std::invalid_argument("demand matrix does not match the node set");
  }
  Built b;
  b.form = options.form;
  MilpModel& m = b.model;
  const auto& beta = instance.weights.beta;
  const int L = static_cast<int>(instance.links.size());
  const int N = static_cast<int>(instance.nodes.size());
  const int J = instance.params.max_units;
  const double q0 = instance.params.unit_capacity;
  const double M = big_m(instance);
  const auto out = instance.out_links();
  const auto in = instance.in_links();
  b.pairs = demand_pairs(demand);
  b.z.assign(static_cast<std::size_t>(L), {});
  b.w.assign(static_cast<std::size_t>(L), VarRef());

  for (std::size_t p = 0; p < b.pairs.size(); ++p) {
    const Pair& pr = b.pairs[p];
    b.phi.push_back(m.add_continuous(0.0, pr.demand,
                                     "phi_" + std::to_string(instance.nodes[pr.o].id) + "_" +
                                         std::to_string(instance.nodes[pr.d].id)));
    m.add_objective_term(b.phi.back(), beta[3]);
  }

  std::vector<bool> closed(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) closed[l] = link_closed(plan, instance.links[l], week);

  if (options.form == Sp2Form::kAggregated) {
    std::vector<bool> is_origin(static_cast<std::size_t>(N), false);
    for (const Pair& pr : b.pairs) is_origin[pr.o] = true;
    for (int o = 0; o < N; ++o) {
      if (is_origin[o]) b.origins.push_back(o);
    }
    for (int o : b.origins) {
      auto& row = b.h.emplace_back(static_cast<std::size_t>(L), VarRef());
      for (int l = 0; l < L; ++l) {
        if (closed[l]) continue;
        const Link& link = instance.links[l];
        row[l] = m.add_continuous(0.0, milp::kInfinity,
                                  "h_" + std::to_string(link.id) + "_" +
                                      std::to_string(instance.nodes[o].id));
        m.add_objective_term(row[l], beta[0] * link.cost);
      }
    }
    // Conservation per origin.
    for (std::size_t c = 0; c < b.origins.size(); ++c) {
      const int o = b.origins[c];
      for (int n = 0; n < N; ++n) {
        std::vector<Term> terms;
        for (int l : out[n]) {
          if (b.h[c][l].valid()) terms.push_back({b.h[c][l], 1.0});
        }
        for (int l : in[n]) {
          if (b.h[c][l].valid()) terms.push_back({b.h[c][l], -1.0});
        }
        double rhs = 0.0;
        for (std::size_t p = 0; p < b.pairs.size(); ++p) {
          const Pair& pr = b.pairs[p];
          if (pr.o != o) continue;
          if (n == o) {
            rhs += pr.demand;
            terms.push_back({b.phi[p], 1.0});
          } else if (n == pr.d) {
            rhs -= pr.demand;
            terms.push_back({b.phi[p], -1.0});
          }
        }
        if (terms.empty() && rhs == 0.0) continue;
        m.add_constraint(std::move(terms), RowSense::kEqual, rhs,
                         "balance_" + std::to_string(instance.nodes[o].id) + "_" +
                             std::to_string(instance.nodes[n].id));
      }
    }
    // Units: one ladder per bus link and per activatable twin pair.
    std::vector<bool> done(static_cast<std::size_t>(L), false);
    for (int l = 0; l < L; ++l) {
      const Link& link = instance.links[l];
      if (!upgradable(link) || done[l]) continue;
      const std::string id = std::to_string(link.id);
      int twin = -1;
      if (link.mode == Mode::kActivatable) twin = instance.link_index(*link.reverse);
      const double cost =
          *link.activation_cost + (twin >= 0 ? *instance.links[twin].activation_cost : 0.0);
      std::vector<VarRef> units;
      for (int j = 1; j <= J; ++j) {
        units.push_back(m.add_binary("z_" + id + "_" + std::to_string(j)));
        m.add_objective_term(units.back(), beta[1] * cost);
      }
      add_unit_ladder(b, units, id, options.order_units);
      b.z[l] = units;
      done[l] = true;
      if (twin >= 0) {
        b.z[twin] = units;
        done[twin] = true;
        const VarRef w = m.add_binary("w_" + id);
        m.add_objective_term(w, 2.0 * beta[2]);
        b.w[l] = b.w[twin] = w;
        std::vector<Term> gate;
        for (VarRef u : units) gate.push_back({u, q0});
        gate.push_back({w, -M});
        m.add_constraint(std::move(gate), RowSense::kLessEqual, 0.0, "gate_" + id);
      }
    }
    // Capacity rows.
    for (int l = 0; l < L; ++l) {
      if (closed[l]) continue;
      const Link& link = instance.links[l];
      std::vector<Term> terms;
      for (const auto& row : b.h) terms.push_back({row[l], 1.0});
      if (terms.empty()) continue;
      double rhs = link.nominal_capacity.value_or(0.0);
      for (VarRef u : b.z[l]) terms.push_back({u, -q0});
      if (link.mode == Mode::kActivatable) rhs = 0.0;
      m.add_constraint(std::move(terms), RowSense::kLessEqual, rhs,
                       "capacity_" + std::to_string(link.id));
    }
    return b;
  }

  // Literal form.
  for (std::size_t p = 0; p < b.pairs.size(); ++p) {
    const Pair& pr = b.pairs[p];
    const std::string od =
        std::to_string(instance.nodes[pr.o].id) + "_" + std::to_string(instance.nodes[pr.d].id);
    auto& row = b.h.emplace_back(static_cast<std::size_t>(L), VarRef());
    for (int l = 0; l < L; ++l) {
      row[l] = m.add_continuous(0.0, milp::kInfinity,
                                "h_" + std::to_string(instance.links[l].id) + "_" + od);
    }
  }
  std::vector<VarRef> f(static_cast<std::size_t>(L)), q(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    const Link& link = instance.links[l];
    const std::string id = std::to_string(link.id);
    f[l] = m.add_continuous(0.0, closed[l] ? 0.0 : milp::kInfinity, "f_" + id);
    m.add_objective_term(f[l], beta[0] * link.cost);
    q[l] = m.add_continuous(0.0, milp::kInfinity, "q_" + id);
    if (upgradable(link)) {
      for (int j = 1; j <= J; ++j) {
        b.z[l].push_back(m.add_binary("z_" + id + "_" + std::to_string(j)));
        m.add_objective_term(b.z[l].back(), beta[1] * *link.activation_cost);
      }
      add_unit_ladder(b, b.z[l], id, options.order_units);
    }
    if (link.mode == Mode::kActivatable) {
      b.w[l] = m.add_binary("w_" + id);
      m.add_objective_term(b.w[l], beta[2]);
    }
  }
  for (std::size_t p = 0; p < b.pairs.size(); ++p) {
    const Pair& pr = b.pairs[p];
    const std::string od =
        std::to_string(instance.nodes[pr.o].id) + "_" + std::to_string(instance.nodes[pr.d].id);
    for (int n = 0; n < N; ++n) {
      std::vector<Term> terms;
      for (int l : out[n]) terms.push_back({b.h[p][l], 1.0});
      for (int l : in[n]) terms.push_back({b.h[p][l], -1.0});
      double rhs = 0.0;
      if (n == pr.o) {
        rhs = pr.demand;
        terms.push_back({b.phi[p], 1.0});
      } else if (n == pr.d) {
        rhs = -pr.demand;
        terms.push_back({b.phi[p], -1.0});
      }
      m.add_constraint(std::move(terms), RowSense::kEqual, rhs,
                       "balance_" + od + "_" + std::to_string(instance.nodes[n].id));
    }
  }
  for (int l = 0; l < L; ++l) {
    const Link& link = instance.links[l];
    const std::string id = std::to_string(link.id);
    std::vector<Term> sum{{f[l], 1.0}};
    for (const auto& row : b.h) sum.push_back({row[l], -1.0});
    m.add_constraint(std::move(sum), RowSense::kEqual, 0.0, "link_flow_" + id);
    m.add_constraint({{f[l], 1.0}, {q[l], -1.0}}, RowSense::kLessEqual, 0.0, "capacity_" + id);
    std::vector<Term> cap{{q[l], 1.0}};
    for (VarRef u : b.z[l]) cap.push_back({u, -q0});
    switch (link.mode) {
      case Mode::kActivatable:
        m.add_constraint(std::move(cap), RowSense::kEqual, 0.0, "units_" + id);
        m.add_constraint({{q[l], 1.0}, {b.w[l], -M}}, RowSense::kLessEqual, 0.0, "gate_" + id);
        m.add_constraint({{q[instance.link_index(*link.reverse)], 1.0}, {q[l], -1.0}},
                         RowSense::kEqual, 0.0, "twin_" + id);
        break;
      case Mode::kBus:
        m.add_constraint(std::move(cap), RowSense::kEqual, *link.nominal_capacity, "units_" + id);
        break;
      default:
        m.add_constraint(std::move(cap), RowSense::kEqual, *link.nominal_capacity,
                         "nominal_" + id);
    }
  }
  return b;
}

// Splits one origin's link flows into per-destination flows.
std::vector<std::vector<std::pair<int, double>>> decompose(
    const Instance& instance, int origin, std::vector<double> residual,
    const std::vector<std::pair<int, double>>& delivered) {
  std::vector<std::vector<std::pair<int, double>>> out(delivered.size());
  const auto out_links = instance.out_links();
  constexpr double eps = 1e-9;
  for (std::size_t t = 0; t < delivered.size(); ++t) {
    const int target = delivered[t].first;
    double left = delivered[t].second;
    std::vector<double> acc(residual.size(), 0.0);
    while (left > eps) {
      // BFS over links still carrying flow.
      std::vector<int> via(instance.nodes.size(), -2);
      via[origin] = -1;
      std::deque<int> queue{origin};
      while (!queue.empty() && via[target] == -2) {
        const int n = queue.front();
        queue.pop_front();
        for (int l : out_links[n]) {
          const int head = instance.node_index(instance.links[l].head);
          if (residual[l] > eps && via[head] == -2) {
            via[head] = l;
            queue.push_back(head);
          }
        }
      }
      if (via[target] == -2) break;
      double push = left;
      for (int n = target; n != origin;) {
        const int l = via[n];
        push = std::min(push, residual[l]);
        n = instance.node_index(instance.links[l].tail);
      }
      for (int n = target; n != origin;) {
        const int l = via[n];
        residual[l] -= push;
        acc[l] += push;
        n = instance.node_index(instance.links[l].tail);
      }
      left -= push;
    }
    for (std::size_t l = 0; l < acc.size(); ++l) {
      if (acc[l] > eps) out[t].push_back({static_cast<int>(l), acc[l]});
    }
  }
  return out;
}

}  // namespace

double weighted_objective(const Instance& instance, const Sp2Components& c) {
  const auto& beta = instance.weights.beta;
  return beta[0] * c.generalized_cost + beta[1] * c.activation_cost + beta[2] * c.activations +
         beta[3] * c.unmet;
}

milp::MilpModel build_sp2(const Instance& instance, const sp1::PossessionPlan& plan, int week,
                          const DemandMatrix& demand, const Sp2Options& options) {
  return build(instance, plan, week, demand, options).model;
}

MitigationSolution solve_sp2(const Instance& instance, const sp1::PossessionPlan& plan, int week,
                             const DemandMatrix& demand, const Sp2Options& options,
                             const milp::SolveOptions& solve_options) {
  const Built b = build(instance, plan, week, demand, options);
  const milp::MilpSolution sol = milp::solve(b.model, solve_options);
  if (!sol.has_assignment()) {
    throw Sp2SolveError(std::string("mitigation model failed: ") + milp::to_string(sol.status));
  }
  const int L = static_cast<int>(instance.links.size());
  auto value = [&](VarRef v) { return v.valid() ? sol.value(v) : 0.0; };
  auto clean = [](double v) { return std::fabs(v) < 1e-9 ? 0.0 : v; };

  MitigationSolution s;
  s.week = week;
  s.period = demand.period();
  s.stats = sol.stats;
  s.flow.assign(static_cast<std::size_t>(L), 0.0);
  s.capacity.assign(static_cast<std::size_t>(L), 0.0);
  s.activated.assign(static_cast<std::size_t>(L), false);
  s.units.assign(static_cast<std::size_t>(L), 0);
  for (int l = 0; l < L; ++l) {
    const Link& link = instance.links[l];
    for (VarRef u : b.z[l]) s.units[l] += value(u) > 0.5 ? 1 : 0;
    if (link.mode == Mode::kActivatable) {
      s.activated[l] = value(b.w[l]) > 0.5;
      s.capacity[l] = s.units[l] * instance.params.unit_capacity;
    } else {
      s.capacity[l] = *link.nominal_capacity + s.units[l] * instance.params.unit_capacity;
    }
    for (const auto& row : b.h) s.flow[l] += value(row[l]);
    s.flow[l] = clean(s.flow[l]);
  }

  std::vector<double> unmet(b.pairs.size());
  for (std::size_t p = 0; p < b.pairs.size(); ++p) unmet[p] = clean(value(b.phi[p]));

  if (b.form == Sp2Form::kLiteral) {
    for (std::size_t p = 0; p < b.pairs.size(); ++p) {
      CommodityFlow cf{instance.nodes[b.pairs[p].o].id, instance.nodes[b.pairs[p].d].id,
                       b.pairs[p].demand, unmet[p], {}};
      for (int l = 0; l < L; ++l) {
        const double v = clean(value(b.h[p][l]));
        if (v > 0.0) cf.links.push_back({instance.links[l].id, v});
      }
      s.commodities.push_back(std::move(cf));
    }
  } else {
    for (std::size_t c = 0; c < b.origins.size(); ++c) {
      const int o = b.origins[c];
      std::vector<double> residual(static_cast<std::size_t>(L));
      for (int l = 0; l < L; ++l) residual[l] = clean(value(b.h[c][l]));
      std::vector<std::pair<int, double>> delivered;
      std::vector<std::size_t> which;
      for (std::size_t p = 0; p < b.pairs.size(); ++p) {
        if (b.pairs[p].o != o) continue;
        delivered.push_back({b.pairs[p].d, b.pairs[p].demand - unmet[p]});
        which.push_back(p);
      }
      const auto paths = decompose(instance, o, residual, delivered);
      for (std::size_t t = 0; t < which.size(); ++t) {
        const Pair& pr = b.pairs[which[t]];
        CommodityFlow cf{instance.nodes[pr.o].id, instance.nodes[pr.d].id, pr.demand,
                         unmet[which[t]], {}};
        for (const auto& [l, v] : paths[t]) cf.links.push_back({instance.links[l].id, v});
        s.commodities.push_back(std::move(cf));
      }
    }
  }

  for (int l = 0; l < L; ++l) {
    const Link& link = instance.links[l];
    s.components.generalized_cost += link.cost * s.flow[l];
    if (upgradable(link)) s.components.activation_cost += *link.activation_cost * s.units[l];
    if (s.activated[l]) s.components.activations += 1.0;
  }
  for (double u : unmet) s.components.unmet += u;
  s.objective = weighted_objective(instance, s.components);
  return s;
}

std::vector<std::string> audit_solution(const Instance& instance,
                                        const sp1::PossessionPlan& plan,
                                        const DemandMatrix& demand,
                                        const MitigationSolution& s, double tol) {
  std::vector<std::string> issues;
  const int L = static_cast<int>(instance.links.size());
  const int N = static_cast<int>(instance.nodes.size());
  const double q0 = instance.params.unit_capacity;
  std::vector<double> summed(static_cast<std::size_t>(L), 0.0);
  int covered = 0;

  for (const CommodityFlow& cf : s.commodities) {
    const int o = instance.node_index(cf.origin);
    const int d = instance.node_index(cf.destination);
    const std::string who =
        "pair " + std::to_string(cf.origin) + "->" + std::to_string(cf.destination);
    if (o < 0 || d < 0 || o == d) {
      issues.push_back(who + ": not a valid o/d pair");
      continue;
    }
    if (std::fabs(cf.demand - demand.at(o, d)) > tol) {
      issues.push_back(who + ": demand differs from the matrix");
    }
    if (demand.at(o, d) > 0.0) ++covered;
    if (cf.unmet < -tol || cf.unmet > cf.demand + tol) issues.push_back(who + ": unmet out of range");
    std::vector<double> net(static_cast<std::size_t>(N), 0.0);
    for (const auto& [id, v] : cf.links) {
      const int l = instance.link_index(id);
      if (v < -tol) issues.push_back(who + ": negative flow on link " + std::to_string(id));
      summed[l] += v;
      net[instance.node_index(instance.links[l].tail)] += v;
      net[instance.node_index(instance.links[l].head)] -= v;
    }
    for (int n = 0; n < N; ++n) {
      double expect = 0.0;
      if (n == o) expect = cf.demand - cf.unmet;
      if (n == d) expect = -(cf.demand - cf.unmet);
      if (std::fabs(net[n] - expect) > tol) {
        issues.push_back(who + ": conservation broken at node " +
                         std::to_string(instance.nodes[n].id));
      }
    }
  }
  int positive = 0;
  for (double v : demand.values()) positive += v > 0.0 ? 1 : 0;
  if (covered != positive) issues.push_back("commodity set does not match positive demand pairs");

  for (int l = 0; l < L; ++l) {
    const Link& link = instance.links[l];
    const std::string id = "link " + std::to_string(link.id);
    if (std::fabs(summed[l] - s.flow[l]) > tol) issues.push_back(id + ": f differs from sum of h");
    if (s.flow[l] > s.capacity[l] + tol) issues.push_back(id + ": flow exceeds capacity");
    if (s.units[l] < 0 || s.units[l] > instance.params.max_units) {
      issues.push_back(id + ": unit count out of range");
    }
    if (!upgradable(link) && s.units[l] != 0) issues.push_back(id + ": units on fixed link");
    if (link.mode == Mode::kMetro && plan.interrupted(link.id, s.week) && s.flow[l] != 0.0) {
      issues.push_back(id + ": flow on interrupted link");
    }
    switch (link.mode) {
      case Mode::kActivatable: {
        if (std::fabs(s.capacity[l] - q0 * s.units[l]) > tol) {
          issues.push_back(id + ": capacity differs from units");
        }
        if (!s.activated[l] && s.capacity[l] > tol) issues.push_back(id + ": capacity while inactive");
        const int t = instance.link_index(*link.reverse);
        if (std::fabs(s.capacity[t] - s.capacity[l]) > tol) {
          issues.push_back(id + ": capacity differs from its twin");
        }
        break;
      }
      case Mode::kBus:
        if (std::fabs(s.capacity[l] - (*link.nominal_capacity + q0 * s.units[l])) > tol) {
          issues.push_back(id + ": capacity differs from nominal plus units");
        }
        break;
      default:
        if (std::fabs(s.capacity[l] - *link.nominal_capacity) > tol) {
          issues.push_back(id + ": capacity differs from nominal");
        }
    }
    if (link.mode != Mode::kActivatable && s.activated[l]) issues.push_back(id + ": activation flag");
  }
  return issues;
}

double unmet_fraction(const MitigationSolution& solution) {
  double sum = 0.0;
  for (const CommodityFlow& cf : solution.commodities) {
    if (cf.demand > 0.0) sum += cf.unmet / cf.demand;
  }
  return sum;
}

std::map<LinkId, double> required_capacities(const Instance& instance,
                                             const MitigationSolution& solution) {
  std::map<LinkId, double> out;
  for (std::size_t l = 0; l < instance.links.size(); ++l) {
    if (instance.links[l].mode == Mode::kActivatable && solution.activated[l] &&
        solution.capacity[l] > 0.0) {
      out[instance.links[l].id] = solution.capacity[l];
    }
  }
  return out;
}

void write_link_csv_header(std::ostream& out) {
  out << "week,period,link,flow,capacity,activated,units\n";
}

void write_link_csv(std::ostream& out, const Instance& instance,
                    const MitigationSolution& s) {
  for (std::size_t l = 0; l < instance.links.size(); ++l) {
    out << s.week << ',' << detail::csv_field(s.period) << ',' << instance.links[l].id << ','
        << detail::format_number(s.flow[l]) << ',' << detail::format_number(s.capacity[l]) << ','
        << (s.activated[l] ? 1 : 0) << ',' << s.units[l] << '\n';
  }
}

void write_unmet_csv_header(std::ostream& out) {
  out << "week,period,origin,destination,unmet\n";
}

void write_unmet_csv(std::ostream& out, const MitigationSolution& s) {
  for (const CommodityFlow& cf : s.commodities) {
    if (cf.unmet <= 0.0) continue;
    out << s.week << ',' << detail::csv_field(s.period) << ',' << cf.origin << ','
        << cf.destination << ',' << detail::format_number(cf.unmet) << '\n';
  }
}

}  // namespace possplan::sp2
