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

#include "possplan/sp3/sp3.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "core/csv.hpp"

namespace possplan::sp3 {

using milp::RowSense;
using milp::Term;
using milp::VarRef;

namespace {

// A twin pair of activatable links; `forward` is the lower id.
struct Pair {
  LinkId forward = 0;
  LinkId backward = 0;
  NodeId tail = 0;  // of forward
  NodeId head = 0;
  double required = 0.0;
};

struct LineVars {
  VarRef used;
  VarRef capacity;
  std::vector<VarRef> origin, destination;  // [node]
  std::vector<VarRef> fwd, bwd;             // [pair]
  std::vector<VarRef> provided, surplus;    // [pair]
};

struct Built {
  milp::MilpModel model;
  std::vector<Pair> pairs;
  std::vector<NodeId> nodes;
  std::vector<LineVars> lines;
};

std::vector<Pair> make_pairs(const Instance& instance, const std::map<LinkId, double>& required) {
  std::map<LinkId, Pair> by_forward;
  for (const auto& [id, cap] : required) {
    const Link& l = instance.link(id);
    if (l.mode != Mode::kActivatable || !l.reverse) {
      throw std::invalid_argument("link " + std::to_string(id) + " is not an activatable twin");
    }
    if (!(cap > 0.0)) continue;
    const LinkId f = std::min(id, *l.reverse);
    Pair& p = by_forward[f];
    p.forward = f;
    p.backward = std::max(id, *l.reverse);
    p.tail = instance.link(f).tail;
    p.head = instance.link(f).head;
    p.required = std::max(p.required, cap);
  }
  std::vector<Pair> pairs;
  for (auto& [f, p] : by_forward) pairs.push_back(p);
  return pairs;
}

Built build(const Instance& instance, const std::map<LinkId, double>& required) {
  Built b;
  b.pairs = make_pairs(instance, required);
  if (b.pairs.empty()) return b;
  std::set<NodeId> nodes;
  double M = instance.params.unit_capacity;
  for (const Pair& p : b.pairs) {
    nodes.insert(p.tail);
    nodes.insert(p.head);
    M = std::max(M, p.required);
  }
  b.nodes.assign(nodes.begin(), nodes.end());
  const double q0 = instance.params.unit_capacity;
  const auto& v = instance.weights.v;
  milp::MilpModel& m = b.model;
  const int S = instance.params.max_lines;
  const std::size_t P = b.pairs.size();
  auto node_pos = [&](NodeId n) {
    return static_cast<std::size_t>(std::lower_bound(b.nodes.begin(), b.nodes.end(), n) -
                                    b.nodes.begin());
  };

  for (int s = 0; s < S; ++s) {
    const std::string ls = std::to_string(s + 1);
    LineVars lv;
    lv.used = m.add_binary("used_" + ls);
    lv.capacity = m.add_continuous(0.0, M, "q_" + ls);
    m.add_objective_term(lv.capacity, v[0]);
    for (NodeId n : b.nodes) {
      lv.origin.push_back(m.add_binary("xi_" + std::to_string(n) + "_" + ls));
      lv.destination.push_back(m.add_binary("zeta_" + std::to_string(n) + "_" + ls));
    }
    for (const Pair& p : b.pairs) {
      const std::string e = std::to_string(p.forward) + "_" + ls;
      lv.fwd.push_back(m.add_binary("omega_" + e));
      lv.bwd.push_back(m.add_binary("omega_" + std::to_string(p.backward) + "_" + ls));
      lv.provided.push_back(m.add_continuous(0.0, M, "eps_" + e));
      lv.surplus.push_back(m.add_continuous(0.0, M, "mu_" + e));
      m.add_objective_term(lv.provided.back(), v[1]);
      m.add_objective_term(lv.surplus.back(), v[2]);
    }

    std::vector<Term> starts, ends;
    for (std::size_t n = 0; n < b.nodes.size(); ++n) {
      const std::string ns = std::to_string(b.nodes[n]) + "_" + ls;
      starts.push_back({lv.origin[n], 1.0});
      ends.push_back({lv.destination[n], 1.0});
      m.add_constraint({{lv.origin[n], 1.0}, {lv.destination[n], 1.0}}, RowSense::kLessEqual, 1.0,
                       "ends_" + ns);
      std::vector<Term> balance, out, in;
      for (std::size_t e = 0; e < P; ++e) {
        const Pair& p = b.pairs[e];
        if (node_pos(p.tail) == n) {
          out.push_back({lv.fwd[e], 1.0});
          in.push_back({lv.bwd[e], 1.0});
        }
        if (node_pos(p.head) == n) {
          out.push_back({lv.bwd[e], 1.0});
          in.push_back({lv.fwd[e], 1.0});
        }
      }
      for (const Term& t : out) balance.push_back(t);
      for (const Term& t : in) balance.push_back({t.var, -1.0});
      balance.push_back({lv.origin[n], -1.0});
      balance.push_back({lv.destination[n], 1.0});
      m.add_constraint(std::move(balance), RowSense::kEqual, 0.0, "path_" + ns);
      m.add_constraint(std::move(out), RowSense::kLessEqual, 1.0, "out_degree_" + ns);
      m.add_constraint(std::move(in), RowSense::kLessEqual, 1.0, "in_degree_" + ns);
    }
    starts.push_back({lv.used, -1.0});
    ends.push_back({lv.used, -1.0});
    m.add_constraint(std::move(starts), RowSense::kEqual, 0.0, "one_origin_" + ls);
    m.add_constraint(std::move(ends), RowSense::kEqual, 0.0, "one_destination_" + ls);

    for (std::size_t e = 0; e < P; ++e) {
      const std::string es = std::to_string(b.pairs[e].forward) + "_" + ls;
      const VarRef f = lv.fwd[e], r = lv.bwd[e], eps = lv.provided[e], mu = lv.surplus[e];
      // membership omega = f + r, one orientation at most
      m.add_constraint({{f, 1.0}, {r, 1.0}}, RowSense::kLessEqual, 1.0, "orientation_" + es);
      m.add_constraint({{f, 1.0}, {r, 1.0}, {lv.used, -1.0}}, RowSense::kLessEqual, 0.0,
                       "member_" + es);
      m.add_constraint({{lv.capacity, 1.0}, {eps, -1.0}}, RowSense::kGreaterEqual, 0.0,
                       "line_capacity_" + es);
      m.add_constraint({{eps, 1.0}, {f, -M}, {r, -M}}, RowSense::kLessEqual, 0.0,
                       "provided_gate_" + es);
      m.add_constraint({{eps, 1.0}, {f, -M}, {r, -M}}, RowSense::kGreaterEqual, q0 - M,
                       "minimum_service_" + es);
      m.add_constraint({{mu, 1.0}, {lv.capacity, -1.0}, {eps, 1.0}, {f, -M}, {r, -M}},
                       RowSense::kGreaterEqual, -M, "surplus_" + es);
      m.add_constraint({{mu, 1.0}, {f, -M}, {r, -M}}, RowSense::kLessEqual, 0.0,
                       "surplus_gate_" + es);
    }
    b.lines.push_back(std::move(lv));
  }
  for (std::size_t e = 0; e < P; ++e) {
    std::vector<Term> cover;
    for (const LineVars& lv : b.lines) cover.push_back({lv.provided[e], 1.0});
    m.add_constraint(std::move(cover), RowSense::kGreaterEqual, b.pairs[e].required,
                     "coverage_" + std::to_string(b.pairs[e].forward));
  }
  for (int s = 0; s + 1 < S; ++s) {
    m.add_constraint({{b.lines[s].used, 1.0}, {b.lines[s + 1].used, -1.0}},
                     RowSense::kGreaterEqual, 0.0, "line_order_" + std::to_string(s + 1));
  }
  return b;
}

// Directed member arcs of one line as (tail, head, link id).
struct Arc {
  NodeId tail;
  NodeId head;
  LinkId link;
};

// Walks arcs from `origin`; returns the arcs on the path and leaves the rest
// (cycles) in `left`.
std::vector<Arc> walk(NodeId origin, std::vector<Arc>& left) {
  std::vector<Arc> path;
  NodeId at = origin;
  while (true) {
    const auto it =
        std::find_if(left.begin(), left.end(), [&](const Arc& a) { return a.tail == at; });
    if (it == left.end()) break;
    path.push_back(*it);
    at = it->head;
    left.erase(it);
  }
  return path;
}

}  // namespace

milp::MilpModel build_sp3(const Instance& instance, const std::map<LinkId, double>& required) {
  return build(instance, required).model;
}

double weighted_objective(const Instance& instance, const Sp3Components& c) {
  const auto& v = instance.weights.v;
  return v[0] * c.line_capacity + v[1] * c.link_capacity + v[2] * c.surplus;
}

ServiceDesign solve_sp3(const Instance& instance, const std::map<LinkId, double>& required,
                        const milp::SolveOptions& options) {
  Built b = build(instance, required);
  ServiceDesign design;
  if (b.pairs.empty()) return design;
  constexpr int kMaxRounds = 200;
  for (int round = 0; round < kMaxRounds; ++round) {
    const milp::MilpSolution sol = milp::solve(b.model, options);
    if (!sol.has_assignment()) {
      throw Sp3Infeasible(std::string("line design failed: ") + milp::to_string(sol.status));
    }
    auto on = [&](VarRef v) { return sol.value(v) > 0.5; };
    auto val = [&](VarRef v) { return std::fabs(sol.value(v)) < 1e-9 ? 0.0 : sol.value(v); };
    design.lines.clear();
    std::vector<std::vector<std::size_t>> cycles;
    for (const LineVars& lv : b.lines) {
      if (!on(lv.used)) continue;
      LineDesign line;
      line.capacity = val(lv.capacity);
      for (std::size_t n = 0; n < b.nodes.size(); ++n) {
        if (on(lv.origin[n])) line.origin = b.nodes[n];
        if (on(lv.destination[n])) line.destination = b.nodes[n];
      }
      std::vector<Arc> arcs;
      for (std::size_t e = 0; e < b.pairs.size(); ++e) {
        const Pair& p = b.pairs[e];
        if (!on(lv.fwd[e]) && !on(lv.bwd[e])) continue;
        const bool fwd = on(lv.fwd[e]);
        arcs.push_back(fwd ? Arc{p.tail, p.head, p.forward} : Arc{p.head, p.tail, p.backward});
        line.links.push_back(arcs.back().link);
        line.provided.push_back(val(lv.provided[e]));
        line.surplus.push_back(val(lv.surplus[e]));
      }
      walk(line.origin, arcs);
      // whatever is left forms cycles
      while (!arcs.empty()) {
        const NodeId start = arcs.front().tail;
        std::vector<std::size_t> cycle;
        for (const Arc& a : walk(start, arcs)) {
          for (std::size_t e = 0; e < b.pairs.size(); ++e) {
            if (b.pairs[e].forward == a.link || b.pairs[e].backward == a.link) cycle.push_back(e);
          }
        }
        cycles.push_back(std::move(cycle));
      }
      design.lines.push_back(std::move(line));
    }
    if (cycles.empty()) {
      design.objective = sol.objective;
      for (const LineDesign& l : design.lines) {
        design.components.line_capacity += l.capacity;
        for (double e : l.provided) design.components.link_capacity += e;
        for (double u : l.surplus) design.components.surplus += u;
      }
      return design;
    }
    for (const auto& cycle : cycles) {
      ++design.cuts;
      for (std::size_t s = 0; s < b.lines.size(); ++s) {
        std::vector<Term> terms;
        for (std::size_t e : cycle) {
          terms.push_back({b.lines[s].fwd[e], 1.0});
          terms.push_back({b.lines[s].bwd[e], 1.0});
        }
        b.model.add_constraint(std::move(terms), RowSense::kLessEqual,
                               static_cast<double>(cycle.size()) - 1.0,
                               "cycle_" + std::to_string(design.cuts) + "_" +
                                   std::to_string(s + 1));
      }
    }
  }
  throw Sp3Infeasible("line design did not converge after cycle cuts");
}

std::vector<Line> extract_lines(const Instance& instance, const ServiceDesign& design) {
  std::vector<Line> out;
  for (const LineDesign& ld : design.lines) {
    if (ld.links.empty()) continue;
    std::vector<Arc> arcs;
    for (LinkId id : ld.links) {
      const Link& l = instance.link(id);
      arcs.push_back({l.tail, l.head, id});
    }
    const std::vector<Arc> path = walk(ld.origin, arcs);
    if (!arcs.empty() || path.empty() || path.back().head != ld.destination) {
      throw MalformedPath("line from " + std::to_string(ld.origin) + " to " +
                          std::to_string(ld.destination) + " is not a simple path");
    }
    Line line{{ld.origin}, ld.capacity};
    for (const Arc& a : path) {
      if (std::find(line.stops.begin(), line.stops.end(), a.head) != line.stops.end()) {
        throw MalformedPath("line revisits node " + std::to_string(a.head));
      }
      line.stops.push_back(a.head);
    }
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<std::string> audit_design(const Instance& instance,
                                      const std::map<LinkId, double>& required,
                                      const ServiceDesign& design, double tol) {
  std::vector<std::string> issues;
  const double q0 = instance.params.unit_capacity;
  std::map<LinkId, double> covered;  // by forward (lower) id
  for (std::size_t s = 0; s < design.lines.size(); ++s) {
    const LineDesign& ld = design.lines[s];
    const std::string who = "line " + std::to_string(s + 1);
    double widest = 0.0;
    for (std::size_t i = 0; i < ld.links.size(); ++i) {
      const Link& l = instance.link(ld.links[i]);
      const LinkId key = std::min(l.id, l.reverse.value_or(l.id));
      if (!required.count(l.id)) issues.push_back(who + ": link " + std::to_string(l.id) + " not required");
      covered[key] += ld.provided[i];
      widest = std::max(widest, ld.provided[i]);
      if (ld.provided[i] < q0 - tol) issues.push_back(who + ": provided capacity below q0");
      if (ld.provided[i] > ld.capacity + tol) issues.push_back(who + ": provided exceeds line capacity");
      if (std::fabs(ld.surplus[i] + ld.provided[i] - ld.capacity) > tol) {
        issues.push_back(who + ": surplus identity broken on link " + std::to_string(l.id));
      }
    }
    if (std::fabs(widest - ld.capacity) > tol) {
      issues.push_back(who + ": capacity differs from widest member link");
    }
  }
  for (const auto& [id, cap] : required) {
    const Link& l = instance.link(id);
    const LinkId key = std::min(l.id, l.reverse.value_or(l.id));
    if (covered[key] < cap - tol) {
      issues.push_back("link " + std::to_string(id) + ": coverage below requirement");
    }
  }
  try {
    extract_lines(instance, design);
  } catch (const MalformedPath& e) {
    issues.push_back(e.what());
  }
  return issues;
}

void write_design_csv_header(std::ostream& out) {
  out << "week,period,line_index,stop_sequence,capacity\n";
}

void write_design_csv(std::ostream& out, const Instance& instance, const ServiceDesign& design) {
  const std::vector<Line> lines = extract_lines(instance, design);
  for (std::size_t s = 0; s < lines.size(); ++s) {
    std::string stops;
    for (NodeId n : lines[s].stops) {
      if (!stops.empty()) stops += " - ";
      stops += instance.node(n).name;
    }
    out << design.week << ',' << detail::csv_field(design.period) << ',' << s + 1 << ','
        << detail::csv_field(stops) << ',' << detail::format_number(lines[s].capacity) << '\n';
  }
}

}  // namespace possplan::sp3
