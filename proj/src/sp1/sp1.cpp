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

#include "possplan/sp1/sp1.hpp"

#include <algorithm>
#include <cmath>

namespace possplan::sp1 {

using milp::RowSense;
using milp::Term;
using milp::VarRef;

TabuCoefficients::TabuCoefficients(std::vector<LinkId> links, int horizon)
    : links_(std::move(links)), horizon_(horizon) {
  on_one_.assign(links_.size() * static_cast<std::size_t>(horizon_), 0.0);
  on_zero_ = on_one_;
}

std::size_t TabuCoefficients::cell(LinkId link, int week) const {
  const auto it = std::find(links_.begin(), links_.end(), link);
  if (it == links_.end() || week < 1 || week > horizon_) {
    throw std::out_of_range("tabu cell outside the coefficient table");
  }
  return static_cast<std::size_t>(it - links_.begin()) * static_cast<std::size_t>(horizon_) +
         static_cast<std::size_t>(week - 1);
}

void TabuCoefficients::add(LinkId link, int week, double on_one, double on_zero) {
  if (on_one < 0.0 || on_zero < 0.0) throw std::invalid_argument("negative tabu weight");
  const std::size_t c = cell(link, week);
  on_one_[c] += on_one;
  on_zero_[c] += on_zero;
}

double TabuCoefficients::constant() const {
  double sum = 0.0;
  for (double v : on_zero_) sum += v;
  return sum;
}

bool TabuCoefficients::is_zero() const {
  auto zero = [](double v) { return v == 0.0; };
  return std::all_of(on_one_.begin(), on_one_.end(), zero) &&
         std::all_of(on_zero_.begin(), on_zero_.end(), zero);
}

double TabuCoefficients::evaluate(const PossessionPlan& plan) const {
  double sum = 0.0;
  for (LinkId l : links_) {
    for (int k = 1; k <= horizon_; ++k) {
      sum += plan.interrupted(l, k) ? on_one(l, k) : on_zero(l, k);
    }
  }
  return sum;
}

Sp1Objective evaluate_sp1(const Instance& instance, const PossessionPlan& plan,
                          const TabuCoefficients& tabu) {
  Sp1Objective obj;
  for (const Intervention& iv : instance.interventions) {
    obj.completion += iv.priority * (plan.start(iv.id) + iv.duration);
  }
  for (LinkId l : maintenance_links(instance)) {
    for (int k = 1; k <= instance.horizon; ++k) {
      if (plan.interrupted(l, k)) obj.disruption += instance.utilization.at(k);
    }
  }
  obj.tabu = tabu.evaluate(plan);
  const auto& a = instance.weights.alpha;
  obj.total = a[0] * obj.completion + a[1] * obj.disruption + a[2] * obj.tabu;
  return obj;
}

Sp1Model build_sp1(const Instance& instance, const TabuCoefficients& tabu) {
  const int T = instance.horizon;
  const auto& alpha = instance.weights.alpha;
  for (const Intervention& iv : instance.interventions) {
    if (iv.duration > iv.deadline || iv.duration >= T) {
      throw InfeasibleByConstruction("intervention " + std::to_string(iv.id) +
                                     " cannot fit before its deadline");
    }
  }

  Sp1Model m;
  milp::MilpModel& model = m.model;
  const std::vector<LinkId> maintained = maintenance_links(instance);
  auto is_maintained = [&](LinkId l) {
    return std::find(maintained.begin(), maintained.end(), l) != maintained.end();
  };

  auto x_of = [&](LinkId l) -> const std::vector<VarRef>& {
    return m.x[static_cast<std::size_t>(std::find(m.links.begin(), m.links.end(), l) -
                                        m.links.begin())];
  };

  double constant = 0.0;
  for (const Intervention& iv : instance.interventions) {
    const std::string id = std::to_string(iv.id);
    auto& row = m.y.emplace_back();
    for (int k = 1; k <= T; ++k) {
      row.push_back(model.add_binary("y_" + id + "_" + std::to_string(k)));
    }
    const VarRef t = model.add_continuous(1.0, T, "t_" + id);
    m.t.push_back(t);
    model.add_objective_term(t, alpha[0] * iv.priority);
    constant += alpha[0] * iv.priority * iv.duration;
  }

  // Start columns come first so branching fixes start weeks before cells.
  for (const Link& l : instance.links) {
    if (l.mode != Mode::kMetro) continue;
    m.links.push_back(l.id);
    auto& row = m.x.emplace_back();
    for (int k = 1; k <= T; ++k) {
      row.push_back(model.add_binary("x_" + std::to_string(l.id) + "_" + std::to_string(k)));
    }
  }

  // Disruption and tabu terms.
  const bool with_tabu = !tabu.links().empty();
  for (LinkId l : maintained) {
    const auto& x = x_of(l);
    for (int k = 1; k <= T; ++k) {
      model.add_objective_term(x[k - 1], alpha[1] * instance.utilization.at(k));
      if (with_tabu) model.add_objective_term(x[k - 1], alpha[2] * tabu.coefficient(l, k));
    }
  }
  if (with_tabu) constant += alpha[2] * tabu.constant();
  model.set_objective_constant(constant);

  for (std::size_t i = 0; i < instance.interventions.size(); ++i) {
    const Intervention& iv = instance.interventions[i];
    const std::string id = std::to_string(iv.id);
    const auto& y = m.y[i];
    const auto& x = x_of(iv.link);

    std::vector<Term> start{{m.t[i], 1.0}};
    for (int k = 1; k <= T; ++k) start.push_back({y[k - 1], -static_cast<double>(k)});
    model.add_constraint(std::move(start), RowSense::kEqual, 0.0, "start_" + id);
    model.add_constraint({{m.t[i], 1.0}}, RowSense::kLessEqual, T - iv.duration, "horizon_" + id);

    std::vector<Term> once;
    for (int k = 1; k <= T; ++k) once.push_back({y[k - 1], 1.0});
    model.add_constraint(std::move(once), RowSense::kEqual, 1.0, "once_" + id);

    for (int k = 1; k <= T; ++k) {
      const std::string ik = id + "_" + std::to_string(k);
      for (int v = 1; v <= T; ++v) {
        if (v < k) {
          model.add_constraint({{x[v - 1], 1.0}, {y[k - 1], 1.0}}, RowSense::kLessEqual, 1.0,
                               "before_" + ik + "_" + std::to_string(v));
        } else if (v >= k + iv.duration) {
          model.add_constraint({{x[v - 1], 1.0}, {y[k - 1], 1.0}}, RowSense::kLessEqual, 1.0,
                               "after_" + ik + "_" + std::to_string(v));
        } else {
          model.add_constraint({{x[v - 1], 1.0}, {y[k - 1], -1.0}}, RowSense::kGreaterEqual, 0.0,
                               "during_" + ik + "_" + std::to_string(v));
        }
      }
    }
    // Aggregated form of the rows above; implied for integral y, tighter in the relaxation.
    for (int v = 1; v <= T; ++v) {
      std::vector<Term> cover{{x[v - 1], 1.0}};
      for (int k = std::max(1, v - iv.duration + 1); k <= v; ++k) cover.push_back({y[k - 1], -1.0});
      model.add_constraint(std::move(cover), RowSense::kGreaterEqual, 0.0,
                           "cover_" + id + "_" + std::to_string(v));
    }
  }

  // A cell can only be interrupted by an intervention on its link that covers it.
  for (LinkId l : maintained) {
    for (int v = 1; v <= T; ++v) {
      std::vector<Term> cover{{x_of(l)[v - 1], 1.0}};
      for (std::size_t i = 0; i < instance.interventions.size(); ++i) {
        const Intervention& iv = instance.interventions[i];
        if (iv.link != l) continue;
        for (int k = std::max(1, v - iv.duration + 1); k <= v; ++k) {
          cover.push_back({m.y[i][k - 1], -1.0});
        }
      }
      model.add_constraint(std::move(cover), RowSense::kLessEqual, 0.0,
                           "covered_" + std::to_string(l) + "_" + std::to_string(v));
    }
  }

  for (LinkId l : maintained) {
    const int theta = link_deadline(instance, l);
    if (theta >= T) continue;
    std::vector<Term> late;
    for (int k = theta + 1; k <= T; ++k) late.push_back({x_of(l)[k - 1], 1.0});
    model.add_constraint(std::move(late), RowSense::kEqual, 0.0,
                         "deadline_" + std::to_string(l));
  }

  for (int k = 1; k <= T; ++k) {
    const std::string wk = std::to_string(k);
    std::vector<Term> count;
    for (const auto& x : m.x) count.push_back({x[k - 1], 1.0});
    model.add_constraint(std::move(count), RowSense::kLessEqual,
                         instance.params.max_interrupted, "max_interrupted_" + wk);
    for (std::size_t a = 0; a < maintained.size(); ++a) {
      for (std::size_t b = a + 1; b < maintained.size(); ++b) {
        if (links_share_node(instance.link(maintained[a]), instance.link(maintained[b]))) continue;
        model.add_constraint({{x_of(maintained[a])[k - 1], 1.0}, {x_of(maintained[b])[k - 1], 1.0}},
                             RowSense::kLessEqual, 1.0,
                             "adjacency_" + std::to_string(maintained[a]) + "_" +
                                 std::to_string(maintained[b]) + "_" + wk);
      }
    }
  }

  for (std::size_t p = 0; p < m.links.size(); ++p) {
    if (is_maintained(m.links[p])) continue;
    for (int k = 1; k <= T; ++k) {
      model.add_constraint({{m.x[p][k - 1], 1.0}}, RowSense::kEqual, 0.0,
                           "idle_" + std::to_string(m.links[p]) + "_" + std::to_string(k));
    }
  }
  return m;
}

Sp1Result solve_sp1(const Instance& instance, const TabuCoefficients& tabu,
                    const milp::SolveOptions& options) {
  const Sp1Model m = build_sp1(instance, tabu);
  Sp1Result result;
  result.solution = milp::solve(m.model, options);
  if (!result.solution.has_assignment()) {
    throw Sp1Infeasible(std::string("allocation model has no feasible plan (") +
                        milp::to_string(result.solution.status) + ")");
  }
  PossessionPlan plan(instance);
  for (std::size_t p = 0; p < m.links.size(); ++p) {
    for (int k = 1; k <= instance.horizon; ++k) {
      plan.set_interrupted(m.links[p], k, result.solution.value(m.x[p][k - 1]) > 0.5);
    }
  }
  for (std::size_t i = 0; i < instance.interventions.size(); ++i) {
    for (int k = 1; k <= instance.horizon; ++k) {
      if (result.solution.value(m.y[i][k - 1]) > 0.5) {
        plan.set_start(instance.interventions[i].id, k);
      }
    }
  }
  result.plan = std::move(plan);
  result.objective = evaluate_sp1(instance, result.plan, tabu);
  return result;
}

}  // namespace possplan::sp1
