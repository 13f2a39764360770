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

#include "possplan/negotiation/negotiation.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>

#include <nlohmann/json.hpp>

#include "core/csv.hpp"

namespace possplan::negotiation {

using nlohmann::json;

std::vector<double> gamma(const std::vector<IterationRecord>& history, int r) {
  if (r < 1) throw std::invalid_argument("gamma needs r >= 1");
  if (static_cast<int>(history.size()) < r - 1) {
    throw std::invalid_argument("history shorter than r - 1");
  }
  std::vector<double> g(static_cast<std::size_t>(r), 0.0);
  for (int p = 1; p < r; ++p) {
    g[static_cast<std::size_t>(p)] = history[static_cast<std::size_t>(p - 1)].kpis.sum() / (r - p);
  }
  return g;
}

sp1::TabuCoefficients tabu_coefficients(const Instance& instance,
                                        const std::vector<IterationRecord>& history, int r) {
  const std::vector<LinkId> links = sp1::maintenance_links(instance);
  sp1::TabuCoefficients tabu(links, instance.horizon);
  const std::vector<double> g = gamma(history, r);
  for (int p = 1; p < r; ++p) {
    const double weight = g[static_cast<std::size_t>(p)];
    if (weight == 0.0) continue;
    const sp1::PossessionPlan& past = history[static_cast<std::size_t>(p - 1)].plan;
    for (LinkId l : links) {
      for (int k = 1; k <= instance.horizon; ++k) {
        // delta = 1 - |x_p - x| is x when x_p = 1 and 1 - x otherwise.
        if (past.interrupted(l, k)) {
          tabu.add(l, k, weight, 0.0);
        } else {
          tabu.add(l, k, 0.0, weight);
        }
      }
    }
  }
  return tabu;
}

int select_best(const std::vector<IterationRecord>& history) {
  if (history.empty()) throw std::invalid_argument("empty history");
  int best = 0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].sp2_aggregate < history[static_cast<std::size_t>(best)].sp2_aggregate) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

double kpi_activation_cost(const Instance& instance, const sp2::MitigationSolution& solution) {
  const bool with_bus = instance.params.cost_kpi_scope == CostKpiScope::kActivatableAndBus;
  double sum = 0.0;
  for (std::size_t l = 0; l < instance.links.size(); ++l) {
    const Link& link = instance.links[l];
    const bool counted =
        link.mode == Mode::kActivatable || (with_bus && link.mode == Mode::kBus);
    if (counted && link.activation_cost) sum += *link.activation_cost * solution.units[l];
  }
  return sum;
}

Kpis compute_kpis(const Instance& instance, const std::vector<CellResult>& cells) {
  Kpis k;
  for (const CellResult& c : cells) {
    k.unmet_ratio += sp2::unmet_fraction(c.mitigation);
    k.activation_cost += kpi_activation_cost(instance, c.mitigation);
    k.surplus += c.design.components.surplus;
  }
  return k;
}

CellSolver::CellSolver(const Instance& instance, std::vector<DemandMatrix> demand,
                       milp::SolveOptions options)
    : instance_(instance), demand_(std::move(demand)), options_(std::move(options)) {
  if (demand_.size() != instance_.periods.size()) {
    throw std::invalid_argument("one demand matrix per period expected");
  }
}

const CellResult& CellSolver::cell(const sp1::PossessionPlan& plan, int week, std::size_t period,
                                   SolveCounts& counts) {
  ++counts.sp2;
  ++counts.sp3;
  // The cell depends on the week only through g and the interrupted links.
  Key key{period, instance_.utilization.at(week), plan.interrupted_links(week)};
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    CellResult c;
    const DemandMatrix d = effective_demand(demand_[period], instance_.utilization, week);
    c.mitigation = sp2::solve_sp2(instance_, plan, week, d, {}, options_);
    ++counts.sp2_distinct;
    c.design = sp3::solve_sp3(instance_, sp2::required_capacities(instance_, c.mitigation),
                              options_);
    ++counts.sp3_distinct;
    it = cache_.emplace(std::move(key), std::move(c)).first;
  }
  return it->second;
}

std::vector<CellResult> CellSolver::solve(const sp1::PossessionPlan& plan, SolveCounts& counts) {
  std::vector<CellResult> cells;
  for (int k = 1; k <= instance_.horizon; ++k) {
    for (std::size_t b = 0; b < instance_.periods.size(); ++b) {
      CellResult c = cell(plan, k, b, counts);
      c.week = k;
      c.period = instance_.periods[b];
      c.mitigation.week = k;
      c.mitigation.period = c.period;
      c.design.week = k;
      c.design.period = c.period;
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

namespace {

double aggregate(const std::vector<CellResult>& cells) {
  double sum = 0.0;
  for (const CellResult& c : cells) sum += c.mitigation.objective;
  return sum;
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-9 * (1.0 + std::fabs(b)); }

void log_record(std::ostream& out, const IterationRecord& rec, const RunOptions& options,
                double seconds) {
  json j;
  j["r"] = rec.r;
  j["sp1_objective"] = rec.sp1_objective.total;
  j["chi"] = rec.kpis.unmet_ratio;
  j["c"] = rec.kpis.activation_cost;
  j["mu"] = rec.kpis.surplus;
  j["sp2_aggregate"] = rec.sp2_aggregate;
  j["solves"] = rec.counts.total();
  if (options.log_wall_time) j["wall_time_s"] = seconds;
  out << j.dump() << '\n' << std::flush;
}

}  // namespace

NegotiationResult run(const Instance& instance, const RunOptions& options) {
  const int R = options.iterations > 0 ? options.iterations : instance.params.iterations;
  if (R < 1) throw std::invalid_argument("negotiation needs at least one iteration");
  if (static_cast<int>(options.resume.size()) > R) {
    throw std::invalid_argument("resumed history is longer than the iteration budget");
  }
  std::optional<CellSolver> own;
  if (!options.cells) {
    own.emplace(instance, options.demand.empty() ? instance.demand : options.demand,
                options.solve_options);
  }
  CellSolver& cells = options.cells ? *options.cells : *own;
  NegotiationResult result;

  for (const IterationRecord& stored : options.resume) {
    const int r = static_cast<int>(result.history.size()) + 1;
    IterationRecord rec = stored;
    rec.r = r;
    rec.plan.iteration = r;
    rec.counts = {};
    rec.counts.sp1 = 1;
    try {
      rec.cells = cells.solve(rec.plan, rec.counts);
    } catch (const std::exception& e) {
      throw NegotiationError(r, e.what());
    }
    rec.kpis = compute_kpis(instance, rec.cells);
    rec.sp2_aggregate = aggregate(rec.cells);
    if (!close(rec.kpis.unmet_ratio, stored.kpis.unmet_ratio) ||
        !close(rec.kpis.activation_cost, stored.kpis.activation_cost) ||
        !close(rec.kpis.surplus, stored.kpis.surplus) ||
        !close(rec.sp2_aggregate, stored.sp2_aggregate)) {
      throw NegotiationError(r, "resumed history does not match the recomputed solutions");
    }
    if (options.log) log_record(*options.log, rec, options, 0.0);
    result.history.push_back(std::move(rec));
  }

  for (int r = static_cast<int>(result.history.size()) + 1; r <= R; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.r = r;
    try {
      const sp1::TabuCoefficients tabu = tabu_coefficients(instance, result.history, r);
      if (r == 1 && options.first_allocation) {
        rec.plan = options.first_allocation->plan;
        rec.sp1_objective = options.first_allocation->objective;
      } else {
        sp1::Sp1Result alloc = sp1::solve_sp1(instance, tabu, options.solve_options);
        rec.plan = std::move(alloc.plan);
        rec.sp1_objective = alloc.objective;
        rec.counts.sp1_distinct = 1;
      }
      rec.counts.sp1 = 1;
      rec.plan.iteration = r;
      rec.cells = cells.solve(rec.plan, rec.counts);
    } catch (const std::exception& e) {
      throw NegotiationError(r, e.what());
    }
    rec.kpis = compute_kpis(instance, rec.cells);
    rec.sp2_aggregate = aggregate(rec.cells);
    if (options.log) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      log_record(*options.log, rec, options, dt.count());
    }
    result.history.push_back(std::move(rec));
    if (options.on_iteration) options.on_iteration(result.history);
  }
  result.best = select_best(result.history);
  return result;
}

std::vector<DemandMatrix> instance_demand(const Instance& instance, std::uint64_t seed, int index) {
  if (index < 1) throw std::invalid_argument("instance index is 1-based");
  return sample_od(instance, seed + static_cast<std::uint64_t>(index - 1));
}

std::string history_json(const Instance& instance, const std::vector<IterationRecord>& history) {
  json doc = json::array();
  for (const IterationRecord& rec : history) {
    json starts = json::object();
    for (const Intervention& iv : instance.interventions) {
      starts[std::to_string(iv.id)] = rec.plan.start(iv.id);
    }
    doc.push_back({
        {"r", rec.r},
        {"starts", starts},
        {"sp1", {{"completion", rec.sp1_objective.completion},
                 {"disruption", rec.sp1_objective.disruption},
                 {"tabu", rec.sp1_objective.tabu},
                 {"total", rec.sp1_objective.total}}},
        {"kpis", {{"chi", rec.kpis.unmet_ratio},
                  {"c", rec.kpis.activation_cost},
                  {"mu", rec.kpis.surplus}}},
        {"sp2_aggregate", rec.sp2_aggregate},
    });
  }
  return doc.dump(1) + "\n";
}

std::vector<IterationRecord> parse_history_json(const Instance& instance, std::string_view text) {
  std::vector<IterationRecord> out;
  try {
    const json doc = json::parse(text);
    for (const json& j : doc) {
      IterationRecord rec;
      rec.r = j.at("r").get<int>();
      if (rec.r != static_cast<int>(out.size()) + 1) {
        throw ParseError("history iterations are not consecutive");
      }
      std::vector<int> starts;
      for (const Intervention& iv : instance.interventions) {
        starts.push_back(j.at("starts").at(std::to_string(iv.id)).get<int>());
      }
      rec.plan = sp1::plan_from_starts(instance, starts);
      rec.plan.iteration = rec.r;
      const json& s = j.at("sp1");
      rec.sp1_objective.completion = s.at("completion").get<double>();
      rec.sp1_objective.disruption = s.at("disruption").get<double>();
      rec.sp1_objective.tabu = s.at("tabu").get<double>();
      rec.sp1_objective.total = s.at("total").get<double>();
      const json& k = j.at("kpis");
      rec.kpis.unmet_ratio = k.at("chi").get<double>();
      rec.kpis.activation_cost = k.at("c").get<double>();
      rec.kpis.surplus = k.at("mu").get<double>();
      rec.sp2_aggregate = j.at("sp2_aggregate").get<double>();
      out.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("history: ") + e.what());
  }
  return out;
}

CellSummary summarize_cell(const Instance& instance, const CellResult& cell) {
  const sp2::MitigationSolution& m = cell.mitigation;
  CellSummary c;
  c.week = cell.week;
  c.period = cell.period;
  c.sp2_objective = m.objective;
  c.generalized_cost = m.components.generalized_cost;
  c.activation_cost = m.components.activation_cost;
  c.activations = m.components.activations;
  c.unmet = m.components.unmet;
  c.unmet_fraction = sp2::unmet_fraction(m);
  c.kpi_activation_cost = kpi_activation_cost(instance, m);
  for (std::size_t l = 0; l < instance.links.size(); ++l) {
    const Link& link = instance.links[l];
    const double gc = link.cost * m.flow[l];
    switch (link.mode) {
      case Mode::kWalk: c.gc_walk += gc; break;
      case Mode::kMetro: c.gc_metro += gc; break;
      case Mode::kBus: (link.tag == "train" ? c.gc_train : c.gc_bus) += gc; break;
      case Mode::kActivatable: c.gc_additional += gc; break;
    }
  }
  const sp3::ServiceDesign& d = cell.design;
  c.lines = static_cast<int>(d.lines.size());
  c.line_capacity = d.components.line_capacity;
  c.link_capacity = d.components.link_capacity;
  c.surplus = d.components.surplus;
  c.sp3_objective = d.objective;
  return c;
}

namespace {

constexpr const char* kCellColumns[] = {
    "week", "period", "sp2_objective", "generalized_cost", "activation_cost", "activations",
    "unmet", "unmet_fraction", "kpi_activation_cost", "gc_walk", "gc_metro", "gc_bus",
    "gc_train", "gc_additional", "lines", "line_capacity", "link_capacity", "surplus",
    "sp3_objective"};

// Every numeric column in file order.
template <typename Summary, typename F>
void for_each_number(Summary& c, F&& f) {
  f(c.sp2_objective);
  f(c.generalized_cost);
  f(c.activation_cost);
  f(c.activations);
  f(c.unmet);
  f(c.unmet_fraction);
  f(c.kpi_activation_cost);
  f(c.gc_walk);
  f(c.gc_metro);
  f(c.gc_bus);
  f(c.gc_train);
  f(c.gc_additional);
}

template <typename Summary, typename F>
void for_each_design_number(Summary& c, F&& f) {
  f(c.line_capacity);
  f(c.link_capacity);
  f(c.surplus);
  f(c.sp3_objective);
}

}  // namespace

void write_cells_csv_header(std::ostream& out) {
  bool first = true;
  for (const char* name : kCellColumns) {
    out << (first ? "" : ",") << name;
    first = false;
  }
  out << '\n';
}

void write_cells_csv(std::ostream& out, const CellSummary& c) {
  out << c.week << ',' << detail::csv_field(c.period);
  for_each_number(c, [&](double v) { out << ',' << detail::format_number(v); });
  out << ',' << c.lines;
  for_each_design_number(c, [&](double v) { out << ',' << detail::format_number(v); });
  out << '\n';
}

std::vector<CellSummary> read_cells_csv(std::istream& in) {
  const auto rows = detail::read_csv(in);
  constexpr std::size_t kColumns = std::size(kCellColumns);
  if (rows.empty() || rows[0].size() != kColumns) throw ParseError("cells: bad header");
  for (std::size_t i = 0; i < kColumns; ++i) {
    if (rows[0][i] != kCellColumns[i]) throw ParseError("cells: bad header");
  }
  std::vector<CellSummary> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != kColumns) throw ParseError("cells: row " + std::to_string(r) + " width");
    std::size_t i = 0;
    auto number = [&](double& v) {
      const std::string& field = row[i++];
      char* end = nullptr;
      v = std::strtod(field.c_str(), &end);
      if (field.empty() || *end != '\0') throw ParseError("cells: bad number '" + field + "'");
    };
    CellSummary c;
    double week = 0.0, lines = 0.0;
    number(week);
    c.week = static_cast<int>(week);
    c.period = row[i++];
    for_each_number(c, number);
    number(lines);
    c.lines = static_cast<int>(lines);
    for_each_design_number(c, number);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace possplan::negotiation
