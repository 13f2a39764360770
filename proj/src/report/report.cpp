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

#include "possplan/report/report.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "possplan/sp1/sp1.hpp"
#include "possplan/sp2/sp2.hpp"
#include "possplan/sp3/sp3.hpp"

namespace possplan::report {

namespace fs = std::filesystem;
using nlohmann::json;
using negotiation::CellResult;
using negotiation::CellSummary;

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kBest: return "best";
    case Variant::kFirst: return "first";
    case Variant::kPosition: return "position";
    case Variant::kPriority: return "priority";
  }
  return "?";
}

PlanSummary summarize(const Instance& instance, const sp1::PossessionPlan& plan,
                      const std::vector<CellResult>& cells) {
  PlanSummary s;
  s.allocation = sp1::evaluate_sp1(instance, plan);
  for (const CellResult& c : cells) s.cells.push_back(negotiation::summarize_cell(instance, c));
  return s;
}

PlanSummary InstanceRun::summary(const Instance& instance, Variant v) const {
  switch (v) {
    case Variant::kBest: {
      const auto& rec = result.best_record();
      return summarize(instance, rec.plan, rec.cells);
    }
    case Variant::kFirst: {
      const auto& rec = result.history.front();
      return summarize(instance, rec.plan, rec.cells);
    }
    case Variant::kPosition: return summarize(instance, position, position_cells);
    case Variant::kPriority: return summarize(instance, priority, priority_cells);
  }
  throw std::invalid_argument("unknown variant");
}

InstanceRun run_instance(const Instance& instance, const RunSettings& settings, int index,
                         const sp1::Sp1Result* first_allocation, std::ostream* log,
                         const std::vector<negotiation::IterationRecord>& resume,
                         std::function<void(const std::vector<negotiation::IterationRecord>&)>
                             on_iteration) {
  InstanceRun out;
  out.index = index;
  std::vector<DemandMatrix> demand =
      settings.nominal ? instance.demand
                       : negotiation::instance_demand(instance, settings.seed, index);
  negotiation::CellSolver cells(instance, demand);

  negotiation::RunOptions options;
  options.iterations = settings.iterations;
  options.demand = demand;
  options.cells = &cells;
  options.resume = resume;
  options.log = log;
  options.log_wall_time = settings.log_wall_time;
  options.first_allocation = first_allocation;
  options.on_iteration = std::move(on_iteration);
  out.result = negotiation::run(instance, options);

  negotiation::SolveCounts counts;
  out.position = sp1::position_based_plan(instance);
  out.position_cells = cells.solve(out.position, counts);
  out.priority = sp1::priority_based_plan(instance);
  out.priority_cells = cells.solve(out.priority, counts);
  return out;
}

std::optional<double> percent_delta(double value, double reference) {
  if (reference == 0.0) {
    if (value == 0.0) return 0.0;
    return std::nullopt;
  }
  return 100.0 * (value - reference) / reference;
}

const ReportRow* ComparisonReport::find(std::string_view table, std::string_view period,
                                        std::string_view component) const {
  for (const ReportRow& row : rows) {
    if (row.table == table && row.period == period && row.component == component) return &row;
  }
  return nullptr;
}

namespace {

struct Component {
  const char* name;
  double CellSummary::*field;
};

constexpr Component kMitigation[] = {
    {"activation_cost", &CellSummary::activation_cost},
    {"generalized_cost_pedestrian", &CellSummary::gc_walk},
    {"generalized_cost_metro", &CellSummary::gc_metro},
    {"generalized_cost_bus", &CellSummary::gc_bus},
    {"generalized_cost_train", &CellSummary::gc_train},
    {"generalized_cost_additional", &CellSummary::gc_additional},
    {"unsatisfied_demand", &CellSummary::unmet},
};

constexpr Component kLineDesign[] = {
    {"line_capacity", &CellSummary::line_capacity},
    {"link_capacity", &CellSummary::link_capacity},
    {"surplus", &CellSummary::surplus},
};

double period_sum(const PlanSummary& s, const std::string& period, double CellSummary::*field) {
  double sum = 0.0;
  for (const CellSummary& c : s.cells) {
    if (c.period == period) sum += c.*field;
  }
  return sum;
}

}  // namespace

ComparisonReport compare(const Instance& instance,
                         const std::vector<std::vector<PlanSummary>>& summaries) {
  if (summaries.empty()) throw std::invalid_argument("no instances to compare");
  ComparisonReport report;
  report.instance = instance.name;
  report.instances = static_cast<int>(summaries.size());

  // values[instance][variant]
  auto add_row = [&](std::string table, std::string period, std::string component,
                     const std::vector<std::array<double, 4>>& values) {
    ReportRow row;
    row.table = std::move(table);
    row.period = std::move(period);
    row.component = std::move(component);
    const double n = static_cast<double>(values.size());
    for (std::size_t v = 0; v < 4; ++v) {
      double sum = 0.0;
      double delta = 0.0;
      bool defined = true;
      for (const auto& per : values) {
        sum += per[v];
        const auto d = percent_delta(per[0], per[v]);
        if (d) {
          delta += *d;
        } else {
          defined = false;
        }
      }
      row.value[v] = sum / n;
      if (defined) row.delta[v] = delta / n;
    }
    report.rows.push_back(std::move(row));
  };

  auto collect = [&](auto&& get) {
    std::vector<std::array<double, 4>> values;
    for (const auto& per : summaries) {
      if (per.size() != 4) throw std::invalid_argument("one summary per variant expected");
      std::array<double, 4> a{};
      for (std::size_t v = 0; v < 4; ++v) a[v] = get(per[v]);
      values.push_back(a);
    }
    return values;
  };

  add_row("allocation", "all", "weighted_completion",
          collect([](const PlanSummary& s) { return s.allocation.completion; }));
  add_row("allocation", "all", "impact_on_passengers",
          collect([](const PlanSummary& s) { return s.allocation.disruption; }));
  add_row("allocation", "all", "total",
          collect([](const PlanSummary& s) { return s.allocation.total; }));
  for (const std::string& period : instance.periods) {
    for (const Component& c : kMitigation) {
      add_row("mitigation", period, c.name,
              collect([&](const PlanSummary& s) { return period_sum(s, period, c.field); }));
    }
  }
  for (const std::string& period : instance.periods) {
    for (const Component& c : kLineDesign) {
      add_row("line_design", period, c.name,
              collect([&](const PlanSummary& s) { return period_sum(s, period, c.field); }));
    }
  }
  return report;
}

namespace {

std::string fixed(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  if (std::fabs(v) * scale < 0.5) v = 0.0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string format_csv(const ComparisonReport& report, const std::vector<Variant>& against) {
  std::ostringstream out;
  out << "table,period,component,best";
  for (Variant v : against) out << ',' << to_string(v);
  for (Variant v : against) out << ",delta_" << to_string(v) << "_pct";
  out << '\n';
  for (const ReportRow& row : report.rows) {
    out << row.table << ',' << row.period << ',' << row.component << ','
        << fixed(row.value[0], 4);
    for (Variant v : against) out << ',' << fixed(row.value[static_cast<int>(v)], 4);
    for (Variant v : against) {
      const auto& d = row.delta[static_cast<int>(v)];
      out << ',' << (d ? fixed(*d, 2) : "n/a");
    }
    out << '\n';
  }
  return out.str();
}

std::string format_json(const ComparisonReport& report, const std::vector<Variant>& against) {
  json rows = json::array();
  for (const ReportRow& row : report.rows) {
    json values = {{"best", row.value[0]}};
    json deltas = json::object();
    for (Variant v : against) {
      const int i = static_cast<int>(v);
      values[to_string(v)] = row.value[i];
      deltas[to_string(v)] = row.delta[i] ? json(*row.delta[i]) : json("n/a");
    }
    rows.push_back({{"table", row.table},
                    {"period", row.period},
                    {"component", row.component},
                    {"values", values},
                    {"delta_pct", deltas}});
  }
  json doc = {{"instance", report.instance}, {"instances", report.instances}, {"rows", rows}};
  return doc.dump(1) + "\n";
}

namespace {

std::string two_digits(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", n);
  return buf;
}

fs::path instance_dir(const fs::path& dir, int index) {
  return dir / ("instance-" + two_digits(index));
}

fs::path iteration_dir(const fs::path& idir, int r) { return idir / "iterations" / two_digits(r); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_plan_dir(const fs::path& dir, const Instance& instance,
                    const sp1::PossessionPlan& plan, const std::vector<CellResult>& cells) {
  fs::create_directories(dir);
  std::ostringstream p, c, l, u, d;
  sp1::write_plan_csv(p, sp1::plan_rows(instance, plan));
  negotiation::write_cells_csv_header(c);
  sp2::write_link_csv_header(l);
  sp2::write_unmet_csv_header(u);
  sp3::write_design_csv_header(d);
  for (const CellResult& cell : cells) {
    negotiation::write_cells_csv(c, negotiation::summarize_cell(instance, cell));
    sp2::write_link_csv(l, instance, cell.mitigation);
    sp2::write_unmet_csv(u, cell.mitigation);
    sp3::write_design_csv(d, instance, cell.design);
  }
  write_file(dir / "plan.csv", p.str());
  write_file(dir / "cells.csv", c.str());
  write_file(dir / "links.csv", l.str());
  write_file(dir / "unmet.csv", u.str());
  write_file(dir / "lines.csv", d.str());
}

const std::vector<Variant> kAgainst = {Variant::kFirst, Variant::kPosition, Variant::kPriority};

json run_json(const Instance& instance, const RunSettings& settings,
              const std::vector<int>& best) {
  return {{"instance", instance.name},
          {"iterations", settings.iterations},
          {"seed", settings.seed},
          {"instances", settings.instances},
          {"demand", settings.nominal ? "nominal" : "sampled"},
          {"best_iteration", best}};
}

}  // namespace

void write_run(const fs::path& dir, const Instance& instance, const RunSettings& settings,
               const std::vector<InstanceRun>& runs) {
  fs::create_directories(dir);
  write_file(dir / "instance.json", serialize(instance));
  std::vector<int> best;
  std::vector<std::vector<PlanSummary>> summaries;
  for (const InstanceRun& run : runs) {
    const fs::path idir = instance_dir(dir, run.index);
    fs::create_directories(idir);
    write_file(idir / "history.json", negotiation::history_json(instance, run.result.history));
    for (const auto& rec : run.result.history) {
      write_plan_dir(iteration_dir(idir, rec.r), instance, rec.plan, rec.cells);
    }
    write_plan_dir(idir / "baselines" / "position", instance, run.position, run.position_cells);
    write_plan_dir(idir / "baselines" / "priority", instance, run.priority, run.priority_cells);

    const auto& rec = run.result.best_record();
    const auto rows = sp1::plan_rows(instance, rec.plan);
    std::ostringstream plan;
    sp1::write_plan_csv(plan, rows);
    write_file(idir / "plan.csv", plan.str());
    write_file(idir / "gantt.svg",
               sp1::render_gantt_svg(rows, instance.horizon,
                                     instance.name + ", iteration " + std::to_string(rec.r)));
    best.push_back(rec.r);

    std::vector<PlanSummary> per;
    for (Variant v : kVariants) per.push_back(run.summary(instance, v));
    summaries.push_back(std::move(per));
  }
  write_file(dir / "run.json", run_json(instance, settings, best).dump(1) + "\n");
  const ComparisonReport report = compare(instance, summaries);
  write_file(dir / "report.csv", format_csv(report, kAgainst));
  write_file(dir / "report.json", format_json(report, kAgainst));
}

namespace {

PlanSummary load_summary(const Instance& instance, const fs::path& dir) {
  std::ifstream plan_in(dir / "plan.csv", std::ios::binary);
  if (!plan_in) throw std::runtime_error("cannot read " + (dir / "plan.csv").string());
  const auto rows = sp1::read_plan_csv(plan_in);
  std::vector<int> starts;
  for (const Intervention& iv : instance.interventions) {
    int start = 0;
    for (const sp1::PlanRow& row : rows) {
      if (row.intervention == iv.id && (start == 0 || row.week < start)) start = row.week;
    }
    starts.push_back(start);
  }
  PlanSummary s;
  s.allocation = sp1::evaluate_sp1(instance, sp1::plan_from_starts(instance, starts));
  std::ifstream cells_in(dir / "cells.csv", std::ios::binary);
  if (!cells_in) throw std::runtime_error("cannot read " + (dir / "cells.csv").string());
  s.cells = negotiation::read_cells_csv(cells_in);
  return s;
}

}  // namespace

ComparisonReport load_report(const fs::path& dir) {
  const Instance instance = parse_instance(read_file(dir / "instance.json"), dir);
  json run;
  try {
    run = json::parse(read_file(dir / "run.json"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("run.json: ") + e.what());
  }
  const std::vector<int> best = run.at("best_iteration").get<std::vector<int>>();
  std::vector<std::vector<PlanSummary>> summaries;
  for (std::size_t i = 0; i < best.size(); ++i) {
    const fs::path idir = instance_dir(dir, static_cast<int>(i) + 1);
    std::vector<PlanSummary> per;
    per.push_back(load_summary(instance, iteration_dir(idir, best[i])));
    per.push_back(load_summary(instance, iteration_dir(idir, 1)));
    per.push_back(load_summary(instance, idir / "baselines" / "position"));
    per.push_back(load_summary(instance, idir / "baselines" / "priority"));
    summaries.push_back(std::move(per));
  }
  return compare(instance, summaries);
}

std::vector<InstanceRun> negotiate(const Instance& instance, const RunSettings& settings,
                                   const fs::path& dir, bool resume) {
  if (settings.instances < 1) throw std::invalid_argument("at least one instance required");
  fs::create_directories(dir);
  std::optional<sp1::Sp1Result> first;
  std::vector<InstanceRun> runs;
  for (int i = 1; i <= settings.instances; ++i) {
    const fs::path idir = instance_dir(dir, i);
    fs::create_directories(idir);
    std::vector<negotiation::IterationRecord> prior;
    if (resume && fs::exists(idir / "history.json")) {
      prior = negotiation::parse_history_json(instance, read_file(idir / "history.json"));
    }
    // The allocation of the first iteration does not depend on demand.
    if (prior.empty() && !first) first = sp1::solve_sp1(instance);
    std::ofstream log(idir / "log.jsonl", std::ios::binary | std::ios::trunc);
    const fs::path history = idir / "history.json";
    runs.push_back(run_instance(
        instance, settings, i, prior.empty() ? &*first : nullptr, &log, prior,
        [&](const std::vector<negotiation::IterationRecord>& h) {
          write_file(history, negotiation::history_json(instance, h));
        }));
  }
  write_run(dir, instance, settings, runs);
  return runs;
}

}  // namespace possplan::report
