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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "possplan/core/instance.hpp"
#include "possplan/negotiation/negotiation.hpp"
#include "possplan/report/report.hpp"
#include "possplan/sp1/plan.hpp"
#include "possplan/sp1/sp1.hpp"
#include "possplan/sp2/sp2.hpp"
#include "possplan/sp3/sp3.hpp"

namespace possplan::cli {

namespace {

Instance load_valid(const std::string& path) {
  Instance instance = load_instance(path);
  validate(instance);
  return instance;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) throw std::runtime_error("cannot write " + path);
}

int emit_plan(const Instance& instance, const sp1::PossessionPlan& plan, const std::string& out_path,
              const std::string& gantt_path, const std::string& title, std::ostream& out,
              std::ostream& err) {
  const auto rows = sp1::plan_rows(instance, plan);
  std::ostringstream csv;
  sp1::write_plan_csv(csv, rows);
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_text(out_path, csv.str());
  }
  if (!gantt_path.empty()) {
    write_text(gantt_path, sp1::render_gantt_svg(rows, instance.horizon, title));
  }
  for (const sp1::PlanViolation& v : sp1::check_plan(instance, plan)) {
    err << "warning: " << v.rule << ": " << v.detail << '\n';
  }
  const sp1::Sp1Objective obj = sp1::evaluate_sp1(instance, plan);
  int last = 0;
  for (const auto& row : rows) last = std::max(last, row.week);
  err << "completion " << obj.completion << ", disruption " << obj.disruption << ", total "
      << obj.total << ", last week " << last << '\n';
  return kOk;
}

sp1::PossessionPlan baseline_plan(const Instance& instance, const std::string& strategy) {
  if (strategy == "position") return sp1::position_based_plan(instance);
  return sp1::priority_based_plan(instance);
}

std::vector<report::Variant> parse_against(const std::string& text) {
  std::vector<report::Variant> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "first") {
      out.push_back(report::Variant::kFirst);
    } else if (item == "position") {
      out.push_back(report::Variant::kPosition);
    } else if (item == "priority") {
      out.push_back(report::Variant::kPriority);
    } else {
      throw CLI::ValidationError("--against", "unknown reference '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--against", "empty list");
  return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metro possession planning with multimodal mitigation", "possplan"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::string instance_path;
  std::string strategy;
  std::string out_path;
  std::string gantt_path;

  auto* validate_cmd = app.add_subcommand("validate", "Check an instance file");
  validate_cmd->add_option("instance", instance_path, "Instance JSON")->required();

  auto* plan_cmd = app.add_subcommand("plan", "Allocate possessions (tabu-free) or build a baseline");
  plan_cmd->add_option("instance", instance_path, "Instance JSON")->required();
  plan_cmd->add_option("--baseline", strategy, "Greedy strategy instead of the optimizer")
      ->check(CLI::IsMember({"position", "priority"}));
  plan_cmd->add_option("--out", out_path, "Plan CSV (stdout when omitted)");
  plan_cmd->add_option("--gantt", gantt_path, "Also write a Gantt SVG");

  auto* baseline_cmd = app.add_subcommand("baseline", "Greedy baseline plan");
  baseline_cmd->add_option("instance", instance_path, "Instance JSON")->required();
  baseline_cmd->add_option("--strategy", strategy, "position or priority")
      ->required()
      ->check(CLI::IsMember({"position", "priority"}));
  baseline_cmd->add_option("--out", out_path, "Plan CSV (stdout when omitted)");
  baseline_cmd->add_option("--gantt", gantt_path, "Also write a Gantt SVG");

  report::RunSettings settings;
  bool resume = false;
  auto* negotiate_cmd = app.add_subcommand("negotiate", "Run the negotiation and the baselines");
  negotiate_cmd->add_option("instance", instance_path, "Instance JSON")->required();
  negotiate_cmd->add_option("--iterations,-R", settings.iterations, "Negotiation iterations")
      ->check(CLI::PositiveNumber);
  negotiate_cmd->add_option("--seed", settings.seed, "Demand sampling seed");
  negotiate_cmd->add_option("--instances", settings.instances, "Sampled demand instances")
      ->check(CLI::PositiveNumber);
  negotiate_cmd->add_flag("--nominal", settings.nominal, "Use the nominal o/d matrices");
  negotiate_cmd->add_flag("--resume", resume, "Replay histories already in the output directory");
  negotiate_cmd->add_flag("--wall-time", settings.log_wall_time, "Record wall time in the logs");
  negotiate_cmd->add_option("--out", out_path, "Output directory")->required();

  std::string run_dir;
  std::string against = "first,position,priority";
  std::string format = "csv";
  auto* report_cmd = app.add_subcommand("report", "Comparison tables from a run directory");
  report_cmd->add_option("run-dir", run_dir, "Directory written by negotiate")->required();
  report_cmd->add_option("--against", against, "Comma list of first, position, priority");
  report_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  report_cmd->add_option("--out", out_path, "Report file (stdout when omitted)");

  std::string plan_csv;
  int horizon = 0;
  std::string title;
  auto* gantt_cmd = app.add_subcommand("gantt", "Render a plan CSV as SVG");
  gantt_cmd->add_option("plan", plan_csv, "Plan CSV")->required();
  gantt_cmd->add_option("--out", out_path, "SVG file")->required();
  gantt_cmd->add_option("--horizon", horizon, "Weeks shown (last planned week when omitted)");
  gantt_cmd->add_option("--title", title, "Chart title");

  std::vector<report::Variant> references;
  try {
    app.parse(argc, argv);
    if (report_cmd->parsed()) references = parse_against(against);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kUsage;
  }

  try {
    if (validate_cmd->parsed()) {
      const Instance instance = load_valid(instance_path);
      out << instance.name << ": " << instance.nodes.size() << " nodes, "
          << instance.links.size() << " links, " << instance.interventions.size()
          << " interventions, " << instance.horizon << " weeks\n";
      return kOk;
    }
    if (plan_cmd->parsed() || baseline_cmd->parsed()) {
      const Instance instance = load_valid(instance_path);
      if (!strategy.empty()) {
        return emit_plan(instance, baseline_plan(instance, strategy), out_path, gantt_path,
                         instance.name + ", " + strategy + " baseline", out, err);
      }
      const sp1::Sp1Result r = sp1::solve_sp1(instance);
      return emit_plan(instance, r.plan, out_path, gantt_path, instance.name, out, err);
    }
    if (negotiate_cmd->parsed()) {
      const Instance instance = load_valid(instance_path);
      const auto runs = report::negotiate(instance, settings, out_path, resume);
      for (const auto& run : runs) {
        const auto& best = run.result.best_record();
        out << "instance " << run.index << ": best iteration " << best.r
            << ", aggregate SP2 objective " << best.sp2_aggregate << '\n';
      }
      return kOk;
    }
    if (report_cmd->parsed()) {
      const report::ComparisonReport rep = report::load_report(run_dir);
      const std::string text = format == "json" ? report::format_json(rep, references)
                                                : report::format_csv(rep, references);
      if (out_path.empty()) {
        out << text;
      } else {
        write_text(out_path, text);
      }
      return kOk;
    }
    if (gantt_cmd->parsed()) {
      std::ifstream in(plan_csv, std::ios::binary);
      if (!in) throw std::runtime_error("cannot read " + plan_csv);
      const auto rows = sp1::read_plan_csv(in);
      int weeks = horizon;
      if (weeks <= 0) {
        for (const auto& row : rows) weeks = std::max(weeks, row.week);
      }
      write_text(out_path, sp1::render_gantt_svg(rows, weeks, title));
      return kOk;
    }
  } catch (const ValidationError& e) {
    err << "invalid instance: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const sp1::InfeasibleByConstruction& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const sp1::Sp1Infeasible& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const sp2::Sp2SolveError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const sp3::Sp3Infeasible& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const negotiation::NegotiationError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kUsage;
}

}  // namespace possplan::cli
