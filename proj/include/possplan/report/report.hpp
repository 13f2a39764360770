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

#ifndef POSSPLAN_REPORT_REPORT_HPP_
#define POSSPLAN_REPORT_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "possplan/core/instance.hpp"
#include "possplan/negotiation/negotiation.hpp"
#include "possplan/sp1/plan.hpp"

namespace possplan::report {

// Plans compared in a report.
enum class Variant { kBest, kFirst, kPosition, kPriority };
inline constexpr Variant kVariants[] = {Variant::kBest, Variant::kFirst, Variant::kPosition,
                                        Variant::kPriority};
const char* to_string(Variant v);

// Everything the report needs from one plan: its allocation terms and the
// per-cell digests.
struct PlanSummary {
  sp1::Sp1Objective allocation;  // tabu term excluded
  std::vector<negotiation::CellSummary> cells;
};

PlanSummary summarize(const Instance& instance, const sp1::PossessionPlan& plan,
                      const std::vector<negotiation::CellResult>& cells);

// One sampled demand instance of a comparison run.
struct InstanceRun {
  int index = 1;
  negotiation::NegotiationResult result;
  sp1::PossessionPlan position;
  sp1::PossessionPlan priority;
  std::vector<negotiation::CellResult> position_cells;
  std::vector<negotiation::CellResult> priority_cells;

  PlanSummary summary(const Instance& instance, Variant v) const;
};

struct RunSettings {
  int iterations = 10;
  std::uint64_t seed = 1;
  int instances = 1;
  bool nominal = false;  // nominal demand instead of sampled matrices
  bool log_wall_time = false;
};

// Negotiation plus both baselines on the demand of instance `index`.
// `log` receives the JSON-lines iteration records.
InstanceRun run_instance(const Instance& instance, const RunSettings& settings, int index,
                         const sp1::Sp1Result* first_allocation, std::ostream* log,
                         const std::vector<negotiation::IterationRecord>& resume = {},
                         std::function<void(const std::vector<negotiation::IterationRecord>&)>
                             on_iteration = {});

struct ReportRow {
  std::string table;      // allocation, mitigation, line_design
  std::string period;     // "all" for allocation rows
  std::string component;
  // Mean over instances, indexed by Variant.
  double value[4] = {0.0, 0.0, 0.0, 0.0};
  // Mean percentage delta of best against each variant; empty when undefined.
  std::optional<double> delta[4];
};

struct ComparisonReport {
  std::string instance;
  int instances = 0;
  std::vector<ReportRow> rows;

  const ReportRow* find(std::string_view table, std::string_view period,
                        std::string_view component) const;
};

// Per instance, one summary per Variant (in kVariants order).
ComparisonReport compare(const Instance& instance,
                         const std::vector<std::vector<PlanSummary>>& summaries);

// Relative change of `value` against `reference` in percent. Zero against a
// zero reference is 0; anything else against zero is undefined.
std::optional<double> percent_delta(double value, double reference);

std::string format_csv(const ComparisonReport& report, const std::vector<Variant>& against);
std::string format_json(const ComparisonReport& report, const std::vector<Variant>& against);

// Run directory:
//   run.json, instance.json, report.csv, report.json
//   instance-NN/{log.jsonl, history.json, plan.csv, gantt.svg}
//   instance-NN/iterations/RR/{plan.csv, cells.csv, links.csv, unmet.csv, lines.csv}
//   instance-NN/baselines/{position,priority}/<same files>
void write_run(const std::filesystem::path& dir, const Instance& instance,
               const RunSettings& settings, const std::vector<InstanceRun>& runs);

// Rebuilds the comparison from the exported files only.
ComparisonReport load_report(const std::filesystem::path& dir);

// Full pipeline of `negotiate`: runs every instance and writes the directory.
// Per-instance logs stream into the directory as iterations finish. With
// `resume`, histories found in the directory are replayed first.
std::vector<InstanceRun> negotiate(const Instance& instance, const RunSettings& settings,
                                   const std::filesystem::path& dir, bool resume = false);

}  // namespace possplan::report

#endif  // POSSPLAN_REPORT_REPORT_HPP_
