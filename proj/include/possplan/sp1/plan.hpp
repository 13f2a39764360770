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

#ifndef POSSPLAN_SP1_PLAN_HPP_
#define POSSPLAN_SP1_PLAN_HPP_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "possplan/core/instance.hpp"

namespace possplan::sp1 {

// Weekly interruption indicators on every metro link plus the start week
// of every intervention (0 while unscheduled).
class PossessionPlan {
 public:
  PossessionPlan() = default;
  // All-zero plan over the instance's metro links.
  explicit PossessionPlan(const Instance& instance);

  int horizon() const { return horizon_; }
  const std::vector<LinkId>& links() const { return links_; }
  const std::vector<InterventionId>& interventions() const { return interventions_; }

  // False for weeks outside the horizon and links outside the plan.
  bool interrupted(LinkId link, int week) const;
  void set_interrupted(LinkId link, int week, bool value);
  std::vector<LinkId> interrupted_links(int week) const;

  int start(InterventionId id) const;
  void set_start(InterventionId id, int week);

  // Iteration of the negotiation that produced the plan (1-based).
  int iteration = 1;

  friend bool operator==(const PossessionPlan&, const PossessionPlan&) = default;

 private:
  int link_position(LinkId link) const;
  int intervention_position(InterventionId id) const;

  int horizon_ = 0;
  std::vector<LinkId> links_;
  std::vector<std::uint8_t> x_;  // [link position][week - 1]
  std::vector<InterventionId> interventions_;
  std::vector<int> start_;
};

// Builds the non-preemptive plan implied by one start week per intervention
// (given in instance order).
PossessionPlan plan_from_starts(const Instance& instance, const std::vector<int>& starts);

struct PlanViolation {
  std::string rule;
  std::string detail;
};

// Independent feasibility audit. Rule names: "single-start", "horizon",
// "deadline", "max-interrupted", "adjacency", "no-preemption",
// "non-maintenance-link".
std::vector<PlanViolation> check_plan(const Instance& instance, const PossessionPlan& plan);

// Metro links that carry at least one intervention.
std::vector<LinkId> maintenance_links(const Instance& instance);

// True when the two links have an endpoint in common.
bool links_share_node(const Link& a, const Link& b);

// Latest allowed interruption week of a maintenance link (largest deadline
// among its interventions).
int link_deadline(const Instance& instance, LinkId link);

// Greedy baselines. Deadlines are not enforced; check_plan reports them.
class BaselineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
PossessionPlan position_based_plan(const Instance& instance);
PossessionPlan priority_based_plan(const Instance& instance);

// Hop distance between two metro links over the undirected metro graph
// (0 when they share a node).
int link_hop_distance(const Instance& instance, LinkId a, LinkId b);

// One row per (intervention, occupied week).
struct PlanRow {
  int week = 0;
  LinkId link = 0;
  InterventionId intervention = 0;
  int priority = 0;

  friend bool operator==(const PlanRow&, const PlanRow&) = default;
};

std::vector<PlanRow> plan_rows(const Instance& instance, const PossessionPlan& plan);
void write_plan_csv(std::ostream& out, const std::vector<PlanRow>& rows);
std::vector<PlanRow> read_plan_csv(std::istream& in);

// Gantt chart: one row per link, one column per week, one bar per row entry.
std::string render_gantt_svg(const std::vector<PlanRow>& rows, int horizon,
                             const std::string& title = {});

}  // namespace possplan::sp1

#endif  // POSSPLAN_SP1_PLAN_HPP_
