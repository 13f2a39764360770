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

#include "possplan/sp1/plan.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "core/csv.hpp"

namespace possplan::sp1 {

PossessionPlan::PossessionPlan(const Instance& instance) : horizon_(instance.horizon) {
  for (const Link& l : instance.links) {
    if (l.mode == Mode::kMetro) links_.push_back(l.id);
  }
  x_.assign(links_.size() * static_cast<std::size_t>(horizon_), 0);
  for (const Intervention& i : instance.interventions) interventions_.push_back(i.id);
  start_.assign(interventions_.size(), 0);
}

int PossessionPlan::link_position(LinkId link) const {
  const auto it = std::find(links_.begin(), links_.end(), link);
  if (it == links_.end()) {
    throw std::out_of_range("link " + std::to_string(link) + " is not a metro link of the plan");
  }
  return static_cast<int>(it - links_.begin());
}

int PossessionPlan::intervention_position(InterventionId id) const {
  const auto it = std::find(interventions_.begin(), interventions_.end(), id);
  if (it == interventions_.end()) {
    throw std::out_of_range("unknown intervention " + std::to_string(id));
  }
  return static_cast<int>(it - interventions_.begin());
}

bool PossessionPlan::interrupted(LinkId link, int week) const {
  if (week < 1 || week > horizon_) return false;
  const auto it = std::find(links_.begin(), links_.end(), link);
  if (it == links_.end()) return false;
  const auto p = static_cast<std::size_t>(it - links_.begin());
  return x_[p * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(week - 1)] != 0;
}

void PossessionPlan::set_interrupted(LinkId link, int week, bool value) {
  if (week < 1 || week > horizon_) throw std::out_of_range("week outside the horizon");
  x_[static_cast<std::size_t>(link_position(link) * horizon_ + week - 1)] = value ? 1 : 0;
}

std::vector<LinkId> PossessionPlan::interrupted_links(int week) const {
  std::vector<LinkId> out;
  if (week < 1 || week > horizon_) return out;
  for (std::size_t p = 0; p < links_.size(); ++p) {
    if (x_[p * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(week - 1)]) {
      out.push_back(links_[p]);
    }
  }
  return out;
}

int PossessionPlan::start(InterventionId id) const {
  return start_[static_cast<std::size_t>(intervention_position(id))];
}

void PossessionPlan::set_start(InterventionId id, int week) {
  start_[static_cast<std::size_t>(intervention_position(id))] = week;
}

PossessionPlan plan_from_starts(const Instance& instance, const std::vector<int>& starts) {
  if (starts.size() != instance.interventions.size()) {
    throw std::invalid_argument("one start week per intervention expected");
  }
  PossessionPlan plan(instance);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const Intervention& iv = instance.interventions[i];
    plan.set_start(iv.id, starts[i]);
    for (int v = starts[i]; v < starts[i] + iv.duration; ++v) {
      if (v >= 1 && v <= instance.horizon) plan.set_interrupted(iv.link, v, true);
    }
  }
  return plan;
}

std::vector<LinkId> maintenance_links(const Instance& instance) {
  std::set<LinkId> ids;
  for (const Intervention& i : instance.interventions) ids.insert(i.link);
  std::vector<LinkId> out;
  for (const Link& l : instance.links) {
    if (ids.count(l.id)) out.push_back(l.id);
  }
  return out;
}

bool links_share_node(const Link& a, const Link& b) {
  return a.tail == b.tail || a.tail == b.head || a.head == b.tail || a.head == b.head;
}

int link_deadline(const Instance& instance, LinkId link) {
  int deadline = 0;
  for (const Intervention& i : instance.interventions) {
    if (i.link == link) deadline = std::max(deadline, i.deadline);
  }
  return deadline == 0 ? instance.horizon : deadline;
}

std::vector<PlanViolation> check_plan(const Instance& instance, const PossessionPlan& plan) {
  std::vector<PlanViolation> out;
  auto report = [&](const char* rule, std::string detail) {
    out.push_back({rule, std::move(detail)});
  };
  const int T = instance.horizon;
  const std::vector<LinkId> maintained = maintenance_links(instance);

  for (const Intervention& iv : instance.interventions) {
    const int s = plan.start(iv.id);
    const std::string who = "intervention " + std::to_string(iv.id);
    if (s < 1 || s > T) {
      report("single-start", who + " has no start week in 1.." + std::to_string(T));
      continue;
    }
    if (s + iv.duration > T) {
      report("horizon", who + " starts in week " + std::to_string(s) + " with duration " +
                            std::to_string(iv.duration) + " against horizon " +
                            std::to_string(T));
    }
    for (int v = 1; v <= T; ++v) {
      const bool inside = v >= s && v < s + iv.duration;
      if (inside != plan.interrupted(iv.link, v)) {
        report("no-preemption", who + " on link " + std::to_string(iv.link) + " week " +
                                    std::to_string(v) +
                                    (inside ? " should be interrupted" : " should be open"));
      }
    }
  }

  for (LinkId l : maintained) {
    const int theta = link_deadline(instance, l);
    for (int v = theta + 1; v <= T; ++v) {
      if (plan.interrupted(l, v)) {
        report("deadline", "link " + std::to_string(l) + " interrupted in week " +
                               std::to_string(v) + " after deadline " + std::to_string(theta));
      }
    }
  }

  for (int v = 1; v <= T; ++v) {
    const std::vector<LinkId> down = plan.interrupted_links(v);
    if (static_cast<int>(down.size()) > instance.params.max_interrupted) {
      report("max-interrupted", "week " + std::to_string(v) + " has " +
                                    std::to_string(down.size()) + " interrupted links");
    }
    for (std::size_t a = 0; a < down.size(); ++a) {
      if (std::find(maintained.begin(), maintained.end(), down[a]) == maintained.end()) {
        report("non-maintenance-link", "link " + std::to_string(down[a]) +
                                           " interrupted in week " + std::to_string(v));
      }
      for (std::size_t b = a + 1; b < down.size(); ++b) {
        if (!links_share_node(instance.link(down[a]), instance.link(down[b]))) {
          report("adjacency", "links " + std::to_string(down[a]) + " and " +
                                  std::to_string(down[b]) + " in week " + std::to_string(v));
        }
      }
    }
  }
  return out;
}

int link_hop_distance(const Instance& instance, LinkId a, LinkId b) {
  const Link& la = instance.link(a);
  const Link& lb = instance.link(b);
  if (links_share_node(la, lb)) return 0;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const Link& l : instance.links) {
    if (l.mode != Mode::kMetro) continue;
    adj[l.tail].push_back(l.head);
    adj[l.head].push_back(l.tail);
  }
  std::map<NodeId, int> dist{{la.tail, 0}, {la.head, 0}};
  std::deque<NodeId> queue{la.tail, la.head};
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    if (n == lb.tail || n == lb.head) return dist[n];
    for (NodeId m : adj[n]) {
      if (dist.emplace(m, dist[n] + 1).second) queue.push_back(m);
    }
  }
  return INT_MAX;
}

namespace {

// Earliest start at which `iv` fits next to what is already scheduled.
int earliest_start(const Instance& instance, const PossessionPlan& plan, const Intervention& iv) {
  const Link& link = instance.link(iv.link);
  for (int s = 1; s + iv.duration <= instance.horizon; ++s) {
    bool fits = true;
    for (int v = s; v < s + iv.duration && fits; ++v) {
      const std::vector<LinkId> down = plan.interrupted_links(v);
      if (std::find(down.begin(), down.end(), iv.link) != down.end()) {
        fits = false;
        break;
      }
      if (static_cast<int>(down.size()) + 1 > instance.params.max_interrupted) fits = false;
      for (LinkId other : down) {
        if (!links_share_node(link, instance.link(other))) fits = false;
      }
    }
    if (fits) return s;
  }
  throw BaselineError("no feasible start for intervention " + std::to_string(iv.id));
}

void place(const Instance& instance, PossessionPlan& plan, const Intervention& iv) {
  const int s = earliest_start(instance, plan, iv);
  plan.set_start(iv.id, s);
  for (int v = s; v < s + iv.duration; ++v) plan.set_interrupted(iv.link, v, true);
}

}  // namespace

PossessionPlan position_based_plan(const Instance& instance) {
  std::vector<const Intervention*> order;
  for (const Intervention& iv : instance.interventions) order.push_back(&iv);
  std::stable_sort(order.begin(), order.end(), [](const Intervention* a, const Intervention* b) {
    return a->link != b->link ? a->link < b->link : a->id < b->id;
  });
  PossessionPlan plan(instance);
  for (const Intervention* iv : order) place(instance, plan, *iv);
  return plan;
}

PossessionPlan priority_based_plan(const Instance& instance) {
  std::vector<const Intervention*> left;
  for (const Intervention& iv : instance.interventions) left.push_back(&iv);
  PossessionPlan plan(instance);
  const Intervention* previous = nullptr;
  while (!left.empty()) {
    auto key = [&](const Intervention* iv) {
      const int d = previous ? link_hop_distance(instance, previous->link, iv->link) : 0;
      return std::make_tuple(-iv->priority, d, iv->link, iv->id);
    };
    const auto it = std::min_element(left.begin(), left.end(),
                                     [&](auto* a, auto* b) { return key(a) < key(b); });
    previous = *it;
    left.erase(it);
    place(instance, plan, *previous);
  }
  return plan;
}

std::vector<PlanRow> plan_rows(const Instance& instance, const PossessionPlan& plan) {
  std::vector<PlanRow> rows;
  for (const Intervention& iv : instance.interventions) {
    const int s = plan.start(iv.id);
    if (s < 1) continue;
    for (int v = s; v < s + iv.duration && v <= instance.horizon; ++v) {
      rows.push_back({v, iv.link, iv.id, iv.priority});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const PlanRow& a, const PlanRow& b) {
    return std::tie(a.week, a.link, a.intervention) < std::tie(b.week, b.link, b.intervention);
  });
  return rows;
}

void write_plan_csv(std::ostream& out, const std::vector<PlanRow>& rows) {
  out << "week,link_id,intervention_id,priority\n";
  for (const PlanRow& r : rows) {
    out << r.week << ',' << r.link << ',' << r.intervention << ',' << r.priority << '\n';
  }
}

std::vector<PlanRow> read_plan_csv(std::istream& in) {
  const auto table = detail::read_csv(in);
  if (table.empty()) throw std::runtime_error("plan CSV is empty");
  const std::vector<std::string> header{"week", "link_id", "intervention_id", "priority"};
  if (table.front() != header) throw std::runtime_error("unexpected plan CSV header");
  std::vector<PlanRow> rows;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& f = table[r];
    if (f.size() != 4) {
      throw std::runtime_error("plan CSV row " + std::to_string(r + 1) + " needs 4 fields");
    }
    try {
      rows.push_back({std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2]), std::stoi(f[3])});
    } catch (const std::logic_error&) {
      throw std::runtime_error("plan CSV row " + std::to_string(r + 1) + " is not numeric");
    }
  }
  return rows;
}

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render_gantt_svg(const std::vector<PlanRow>& rows, int horizon,
                             const std::string& title) {
  constexpr int kCell = 28, kRow = 22, kLeft = 70, kTop = 48;
  for (const PlanRow& r : rows) horizon = std::max(horizon, r.week);
  std::set<LinkId> link_set;
  int max_priority = 1;
  for (const PlanRow& r : rows) {
    link_set.insert(r.link);
    max_priority = std::max(max_priority, r.priority);
  }
  const std::vector<LinkId> links(link_set.begin(), link_set.end());
  const int width = kLeft + kCell * horizon + 10;
  const int height = kTop + kRow * static_cast<int>(links.size()) + 10;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  if (!title.empty()) {
    svg << "  <text x=\"" << kLeft << "\" y=\"16\" font-size=\"13\">" << xml_escape(title)
        << "</text>\n";
  }
  for (int w = 1; w <= horizon; ++w) {
    const int x = kLeft + kCell * (w - 1);
    svg << "  <text x=\"" << x + kCell / 2 << "\" y=\"" << kTop - 8
        << "\" text-anchor=\"middle\">" << w << "</text>\n";
    svg << "  <line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\""
        << height - 10 << "\" stroke=\"#ddd\"/>\n";
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    svg << "  <text x=\"" << kLeft - 6 << "\" y=\"" << kTop + kRow * static_cast<int>(i) + 15
        << "\" text-anchor=\"end\">link " << links[i] << "</text>\n";
  }
  for (const PlanRow& r : rows) {
    const int row = static_cast<int>(std::find(links.begin(), links.end(), r.link) - links.begin());
    // darker bars for higher priority
    const int light = 75 - 40 * r.priority / max_priority;
    svg << "  <rect class=\"bar\" x=\"" << kLeft + kCell * (r.week - 1) + 1 << "\" y=\""
        << kTop + kRow * row + 3 << "\" width=\"" << kCell - 2 << "\" height=\"" << kRow - 6
        << "\" fill=\"hsl(210,70%," << light << "%)\"><title>intervention " << r.intervention
        << ", week " << r.week << ", priority " << r.priority << "</title></rect>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace possplan::sp1
