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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion;
// pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "possplan/milp/solver.hpp"
#include "possplan/negotiation/negotiation.hpp"
#include "possplan/report/report.hpp"
#include "possplan/sp1/plan.hpp"
#include "possplan/sp1/sp1.hpp"
#include "possplan/sp2/sp2.hpp"
#include "possplan/sp3/sp3.hpp"
#include "support/dense_lp.hpp"
#include "support/random_models.hpp"
#include "support/scratch_dir.hpp"
#include "support/sp1_oracle.hpp"
#include "support/sp2_oracle.hpp"
#include "support/toy_instances.hpp"

namespace possplan {
namespace {

namespace fs = std::filesystem;

// Collects failure reasons for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    for (const auto& n : notes_) s << "; " << n;
    if (count_ > 0) {
      s << "; " << count_ << " failure(s):";
      for (const auto& f : failures_) s << " [" << f << "]";
    }
    return s.str();
  }

 private:
  int count_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

Instance genoa() {
  Instance inst = load_instance(testing::data_dir() / "genoa" / "genoa.json");
  validate(inst);
  return inst;
}

std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void milp_oracle(Check& c) {
  int optimal = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const milp::MilpModel model = testing::random_milp(seed);
    const testing::OracleResult expected = testing::enumerate_milp(model);
    const milp::MilpSolution sol = milp::solve(model);
    const std::string tag = "seed " + std::to_string(seed);
    if (expected.status == testing::OracleStatus::kInfeasible) {
      c.expect(sol.status == milp::SolveStatus::kInfeasible, tag + " should be infeasible");
      continue;
    }
    if (sol.status != milp::SolveStatus::kOptimal) {
      c.expect(false, tag + " status " + milp::to_string(sol.status));
      continue;
    }
    ++optimal;
    c.expect(std::abs(sol.objective - expected.objective) <= 1e-6,
             tag + ": " + num(sol.objective) + " vs " + num(expected.objective));
    c.expect(milp::check_assignment(model, sol.values).empty(), tag + " violates a row");
  }
  c.note(std::to_string(optimal) + "/50 optimal");
}

void sp1_oracle(Check& c) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const auto expected = testing::enumerate_best(inst);
    const std::string tag = "seed " + std::to_string(seed);
    try {
      const sp1::Sp1Result r = sp1::solve_sp1(inst);
      c.expect(expected.has_value(), tag + " solved but enumeration found nothing");
      if (expected) {
        c.expect(std::abs(r.objective.total - *expected) <= 1e-6,
                 tag + ": " + num(r.objective.total) + " vs " + num(*expected));
      }
      c.expect(sp1::check_plan(inst, r.plan).empty(), tag + " plan violates a rule");
    } catch (const sp1::Sp1Infeasible&) {
      c.expect(!expected.has_value(), tag + " reported infeasible");
    } catch (const sp1::InfeasibleByConstruction&) {
      c.expect(!expected.has_value(), tag + " rejected up front");
    }
  }
}

void genoa_allocation(Check& c) {
  const Instance inst = genoa();
  const sp1::Sp1Result r = sp1::solve_sp1(inst);
  for (const sp1::PlanViolation& v : sp1::check_plan(inst, r.plan)) {
    c.expect(false, v.rule + ": " + v.detail);
  }
  for (int k = 1; k <= inst.horizon; ++k) {
    const auto links = r.plan.interrupted_links(k);
    c.expect(static_cast<int>(links.size()) <= inst.params.max_interrupted,
             "week " + std::to_string(k) + " too many interruptions");
    for (std::size_t a = 0; a < links.size(); ++a) {
      for (std::size_t b = a + 1; b < links.size(); ++b) {
        c.expect(sp1::links_share_node(inst.link(links[a]), inst.link(links[b])),
                 "week " + std::to_string(k) + " links without a common node");
      }
    }
  }
  for (const Intervention& iv : inst.interventions) {
    const int start = r.plan.start(iv.id);
    c.expect(start >= 1 && start + iv.duration - 1 <= iv.deadline,
             "intervention " + std::to_string(iv.id) + " misses its deadline");
  }
  const double position = sp1::evaluate_sp1(inst, sp1::position_based_plan(inst)).total;
  const double priority = sp1::evaluate_sp1(inst, sp1::priority_based_plan(inst)).total;
  c.expect(r.objective.total <= position + 1e-6, "worse than the position baseline");
  c.expect(r.objective.total <= priority + 1e-6, "worse than the priority baseline");
  // Published schedule for the same case, starts in intervention order.
  const sp1::PossessionPlan reference =
      sp1::plan_from_starts(inst, {13, 17, 3, 3, 5, 1, 11, 15, 19});
  const double reference_mass = sp1::evaluate_sp1(inst, reference).disruption;
  c.expect(r.objective.disruption <= reference_mass + 1e-6,
           "disruption " + num(r.objective.disruption) + " above " + num(reference_mass));
  c.note("objective " + num(r.objective.total) + " (position " + num(position) + ", priority " +
         num(priority) + ")");
  c.note("disruption " + num(r.objective.disruption) + " vs reference " + num(reference_mass));
}

void sp2_oracle(Check& c) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const testing::Toy toy = testing::random_toy(seed);
    const double expected = testing::enumerate_activations(toy);
    const std::string tag = "seed " + std::to_string(seed);
    for (sp2::Sp2Form form : {sp2::Sp2Form::kAggregated, sp2::Sp2Form::kLiteral}) {
      sp2::Sp2Options opt;
      opt.form = form;
      const sp2::MitigationSolution s =
          sp2::solve_sp2(toy.instance, toy.plan, 1, toy.instance.demand[0], opt);
      c.expect(std::abs(s.objective - expected) <= 1e-6,
               tag + ": " + num(s.objective) + " vs " + num(expected));
      const auto issues = sp2::audit_solution(toy.instance, toy.plan, toy.instance.demand[0], s);
      c.expect(issues.empty(), tag + ": " + (issues.empty() ? "" : issues.front()));
    }
  }
}

using LineSet = std::set<std::pair<std::vector<NodeId>, double>>;

LineSet normalized(const Instance& inst, const sp3::ServiceDesign& d) {
  LineSet out;
  for (sp3::Line l : sp3::extract_lines(inst, d)) {
    if (l.stops.front() > l.stops.back()) std::reverse(l.stops.begin(), l.stops.end());
    out.insert({l.stops, std::round(l.capacity * 1e6) / 1e6});
  }
  return out;
}

void line_design(Check& c) {
  {
    testing::InstanceBuilder b(2, 1);
    const LinkId a = b.twin(1, 2, Mode::kActivatable, 0, 1, 10);
    const Instance inst = b.build();
    const std::map<LinkId, double> req{{a, 700}, {a + 1, 700}};
    const sp3::ServiceDesign d = sp3::solve_sp3(inst, req);
    c.expect(normalized(inst, d) == LineSet{{{1, 2}, 700}}, "single pair");
    c.expect(sp3::audit_design(inst, req, d).empty(), "single pair audit");
  }
  {
    testing::InstanceBuilder b(3, 1);
    const LinkId ab = b.twin(1, 2, Mode::kActivatable, 0, 1, 10);
    const LinkId bc = b.twin(2, 3, Mode::kActivatable, 0, 1, 10);
    const Instance inst = b.build();
    const std::map<LinkId, double> req{{ab, 1000}, {ab + 1, 1000}, {bc, 1000}, {bc + 1, 1000}};
    const sp3::ServiceDesign d = sp3::solve_sp3(inst, req);
    c.expect(normalized(inst, d) == LineSet{{{1, 2, 3}, 1000}}, "chain");
    c.expect(sp3::audit_design(inst, req, d).empty(), "chain audit");
  }
  {
    testing::InstanceBuilder b(4, 1);  // 1 Brin, 2 Principe, 3 Dinegro, 4 Darsena
    const LinkId brin = b.twin(1, 2, Mode::kActivatable, 0, 3, 15);
    const LinkId din = b.twin(3, 2, Mode::kActivatable, 0, 3, 15);
    const LinkId dar = b.twin(2, 4, Mode::kActivatable, 0, 3, 15);
    b.get().params.max_lines = 2;
    const Instance inst = b.build();
    const std::map<LinkId, double> req{{brin, 800}, {brin + 1, 800}, {din, 1000},
                                       {din + 1, 1000}, {dar, 1000}, {dar + 1, 1000}};
    const sp3::ServiceDesign d = sp3::solve_sp3(inst, req);
    c.expect(normalized(inst, d) == LineSet{{{1, 2}, 800}, {{3, 2, 4}, 1000}}, "hub");
    c.expect(sp3::audit_design(inst, req, d).empty(), "hub audit");
  }
  {
    // Genoa, week 12 morning with only the Darsena - Principe link closed.
    const Instance inst = genoa();
    sp1::PossessionPlan plan(inst);
    plan.set_interrupted(12, 12, true);
    const DemandMatrix d = effective_demand(inst.demand[0], inst.utilization, 12);
    const sp2::MitigationSolution m = sp2::solve_sp2(inst, plan, 12, d);
    const auto req = sp2::required_capacities(inst, m);
    const sp3::ServiceDesign design = sp3::solve_sp3(inst, req);
    c.expect(sp3::audit_design(inst, req, design).empty(), "Genoa audit");
    const auto node_of = [&](const std::string& name) {
      for (const Node& n : inst.nodes) {
        if (n.name == name) return n.id;
      }
      return NodeId{0};
    };
    const LineSet expected = {
        {{node_of("Dinegro bus"), node_of("Principe bus"), node_of("Darsena bus")}, 1000},
        {{node_of("Principe bus"), node_of("Brin bus")}, 800}};
    LineSet want;
    for (auto [stops, cap] : expected) {
      if (stops.front() > stops.back()) std::reverse(stops.begin(), stops.end());
      want.insert({stops, cap});
    }
    const LineSet have = normalized(inst, design);
    std::ostringstream s;
    for (const auto& [stops, cap] : have) {
      s << " {";
      for (NodeId n : stops) s << inst.node(n).name << (n == stops.back() ? "" : " - ");
      s << " " << cap << "}";
    }
    c.expect(have == want, "Genoa lines:" + s.str());
    c.note("Genoa lines:" + s.str());
  }
}

void negotiation_nominal(Check& c) {
  const Instance inst = genoa();
  negotiation::RunOptions opt;
  opt.iterations = 10;
  const negotiation::NegotiationResult res = negotiation::run(inst, opt);
  c.expect(res.history.size() == 10, "history has " + std::to_string(res.history.size()));
  const std::vector<negotiation::IterationRecord> before(res.history.begin(),
                                                        res.history.end() - 1);
  const std::vector<double> g = negotiation::gamma(before, 10);
  c.expect(g.size() == 10 && g[0] == 0.0, "gamma[0] is not zero");
  c.expect(negotiation::tabu_coefficients(inst, {}, 1).is_zero(), "first tabu term not zero");
  const int cells = inst.horizon * static_cast<int>(inst.periods.size());
  for (const auto& rec : res.history) {
    c.expect(rec.counts.total() == 1 + 2 * cells,
             "iteration " + std::to_string(rec.r) + " ran " +
                 std::to_string(rec.counts.total()) + " solves");
    c.expect(sp1::check_plan(inst, rec.plan).empty(),
             "iteration " + std::to_string(rec.r) + " plan infeasible");
  }
  const auto& best = res.best_record();
  c.expect(best.sp2_aggregate <= res.history.front().sp2_aggregate + 1e-9,
           "best above the first iteration");
  std::ostringstream s;
  for (const auto& rec : res.history) s << (rec.r == 1 ? "" : " ") << rec.sp2_aggregate;
  c.note("best iteration " + std::to_string(best.r) + ", aggregates " + s.str());
}

void sampled_comparison(Check& c) {
  const Instance inst = genoa();
  testing::ScratchDir dir("acceptance_sampled");
  report::RunSettings settings;
  settings.iterations = 3;
  settings.instances = 5;
  settings.seed = static_cast<std::uint64_t>(inst.params.seed);
  report::negotiate(inst, settings, dir.path());
  const report::ComparisonReport rep = report::load_report(dir.path());
  for (report::Variant ref : {report::Variant::kPosition, report::Variant::kPriority}) {
    const int v = static_cast<int>(ref);
    const std::string name = ref == report::Variant::kPosition ? "position" : "priority";
    for (const char* period : {"morning", "evening"}) {
      for (const char* comp : {"unsatisfied_demand", "activation_cost"}) {
        const report::ReportRow* row = rep.find("mitigation", period, comp);
        const bool ok = row && row->delta[v] && *row->delta[v] < 0;
        const std::string text = row && row->delta[v] ? num(*row->delta[v]) : "n/a";
        c.expect(ok, std::string(period) + " " + comp + " vs " + name + " " + text);
        c.note(std::string(period) + " " + comp + " vs " + name + " " + text + "%");
      }
    }
    const report::ReportRow* off = rep.find("mitigation", "offpeak", "unsatisfied_demand");
    c.expect(off && off->delta[v] && *off->delta[v] == 0.0, "offpeak unmet vs " + name);
  }
}

std::vector<std::pair<std::string, std::string>> tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files.push_back({fs::relative(e.path(), root).string(), s.str()});
  }
  std::sort(files.begin(), files.end());
  return files;
}

void reproducibility(Check& c) {
  const Instance inst = genoa();
  report::RunSettings settings;
  settings.iterations = 2;
  settings.seed = 11;
  testing::ScratchDir a("acceptance_repro_a");
  testing::ScratchDir b("acceptance_repro_b");
  report::negotiate(inst, settings, a.path());
  report::negotiate(inst, settings, b.path());
  const auto ta = tree(a.path());
  const auto tb = tree(b.path());
  c.expect(ta.size() == tb.size(), "file counts differ");
  for (std::size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) {
    c.expect(ta[i].first == tb[i].first, "file set differs at " + ta[i].first);
    c.expect(ta[i].second == tb[i].second, ta[i].first + " differs");
  }
  c.note(std::to_string(ta.size()) + " files compared");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Check&)> run;
};

}  // namespace
}  // namespace possplan

int main(int argc, char** argv) {
  using namespace possplan;
  const std::vector<Criterion> all = {
      {1, "MILP kernel matches enumeration", 60, milp_oracle},
      {2, "allocation matches enumeration", 120, sp1_oracle},
      {3, "Genoa allocation", 300, genoa_allocation},
      {4, "mitigation matches enumeration", 600, sp2_oracle},
      {5, "line design scenarios", 600, line_design},
      {6, "Genoa nominal negotiation", 4 * 3600, negotiation_nominal},
      {7, "sampled comparison against baselines", 4 * 3600, sampled_comparison},
      {8, "byte-identical reruns", 3600, reproducibility},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& cr : all) {
    if (!selected.empty() && !selected.count(cr.id)) continue;
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check.expect(secs <= cr.budget_s, "over the time budget of " + num(cr.budget_s) + " s");
    std::ostringstream t;
    t.precision(1);
    t << std::fixed << secs;
    std::cout << "criterion " << cr.id << ": " << (check.ok() ? "PASS" : "FAIL") << " "
              << cr.name << " (" << t.str() << " s" << check.summary() << ")" << std::endl;
    failed += check.ok() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
