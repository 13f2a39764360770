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

#ifndef POSSPLAN_TESTS_SUPPORT_SP2_ORACLE_HPP_
#define POSSPLAN_TESTS_SUPPORT_SP2_ORACLE_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "possplan/sp2/sp2.hpp"
#include "support/dense_lp.hpp"
#include "support/toy_instances.hpp"

namespace possplan::testing {

struct Toy {
  Instance instance;
  sp1::PossessionPlan plan;
};

inline Toy random_toy(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int n = pick(3, 5);
  InstanceBuilder b(n, 1);
  std::vector<LinkId> metro;
  for (int i = 1; i < n; ++i) {
    const LinkId f = b.twin(i, i + 1, Mode::kMetro, pick(1, 4) * 50, pick(1, 3));
    metro.push_back(f);
    metro.push_back(f + 1);
  }
  if (pick(0, 1)) b.twin(1, n, Mode::kWalk, pick(1, 3) * 40, pick(3, 6));
  const int bus = pick(0, 1);
  if (bus) b.link(pick(1, 2), n, Mode::kBus, pick(0, 2) * 50, pick(1, 4), pick(2, 20));
  std::vector<std::pair<int, int>> candidates;
  for (int a = 1; a <= n; ++a) {
    for (int c = a + 1; c <= n; ++c) candidates.push_back({a, c});
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const int pairs = std::min<int>(pick(1, 6 - bus), static_cast<int>(candidates.size()));
  for (int p = 0; p < pairs; ++p) {
    b.twin(candidates[p].first, candidates[p].second, Mode::kActivatable, 0, pick(1, 5),
           pick(1, 30));
  }
  const int demands = pick(1, 4);
  for (int k = 0; k < demands; ++k) {
    const int o = pick(1, n);
    int d = pick(1, n - 1);
    if (d >= o) ++d;
    b.demand(o, d, pick(1, 30) * 10);
  }
  Instance& inst = b.get();
  inst.params.max_units = pick(1, 2);
  inst.weights.beta = {0.03 * pick(1, 10), 1.5, static_cast<double>(pick(0, 5)), 1.0};
  Toy toy{b.build(), {}};
  toy.plan = sp1::PossessionPlan(toy.instance);
  for (LinkId l : metro) {
    if (pick(0, 2) == 0) toy.plan.set_interrupted(l, 1, true);
  }
  return toy;
}

// Independent reference: for every unit assignment (activatable twins share
// one count), solve the per-pair flow LP with the dense oracle.
inline double enumerate_activations(const Toy& toy) {
  const Instance& inst = toy.instance;
  const auto& beta = inst.weights.beta;
  const double q0 = inst.params.unit_capacity;
  const int J = inst.params.max_units;
  const int L = static_cast<int>(inst.links.size());
  const int N = static_cast<int>(inst.nodes.size());
  const DemandMatrix& dm = inst.demand[0];

  std::vector<std::vector<int>> groups;  // link indices sharing one unit count
  for (int l = 0; l < L; ++l) {
    const Link& link = inst.links[l];
    if (link.mode == Mode::kBus) groups.push_back({l});
    if (link.mode == Mode::kActivatable && *link.reverse > link.id) {
      groups.push_back({l, inst.link_index(*link.reverse)});
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (int o = 0; o < N; ++o) {
    for (int d = 0; d < N; ++d) {
      if (dm.at(o, d) > 0) pairs.push_back({o, d});
    }
  }
  const int P = static_cast<int>(pairs.size());
  const int vars = P * L + P;  // flows then unmet

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> units(groups.size(), 0);
  while (true) {
    std::vector<double> cap(static_cast<std::size_t>(L));
    double fixed = 0.0;
    for (int l = 0; l < L; ++l) cap[l] = inst.links[l].nominal_capacity.value_or(0.0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (int l : groups[g]) {
        cap[l] += units[g] * q0;
        fixed += beta[1] * *inst.links[l].activation_cost * units[g];
        if (inst.links[l].mode == Mode::kActivatable && units[g] > 0) fixed += beta[2];
      }
    }
    DenseLp lp;
    lp.cost.assign(vars, 0.0);
    lp.lo.assign(vars, 0.0);
    lp.hi.assign(vars, milp::kInfinity);
    for (int p = 0; p < P; ++p) {
      for (int l = 0; l < L; ++l) {
        lp.cost[p * L + l] = beta[0] * inst.links[l].cost;
        if (toy.plan.interrupted(inst.links[l].id, 1)) lp.hi[p * L + l] = 0.0;
      }
      lp.cost[P * L + p] = beta[3];
      lp.hi[P * L + p] = dm.at(pairs[p].first, pairs[p].second);
      for (int n = 0; n < N; ++n) {
        std::vector<double> row(vars, 0.0);
        for (int l = 0; l < L; ++l) {
          if (inst.node_index(inst.links[l].tail) == n) row[p * L + l] += 1.0;
          if (inst.node_index(inst.links[l].head) == n) row[p * L + l] -= 1.0;
        }
        double rhs = 0.0;
        const double d = dm.at(pairs[p].first, pairs[p].second);
        if (n == pairs[p].first) {
          rhs = d;
          row[P * L + p] = 1.0;
        } else if (n == pairs[p].second) {
          rhs = -d;
          row[P * L + p] = -1.0;
        }
        lp.rows.push_back(row);
        lp.sense.push_back(milp::RowSense::kEqual);
        lp.rhs.push_back(rhs);
      }
    }
    for (int l = 0; l < L; ++l) {
      std::vector<double> row(vars, 0.0);
      for (int p = 0; p < P; ++p) row[p * L + l] = 1.0;
      lp.rows.push_back(row);
      lp.sense.push_back(milp::RowSense::kLessEqual);
      lp.rhs.push_back(cap[l]);
    }
    const auto r = solve_dense_lp(lp);
    if (r.status == OracleStatus::kOptimal) best = std::min(best, r.objective + fixed);
    std::size_t g = 0;
    while (g < units.size() && ++units[g] > J) units[g++] = 0;
    if (g == units.size()) break;
  }
  return best;
}

}  // namespace possplan::testing

#endif  // POSSPLAN_TESTS_SUPPORT_SP2_ORACLE_HPP_
