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

#ifndef POSSPLAN_TESTS_SUPPORT_RANDOM_MODELS_HPP_
#define POSSPLAN_TESTS_SUPPORT_RANDOM_MODELS_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "possplan/milp/model.hpp"

namespace possplan::testing {

// Seeded random MILP with at most 8 binaries, 6 continuous columns and 12
// rows. Right-hand sides are built around a random point so most instances
// are feasible; equality rows and pure-binary rows are mixed in.
inline milp::MilpModel random_milp(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform_real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  milp::MilpModel model;
  const int n_bin = uniform_int(1, 8);
  const int n_cont = uniform_int(0, 6);
  const int n_rows = uniform_int(1, 12);
  std::vector<milp::VarRef> vars;
  std::vector<double> point;
  for (int j = 0; j < n_bin; ++j) {
    vars.push_back(model.add_binary("b" + std::to_string(j)));
    point.push_back(uniform_int(0, 1));
  }
  for (int j = 0; j < n_cont; ++j) {
    const double lo = uniform_int(-5, 0);
    const double hi = lo + uniform_int(1, 12);
    vars.push_back(model.add_continuous(lo, hi, "c" + std::to_string(j)));
    point.push_back(uniform_real(lo, hi));
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    model.add_objective_term(vars[j], uniform_int(-10, 10) + 0.25 * uniform_int(0, 3));
  }
  for (int r = 0; r < n_rows; ++r) {
    std::vector<milp::Term> terms;
    double activity = 0.0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (uniform_real(0.0, 1.0) < 0.45) continue;
      const double coef = uniform_int(-6, 6);
      if (coef == 0.0) continue;
      terms.push_back({vars[j], coef});
      activity += coef * point[j];
    }
    if (terms.empty()) continue;
    const int kind = uniform_int(0, 9);
    if (kind < 5) {
      model.add_constraint(std::move(terms), milp::RowSense::kLessEqual,
                           activity + uniform_int(0, 4));
    } else if (kind < 9) {
      model.add_constraint(std::move(terms), milp::RowSense::kGreaterEqual,
                           activity - uniform_int(0, 4));
    } else {
      model.add_constraint(std::move(terms), milp::RowSense::kEqual, activity);
    }
  }
  return model;
}

}  // namespace possplan::testing

#endif  // POSSPLAN_TESTS_SUPPORT_RANDOM_MODELS_HPP_
