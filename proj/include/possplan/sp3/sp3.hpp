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

#ifndef POSSPLAN_SP3_SP3_HPP_
#define POSSPLAN_SP3_SP3_HPP_

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "possplan/core/instance.hpp"
#include "possplan/milp/model.hpp"
#include "possplan/milp/solver.hpp"

namespace possplan::sp3 {

// One designed line. Member links are the directed links of the modeled
// direction, in no particular order; the reverse direction is implied.
struct LineDesign {
  NodeId origin = 0;
  NodeId destination = 0;
  double capacity = 0.0;
  std::vector<LinkId> links;
  std::vector<double> provided;  // epsilon per member link
  std::vector<double> surplus;   // mu per member link
};

struct Sp3Components {
  double line_capacity = 0.0;  // sum of q_s
  double link_capacity = 0.0;  // sum of epsilon
  double surplus = 0.0;        // sum of mu
};

struct ServiceDesign {
  int week = 0;
  std::string period;
  std::vector<LineDesign> lines;  // used lines only
  Sp3Components components;
  double objective = 0.0;
  int cuts = 0;  // cycle cuts added during the solve
};

struct Line {
  std::vector<NodeId> stops;
  double capacity = 0.0;

  friend bool operator==(const Line&, const Line&) = default;
};

class MalformedPath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Sp3Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model without cycle cuts. `required` maps activatable links to the
// capacity SP2 asks for; both directions of a pair must carry the same value.
// Empty requirements yield an empty model.
milp::MilpModel build_sp3(const Instance& instance, const std::map<LinkId, double>& required);

ServiceDesign solve_sp3(const Instance& instance, const std::map<LinkId, double>& required,
                        const milp::SolveOptions& options = milp::options_from_environment());

// Orders each line's member links from origin to destination.
std::vector<Line> extract_lines(const Instance& instance, const ServiceDesign& design);

// Independent check of coverage, capacity and surplus identities; empty when
// every invariant holds.
std::vector<std::string> audit_design(const Instance& instance,
                                      const std::map<LinkId, double>& required,
                                      const ServiceDesign& design, double tolerance = 1e-6);

double weighted_objective(const Instance& instance, const Sp3Components& components);

// week, period, line_index, stop_sequence, capacity
void write_design_csv_header(std::ostream& out);
void write_design_csv(std::ostream& out, const Instance& instance, const ServiceDesign& design);

}  // namespace possplan::sp3

#endif  // POSSPLAN_SP3_SP3_HPP_
