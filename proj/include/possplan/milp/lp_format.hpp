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

#ifndef POSSPLAN_MILP_LP_FORMAT_HPP_
#define POSSPLAN_MILP_LP_FORMAT_HPP_

#include <iosfwd>
#include <string>

#include "possplan/milp/model.hpp"

namespace possplan::milp {

// Writes the model in CPLEX LP text format (Minimize / Subject To / Bounds /
// Binaries / End). Column names are sanitized; unnamed columns become x<i>.
void write_lp(const MilpModel& model, std::ostream& out);
std::string to_lp_string(const MilpModel& model);

}  // namespace possplan::milp

#endif  // POSSPLAN_MILP_LP_FORMAT_HPP_
