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

#ifndef POSSPLAN_SRC_CORE_CSV_HPP_
#define POSSPLAN_SRC_CORE_CSV_HPP_

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace possplan::detail {

// RFC 4180 reader. Blank lines are skipped; a trailing CR is dropped.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

// Quotes a field when it contains a separator, quote or line break.
std::string csv_field(std::string_view text);

// Shortest decimal that round-trips; integers print without a fraction.
std::string format_number(double value);

}  // namespace possplan::detail

#endif  // POSSPLAN_SRC_CORE_CSV_HPP_
