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

#ifndef POSSPLAN_TOOLS_CLI_CLI_HPP_
#define POSSPLAN_TOOLS_CLI_CLI_HPP_

#include <iosfwd>

namespace possplan::cli {

inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 1;
inline constexpr int kSolverFailure = 2;
inline constexpr int kUsage = 64;

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace possplan::cli

#endif  // POSSPLAN_TOOLS_CLI_CLI_HPP_
