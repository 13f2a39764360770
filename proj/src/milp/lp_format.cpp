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

#include "possplan/milp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace possplan::milp {
namespace {

constexpr std::size_t kMaxLineTerms = 8;

std::string sanitize(const std::string& raw, int index) {
  if (raw.empty()) return "x" + std::to_string(index);
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                    c == '(' || c == ')' || c == '[' || c == ']' || c == ',';
    out.push_back(ok ? c : '_');
  }
  // LP names may not start with a digit or a period.
  if (std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') {
    out.insert(out.begin(), '_');
  }
  return out;
}

std::vector<std::string> column_names(const MilpModel& model) {
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  names.reserve(model.num_variables());
  for (int i = 0; i < model.num_variables(); ++i) {
    std::string name = sanitize(model.variables()[i].name, i);
    if (!seen.insert(name).second) {
      name += "#" + std::to_string(i);
      seen.insert(name);
    }
    names.push_back(std::move(name));
  }
  return names;
}

void write_number(std::ostream& out, double v) {
  if (v == kInfinity) {
    out << "+inf";
  } else if (v == -kInfinity) {
    out << "-inf";
  } else {
    out << std::setprecision(17) << v;
  }
}

void write_terms(std::ostream& out, const std::vector<Term>& terms,
                 const std::vector<std::string>& names) {
  std::size_t on_line = 0;
  for (const Term& t : terms) {
    if (on_line == kMaxLineTerms) {
      out << "\n  ";
      on_line = 0;
    }
    out << (t.coef < 0 ? " - " : " + ");
    write_number(out, std::fabs(t.coef));
    out << ' ' << names[t.var.index()];
    ++on_line;
  }
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
  const auto names = column_names(model);
  out << "\\ possplan model: " << model.num_variables() << " columns, "
      << model.num_constraints() << " rows\n";
  out << "Minimize\n obj:";
  std::vector<Term> obj;
  for (int i = 0; i < model.num_variables(); ++i) {
    if (model.objective()[i] != 0.0) obj.push_back(Term{VarRef(i), model.objective()[i]});
  }
  if (obj.empty()) {
    out << " 0";
  } else {
    write_terms(out, obj, names);
  }
  if (model.objective_constant() != 0.0) {
    out << (model.objective_constant() < 0 ? " - " : " + ");
    write_number(out, std::fabs(model.objective_constant()));
  }
  out << "\nSubject To\n";
  for (int r = 0; r < model.num_constraints(); ++r) {
    const auto& row = model.constraints()[r];
    out << ' ' << (row.name.empty() ? "c" + std::to_string(r) : sanitize(row.name, r)) << ':';
    if (row.terms.empty()) {
      // LP format needs at least one column; an empty row is written against
      // the first column with a zero coefficient.
      out << " 0 " << (names.empty() ? std::string("x0") : names.front());
    } else {
      write_terms(out, row.terms, names);
    }
    switch (row.sense) {
      case RowSense::kLessEqual: out << " <= "; break;
      case RowSense::kEqual: out << " = "; break;
      case RowSense::kGreaterEqual: out << " >= "; break;
    }
    write_number(out, row.rhs);
    out << '\n';
  }
  out << "Bounds\n";
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& v = model.variables()[i];
    if (v.kind == VarKind::kBinary && v.lo == 0.0 && v.hi == 1.0) continue;
    if (v.lo == -kInfinity && v.hi == kInfinity) {
      out << ' ' << names[i] << " free\n";
    } else if (v.lo == v.hi) {
      out << ' ' << names[i] << " = ";
      write_number(out, v.lo);
      out << '\n';
    } else {
      out << ' ';
      write_number(out, v.lo);
      out << " <= " << names[i] << " <= ";
      write_number(out, v.hi);
      out << '\n';
    }
  }
  bool any_binary = false;
  for (int i = 0; i < model.num_variables(); ++i) {
    if (model.variables()[i].kind != VarKind::kBinary) continue;
    if (!any_binary) {
      out << "Binaries\n";
      any_binary = true;
    }
    out << ' ' << names[i] << '\n';
  }
  out << "End\n";
}

std::string to_lp_string(const MilpModel& model) {
  std::ostringstream out;
  write_lp(model, out);
  return out.str();
}

}  // namespace possplan::milp
