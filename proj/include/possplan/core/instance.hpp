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

#ifndef POSSPLAN_CORE_INSTANCE_HPP_
#define POSSPLAN_CORE_INSTANCE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace possplan {

using NodeId = int;
using LinkId = int;
using InterventionId = int;

enum class Mode { kMetro, kBus, kWalk, kActivatable };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

struct Node {
  NodeId id = 0;
  std::string name;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Link {
  LinkId id = 0;
  NodeId tail = 0;
  NodeId head = 0;
  Mode mode = Mode::kMetro;
  std::optional<double> nominal_capacity;  // passengers/hour
  double cost = 0.0;                       // generalized cost per passenger
  std::optional<double> activation_cost;   // per capacity unit
  std::optional<LinkId> reverse;
  // Free-form service label used only for reporting (e.g. "train").
  std::string tag;

  friend bool operator==(const Link&, const Link&) = default;
};

struct Intervention {
  InterventionId id = 0;
  LinkId link = 0;
  int duration = 1;
  int priority = 1;
  int deadline = 1;

  friend bool operator==(const Intervention&, const Intervention&) = default;
};

// Dense o/d matrix over the instance's node order. Entries are
// passengers/hour; the diagonal is zero.
class DemandMatrix {
 public:
  DemandMatrix() = default;
  DemandMatrix(std::string period, int size);

  const std::string& period() const { return period_; }
  int size() const { return size_; }
  double at(int origin, int destination) const { return values_[index(origin, destination)]; }
  void set(int origin, int destination, double value) {
    values_[index(origin, destination)] = value;
  }
  double total() const;
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

 private:
  std::size_t index(int o, int d) const {
    return static_cast<std::size_t>(o) * static_cast<std::size_t>(size_) +
           static_cast<std::size_t>(d);
  }

  std::string period_;
  int size_ = 0;
  std::vector<double> values_;
};

// Weekly multiplier of the nominal demand, weeks 1..horizon.
class UtilizationProfile {
 public:
  UtilizationProfile() = default;
  explicit UtilizationProfile(std::vector<double> rates) : rates_(std::move(rates)) {}

  double at(int week) const { return rates_.at(static_cast<std::size_t>(week - 1)); }
  int weeks() const { return static_cast<int>(rates_.size()); }
  const std::vector<double>& rates() const { return rates_; }

  friend bool operator==(const UtilizationProfile&, const UtilizationProfile&) = default;

 private:
  std::vector<double> rates_;
};

// Which z variables count towards the activation-cost KPI of the tabu term.
enum class CostKpiScope { kActivatableOnly, kActivatableAndBus };

struct Params {
  int max_interrupted = 3;   // N
  int max_units = 10;        // J
  int max_lines = 4;         // S
  double unit_capacity = 100.0;  // q0
  int iterations = 10;       // R
  std::uint64_t seed = 1;
  // Optional override of the activation big-M; J*q0 when absent.
  std::optional<double> big_m;
  CostKpiScope cost_kpi_scope = CostKpiScope::kActivatableOnly;

  friend bool operator==(const Params&, const Params&) = default;
};

struct Weights {
  std::array<double, 3> alpha{1.0, 50.0, 100.0};
  std::array<double, 4> beta{0.03, 1.5, 1.0, 1.0};
  std::array<double, 3> v{1.0, 1.0, 1.0};

  friend bool operator==(const Weights&, const Weights&) = default;
};

struct Instance {
  std::string name;
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::vector<Intervention> interventions;
  int horizon = 0;
  std::vector<std::string> periods;
  std::vector<DemandMatrix> demand;  // one per period, same order
  UtilizationProfile utilization;
  Params params;
  Weights weights;

  // Lookups; -1 when absent.
  int node_index(NodeId id) const;
  int link_index(LinkId id) const;
  int period_index(std::string_view period) const;
  const Link& link(LinkId id) const;
  const Node& node(NodeId id) const;

  // Link indices grouped by tail/head node index.
  std::vector<std::vector<int>> out_links() const;
  std::vector<std::vector<int>> in_links() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string rule, const std::string& detail)
      : std::runtime_error(rule + ": " + detail), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

// Reads an instance document. CSV side-files are resolved relative to the
// document's directory.
Instance load_instance(const std::filesystem::path& path);
Instance parse_instance(std::string_view text, const std::filesystem::path& base_dir = {});

// Throws ValidationError naming the first broken rule.
void validate(const Instance& instance);

// Self-contained JSON (demand inlined as dense matrices).
std::string serialize(const Instance& instance);

// Demand CSV: header of node ids, then one row per origin led by its id.
DemandMatrix read_demand_csv(const std::filesystem::path& path, const std::string& period,
                             const std::vector<Node>& nodes);
void write_demand_csv(std::ostream& out, const DemandMatrix& matrix, const std::vector<Node>& nodes);

// Gaussian perturbation (sigma = 10% of the entry), clamped at zero and
// rounded. Zero entries stay zero and consume no draws.
std::vector<DemandMatrix> sample_od(const Instance& instance, std::uint64_t seed);

DemandMatrix effective_demand(const DemandMatrix& nominal, const UtilizationProfile& g, int week);

}  // namespace possplan

#endif  // POSSPLAN_CORE_INSTANCE_HPP_
