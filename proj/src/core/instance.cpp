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

#include "possplan/core/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "core/csv.hpp"

namespace possplan {

using json = nlohmann::ordered_json;

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kMetro: return "metro";
    case Mode::kBus: return "bus";
    case Mode::kWalk: return "walk";
    case Mode::kActivatable: return "activatable";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "metro") return Mode::kMetro;
  if (text == "bus") return Mode::kBus;
  if (text == "walk") return Mode::kWalk;
  if (text == "activatable") return Mode::kActivatable;
  return std::nullopt;
}

DemandMatrix::DemandMatrix(std::string period, int size)
    : period_(std::move(period)),
      size_(size),
      values_(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0) {}

double DemandMatrix::total() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

int Instance::node_index(NodeId id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int Instance::link_index(LinkId id) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int Instance::period_index(std::string_view period) const {
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (periods[i] == period) return static_cast<int>(i);
  }
  return -1;
}

const Link& Instance::link(LinkId id) const {
  const int i = link_index(id);
  if (i < 0) throw std::out_of_range("unknown link " + std::to_string(id));
  return links[i];
}

const Node& Instance::node(NodeId id) const {
  const int i = node_index(id);
  if (i < 0) throw std::out_of_range("unknown node " + std::to_string(id));
  return nodes[i];
}

std::vector<std::vector<int>> Instance::out_links() const {
  std::vector<std::vector<int>> out(nodes.size());
  for (std::size_t l = 0; l < links.size(); ++l) {
    out[node_index(links[l].tail)].push_back(static_cast<int>(l));
  }
  return out;
}

std::vector<std::vector<int>> Instance::in_links() const {
  std::vector<std::vector<int>> in(nodes.size());
  for (std::size_t l = 0; l < links.size(); ++l) {
    in[node_index(links[l].head)].push_back(static_cast<int>(l));
  }
  return in;
}

namespace {

[[noreturn]] void fail(const std::string& rule, const std::string& detail) {
  throw ValidationError(rule, detail);
}

std::string link_label(const Link& l) { return "link " + std::to_string(l.id); }

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

// JSON field access with ParseError on shape problems.
template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing key '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> get_optional(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get<T>(obj, key, where);
}

DemandMatrix matrix_from_json(const json& rows, const std::string& period,
                              const std::vector<Node>& nodes) {
  const int n = static_cast<int>(nodes.size());
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
    throw ParseError("demand '" + period + "': expected " + std::to_string(n) + " rows");
  }
  DemandMatrix m(period, n);
  for (int o = 0; o < n; ++o) {
    const json& row = rows[o];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ParseError("demand '" + period + "' row " + std::to_string(o + 1) +
                       ": expected " + std::to_string(n) + " entries");
    }
    for (int d = 0; d < n; ++d) {
      if (!row[d].is_number()) {
        throw ParseError("demand '" + period + "': non-numeric entry");
      }
      m.set(o, d, row[d].get<double>());
    }
  }
  return m;
}

}  // namespace

DemandMatrix read_demand_csv(const std::filesystem::path& path, const std::string& period,
                             const std::vector<Node>& nodes) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open demand file " + path.string());
  const auto table = detail::read_csv(in);
  const int n = static_cast<int>(nodes.size());
  if (table.size() != static_cast<std::size_t>(n) + 1) {
    throw ParseError(path.string() + ": expected header plus " + std::to_string(n) + " rows");
  }
  auto parse_id = [&](const std::string& cell) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": bad node id '" + cell + "'");
    }
  };
  // Column order in the file may differ from the node order.
  std::vector<int> column_node;
  const auto& header = table.front();
  if (header.size() != static_cast<std::size_t>(n) + 1) {
    throw ParseError(path.string() + ": header must list every node id");
  }
  for (std::size_t c = 1; c < header.size(); ++c) column_node.push_back(parse_id(header[c]));
  auto index_of = [&](int id) {
    for (int i = 0; i < n; ++i) {
      if (nodes[i].id == id) return i;
    }
    throw ParseError(path.string() + ": unknown node id " + std::to_string(id));
  };
  DemandMatrix m(period, n);
  std::set<int> seen_rows;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() != header.size()) {
      throw ParseError(path.string() + ": row " + std::to_string(r) + " has wrong width");
    }
    const int o = index_of(parse_id(row[0]));
    if (!seen_rows.insert(o).second) throw ParseError(path.string() + ": duplicate origin row");
    for (std::size_t c = 1; c < row.size(); ++c) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(row[c], &used);
        if (used != row[c].size()) throw std::invalid_argument(row[c]);
      } catch (const std::exception&) {
        throw ParseError(path.string() + ": bad number '" + row[c] + "'");
      }
      m.set(o, index_of(column_node[c - 1]), v);
    }
  }
  return m;
}

void write_demand_csv(std::ostream& out, const DemandMatrix& matrix,
                      const std::vector<Node>& nodes) {
  out << "origin";
  for (const Node& n : nodes) out << ',' << n.id;
  out << '\n';
  for (int o = 0; o < matrix.size(); ++o) {
    out << nodes[o].id;
    for (int d = 0; d < matrix.size(); ++d) out << ',' << detail::format_number(matrix.at(o, d));
    out << '\n';
  }
}

Instance parse_instance(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed instance document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be an object");

  Instance inst;
  inst.name = doc.value("name", std::string());
  for (const json& n : get<json>(doc, "nodes", "instance")) {
    inst.nodes.push_back({get<int>(n, "id", "node"), n.value("name", std::string())});
  }
  for (const json& l : get<json>(doc, "links", "instance")) {
    Link link;
    link.id = get<int>(l, "id", "link");
    const std::string where = "link " + std::to_string(link.id);
    link.tail = get<int>(l, "tail", where);
    link.head = get<int>(l, "head", where);
    const auto mode = parse_mode(get<std::string>(l, "mode", where));
    if (!mode) throw ParseError(where + ": unknown mode");
    link.mode = *mode;
    link.nominal_capacity = get_optional<double>(l, "capacity", where);
    link.cost = get<double>(l, "cost", where);
    link.activation_cost = get_optional<double>(l, "activation_cost", where);
    link.reverse = get_optional<int>(l, "reverse", where);
    link.tag = l.value("tag", std::string());
    inst.links.push_back(std::move(link));
  }
  for (const json& i : get<json>(doc, "interventions", "instance")) {
    Intervention iv;
    iv.id = get<int>(i, "id", "intervention");
    const std::string where = "intervention " + std::to_string(iv.id);
    iv.link = get<int>(i, "link", where);
    iv.duration = get<int>(i, "duration", where);
    iv.priority = get<int>(i, "priority", where);
    iv.deadline = get<int>(i, "deadline", where);
    inst.interventions.push_back(iv);
  }
  inst.horizon = get<int>(doc, "horizon", "instance");
  inst.periods = get<std::vector<std::string>>(doc, "periods", "instance");

  const json demand = get<json>(doc, "demand", "instance");
  if (!demand.is_object()) throw ParseError("demand must map period names to matrices");
  for (const std::string& period : inst.periods) {
    if (!demand.contains(period)) throw ParseError("no demand for period '" + period + "'");
    const json& entry = demand.at(period);
    if (entry.is_array()) {
      inst.demand.push_back(matrix_from_json(entry, period, inst.nodes));
    } else if (entry.is_object() && entry.contains("matrix")) {
      inst.demand.push_back(matrix_from_json(entry.at("matrix"), period, inst.nodes));
    } else if (entry.is_object() && entry.contains("csv")) {
      const std::filesystem::path file = base_dir / get<std::string>(entry, "csv", period);
      inst.demand.push_back(read_demand_csv(file, period, inst.nodes));
    } else {
      throw ParseError("demand '" + period + "': expected a matrix or {\"csv\": file}");
    }
  }
  for (const auto& [key, _] : demand.items()) {
    if (std::find(inst.periods.begin(), inst.periods.end(), key) == inst.periods.end()) {
      throw ParseError("demand given for undeclared period '" + key + "'");
    }
  }

  inst.utilization = UtilizationProfile(get<std::vector<double>>(doc, "utilization", "instance"));

  const json params = get<json>(doc, "params", "instance");
  inst.params.max_interrupted = get<int>(params, "N", "params");
  inst.params.max_units = get<int>(params, "J", "params");
  inst.params.max_lines = get<int>(params, "S", "params");
  inst.params.unit_capacity = get<double>(params, "q0", "params");
  inst.params.iterations = params.value("R", inst.params.iterations);
  inst.params.seed = params.value("seed", inst.params.seed);
  if (params.contains("big_m")) {
    const json& m = params.at("big_m");
    if (m.is_number()) {
      inst.params.big_m = m.get<double>();
    } else if (!(m.is_string() && m.get<std::string>() == "tight")) {
      throw ParseError("params.big_m must be \"tight\" or a number");
    }
  }
  if (params.contains("cost_kpi_scope")) {
    const std::string scope = get<std::string>(params, "cost_kpi_scope", "params");
    if (scope == "activatable") {
      inst.params.cost_kpi_scope = CostKpiScope::kActivatableOnly;
    } else if (scope == "activatable+bus") {
      inst.params.cost_kpi_scope = CostKpiScope::kActivatableAndBus;
    } else {
      throw ParseError("params.cost_kpi_scope must be \"activatable\" or \"activatable+bus\"");
    }
  }

  if (doc.contains("weights")) {
    const json& w = doc.at("weights");
    inst.weights.alpha = get<std::array<double, 3>>(w, "alpha", "weights");
    inst.weights.beta = get<std::array<double, 4>>(w, "beta", "weights");
    inst.weights.v = get<std::array<double, 3>>(w, "v", "weights");
  }

  validate(inst);
  return inst;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path.parent_path());
}

void validate(const Instance& inst) {
  std::set<NodeId> node_ids;
  for (const Node& n : inst.nodes) {
    if (!node_ids.insert(n.id).second) fail("unique-node-id", "node " + std::to_string(n.id));
  }
  std::set<LinkId> link_ids;
  std::set<std::tuple<NodeId, NodeId, Mode>> triples;
  for (const Link& l : inst.links) {
    if (!link_ids.insert(l.id).second) fail("unique-link-id", link_label(l));
    if (!node_ids.count(l.tail) || !node_ids.count(l.head)) {
      fail("link-endpoints-exist", link_label(l));
    }
    if (l.tail == l.head) fail("link-not-loop", link_label(l));
    if (!triples.insert({l.tail, l.head, l.mode}).second) fail("unique-link-triple", link_label(l));
    const bool activatable = l.mode == Mode::kActivatable;
    if (activatable == l.nominal_capacity.has_value()) {
      fail("capacity-presence", link_label(l) + " (absent exactly for activatable links)");
    }
    if (l.nominal_capacity && !(*l.nominal_capacity >= 0.0)) {
      fail("capacity-nonnegative", link_label(l));
    }
    if (!(l.cost >= 0.0) || !std::isfinite(l.cost)) fail("cost-nonnegative", link_label(l));
    const bool upgradable = l.mode == Mode::kBus || activatable;
    if (upgradable != l.activation_cost.has_value()) {
      fail("activation-cost-presence", link_label(l) + " (present exactly for bus/activatable)");
    }
    if (l.activation_cost && !(*l.activation_cost >= 0.0)) {
      fail("activation-cost-nonnegative", link_label(l));
    }
  }
  for (const Link& l : inst.links) {
    if (l.reverse) {
      const int r = inst.link_index(*l.reverse);
      if (r < 0) fail("reverse-link-exists", link_label(l));
      const Link& t = inst.links[r];
      if (t.tail != l.head || t.head != l.tail || t.mode != l.mode) {
        fail("reverse-link-opposite", link_label(l));
      }
    }
    if (l.mode == Mode::kActivatable) {
      if (!l.reverse) fail("activatable-twin", link_label(l) + " has no reverse twin");
      const Link& t = inst.links[inst.link_index(*l.reverse)];
      if (!t.reverse || *t.reverse != l.id) {
        fail("activatable-twin", link_label(l) + " twin does not point back");
      }
    }
  }

  if (inst.horizon < 1) fail("horizon-positive", std::to_string(inst.horizon));
  std::set<InterventionId> iv_ids;
  for (const Intervention& iv : inst.interventions) {
    const std::string label = "intervention " + std::to_string(iv.id);
    if (!iv_ids.insert(iv.id).second) fail("unique-intervention-id", label);
    const int l = inst.link_index(iv.link);
    if (l < 0) fail("intervention-link-exists", label);
    if (inst.links[l].mode != Mode::kMetro) fail("intervention-link-metro", label);
    if (iv.duration < 1) fail("intervention-duration", label);
    if (iv.priority < 1 || iv.priority > 10) fail("intervention-priority", label);
    if (iv.deadline < 1 || iv.deadline > inst.horizon) fail("intervention-deadline", label);
    if (iv.duration > iv.deadline) fail("intervention-duration-within-deadline", label);
  }

  if (inst.utilization.weeks() != inst.horizon) {
    fail("utilization-coverage", "expected " + std::to_string(inst.horizon) + " weekly rates");
  }
  for (double g : inst.utilization.rates()) {
    if (!(g >= 0.0) || !std::isfinite(g)) fail("utilization-nonnegative", std::to_string(g));
  }

  if (inst.periods.empty()) fail("periods-nonempty", "no periods");
  if (std::set<std::string>(inst.periods.begin(), inst.periods.end()).size() !=
      inst.periods.size()) {
    fail("unique-period", "duplicate period name");
  }
  if (inst.demand.size() != inst.periods.size()) fail("demand-per-period", "count mismatch");
  for (std::size_t p = 0; p < inst.demand.size(); ++p) {
    const DemandMatrix& m = inst.demand[p];
    if (m.period() != inst.periods[p]) fail("demand-per-period", m.period());
    if (m.size() != static_cast<int>(inst.nodes.size())) fail("demand-shape", m.period());
    for (int o = 0; o < m.size(); ++o) {
      for (int d = 0; d < m.size(); ++d) {
        const double v = m.at(o, d);
        if (!(v >= 0.0) || !is_integer(v)) {
          fail("demand-nonnegative-integer", m.period() + " entry (" + std::to_string(o + 1) +
                                                 "," + std::to_string(d + 1) + ")");
        }
        if (o == d && v != 0.0) fail("demand-diagonal-zero", m.period());
      }
    }
  }

  const Params& p = inst.params;
  if (p.max_interrupted < 1) fail("param-N", "N must be at least 1");
  if (p.max_units < 1) fail("param-J", "J must be at least 1");
  if (p.max_lines < 1) fail("param-S", "S must be at least 1");
  if (!(p.unit_capacity > 0.0)) fail("param-q0", "q0 must be positive");
  if (p.iterations < 1) fail("param-R", "R must be at least 1");
  if (p.big_m && !(*p.big_m > 0.0)) fail("param-big-m", "big-M must be positive");
  for (double w : inst.weights.alpha) {
    if (!(w >= 0.0)) fail("weights-nonnegative", "alpha");
  }
  for (double w : inst.weights.beta) {
    if (!(w >= 0.0)) fail("weights-nonnegative", "beta");
  }
  for (double w : inst.weights.v) {
    if (!(w >= 0.0)) fail("weights-nonnegative", "v");
  }
}

std::string serialize(const Instance& inst) {
  json doc;
  doc["name"] = inst.name;
  json nodes = json::array();
  for (const Node& n : inst.nodes) nodes.push_back({{"id", n.id}, {"name", n.name}});
  doc["nodes"] = std::move(nodes);
  json links = json::array();
  for (const Link& l : inst.links) {
    json j;
    j["id"] = l.id;
    j["tail"] = l.tail;
    j["head"] = l.head;
    j["mode"] = to_string(l.mode);
    if (l.nominal_capacity) j["capacity"] = *l.nominal_capacity;
    j["cost"] = l.cost;
    if (l.activation_cost) j["activation_cost"] = *l.activation_cost;
    if (l.reverse) j["reverse"] = *l.reverse;
    if (!l.tag.empty()) j["tag"] = l.tag;
    links.push_back(std::move(j));
  }
  doc["links"] = std::move(links);
  json ivs = json::array();
  for (const Intervention& iv : inst.interventions) {
    ivs.push_back({{"id", iv.id},
                   {"link", iv.link},
                   {"duration", iv.duration},
                   {"priority", iv.priority},
                   {"deadline", iv.deadline}});
  }
  doc["interventions"] = std::move(ivs);
  doc["horizon"] = inst.horizon;
  doc["periods"] = inst.periods;
  json demand = json::object();
  for (const DemandMatrix& m : inst.demand) {
    json rows = json::array();
    for (int o = 0; o < m.size(); ++o) {
      json row = json::array();
      for (int d = 0; d < m.size(); ++d) row.push_back(m.at(o, d));
      rows.push_back(std::move(row));
    }
    demand[m.period()] = {{"matrix", std::move(rows)}};
  }
  doc["demand"] = std::move(demand);
  doc["utilization"] = inst.utilization.rates();
  json params;
  params["N"] = inst.params.max_interrupted;
  params["J"] = inst.params.max_units;
  params["S"] = inst.params.max_lines;
  params["q0"] = inst.params.unit_capacity;
  params["R"] = inst.params.iterations;
  params["seed"] = inst.params.seed;
  if (inst.params.big_m) {
    params["big_m"] = *inst.params.big_m;
  } else {
    params["big_m"] = "tight";
  }
  params["cost_kpi_scope"] = inst.params.cost_kpi_scope == CostKpiScope::kActivatableOnly
                                 ? "activatable"
                                 : "activatable+bus";
  doc["params"] = std::move(params);
  doc["weights"] = {{"alpha", inst.weights.alpha},
                    {"beta", inst.weights.beta},
                    {"v", inst.weights.v}};
  return doc.dump(2) + "\n";
}

std::vector<DemandMatrix> sample_od(const Instance& instance, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  std::vector<DemandMatrix> out;
  out.reserve(instance.demand.size());
  for (const DemandMatrix& nominal : instance.demand) {
    DemandMatrix sampled(nominal.period(), nominal.size());
    for (int o = 0; o < nominal.size(); ++o) {
      for (int d = 0; d < nominal.size(); ++d) {
        const double mean = nominal.at(o, d);
        if (mean == 0.0) continue;
        const double draw = mean + 0.1 * mean * standard(rng);
        sampled.set(o, d, std::round(std::max(0.0, draw)));
      }
    }
    out.push_back(std::move(sampled));
  }
  return out;
}

DemandMatrix effective_demand(const DemandMatrix& nominal, const UtilizationProfile& g, int week) {
  const double rate = g.at(week);
  DemandMatrix out(nominal.period(), nominal.size());
  for (int o = 0; o < nominal.size(); ++o) {
    for (int d = 0; d < nominal.size(); ++d) out.set(o, d, std::round(nominal.at(o, d) * rate));
  }
  return out;
}

}  // namespace possplan
