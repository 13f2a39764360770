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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "possplan/core/instance.hpp"
#include "support/toy_instances.hpp"

namespace possplan {
namespace {

const char* kTinyDocument = R"({
  "name": "tiny",
  "nodes": [{"id": 1, "name": "A"}, {"id": 2, "name": "B"}, {"id": 3, "name": "C"}],
  "links": [
    {"id": 1, "tail": 1, "head": 2, "mode": "metro", "capacity": 1000, "cost": 1, "reverse": 2},
    {"id": 2, "tail": 2, "head": 1, "mode": "metro", "capacity": 1000, "cost": 1, "reverse": 1},
    {"id": 3, "tail": 2, "head": 3, "mode": "bus", "capacity": 200, "cost": 2,
     "activation_cost": 5, "tag": "train"},
    {"id": 4, "tail": 1, "head": 3, "mode": "activatable", "cost": 3, "activation_cost": 7,
     "reverse": 5},
    {"id": 5, "tail": 3, "head": 1, "mode": "activatable", "cost": 3, "activation_cost": 7,
     "reverse": 4},
    {"id": 6, "tail": 3, "head": 2, "mode": "walk", "capacity": 500, "cost": 4}
  ],
  "interventions": [],
  "horizon": 4,
  "periods": ["am", "pm"],
  "demand": {
    "am": [[0, 10, 0], [5, 0, 0], [0, 0, 0]],
    "pm": {"matrix": [[0, 0, 1], [0, 0, 2], [3, 0, 0]]}
  },
  "utilization": [1, 1, 0.5, 2],
  "params": {"N": 2, "J": 3, "S": 1, "q0": 100, "R": 4, "seed": 9},
  "weights": {"alpha": [1, 50, 100], "beta": [0.03, 1.5, 1, 1], "v": [1, 1, 1]}
})";

std::string with_replacement(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

std::string rule_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const ValidationError& e) {
    return e.rule();
  }
  return "";
}

TEST(LoadInstanceTest, ParsesEveryField) {
  const Instance inst = parse_instance(kTinyDocument);
  EXPECT_EQ(inst.name, "tiny");
  ASSERT_EQ(inst.nodes.size(), 3u);
  ASSERT_EQ(inst.links.size(), 6u);
  EXPECT_EQ(inst.link(3).mode, Mode::kBus);
  EXPECT_EQ(inst.link(3).tag, "train");
  EXPECT_FALSE(inst.link(4).nominal_capacity.has_value());
  EXPECT_EQ(inst.link(4).reverse, 5);
  EXPECT_EQ(inst.horizon, 4);
  EXPECT_EQ(inst.periods, (std::vector<std::string>{"am", "pm"}));
  EXPECT_EQ(inst.demand[0].at(0, 1), 10.0);
  EXPECT_EQ(inst.demand[1].at(2, 0), 3.0);
  EXPECT_EQ(inst.utilization.at(4), 2.0);
  EXPECT_EQ(inst.params.max_interrupted, 2);
  EXPECT_EQ(inst.params.max_units, 3);
  EXPECT_EQ(inst.params.seed, 9u);
  EXPECT_FALSE(inst.params.big_m.has_value());
}

TEST(LoadInstanceTest, EmptyInterventionListIsValid) {
  EXPECT_TRUE(parse_instance(kTinyDocument).interventions.empty());
}

TEST(LoadInstanceTest, InterventionOnBusLinkRejected) {
  const std::string doc = with_replacement(
      kTinyDocument, R"("interventions": [])",
      R"("interventions": [{"id": 1, "link": 3, "duration": 1, "priority": 5, "deadline": 4}])");
  EXPECT_EQ(rule_of(doc), "intervention-link-metro");
}

TEST(LoadInstanceTest, ValidationRulesAreNamed) {
  EXPECT_EQ(rule_of(with_replacement(kTinyDocument, R"("reverse": 5},)", R"("tag": "x"},)")),
            "activatable-twin");
  EXPECT_EQ(rule_of(with_replacement(kTinyDocument, R"("capacity": 200)", R"("capacity": -1)")),
            "capacity-nonnegative");
  EXPECT_EQ(rule_of(with_replacement(kTinyDocument, R"("utilization": [1, 1, 0.5, 2])",
                                     R"("utilization": [1, 1, 0.5])")),
            "utilization-coverage");
  EXPECT_EQ(rule_of(with_replacement(kTinyDocument, R"([5, 0, 0])", R"([5, 0.5, 0])")),
            "demand-nonnegative-integer");
  EXPECT_EQ(rule_of(with_replacement(kTinyDocument, R"("N": 2)", R"("N": 0)")), "param-N");
  EXPECT_EQ(rule_of(with_replacement(kTinyDocument, R"("mode": "walk", "capacity": 500,)",
                                     R"("mode": "walk",)")),
            "capacity-presence");
  const std::string late = with_replacement(
      kTinyDocument, R"("interventions": [])",
      R"("interventions": [{"id": 1, "link": 1, "duration": 3, "priority": 5, "deadline": 2}])");
  EXPECT_EQ(rule_of(late), "intervention-duration-within-deadline");
}

TEST(LoadInstanceTest, DuplicateLinkTripleRejected) {
  const std::string doc = with_replacement(kTinyDocument, R"("id": 6, "tail": 3, "head": 2, "mode": "walk")",
                                           R"("id": 6, "tail": 1, "head": 2, "mode": "metro")");
  EXPECT_EQ(rule_of(doc), "unique-link-triple");
}

TEST(LoadInstanceTest, MalformedDocumentIsParseError) {
  EXPECT_THROW(parse_instance("{\"nodes\": ["), ParseError);
  EXPECT_THROW(parse_instance(with_replacement(kTinyDocument, R"("horizon": 4,)", "")), ParseError);
  EXPECT_THROW(parse_instance(with_replacement(kTinyDocument, R"("mode": "walk")",
                                               R"("mode": "tram")")),
               ParseError);
}

TEST(LoadInstanceTest, ReadsCsvSideFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "possplan_core_csv";
  std::filesystem::create_directories(dir);
  {
    // Columns deliberately out of node order.
    std::ofstream csv(dir / "am.csv");
    csv << "origin,3,1,2\r\n1,0,0,10\r\n2,0,5,0\r\n3,0,0,0\r\n";
  }
  const std::string doc = with_replacement(kTinyDocument,
                                           R"("am": [[0, 10, 0], [5, 0, 0], [0, 0, 0]])",
                                           R"("am": {"csv": "am.csv"})");
  {
    std::ofstream f(dir / "tiny.json");
    f << doc;
  }
  const Instance from_file = load_instance(dir / "tiny.json");
  EXPECT_EQ(from_file, parse_instance(kTinyDocument));
  std::filesystem::remove_all(dir);
}

TEST(LoadInstanceTest, SerializeRoundTrips) {
  const Instance inst = parse_instance(kTinyDocument);
  const std::string text = serialize(inst);
  const Instance again = parse_instance(text);
  EXPECT_EQ(again, inst);
  EXPECT_EQ(serialize(again), text);
}

TEST(LoadInstanceTest, ModeSetsPartitionLinks) {
  const Instance inst = parse_instance(kTinyDocument);
  std::set<LinkId> seen;
  for (Mode m : {Mode::kMetro, Mode::kBus, Mode::kWalk, Mode::kActivatable}) {
    for (const Link& l : inst.links) {
      if (l.mode == m) EXPECT_TRUE(seen.insert(l.id).second);
    }
  }
  EXPECT_EQ(seen.size(), inst.links.size());
}

TEST(DemandCsvTest, WriteThenReadIsIdentity) {
  const Instance inst = parse_instance(kTinyDocument);
  const auto dir = std::filesystem::temp_directory_path() / "possplan_core_csv2";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "pm.csv");
    write_demand_csv(out, inst.demand[1], inst.nodes);
  }
  EXPECT_EQ(read_demand_csv(dir / "pm.csv", "pm", inst.nodes), inst.demand[1]);
  std::filesystem::remove_all(dir);
}

Instance single_pair(double d) {
  testing::InstanceBuilder b(2, 1);
  b.twin(1, 2, Mode::kMetro, 1000, 1);
  b.demand(1, 2, d);
  return b.build();
}

TEST(SampleOdTest, ZeroEntriesStayZero) {
  const Instance inst = single_pair(0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(sample_od(inst, seed)[0].total(), 0.0);
  }
}

TEST(SampleOdTest, SameSeedIsBitIdentical) {
  const Instance inst = parse_instance(kTinyDocument);
  EXPECT_EQ(sample_od(inst, 7), sample_od(inst, 7));
  const auto a = sample_od(inst, 7);
  for (const DemandMatrix& m : a) {
    for (double v : m.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_EQ(v, std::round(v));
    }
  }
}

TEST(SampleOdTest, MomentsMatchTenPercentGaussian) {
  const Instance inst = single_pair(300);
  const int draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < draws; ++s) {
    const double v = sample_od(inst, static_cast<std::uint64_t>(s) + 1)[0].at(0, 1);
    ASSERT_GE(v, 0.0);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt(sum_sq / draws - mean * mean);
  EXPECT_NEAR(mean, 300.0, 1.0);
  EXPECT_NEAR(sd, 30.0, 1.0);
}

TEST(EffectiveDemandTest, ScalesAndRounds) {
  DemandMatrix m("x", 2);
  m.set(0, 1, 10);
  m.set(1, 0, 7);
  const UtilizationProfile g({1.0, 0.5});
  EXPECT_EQ(effective_demand(m, g, 1), m);
  const DemandMatrix half = effective_demand(m, g, 2);
  EXPECT_EQ(half.at(0, 1), 5.0);
  EXPECT_EQ(half.at(1, 0), 4.0);  // 3.5 rounds away from zero
}

}  // namespace
}  // namespace possplan
