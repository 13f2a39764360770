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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "possplan/sp1/plan.hpp"
#include "support/scratch_dir.hpp"
#include "support/sp1_oracle.hpp"
#include "support/toy_instances.hpp"

namespace possplan::cli {
namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "possplan");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string genoa() { return (testing::data_dir() / "genoa" / "genoa.json").string(); }

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(CliTest, ValidateGenoa) {
  const Outcome o = call({"validate", genoa()});
  EXPECT_EQ(o.status, kOk) << o.err;
  EXPECT_NE(o.out.find("21 nodes, 122 links"), std::string::npos);
}

TEST(CliTest, InvalidInstanceExitsOne) {
  testing::ScratchDir dir("cli_invalid");
  write(dir.path() / "broken.json", "{\"nodes\": [");
  EXPECT_EQ(call({"validate", (dir.path() / "broken.json").string()}).status, kInvalidInput);
  Instance inst = testing::corridor_instance();
  inst.interventions[0].deadline = 99;
  write(dir.path() / "late.json", serialize(inst));
  const Outcome o = call({"validate", (dir.path() / "late.json").string()});
  EXPECT_EQ(o.status, kInvalidInput);
  EXPECT_NE(o.err.find("invalid instance"), std::string::npos);
  EXPECT_EQ(call({"validate", (dir.path() / "missing.json").string()}).status, kInvalidInput);
}

TEST(CliTest, UsageErrorsExit64) {
  EXPECT_EQ(call({}).status, kUsage);
  EXPECT_EQ(call({"frobnicate"}).status, kUsage);
  EXPECT_EQ(call({"validate"}).status, kUsage);
  EXPECT_EQ(call({"plan", genoa(), "--baseline", "random"}).status, kUsage);
  EXPECT_EQ(call({"report", "somewhere", "--against", "nobody"}).status, kUsage);
  const Outcome help = call({"--help"});
  EXPECT_EQ(help.status, kOk);
  EXPECT_NE(help.out.find("negotiate"), std::string::npos);
}

TEST(CliTest, InfeasibleAllocationExitsTwo) {
  testing::InstanceBuilder b = testing::metro_line(5, 3);
  b.intervention(1, 1, 1, 1);
  b.intervention(7, 1, 1, 1);
  testing::ScratchDir dir("cli_infeasible");
  write(dir.path() / "tight.json", serialize(b.build()));
  const Outcome o = call({"plan", (dir.path() / "tight.json").string()});
  EXPECT_EQ(o.status, kSolverFailure);
  EXPECT_NE(o.err.find("solver failure"), std::string::npos);
}

TEST(CliTest, PriorityBaselineFinishesByWeek13) {
  const Outcome o = call({"baseline", genoa(), "--strategy", "priority"});
  ASSERT_EQ(o.status, kOk) << o.err;
  std::istringstream in(o.out);
  const auto rows = sp1::read_plan_csv(in);
  ASSERT_FALSE(rows.empty());
  int last = 0;
  for (const auto& r : rows) last = std::max(last, r.week);
  EXPECT_LE(last, 13);
  EXPECT_EQ(call({"plan", genoa(), "--baseline", "priority"}).out, o.out);
}

TEST(CliTest, GanttFromPlanCsv) {
  testing::ScratchDir dir("cli_gantt");
  const auto plan = dir.path() / "plan.csv";
  ASSERT_EQ(call({"baseline", genoa(), "--strategy", "position", "--out", plan.string()}).status,
            kOk);
  const auto svg = dir.path() / "plan.svg";
  ASSERT_EQ(call({"gantt", plan.string(), "--out", svg.string(), "--horizon", "20"}).status, kOk);
  std::ifstream in(plan);
  const auto rows = sp1::read_plan_csv(in);
  const std::string text = slurp(svg);
  std::size_t bars = 0;
  for (std::size_t p = text.find("class=\"bar\""); p != std::string::npos;
       p = text.find("class=\"bar\"", p + 1)) {
    ++bars;
  }
  EXPECT_EQ(bars, rows.size());
}

TEST(CliTest, NegotiateThenReport) {
  testing::ScratchDir dir("cli_negotiate");
  write(dir.path() / "corridor.json", serialize(testing::corridor_instance()));
  const auto run = dir.path() / "run";
  const Outcome o = call({"negotiate", (dir.path() / "corridor.json").string(), "--iterations",
                          "2", "--seed", "7", "--out", run.string()});
  ASSERT_EQ(o.status, kOk) << o.err;
  for (const char* f : {"instance-01/plan.csv", "instance-01/gantt.svg",
                        "instance-01/log.jsonl", "instance-01/iterations/01/links.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(run / f)) << f;
  }
  const Outcome csv = call({"report", run.string()});
  ASSERT_EQ(csv.status, kOk) << csv.err;
  EXPECT_EQ(csv.out, slurp(run / "report.csv"));
  const Outcome json = call({"report", run.string(), "--format", "json"});
  EXPECT_EQ(json.out, slurp(run / "report.json"));
  const Outcome narrow = call({"report", run.string(), "--against", "position"});
  EXPECT_EQ(narrow.out.substr(0, narrow.out.find('\n')),
            "table,period,component,best,position,delta_position_pct");
}

}  // namespace
}  // namespace possplan::cli
