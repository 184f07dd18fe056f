// Copyright 2026 The epirl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "epirl.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = EPIRL_CLI_PATH;
const std::string kSmall = " --set population.pop_size=500";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("epirl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + kCli + "' " + args +
                            " > '" + (dir_ / "stdout.txt").string() + "' 2> '" +
                            (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& p) const {
    std::ifstream is(p.is_absolute() ? p : dir_ / p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitTwoAndLeaveNoOutput) {
  EXPECT_EQ(run("simulate --out out --bogus"), 2);
  EXPECT_EQ(run("simulate --out out --policy nonsense"), 2);
  EXPECT_EQ(run("simulate --out out --set no.such.key=1"), 2);
  EXPECT_EQ(run("train --out out --agent dqn --space continuous --episodes 1"), 2);
  EXPECT_EQ(run("compare --out out --policy none"), 2);
  EXPECT_EQ(run("calibrate --out out"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(Cli, SimulateIsDeterministic) {
  ASSERT_EQ(run("simulate --seed 4 --out a --policy schedule:7w7l" + kSmall), 0) << read("stderr.txt");
  ASSERT_EQ(run("simulate --seed 4 --out b --policy schedule:7w7l" + kSmall), 0);
  for (const auto* f : {"daily.csv", "trace.jsonl", "rt.csv", "observed.csv"}) {
    EXPECT_FALSE(read(fs::path("a") / f).empty()) << f;
    EXPECT_EQ(read(fs::path("a") / f), read(fs::path("b") / f)) << f;
  }
  const auto summary = epirl::json::parse(read("a/summary.json"));
  EXPECT_TRUE(summary.contains("manifest"));
  EXPECT_EQ(epirl::csv::read_string(read("a/daily.csv"), "daily").rows.size(), 133u);
}

TEST_F(Cli, ReplayReproducesOutputs) {
  ASSERT_EQ(run("simulate --seed 2 --out a --policy none" + kSmall), 0);
  const std::string before = read("a/daily.csv");
  fs::remove(dir_ / "a/daily.csv");
  ASSERT_EQ(run("replay a/manifest.json"), 0) << read("stderr.txt");
  EXPECT_EQ(read("a/daily.csv"), before);
}

TEST_F(Cli, ConfigPathFromEnvironment) {
  fs::create_directories(dir_ / "cfg");
  std::ofstream(dir_ / "cfg/epirl.json") << R"({"population": {"pop_size": 321}})";
  ASSERT_EQ(run("simulate --out a --policy none", "EPIRL_CONFIG_PATH=" + (dir_ / "cfg").string()), 0)
      << read("stderr.txt");
  const auto daily = epirl::csv::read_string(read("a/daily.csv"), "daily");
  const auto& row = daily.rows.front();
  double total = 0;
  for (int k = 1; k <= 5; ++k) total += std::stod(row[k]);
  EXPECT_EQ(total, 321.0);
}

TEST_F(Cli, TrainZeroEpisodes) {
  ASSERT_EQ(run("train --out t --episodes 0" + kSmall), 0) << read("stderr.txt");
  EXPECT_TRUE(fs::exists(dir_ / "t/checkpoints/checkpoint_final.json"));
  EXPECT_EQ(read("t/curve.csv"), "episode,return\n");
}

TEST_F(Cli, EvaluateAndCompare) {
  ASSERT_EQ(run("train --out t --episodes 1" + kSmall), 0) << read("stderr.txt");
  ASSERT_EQ(run("evaluate --out e --policy checkpoint:t/checkpoints/checkpoint_final.json --seeds 1,2" + kSmall), 0)
      << read("stderr.txt");
  EXPECT_EQ(epirl::csv::read_string(read("e/episodes.csv"), "e").rows.size(), 2u);
  ASSERT_EQ(run("compare --out c --policy none --policy none --policy schedule:7w7l --seeds 1..2" + kSmall), 0)
      << read("stderr.txt");
  const auto rep = epirl::csv::read_string(read("c/report.csv"), "r");
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows[1][0], "none_2");
  for (std::size_t k = 1; k < rep.rows[0].size(); ++k) EXPECT_EQ(rep.rows[0][k], rep.rows[1][k]);
}

TEST_F(Cli, CalibrateWritesOverlay) {
  ASSERT_EQ(run("calibrate --out k --trials 2 --data '" + std::string(EPIRL_SOURCE_DIR) +
                "/data/synthetic_observed.csv'" + kSmall + " --set calibration.replications=1"),
            0)
      << read("stderr.txt");
  EXPECT_EQ(epirl::csv::read_string(read("k/trials.csv"), "t").rows.size(), 2u);
  ASSERT_EQ(run("simulate --out s --config k/best_params.json --policy none" + kSmall), 0) << read("stderr.txt");
}

}  // namespace
