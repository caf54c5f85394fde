// Copyright 2026 The SKIM Authors
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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "skim/patterns.h"

namespace skim {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const char* binary = std::getenv("SKIM_BINARY");
    if (binary == nullptr) GTEST_SKIP() << "SKIM_BINARY not set";
    binary_ = binary;
    dir_ = fs::temp_directory_path() /
           ("skim_cli_test_" + std::string(::testing::UnitTest::GetInstance()
                                                ->current_test_info()
                                                ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of `skim <args>`; stdout and stderr go to files in dir_.
  int Run(const std::string& args) {
    const std::string cmd = binary_ + " " + args + " >" +
                            (dir_ / "stdout.txt").string() + " 2>" +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  // A small embedded task that trains in well under a second.
  Json SmallConfig(const fs::path& out) const {
    Json c;
    c["task"]["num_embeddings"] = 20;
    c["task"]["stream_len"] = 5000;
    c["task"]["test_embeddings"] = 10;
    c["task"]["test_stream_len"] = 2600;
    c["output"]["dir"] = out.string();
    return c;
  }

  fs::path WriteConfig(const Json& c, const std::string& name = "cfg.json") {
    const fs::path path = dir_ / name;
    std::ofstream(path) << c.dump(2);
    return path;
  }

  static Json ReadJson(const fs::path& path) {
    return Json::parse(Slurp(path));
  }

  std::string binary_;
  fs::path dir_;
};

TEST_F(CliTest, KernelsListsCatalog) {
  ASSERT_EQ(Run("kernels"), 0);
  const std::string out = Slurp(dir_ / "stdout.txt");
  for (const char* kind : {"alpha", "damped_resonance", "delayed_alpha",
                           "delayed_gaussian", "leaky_nl", "custom"}) {
    EXPECT_NE(out.find(kind), std::string::npos) << kind;
  }
}

TEST_F(CliTest, DemoWritesArtifacts) {
  const fs::path out = dir_ / "run";
  ASSERT_EQ(Run("demo --config " + WriteConfig(SmallConfig(out)).string()), 0)
      << Slurp(dir_ / "stderr.txt");
  for (const char* name :
       {"config.json", "network.json", "network_weights.csv",
        "train_stream.txt", "test_stream.txt", "metrics.json",
        "traces/activations.csv", "traces/input_events.csv"}) {
    EXPECT_TRUE(fs::exists(out / name)) << name;
  }
  const Json m = ReadJson(out / "metrics.json");
  EXPECT_TRUE(m.contains("wills_error"));
  EXPECT_TRUE(m.contains("detection_rate"));
  EXPECT_EQ(m.at("true_positives").get<long>() +
                m.at("false_negatives").get<long>(),
            10);
}

TEST_F(CliTest, DemoIsDeterministic) {
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  ASSERT_EQ(Run("demo --config " + WriteConfig(SmallConfig(a), "a.json").string()), 0);
  ASSERT_EQ(Run("demo --config " + WriteConfig(SmallConfig(b), "b.json").string()), 0);
  for (const char* name : {"network.json", "network_weights.csv",
                           "metrics.json", "train_stream.txt",
                           "traces/soma.csv"}) {
    EXPECT_EQ(Slurp(a / name), Slurp(b / name)) << name;
  }
}

TEST_F(CliTest, SeedOverrideChangesRun) {
  const fs::path cfg = WriteConfig(SmallConfig(dir_ / "unused"));
  ASSERT_EQ(Run("demo --config " + cfg.string() + " --seed 1 --out " +
                (dir_ / "s1").string()),
            0);
  ASSERT_EQ(Run("demo --config " + cfg.string() + " --seed 2 --out " +
                (dir_ / "s2").string()),
            0);
  EXPECT_NE(Slurp(dir_ / "s1/network.json"), Slurp(dir_ / "s2/network.json"));
  EXPECT_EQ(ReadJson(dir_ / "s2/metrics.json").at("seed"), 2);
}

TEST_F(CliTest, OnlineSolver) {
  const fs::path out = dir_ / "online";
  ASSERT_EQ(Run("demo --solver online --config " +
                WriteConfig(SmallConfig(out)).string()),
            0)
      << Slurp(dir_ / "stderr.txt");
  EXPECT_EQ(ReadJson(out / "metrics.json").at("solver"), "online");
}

TEST_F(CliTest, TrainTestPrune) {
  const fs::path out = dir_ / "ttp";
  Json c = SmallConfig(out);
  c["network"]["num_dendrites"] = 60;
  c["prune"]["keep"] = 40;
  const std::string cfg = WriteConfig(c).string();
  ASSERT_EQ(Run("train --config " + cfg), 0) << Slurp(dir_ / "stderr.txt");
  EXPECT_TRUE(fs::exists(out / "train_metrics.json"));
  ASSERT_EQ(Run("test --config " + cfg), 0) << Slurp(dir_ / "stderr.txt");
  EXPECT_TRUE(ReadJson(out / "metrics.json").contains("wills_error"));
  ASSERT_EQ(Run("prune --config " + cfg), 0) << Slurp(dir_ / "stderr.txt");
  const Json pruned = ReadJson(out / "pruned_network.json");
  EXPECT_EQ(pruned.at("num_dendrites"), 40);
  const Json report = ReadJson(out / "prune_report.json");
  EXPECT_EQ(report.at("dendrites_before"), 60);
  EXPECT_EQ(report.at("kept_indices").size(), 40u);
}

TEST_F(CliTest, DatasetWithWrongChannelCountFails) {
  LabeledRasterSet set;
  set.rasters = {SpikeRaster(5, 100, {{4, 10}}), SpikeRaster(5, 100, {{0, 5}})};
  set.labels = {0, 1};
  set.reference_times = {10, 5};
  {
    std::ofstream f(dir_ / "set.txt");
    WriteRasterSet(set, f);
  }
  Json c;
  c["task"]["type"] = "dataset";
  c["task"]["train_path"] = (dir_ / "set.txt").string();
  c["task"]["test_path"] = (dir_ / "set.txt").string();
  c["network"]["num_inputs"] = 4;
  c["network"]["num_outputs"] = 2;
  c["output"]["dir"] = (dir_ / "ds").string();
  EXPECT_EQ(Run("train --config " + WriteConfig(c).string()), 1);
  EXPECT_FALSE(fs::exists(dir_ / "ds/network.json"));
}

TEST_F(CliTest, InvalidConfigWritesNothing) {
  const fs::path out = dir_ / "bad";
  Json c = SmallConfig(out);
  c["network"]["threshold"] = -1.0;
  c["task"]["bogus"] = 3;
  EXPECT_EQ(Run("demo --config " + WriteConfig(c).string()), 1);
  EXPECT_FALSE(fs::exists(out));
  const std::string err = Slurp(dir_ / "stderr.txt");
  EXPECT_NE(err.find("bogus"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Run("demo --solver newton"), 1);
  EXPECT_EQ(Run("frobnicate"), 1);
  {
    std::ofstream(dir_ / "broken.json") << "{\n\"seed\": \n";
  }
  EXPECT_EQ(Run("demo --config " + (dir_ / "broken.json").string()), 1);
  EXPECT_EQ(Run("test --out " + (dir_ / "missing").string()), 1);
}

}  // namespace
}  // namespace skim
