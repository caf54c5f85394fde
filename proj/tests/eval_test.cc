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

#include "skim/eval.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "skim/errors.h"

namespace skim {
namespace {

namespace fs = std::filesystem;

// 50 presentations of class 0 and 450 of class 1, each 100 steps long with
// the reference time at 40.
LabeledRasterSet FiveHundred() {
  LabeledRasterSet set;
  for (int r = 0; r < 500; ++r) {
    set.rasters.push_back(SpikeRaster(1, 100));
    set.labels.push_back(r < 50 ? 0 : 1);
    set.reference_times.push_back(40);
  }
  return set;
}

std::vector<SpikeMatrix> Silent(size_t n, int rows = 1) {
  return std::vector<SpikeMatrix>(n, SpikeMatrix::Constant(rows, 100, false));
}

TEST(WillsErrorTest, HandCases) {
  EXPECT_EQ(WillsError({50, 0, 0, 450}).value, 0.0);
  const WillsResult w = WillsError({45, 9, 5, 441});
  EXPECT_NEAR(w.value, 0.131519274376417234, 1e-15);
  EXPECT_FALSE(w.degenerate());
  EXPECT_EQ(WillsError({0, 0, 0, 0}).value, 0.0);
}

TEST(WillsErrorTest, DegenerateFlags) {
  const WillsResult silent = WillsError({0, 0, 50, 450});
  EXPECT_TRUE(std::isinf(silent.value));
  EXPECT_TRUE(silent.tp_degenerate);
  EXPECT_FALSE(silent.tn_degenerate);
  const WillsResult chatty = WillsError({50, 450, 0, 0});
  EXPECT_TRUE(std::isinf(chatty.value));
  EXPECT_TRUE(chatty.tn_degenerate);
  EXPECT_FALSE(chatty.tp_degenerate);
  EXPECT_THROW(WillsError({-1, 0, 0, 0}), ValidationError);
}

TEST(WillsErrorTest, MonotoneInErrors) {
  for (long tp = 1; tp < 20; tp += 3) {
    for (long tn = 1; tn < 20; tn += 4) {
      for (long fn = 0; fn < 10; ++fn) {
        for (long fp = 0; fp < 10; ++fp) {
          const double base = WillsError({tp, fp, fn, tn}).value;
          EXPECT_GT(WillsError({tp, fp + 1, fn, tn}).value, base);
          EXPECT_GT(WillsError({tp, fp, fn + 1, tn}).value, base);
          EXPECT_GE(base, 0.0);
        }
      }
    }
  }
}

TEST(RateErrorTest, Values) {
  EXPECT_DOUBLE_EQ(RateError({45, 9, 5, 441}), 5.0 / 50 + 9.0 / 450);
  EXPECT_DOUBLE_EQ(RateError({0, 0, 50, 450}), 1.0);
  EXPECT_DOUBLE_EQ(RateError({0, 3, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(DetectionRate({45, 9, 5, 441}), 0.9);
  EXPECT_THROW(DetectionRate({0, 1, 0, 1}), DegenerateError);
}

TEST(MatchPresentationsTest, SilentOutput) {
  const LabeledRasterSet set = FiveHundred();
  const ConfusionCounts c = MatchPresentations(Silent(500), set, 0, 10);
  EXPECT_EQ(c, (ConfusionCounts{0, 0, 50, 450}));
  EXPECT_TRUE(WillsError(c).tp_degenerate);
}

TEST(MatchPresentationsTest, PerfectDetector) {
  const LabeledRasterSet set = FiveHundred();
  std::vector<SpikeMatrix> out = Silent(500);
  for (int r = 0; r < 50; ++r) out[r](0, 45) = true;
  const ConfusionCounts c = MatchPresentations(out, set, 0, 10);
  EXPECT_EQ(c, (ConfusionCounts{50, 0, 0, 450}));
  EXPECT_EQ(WillsError(c).value, 0.0);
}

TEST(MatchPresentationsTest, WindowEdges) {
  const LabeledRasterSet set = FiveHundred();
  std::vector<SpikeMatrix> out = Silent(500);
  out[0](0, 39) = true;   // before the window
  out[1](0, 40) = true;   // first step
  out[2](0, 49) = true;   // last step
  out[3](0, 50) = true;   // just after
  out[60](0, 0) = true;   // stray spike on a non-target
  const ConfusionCounts c = MatchPresentations(out, set, 0, 10);
  EXPECT_EQ(c, (ConfusionCounts{2, 1, 48, 449}));
}

TEST(MatchPresentationsTest, CountsAreConserved) {
  const LabeledRasterSet set = FiveHundred();
  std::vector<SpikeMatrix> out = Silent(500);
  for (int r = 0; r < 500; r += 7) out[r](0, r % 100) = true;
  const ConfusionCounts c = MatchPresentations(out, set, 0, 10);
  EXPECT_EQ(c.positives(), 50);
  EXPECT_EQ(c.negatives(), 450);
}

TEST(MatchPresentationsTest, Errors) {
  const LabeledRasterSet set = FiveHundred();
  EXPECT_THROW(MatchPresentations(Silent(499), set, 0, 10), DimensionError);
  EXPECT_THROW(MatchPresentations(Silent(500), set, 0, 0), ValidationError);
  EXPECT_THROW(MatchPresentations(Silent(500, 2), set, 2, 10), DimensionError);
}

TEST(ScoreClassesTest, MeanOverClasses) {
  const LabeledRasterSet set = FiveHundred();
  std::vector<SpikeMatrix> out = Silent(500, 2);
  for (int r = 0; r < 500; ++r) out[r](r < 50 ? 0 : 1, 41) = true;
  const ClassScores s = ScoreClasses(out, set, 10);
  ASSERT_EQ(s.counts.size(), 2u);
  EXPECT_EQ(s.counts[0], (ConfusionCounts{50, 0, 0, 450}));
  EXPECT_EQ(s.counts[1], (ConfusionCounts{450, 0, 0, 50}));
  EXPECT_EQ(s.mean_error, 0.0);
  out[0](1, 90) = true;
  EXPECT_DOUBLE_EQ(ScoreClasses(out, set, 10).mean_error, 0.5 * (1.0 / 49));
}

EmbeddedPatternTask SmallTask() {
  EmbeddedPatternTask task;
  task.params.pattern_len = 20;
  task.params.target_delay = 5;
  task.params.target_width = 5;
  task.params.stream_len = 200;
  task.params.num_embeddings = 2;
  task.pattern = {{0, 0}, {1, 19}};
  task.pattern_times = {40, 120};
  task.target_times = {64, 144};
  return task;
}

TEST(MatchStreamTest, SlotsAndGapChunks) {
  const EmbeddedPatternTask task = SmallTask();
  ASSERT_EQ(task.slot_len(), 30);
  SpikeMatrix out = SpikeMatrix::Constant(1, 200, false);
  // Gaps: [0,30) [70,100) [150,180); the partial chunks are dropped.
  EXPECT_EQ(MatchStream(out, task), (ConfusionCounts{0, 0, 2, 3}));
  out(0, 66) = true;
  out(0, 35) = true;   // inside a dropped remainder
  out(0, 50) = true;   // inside a slot, outside its window
  EXPECT_EQ(MatchStream(out, task), (ConfusionCounts{1, 0, 1, 3}));
  out(0, 99) = true;
  out(0, 148) = true;
  EXPECT_EQ(MatchStream(out, task), (ConfusionCounts{2, 1, 0, 2}));
}

TEST(MatchStreamTest, TargetSignalIsPerfect) {
  const GeneratedTask g = GenerateEmbeddedTask(EmbeddedTaskParams{}, 11);
  const SpikeMatrix out = g.target.array() > 0.5;
  const ConfusionCounts c = MatchStream(out, g.task);
  EXPECT_EQ(c.true_positives, 100);
  EXPECT_EQ(c.false_positives, 0);
  EXPECT_EQ(c.false_negatives, 0);
  EXPECT_GT(c.true_negatives, 0);
  EXPECT_THROW(MatchStream(SpikeMatrix::Constant(1, 10, false), g.task),
               DimensionError);
}

class ExportTracesTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("skim_eval_test_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::vector<std::string> Lines(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
  }

  fs::path dir_;
};

TEST_F(ExportTracesTest, WritesAllFiles) {
  NetworkConfig config;
  config.num_inputs = 2;
  config.num_dendrites = 6;
  config.num_outputs = 10;
  SkimNetwork net = SkimNetwork::Create(config);
  net.SetOutputWeights(Eigen::MatrixXd::Constant(10, 6, 3.0));
  const SpikeRaster input(2, 50, {{1, 3}, {0, 7}, {0, 2}});
  const ForwardTrace trace = Forward(net, input);
  const SomaMatrix target = SomaMatrix::Zero(10, 50);
  ExportTraces(trace, input, target, dir_, std::vector<int>{0, 5});

  for (const char* name : {"input_events.csv", "activations.csv", "soma.csv",
                           "output_spikes.csv", "target.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / name)) << name;
  }
  const auto events = Lines(dir_ / "input_events.csv");
  EXPECT_EQ(events, (std::vector<std::string>{"channel,time", "0,2", "0,7",
                                              "1,3"}));
  const auto activations = Lines(dir_ / "activations.csv");
  EXPECT_EQ(activations.front(), "time,a0,a5");
  EXPECT_EQ(activations.size(), 51u);
  const auto soma = Lines(dir_ / "soma.csv");
  EXPECT_EQ(std::count(soma.front().begin(), soma.front().end(), ','), 10);
  EXPECT_EQ(soma.size(), 51u);
  EXPECT_EQ(Lines(dir_ / "output_spikes.csv").front(), "output,time");
}

TEST_F(ExportTracesTest, EmptyTraceWritesHeaders) {
  NetworkConfig config;
  config.num_inputs = 1;
  config.num_dendrites = 3;
  const SkimNetwork net = SkimNetwork::Create(config);
  const SpikeRaster input(1, 20);
  ExportTraces(Forward(net, input), input, SomaMatrix(), dir_);
  EXPECT_EQ(Lines(dir_ / "input_events.csv").size(), 1u);
  EXPECT_EQ(Lines(dir_ / "soma.csv"), std::vector<std::string>{"time"});
  EXPECT_EQ(Lines(dir_ / "output_spikes.csv").size(), 1u);
  EXPECT_EQ(Lines(dir_ / "target.csv"), std::vector<std::string>{"time"});
  EXPECT_EQ(Lines(dir_ / "activations.csv").size(), 21u);
}

TEST_F(ExportTracesTest, UnwritablePathThrows) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "file") << "x";
  NetworkConfig config;
  config.num_inputs = 1;
  config.num_dendrites = 2;
  const SkimNetwork net = SkimNetwork::Create(config);
  const SpikeRaster input(1, 5);
  EXPECT_THROW(
      ExportTraces(Forward(net, input), input, SomaMatrix(), dir_ / "file"),
      IoError);
  EXPECT_THROW(ExportTraces(Forward(net, input), input, SomaMatrix(), dir_,
                            std::vector<int>{2}),
               DimensionError);
}

}  // namespace
}  // namespace skim
