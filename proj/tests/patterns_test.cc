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

#include "skim/patterns.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "skim/errors.h"

namespace skim {
namespace {

TEST(EmbeddedTaskTest, PaperShape) {
  const EmbeddedTaskParams params;
  const GeneratedTask g = GenerateEmbeddedTask(params, 1);
  EXPECT_EQ(g.input.num_channels(), 4);
  EXPECT_EQ(g.input.num_steps(), 43000);
  EXPECT_EQ(g.target.rows(), 1);
  EXPECT_EQ(g.target.cols(), 43000);
  ASSERT_EQ(g.task.pattern.size(), 4u);
  // One spike per channel.
  for (int c = 0; c < 4; ++c) EXPECT_EQ(g.task.pattern[c].channel, c);
  for (const PatternSpike& s : g.task.pattern) {
    EXPECT_GE(s.offset, 0);
    EXPECT_LT(s.offset, 200);
  }
  EXPECT_EQ(g.task.pattern_times.size(), 100u);
}

TEST(EmbeddedTaskTest, GeometryIsConsistent) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    EmbeddedTaskParams params;
    params.num_embeddings = 150;
    const GeneratedTask g = GenerateEmbeddedTask(params, seed);
    const EmbeddedPatternTask& t = g.task;
    int last = 0;
    for (const PatternSpike& s : t.pattern) last = std::max(last, s.offset);
    for (size_t k = 0; k < t.pattern_times.size(); ++k) {
      EXPECT_EQ(t.target_times[k], t.pattern_times[k] + last + 20);
      EXPECT_LE(t.target_times[k] + 10, params.stream_len);
      for (const PatternSpike& s : t.pattern) {
        EXPECT_TRUE(g.input.Contains(s.channel, t.pattern_times[k] + s.offset));
      }
      if (k > 0) {
        EXPECT_GE(t.pattern_times[k] - t.pattern_times[k - 1], t.slot_len());
      }
      for (int dt = 0; dt < 10; ++dt) {
        EXPECT_EQ(g.target(0, t.target_times[k] + dt), 1.0);
      }
    }
    EXPECT_EQ(g.target.sum(), 10.0 * 150);
  }
}

TEST(EmbeddedTaskTest, NoiseCountStatistics) {
  const EmbeddedTaskParams params;
  const double expected = 1.0 * 4 * 100;
  double total = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const GeneratedTask g = GenerateEmbeddedTask(params, seed);
    const double n = static_cast<double>(g.task.noise_events.size());
    EXPECT_LT(std::abs(n - expected), 3 * std::sqrt(expected));
    EXPECT_EQ(g.input.events().size(), 400 + g.task.noise_events.size());
    total += n;
  }
  EXPECT_LT(std::abs(total / 100 - expected), 0.05 * expected);
}

TEST(EmbeddedTaskTest, EdgeCases) {
  EmbeddedTaskParams params;
  params.noise_ratio = 0;
  EXPECT_TRUE(GenerateEmbeddedTask(params, 3).task.noise_events.empty());
  params.num_embeddings = 0;
  params.noise_ratio = 1;
  const GeneratedTask empty = GenerateEmbeddedTask(params, 3);
  EXPECT_EQ(empty.target.cwiseAbs().maxCoeff(), 0.0);
}

TEST(EmbeddedTaskTest, Deterministic) {
  const EmbeddedTaskParams params;
  const GeneratedTask a = GenerateEmbeddedTask(params, 5);
  const GeneratedTask b = GenerateEmbeddedTask(params, 5);
  EXPECT_EQ(a.input, b.input);
  EXPECT_EQ(a.task.pattern, b.task.pattern);
  EXPECT_FALSE(a.input == GenerateEmbeddedTask(params, 6).input);
}

TEST(EmbeddedTaskTest, HeldOutStreamKeepsPattern) {
  const EmbeddedTaskParams params;
  const GeneratedTask train = GenerateEmbeddedTask(params, 5);
  const GeneratedTask test =
      GenerateEmbeddedTask(params, train.task.pattern, 77);
  EXPECT_EQ(test.task.pattern, train.task.pattern);
  EXPECT_NE(test.task.pattern_times, train.task.pattern_times);
}

TEST(EmbeddedTaskTest, Validation) {
  EmbeddedTaskParams params;
  params.pattern_spike_count = 5;
  EXPECT_THROW(GenerateEmbeddedTask(params, 1), ValidationError);
  params = {};
  params.num_embeddings = 200;
  params.stream_len = 200 * 230 - 1;
  EXPECT_THROW(GenerateEmbeddedTask(params, 1), ValidationError);
  params = {};
  params.target_width = 0;
  params.noise_ratio = -1;
  try {
    ValidateTaskParams(params);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("target_width"), std::string::npos);
    EXPECT_NE(msg.find("noise_ratio"), std::string::npos);
  }
}

TEST(TargetSignalTest, TenStepWindow) {
  const int refs[] = {500};
  const int rows[] = {0};
  const SomaMatrix y = MakeTargetSignal(refs, 10, 1.0, 1000, 1, rows);
  for (int t = 0; t < 1000; ++t) {
    EXPECT_EQ(y(0, t), (t >= 500 && t < 510) ? 1.0 : 0.0);
  }
}

TEST(TargetSignalTest, AmplitudeScalesExactly) {
  const int refs[] = {100, 105, 700};
  const int rows[] = {0, 0, 1};
  const SomaMatrix one = MakeTargetSignal(refs, 200, 1.0, 1000, 2, rows);
  const SomaMatrix ten = MakeTargetSignal(refs, 200, 10.0, 1000, 2, rows);
  EXPECT_TRUE((ten.array() == 10.0 * one.array()).all());
  // Overlapping windows merge rather than add.
  EXPECT_EQ(one.maxCoeff(), 1.0);
  EXPECT_EQ(one.row(0).sum(), 205.0);
  EXPECT_EQ(one.row(1).sum(), 200.0);
}

TEST(TargetSignalTest, WindowMustFit) {
  const int refs[] = {995};
  const int rows[] = {0};
  EXPECT_THROW(MakeTargetSignal(refs, 10, 1.0, 1000, 1, rows),
               ValidationError);
}

TEST(TimeWarpTest, RoundingExamples) {
  const SpikeRaster r(1, 200, {{0, 100}});
  EXPECT_TRUE(TimeWarp(r, 0.76).Contains(0, 76));
  EXPECT_TRUE(TimeWarp(r, 1.24).Contains(0, 124));
  EXPECT_EQ(TimeWarp(r, 0.76).num_steps(), 152);
  EXPECT_EQ(TimeWarp(r, 1.24).num_steps(), 248);
  EXPECT_EQ(TimeWarp(r, 1.0), r);
  EXPECT_THROW(TimeWarp(r, 0.0), DomainError);
}

TEST(TimeWarpTest, CollisionsMerge) {
  const SpikeRaster r(1, 10, {{0, 4}, {0, 5}});
  EXPECT_EQ(TimeWarp(r, 0.1).events().size(), 1u);
}

TEST(TimeWarpTest, CompositionWithinOneStep) {
  std::vector<SpikeEvent> events;
  for (int t = 0; t < 500; t += 7) events.push_back({t % 3, t});
  const SpikeRaster r(3, 500, events);
  for (double a : {0.76, 0.9, 1.13}) {
    for (double b : {0.8, 1.0, 1.24}) {
      const SpikeRaster twice = TimeWarp(TimeWarp(r, a), b);
      const SpikeRaster once = TimeWarp(r, a * b);
      for (const SpikeEvent& e : twice.events()) {
        bool near = false;
        for (int d = -1; d <= 1; ++d) near |= once.Contains(e.channel, e.time + d);
        EXPECT_TRUE(near) << a << " " << b << " t=" << e.time;
      }
    }
  }
}

LabeledRasterSet ThreeRasters() {
  LabeledRasterSet set;
  set.rasters = {SpikeRaster(2, 100, {{0, 10}, {1, 50}}),
                 SpikeRaster(2, 100, {{1, 20}}), SpikeRaster(2, 60)};
  set.labels = {0, 1, 1};
  set.reference_times = {50, 20, 0};
  return set;
}

TEST(AugmentTest, Cardinality) {
  LabeledRasterSet ten;
  for (int k = 0; k < 10; ++k) {
    ten.rasters.push_back(SpikeRaster(2, 100, {{0, 10 + k}}));
    ten.labels.push_back(k);
    ten.reference_times.push_back(10 + k);
  }
  const LabeledRasterSet out = AugmentTrainingSet(ten);
  EXPECT_EQ(out.size(), 70u);
  EXPECT_EQ(out.labels[6], 0);
  EXPECT_EQ(out.labels[7], 1);
}

TEST(AugmentTest, FactorConventions) {
  const std::vector<double> f = WarpFactors(kDefaultWarpMin, kDefaultWarpMax,
                                            kDefaultWarpSteps);
  ASSERT_EQ(f.size(), 7u);
  EXPECT_DOUBLE_EQ(f.front(), 0.76);
  EXPECT_DOUBLE_EQ(f.back(), 1.24);
  EXPECT_DOUBLE_EQ(f[3], 1.0);
  EXPECT_EQ(WarpFactors(0.8, 1.2, 1), std::vector<double>{1.0});
  EXPECT_THROW(WarpFactors(1.2, 0.8, 3), ValidationError);
  EXPECT_THROW(WarpFactors(0.8, 1.2, 0), ValidationError);
}

TEST(AugmentTest, CarriesWarpedReferenceTimes) {
  const LabeledRasterSet out = AugmentTrainingSet(ThreeRasters(), 0.5, 1.5, 3);
  ASSERT_EQ(out.size(), 9u);
  EXPECT_EQ(out.reference_times[0], 25);
  EXPECT_EQ(out.reference_times[1], 50);
  EXPECT_EQ(out.reference_times[2], 75);
  EXPECT_TRUE(out.rasters[2].Contains(1, 75));
}

TEST(TrainingSetTest, PadsShortRasters) {
  const TrainingSet t = TrainingSetFromLabeled(ThreeRasters(), 2, 80, 10.0);
  ASSERT_EQ(t.inputs.size(), 3u);
  EXPECT_EQ(t.inputs[0].num_steps(), 130);
  EXPECT_EQ(t.inputs[1].num_steps(), 100);
  EXPECT_EQ(t.targets[0].rows(), 2);
  EXPECT_EQ(t.targets[0].row(0).sum(), 800.0);
  EXPECT_EQ(t.targets[0].row(1).sum(), 0.0);
  EXPECT_EQ(t.targets[1](1, 20), 10.0);
  EXPECT_THROW(TrainingSetFromLabeled(ThreeRasters(), 1, 10, 1.0),
               ValidationError);
}

TEST(DigitCorpusTest, ShapeAndDeterminism) {
  const DigitCorpusParams p;
  const DigitCorpus a = GenerateDigitCorpus(p, 4);
  EXPECT_EQ(a.exemplars.size(), 10u);
  EXPECT_EQ(a.test.size(), 500u);
  EXPECT_EQ(a.test.num_channels(), 40);
  for (size_t r = 0; r < a.test.size(); ++r) {
    const SpikeRaster& raster = a.test.rasters[r];
    EXPECT_FALSE(raster.empty());
    EXPECT_EQ(a.test.reference_times[r], raster.LastSpikeTime());
    EXPECT_EQ(a.test.labels[r], static_cast<int>(r / 50));
    // At most one spike per channel.
    std::vector<int> per_channel(40, 0);
    for (const SpikeEvent& e : raster.events()) ++per_channel[e.channel];
    EXPECT_LE(*std::max_element(per_channel.begin(), per_channel.end()), 1);
  }
  const DigitCorpus b = GenerateDigitCorpus(p, 4);
  EXPECT_EQ(a.test.rasters, b.test.rasters);
  EXPECT_EQ(a.exemplars.rasters, b.exemplars.rasters);
}

TEST(RasterIoTest, ParsesHeaderAndEvents) {
  std::string text = "40 1000\n";
  for (int i = 0; i < 23; ++i) {
    text += std::to_string(i) + " " + std::to_string(40 * i) + "\n";
  }
  std::istringstream in(text);
  const SpikeRaster r = ReadRaster(in);
  EXPECT_EQ(r.num_channels(), 40);
  EXPECT_EQ(r.num_steps(), 1000);
  EXPECT_EQ(r.events().size(), 23u);
}

TEST(RasterIoTest, RoundTripIsCanonical) {
  std::istringstream in("3 50\n\n2 7\n0 3\n1 7\n");
  const SpikeRaster r = ReadRaster(in);
  std::ostringstream out;
  WriteRaster(r, out);
  EXPECT_EQ(out.str(), "3 50\n0 3\n1 7\n2 7\n");
  std::istringstream again(out.str());
  EXPECT_EQ(ReadRaster(again), r);
}

TEST(RasterIoTest, Errors) {
  std::istringstream out_of_range("40 1000\n41 5\n");
  EXPECT_THROW(ReadRaster(out_of_range), ValidationError);
  std::istringstream garbage("40 1000\n1 5\nx 3\n");
  try {
    ReadRaster(garbage);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream bad_header("40\n");
  EXPECT_THROW(ReadRaster(bad_header), ParseError);
  std::istringstream duplicate("2 10\n1 5\n1 5\n");
  EXPECT_THROW(ReadRaster(duplicate), ValidationError);
}

TEST(RasterSetIoTest, RoundTrip) {
  LabeledRasterSet set = ThreeRasters();
  std::ostringstream out;
  WriteRasterSet(set, out);
  EXPECT_EQ(out.str(),
            "2 100 3\n"
            "raster 0 label 0 ref 50 events 2\n0 10\n1 50\n"
            "raster 1 label 1 ref 20 events 1\n1 20\n"
            "raster 2 label 1 ref 0 events 0 steps 60\n");
  std::istringstream in(out.str());
  const LabeledRasterSet back = ReadRasterSet(in);
  EXPECT_EQ(back.rasters, set.rasters);
  EXPECT_EQ(back.labels, set.labels);
  EXPECT_EQ(back.reference_times, set.reference_times);
}

TEST(RasterSetIoTest, ErrorsCarryLineNumbers) {
  std::istringstream bad("2 100 1\nraster 0 label 0 ref 5 event 1\n0 1\n");
  try {
    ReadRasterSet(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream short_input("2 100 2\nraster 0 label 0 ref 5 events 0\n");
  EXPECT_THROW(ReadRasterSet(short_input), ParseError);
  std::istringstream channel("2 100 1\nraster 0 label 0 ref 5 events 1\n2 1\n");
  EXPECT_THROW(ReadRasterSet(channel), ValidationError);
}

}  // namespace
}  // namespace skim
