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

#include "skim/pruning.h"

#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "skim/errors.h"

namespace skim {
namespace {

struct Fixture {
  SkimNetwork net;
  TrainingSet set;
};

// A short stream task with a trained network of `m` dendrites.
Fixture SmallProblem(int m, uint64_t seed, int embeddings = 20) {
  EmbeddedTaskParams params;
  params.num_embeddings = embeddings;
  params.stream_len = embeddings * 230 + 400;
  params.target_amplitude = 2.0;
  const GeneratedTask task = GenerateEmbeddedTask(params, seed);
  NetworkConfig config;
  config.num_dendrites = m;
  config.target_amplitude = 2.0;
  config.seed = seed;
  Fixture f{SkimNetwork::Create(config), SingleStream(task)};
  Train(f.net, f.set);
  return f;
}

TEST(RankDendritesTest, OrdersByColumnMagnitude) {
  Eigen::MatrixXd w(1, 3);
  w << 0.1, -0.9, 0.5;
  EXPECT_EQ(RankDendrites(w), (std::vector<int>{1, 2, 0}));
}

TEST(RankDendritesTest, TiesKeepLowerIndexFirst) {
  Eigen::MatrixXd w(1, 4);
  w << 0.5, -0.5, 1.0, 0.5;
  EXPECT_EQ(RankDendrites(w), (std::vector<int>{2, 0, 1, 3}));
}

TEST(RankDendritesTest, SumsOverOutputs) {
  Eigen::MatrixXd w(2, 3);
  w << 1.0, 0.0, 0.6,
      -1.0, 1.5, 0.6;
  EXPECT_EQ(RankDendrites(w), (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(RankDendrites(Eigen::MatrixXd(0, 0)), ValidationError);
}

TEST(CumulativeFractionTest, Uniform) {
  const std::vector<double> c =
      CumulativeWeightFraction(Eigen::MatrixXd::Constant(1, 80, -0.3));
  ASSERT_EQ(c.size(), 80u);
  EXPECT_NEAR(c[19], 0.25, 1e-12);
  EXPECT_EQ(c.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
}

TEST(CumulativeFractionTest, SingleNonzero) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(1, 10);
  w(0, 7) = -4.0;
  EXPECT_EQ(CumulativeWeightFraction(w)[0], 1.0);
  EXPECT_THROW(CumulativeWeightFraction(Eigen::MatrixXd::Zero(1, 10)),
               DegenerateError);
}

TEST(SelectDendritesTest, CopiesRowsAndKernels) {
  NetworkConfig config;
  config.num_dendrites = 10;
  const SkimNetwork net = SkimNetwork::Create(config);
  const std::vector<int> keep = {1, 4, 9};
  const SkimNetwork sub = SelectDendrites(net, keep);
  EXPECT_EQ(sub.num_dendrites(), 3);
  EXPECT_FALSE(sub.trained());
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(sub.input_weights().row(k), net.input_weights().row(keep[k]));
    EXPECT_EQ(sub.kernels()[k], net.kernels()[keep[k]]);
  }
  EXPECT_THROW(SelectDendrites(net, std::vector<int>{}), ValidationError);
  EXPECT_THROW(SelectDendrites(net, std::vector<int>{1, 1}), ValidationError);
  EXPECT_THROW(SelectDendrites(net, std::vector<int>{10}), ValidationError);
}

TEST(PruneTwoPassTest, KeepBounds) {
  const Fixture f = SmallProblem(20, 1, 5);
  EXPECT_THROW(PruneTwoPass(f.net, f.set, 20), ValidationError);
  EXPECT_THROW(PruneTwoPass(f.net, f.set, 0), ValidationError);
  const PruneResult r = PruneTwoPass(f.net, f.set, 19);
  EXPECT_EQ(r.network.num_dendrites(), 19);
  EXPECT_EQ(r.report.discarded_indices.size(), 1u);
  EXPECT_EQ(r.report.discarded_indices[0], RankDendrites(f.net.output_weights()).back());
}

TEST(PruneTwoPassTest, WeightsEqualFreshSolve) {
  const Fixture f = SmallProblem(80, 2);
  const PruneResult r = PruneTwoPass(f.net, f.set, 40);
  const SkimNetwork sub = SelectDendrites(f.net, r.report.kept_indices);
  const Eigen::MatrixXd w = SolveWeights(BuildDesign(sub, f.set), {});
  EXPECT_TRUE(r.network.output_weights() == w);
  EXPECT_EQ(r.report.dendrites_before, 80);
  EXPECT_EQ(r.report.dendrites_after, 40);
  EXPECT_EQ(r.report.cumulative_fraction.size(), 80u);
  std::vector<int> all = r.report.kept_indices;
  all.insert(all.end(), r.report.discarded_indices.begin(),
             r.report.discarded_indices.end());
  std::sort(all.begin(), all.end());
  for (int j = 0; j < 80; ++j) EXPECT_EQ(all[j], j);
}

TEST(PruneTwoPassTest, ResidualDoesNotImprove) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const Fixture f = SmallProblem(60, seed);
    const PruneResult r = PruneTwoPass(f.net, f.set, 30);
    EXPECT_GE(r.report.residual_after,
              r.report.residual_before * (1 - 1e-9)) << seed;
  }
}

TEST(PruneTwoPassTest, LargePool) {
  const Fixture f = SmallProblem(1000, 3, 8);
  const PruneResult r = PruneTwoPass(f.net, f.set, 100);
  EXPECT_EQ(r.network.num_dendrites(), 100);
  EXPECT_TRUE(r.network.trained());
}

TEST(PruneIterativeTest, Validation) {
  IterativePruneOptions options;
  options.rounds = 0;
  EXPECT_THROW(ValidatePruneOptions(options), ValidationError);
  options = {};
  options.discard_fraction = 1.0;
  EXPECT_THROW(ValidatePruneOptions(options), ValidationError);
}

TEST(PruneIterativeTest, ReplacesHalfOfPool) {
  const Fixture f = SmallProblem(100, 4, 10);
  IterativePruneOptions options;
  options.seed = 9;
  const PruneResult r = PruneIterative(f.net, f.set, options);
  EXPECT_EQ(r.network.num_dendrites(), 100);
  EXPECT_EQ(r.report.discarded_indices.size(), 50u);
  EXPECT_EQ(r.report.kept_indices.size(), 50u);
  EXPECT_EQ(r.report.round_residuals.size(), 2u);
  for (int j : r.report.kept_indices) {
    EXPECT_EQ(r.network.input_weights().row(j), f.net.input_weights().row(j));
    EXPECT_EQ(r.network.kernels()[j], f.net.kernels()[j]);
  }
  for (int j : r.report.discarded_indices) {
    EXPECT_NE(r.network.input_weights().row(j), f.net.input_weights().row(j));
  }
  const PruneResult again = PruneIterative(f.net, f.set, options);
  EXPECT_TRUE(again.network == r.network);
  EXPECT_EQ(again.report.round_residuals, r.report.round_residuals);
}

// Soft property on the default embedded task: over 20 seeds, at least 16
// runs should show residuals that never rise across three rounds.
int MonotoneRuns(const TrainOptions& train) {
  int good = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    EmbeddedTaskParams params;
    params.target_amplitude = 2.0;
    const GeneratedTask task = GenerateEmbeddedTask(params, seed);
    NetworkConfig config;
    config.target_amplitude = 2.0;
    config.seed = seed;
    IterativePruneOptions options;
    options.seed = seed;
    options.rounds = 3;
    options.train = train;
    const std::vector<double> r =
        PruneIterative(SkimNetwork::Create(config), SingleStream(task), options)
            .report.round_residuals;
    bool monotone = true;
    for (size_t k = 1; k < r.size(); ++k) monotone &= r[k] <= r[k - 1];
    good += monotone;
  }
  return good;
}

TEST(PruneIterativeSoftTest, RegularizedSolve) {
  TrainOptions train;
  train.solver = SolverKind::kOnline;
  train.ridge = 1.0;
  EXPECT_GE(MonotoneRuns(train), 16);
}

TEST(PruneIterativeSoftTest, Pseudoinverse) {
  EXPECT_GE(MonotoneRuns(TrainOptions{}), 16);
}

}  // namespace
}  // namespace skim
