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

// Weight-magnitude dendrite pruning with re-solving.

#ifndef SKIM_PRUNING_H_
#define SKIM_PRUNING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skim/network.h"
#include "skim/patterns.h"
#include "skim/training.h"

namespace skim {

// Dendrite indices by descending column-wise L1 norm of `weights` (N x M).
// Ties keep the lower index first.
std::vector<int> RankDendrites(const Eigen::MatrixXd& weights);

// c[m-1] = (sum of the m largest column L1 norms) / (sum of all of them).
// Throws DegenerateError when every weight is zero.
std::vector<double> CumulativeWeightFraction(const Eigen::MatrixXd& weights);

// A new, untrained network holding only the listed dendrites, in the given
// order. Throws ValidationError on empty, duplicate or out-of-range indices.
SkimNetwork SelectDendrites(const SkimNetwork& net,
                            std::span<const int> indices);

struct PruneReport {
  std::string strategy;
  int dendrites_before = 0;
  int dendrites_after = 0;
  // Partition of the original dendrite indices.
  std::vector<int> kept_indices;
  std::vector<int> discarded_indices;
  // Cumulative weight curve of the network the ranking was taken from.
  std::vector<double> cumulative_fraction;
  // Training residuals ||W A - Y||_F.
  double residual_before = 0.0;
  double residual_after = 0.0;
  // Iterative strategy: residual after the initial solve and after each
  // round.
  std::vector<double> round_residuals;
  // Held-out error, filled in by callers that evaluate.
  std::optional<double> error_before;
  std::optional<double> error_after;
};

struct PruneResult {
  SkimNetwork network;
  PruneReport report;
};

// Keeps the `keep` strongest dendrites of a trained network and re-solves
// W2 on `set`. Requires 1 <= keep < M.
PruneResult PruneTwoPass(const SkimNetwork& net, const TrainingSet& set,
                         int keep, const TrainOptions& options = {});

struct IterativePruneOptions {
  double discard_fraction = 0.5;
  int rounds = 1;
  uint64_t seed = 0;
  TrainOptions train;
};

void ValidatePruneOptions(const IterativePruneOptions& options);

// Each round trains, discards the weakest round(fraction * M) dendrites (at
// least one) and refills those slots with fresh W1 rows and kernels drawn
// from the network's configured ranges; the final network is trained.
PruneResult PruneIterative(const SkimNetwork& net, const TrainingSet& set,
                           const IterativePruneOptions& options);

}  // namespace skim

#endif  // SKIM_PRUNING_H_
