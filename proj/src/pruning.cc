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
#include <cmath>
#include <numeric>
#include <string>

#include "skim/errors.h"
#include "skim/random.h"

namespace skim {

namespace {

Eigen::VectorXd ColumnMagnitudes(const Eigen::MatrixXd& weights) {
  if (weights.size() == 0) throw ValidationError("weights are empty");
  if (!weights.allFinite()) throw DomainError("weights must be finite");
  return weights.cwiseAbs().colwise().sum().transpose();
}

double TrainedResidual(const SkimNetwork& net, const TrainingSet& set) {
  return Residual(net.output_weights(), BuildDesign(net, set));
}

SkimNetwork Retrain(SkimNetwork net, const TrainingSet& set,
                    const TrainOptions& options, double* residual) {
  *residual = Train(net, set, options);
  return net;
}

}  // namespace

std::vector<int> RankDendrites(const Eigen::MatrixXd& weights) {
  const Eigen::VectorXd mag = ColumnMagnitudes(weights);
  std::vector<int> order(static_cast<size_t>(mag.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&mag](int a, int b) { return mag(a) > mag(b); });
  return order;
}

std::vector<double> CumulativeWeightFraction(const Eigen::MatrixXd& weights) {
  const Eigen::VectorXd mag = ColumnMagnitudes(weights);
  const double total = mag.sum();
  if (!(total > 0)) throw DegenerateError("all weights are zero");
  std::vector<double> c;
  c.reserve(static_cast<size_t>(mag.size()));
  double running = 0.0;
  for (int j : RankDendrites(weights)) {
    running += mag(j);
    c.push_back(running / total);
  }
  c.back() = 1.0;
  return c;
}

SkimNetwork SelectDendrites(const SkimNetwork& net,
                            std::span<const int> indices) {
  if (indices.empty()) throw ValidationError("must keep at least one dendrite");
  std::vector<bool> seen(static_cast<size_t>(net.num_dendrites()), false);
  Eigen::MatrixXd w1(static_cast<Eigen::Index>(indices.size()),
                     net.num_inputs());
  std::vector<KernelSpec> kernels;
  kernels.reserve(indices.size());
  for (size_t r = 0; r < indices.size(); ++r) {
    const int j = indices[r];
    if (j < 0 || j >= net.num_dendrites()) {
      throw ValidationError("dendrite index " + std::to_string(j) +
                            " out of range");
    }
    if (seen[static_cast<size_t>(j)]) {
      throw ValidationError("dendrite index " + std::to_string(j) +
                            " repeated");
    }
    seen[static_cast<size_t>(j)] = true;
    w1.row(static_cast<Eigen::Index>(r)) = net.input_weights().row(j);
    kernels.push_back(net.kernels()[static_cast<size_t>(j)]);
  }
  return SkimNetwork::FromParts(net.config(), std::move(w1),
                                std::move(kernels), std::nullopt);
}

PruneResult PruneTwoPass(const SkimNetwork& net, const TrainingSet& set,
                         int keep, const TrainOptions& options) {
  const int m = net.num_dendrites();
  if (keep < 1 || keep >= m) {
    throw ValidationError("keep must lie in [1, " + std::to_string(m - 1) +
                          "], got " + std::to_string(keep));
  }
  const Eigen::MatrixXd& w2 = net.output_weights();
  const std::vector<int> order = RankDendrites(w2);

  PruneReport report;
  report.strategy = "two_pass";
  report.dendrites_before = m;
  report.dendrites_after = keep;
  report.kept_indices.assign(order.begin(), order.begin() + keep);
  std::sort(report.kept_indices.begin(), report.kept_indices.end());
  report.discarded_indices.assign(order.begin() + keep, order.end());
  std::sort(report.discarded_indices.begin(), report.discarded_indices.end());
  report.cumulative_fraction = CumulativeWeightFraction(w2);
  report.residual_before = TrainedResidual(net, set);

  SkimNetwork pruned = Retrain(SelectDendrites(net, report.kept_indices), set,
                               options, &report.residual_after);
  return {std::move(pruned), std::move(report)};
}

void ValidatePruneOptions(const IterativePruneOptions& options) {
  std::string problems;
  if (!(options.discard_fraction > 0.0 && options.discard_fraction < 1.0)) {
    problems += "; discard_fraction must lie in (0, 1)";
  }
  if (options.rounds < 1) problems += "; rounds must be >= 1";
  if (!problems.empty()) throw ValidationError(problems.substr(2));
}

PruneResult PruneIterative(const SkimNetwork& net, const TrainingSet& set,
                           const IterativePruneOptions& options) {
  ValidatePruneOptions(options);
  const int m = net.num_dendrites();
  const int discard = std::clamp(
      static_cast<int>(std::lround(options.discard_fraction * m)), 1, m);
  const NetworkConfig& config = net.config();

  PruneReport report;
  report.strategy = "iterative";
  report.dendrites_before = m;
  report.dendrites_after = m;

  double residual = 0.0;
  SkimNetwork current = Retrain(net, set, options.train, &residual);
  report.residual_before = residual;
  report.round_residuals.push_back(residual);
  std::vector<bool> replaced(static_cast<size_t>(m), false);

  Rng weights_rng = MakeStream(options.seed, "prune_weights");
  Rng kernels_rng = MakeStream(options.seed, "prune_kernels");
  for (int round = 0; round < options.rounds; ++round) {
    const std::vector<int> order = RankDendrites(current.output_weights());
    Eigen::MatrixXd w1 = current.input_weights();
    std::vector<KernelSpec> kernels = current.kernels();
    for (int r = m - discard; r < m; ++r) {
      const int j = order[static_cast<size_t>(r)];
      replaced[static_cast<size_t>(j)] = true;
      for (Eigen::Index i = 0; i < w1.cols(); ++i) {
        w1(j, i) = UniformOpen(weights_rng, config.weight_range.lo,
                               config.weight_range.hi);
      }
      kernels[static_cast<size_t>(j)] =
          DrawKernel(config.kernel_family, kernels_rng);
    }
    SkimNetwork next = SkimNetwork::FromParts(config, std::move(w1),
                                              std::move(kernels), std::nullopt);
    current = Retrain(std::move(next), set, options.train, &residual);
    report.round_residuals.push_back(residual);
  }
  report.residual_after = residual;
  for (int j = 0; j < m; ++j) {
    (replaced[static_cast<size_t>(j)] ? report.discarded_indices
                                      : report.kept_indices)
        .push_back(j);
  }
  report.cumulative_fraction = CumulativeWeightFraction(current.output_weights());
  return {std::move(current), std::move(report)};
}

}  // namespace skim
