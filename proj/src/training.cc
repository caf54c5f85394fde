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

#include "skim/training.h"

#include <string>

#include "skim/errors.h"

namespace skim {

std::string_view SolverKindName(SolverKind kind) {
  return kind == SolverKind::kBatch ? "batch" : "online";
}

SolverKind ParseSolverKind(std::string_view name) {
  if (name == "batch") return SolverKind::kBatch;
  if (name == "online") return SolverKind::kOnline;
  throw ParseError("unknown solver '" + std::string(name) +
                       "' (expected batch|online)",
                   0);
}

DesignMatrices BuildDesign(const SkimNetwork& net, const TrainingSet& set) {
  if (set.inputs.empty()) throw ValidationError("training set is empty");
  if (set.inputs.size() != set.targets.size()) {
    throw DimensionError("training set needs one target per input");
  }
  Eigen::Index total = 0;
  for (size_t r = 0; r < set.inputs.size(); ++r) {
    if (set.targets[r].rows() != net.num_outputs() ||
        set.targets[r].cols() != set.inputs[r].num_steps()) {
      throw DimensionError("target " + std::to_string(r) +
                           " must be num_outputs x raster steps");
    }
    total += set.targets[r].cols();
  }
  DesignMatrices design;
  design.activations = CollectActivations(net, set.inputs, set.streaming);
  design.targets.resize(net.num_outputs(), total);
  Eigen::Index col = 0;
  for (const SomaMatrix& y : set.targets) {
    design.targets.middleCols(col, y.cols()) = y;
    col += y.cols();
  }
  return design;
}

Eigen::MatrixXd SolveWeights(const DesignMatrices& design,
                             const TrainOptions& options) {
  if (options.solver == SolverKind::kBatch) {
    return SolveBatch(design.activations, design.targets, options.tolerance);
  }
  OnlineSolverState state(static_cast<int>(design.activations.rows()),
                          static_cast<int>(design.targets.rows()),
                          options.ridge);
  state.UpdateAll(design.activations, design.targets);
  return state.weights();
}

double Residual(const Eigen::MatrixXd& weights, const DesignMatrices& design) {
  return (weights * design.activations - design.targets).norm();
}

double Train(SkimNetwork& net, const TrainingSet& set,
             const TrainOptions& options) {
  const DesignMatrices design = BuildDesign(net, set);
  Eigen::MatrixXd w = SolveWeights(design, options);
  const double residual = Residual(w, design);
  net.SetOutputWeights(std::move(w));
  return residual;
}

}  // namespace skim
