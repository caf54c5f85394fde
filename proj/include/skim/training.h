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

#ifndef SKIM_TRAINING_H_
#define SKIM_TRAINING_H_

#include <optional>
#include <string_view>

#include "skim/network.h"
#include "skim/patterns.h"
#include "skim/solver.h"

namespace skim {

enum class SolverKind { kBatch, kOnline };

std::string_view SolverKindName(SolverKind kind);
// "batch" or "online"; throws ParseError otherwise.
SolverKind ParseSolverKind(std::string_view name);

struct TrainOptions {
  SolverKind solver = SolverKind::kBatch;
  // Pseudoinverse cutoff; default tied to machine epsilon.
  std::optional<double> tolerance;
  // Online solver only.
  double ridge = kDefaultRidge;
};

// The stacked activation matrix and target signal of a training set.
struct DesignMatrices {
  ActivationMatrix activations;  // M x sum(K_r)
  SomaMatrix targets;            // N x sum(K_r)
};

DesignMatrices BuildDesign(const SkimNetwork& net, const TrainingSet& set);

Eigen::MatrixXd SolveWeights(const DesignMatrices& design,
                             const TrainOptions& options);

// Solves and stores W2; returns the training residual ||W A - Y||_F.
double Train(SkimNetwork& net, const TrainingSet& set,
             const TrainOptions& options = {});

double Residual(const Eigen::MatrixXd& weights, const DesignMatrices& design);

}  // namespace skim

#endif  // SKIM_TRAINING_H_
