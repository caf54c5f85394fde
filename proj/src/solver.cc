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

#include "skim/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "skim/errors.h"

namespace skim {

namespace {

using Svd = Eigen::BDCSVD<Eigen::MatrixXd>;

void RequireFinite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + " has non-finite entries");
  }
}

Svd Decompose(const Eigen::MatrixXd& a) {
  return Svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

double ToleranceFor(const Eigen::MatrixXd& a, const Svd& svd) {
  const double sigma_max =
      svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return std::numeric_limits<double>::epsilon() *
         static_cast<double>(std::max(a.rows(), a.cols())) * sigma_max;
}

// Reciprocals of the retained singular values, zero for the rest.
Eigen::VectorXd InvertedSpectrum(const Eigen::MatrixXd& a, const Svd& svd,
                                 std::optional<double> tol) {
  if (tol && !(*tol >= 0)) {
    throw ValidationError("pseudoinverse tolerance must be >= 0");
  }
  const double cutoff = tol ? *tol : ToleranceFor(a, svd);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return inv;
}

}  // namespace

double DefaultPinvTolerance(const Eigen::MatrixXd& a) {
  RequireFinite(a, "matrix");
  if (a.size() == 0) return 0.0;
  return ToleranceFor(a, Svd(a));
}

Eigen::MatrixXd PseudoInverse(const Eigen::MatrixXd& a,
                              std::optional<double> tol) {
  RequireFinite(a, "matrix");
  if (a.size() == 0) return Eigen::MatrixXd::Zero(a.cols(), a.rows());
  const Svd svd = Decompose(a);
  const Eigen::VectorXd inv = InvertedSpectrum(a, svd, tol);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd SolveBatch(const Eigen::MatrixXd& a, const Eigen::MatrixXd& y,
                           std::optional<double> tol) {
  if (a.cols() != y.cols()) {
    throw DimensionError("activation and target column counts differ");
  }
  RequireFinite(a, "activation matrix");
  RequireFinite(y, "target signal");
  if (a.size() == 0) return Eigen::MatrixXd::Zero(y.rows(), a.rows());
  const Svd svd = Decompose(a);
  const Eigen::VectorXd inv = InvertedSpectrum(a, svd, tol);
  // Y A+ = ((Y V) S+) U^T without forming the K x M pseudoinverse.
  return ((y * svd.matrixV()) * inv.asDiagonal()) * svd.matrixU().transpose();
}

Eigen::MatrixXd SolveRidge(const Eigen::MatrixXd& a, const Eigen::MatrixXd& y,
                           double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda)) {
    throw ValidationError("ridge parameter must be > 0");
  }
  if (a.cols() != y.cols()) {
    throw DimensionError("activation and target column counts differ");
  }
  RequireFinite(a, "activation matrix");
  RequireFinite(y, "target signal");
  Eigen::MatrixXd gram = a * a.transpose();
  gram.diagonal().array() += lambda;
  // W^T = G^-1 A Y^T, G symmetric positive definite.
  return gram.ldlt().solve(a * y.transpose()).transpose();
}

OnlineSolverState::OnlineSolverState(int num_dendrites, int num_outputs,
                                     double lambda)
    : lambda_(lambda) {
  if (num_dendrites < 1 || num_outputs < 1) {
    throw ValidationError("online solver dimensions must be >= 1");
  }
  if (!(lambda > 0) || !std::isfinite(lambda)) {
    throw ValidationError("online solver regularization must be > 0");
  }
  factor_.compute(Eigen::MatrixXd::Identity(num_dendrites, num_dendrites) *
                  lambda);
  cross_ = Eigen::MatrixXd::Zero(num_outputs, num_dendrites);
  weights_ = cross_;
}

void OnlineSolverState::Update(
    const Eigen::Ref<const Eigen::VectorXd>& activation,
    const Eigen::Ref<const Eigen::VectorXd>& target) {
  if (activation.size() != cross_.cols() || target.size() != cross_.rows()) {
    throw DimensionError("online update vector sizes do not match the state");
  }
  if (!activation.allFinite() || !target.allFinite()) {
    throw DomainError("online update inputs must be finite");
  }
  ++samples_seen_;
  if (activation.isZero(0.0)) return;
  factor_.rankUpdate(Eigen::VectorXd(activation), 1.0);
  cross_.noalias() += target * activation.transpose();
  weights_stale_ = true;
}

void OnlineSolverState::UpdateAll(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& y) {
  if (a.cols() != y.cols()) {
    throw DimensionError("activation and target column counts differ");
  }
  for (Eigen::Index t = 0; t < a.cols(); ++t) Update(a.col(t), y.col(t));
}

Eigen::MatrixXd OnlineSolverState::inverse_correlation() const {
  const Eigen::Index m = cross_.cols();
  Eigen::MatrixXd p = factor_.solve(Eigen::MatrixXd::Identity(m, m));
  return 0.5 * (p + p.transpose());
}

const Eigen::MatrixXd& OnlineSolverState::weights() const {
  if (weights_stale_) {
    weights_ = factor_.solve(cross_.transpose()).transpose();
    weights_stale_ = false;
  }
  return weights_;
}

}  // namespace skim
