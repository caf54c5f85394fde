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

// Output-weight solvers for W A = Y, where A is the M x K activation matrix
// and Y the N x K target signal.

#ifndef SKIM_SOLVER_H_
#define SKIM_SOLVER_H_

#include <optional>

#include <Eigen/Dense>

namespace skim {

inline constexpr double kDefaultRidge = 1e-8;

// Singular values at or below this are dropped by default:
// machine epsilon * max(rows, cols) * largest singular value.
double DefaultPinvTolerance(const Eigen::MatrixXd& a);

// Moore-Penrose pseudoinverse via SVD. Throws DomainError on non-finite
// entries and ValidationError on a negative tolerance.
Eigen::MatrixXd PseudoInverse(const Eigen::MatrixXd& a,
                              std::optional<double> tol = std::nullopt);

// Minimum-norm least-squares W = Y A+. Throws DimensionError when the column
// counts differ.
Eigen::MatrixXd SolveBatch(const Eigen::MatrixXd& a, const Eigen::MatrixXd& y,
                           std::optional<double> tol = std::nullopt);

// Ridge solution W = Y A^T (A A^T + lambda I)^-1, lambda > 0.
Eigen::MatrixXd SolveRidge(const Eigen::MatrixXd& a, const Eigen::MatrixXd& y,
                           double lambda);

// Recursive least squares over streamed columns of (A, Y). After a full pass
// the weights equal SolveRidge(A, Y, lambda) up to rounding.
//
// The state is kept in square-root information form: a Cholesky factor of
// R = lambda I + sum a a^T, updated by one rank-one modification per column,
// together with the cross-correlation sum y a^T. The inverse correlation
// P = R^-1 and the weights are derived from it on request.
//
// Not thread-safe; one updater at a time.
class OnlineSolverState {
 public:
  // R = lambda I (P = I / lambda), W = 0. Throws ValidationError unless
  // lambda > 0 and the dimensions are >= 1.
  OnlineSolverState(int num_dendrites, int num_outputs,
                    double lambda = kDefaultRidge);

  // Rank-one update with one activation column and its target column.
  void Update(const Eigen::Ref<const Eigen::VectorXd>& activation,
              const Eigen::Ref<const Eigen::VectorXd>& target);
  // Streams every column of (a, y) in order.
  void UpdateAll(const Eigen::MatrixXd& a, const Eigen::MatrixXd& y);

  Eigen::MatrixXd inverse_correlation() const;
  const Eigen::MatrixXd& weights() const;
  long samples_seen() const { return samples_seen_; }
  double regularization() const { return lambda_; }

 private:
  Eigen::LLT<Eigen::MatrixXd> factor_;  // of R, M x M
  Eigen::MatrixXd cross_;               // N x M
  long samples_seen_ = 0;
  double lambda_;
  mutable Eigen::MatrixXd weights_;  // N x M
  mutable bool weights_stale_ = false;
};

}  // namespace skim

#endif  // SKIM_SOLVER_H_
