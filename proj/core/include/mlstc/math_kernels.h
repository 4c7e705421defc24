// Copyright 2026 The ML-STC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

namespace mlstc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Gaussian tail probability P[Z > x] for a standard normal Z.
/// Throws DomainError for non-finite input.
double q_function(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Entropy in bits of the symmetric ternary source {-1: alpha, 0: 1-2alpha,
/// +1: alpha}. Requires alpha in [0, 0.5].
double ternary_entropy(double alpha);

/// Column mean of an n x N data matrix (one sample per column).
Vector column_mean(const Eigen::Ref<const Matrix>& data);

/// Sample covariance (1/N) sum (f - mean)(f - mean)^T over the columns of
/// `data`. Requires at least two columns.
Matrix estimate_covariance(const Eigen::Ref<const Matrix>& data);
Matrix estimate_covariance(const Eigen::Ref<const Matrix>& data,
                           const Eigen::Ref<const Vector>& mean);

/// Eigen-decomposition of a symmetric matrix.
///
/// Eigenvalues are sorted in non-increasing order and clamped at zero. The
/// entry of largest magnitude in every eigenvector is non-negative, which
/// makes the basis unique for simple eigenvalues.
struct SymmetricSpectrum {
  Vector eigenvalues;
  Matrix eigenvectors;  // column i pairs with eigenvalues(i)
  int sweeps = 0;

  Eigen::Index dim() const { return eigenvalues.size(); }
};

struct JacobiOptions {
  double relative_tolerance = 1e-12;  // off-diagonal Frobenius mass / ||C||_F
  int max_sweeps = 60;
  bool clamp_negative = true;  // estimation noise in covariance spectra
};

/// Cyclic Jacobi eigen-solver.
///
/// Throws DomainError when `c` is not square or not symmetric within 1e-9
/// relative tolerance and NumericalError when the sweep budget runs out.
SymmetricSpectrum eigh(const Eigen::Ref<const Matrix>& c,
                       const JacobiOptions& options = {});

/// Same decomposition, starting the rotations from an orthonormal basis that
/// is expected to nearly diagonalize `c` (for example the eigenbasis of a
/// previous, closely related matrix). The result is still a full
/// eigen-decomposition of `c`; only the sweep count changes.
SymmetricSpectrum eigh(const Eigen::Ref<const Matrix>& c,
                       const Eigen::Ref<const Matrix>& warm_start,
                       const JacobiOptions& options = {});

/// Solves G W = R for symmetric positive semi-definite G (normal equations).
///
/// When the LDL^T pivot ratio, used as a condition estimate, exceeds 1e12 the
/// system is regularized with 1e-8 * trace(G) / dim * I. Throws
/// SingularMatrixError if G is identically zero.
Matrix solve_normal_equations(const Eigen::Ref<const Matrix>& gram,
                              const Eigen::Ref<const Matrix>& rhs,
                              bool* regularized = nullptr);

}  // namespace mlstc
