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

#include "mlstc/math_kernels.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "mlstc/errors.h"

namespace mlstc {

using Eigen::Index;

// The tail is evaluated through the complementary error function of the C++
// standard library (correctly rounded to a few ulp on glibc/libm), which
// keeps full relative precision deep into the tail where 1 - Phi(x) would
// cancel. Q(x) underflows to 0 for x above ~38.5.
double q_function(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("q_function: non-finite argument");
  }
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double normal_pdf(double x) {
  static const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double ternary_entropy(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) {
    throw DomainError("ternary_entropy: alpha must lie in [0, 0.5], got " +
                      std::to_string(alpha));
  }
  double h = 0.0;
  if (alpha > 0.0) h -= 2.0 * alpha * std::log2(alpha);
  const double zero = 1.0 - 2.0 * alpha;
  if (zero > 0.0) h -= zero * std::log2(zero);
  return h;
}

Vector column_mean(const Eigen::Ref<const Matrix>& data) {
  if (data.cols() == 0) return Vector::Zero(data.rows());
  return data.rowwise().mean();
}

Matrix estimate_covariance(const Eigen::Ref<const Matrix>& data) {
  return estimate_covariance(data, column_mean(data));
}

Matrix estimate_covariance(const Eigen::Ref<const Matrix>& data,
                           const Eigen::Ref<const Vector>& mean) {
  if (data.cols() < 2) {
    throw DegenerateDataError("estimate_covariance: need at least 2 samples, got " +
                              std::to_string(data.cols()));
  }
  if (mean.size() != data.rows()) {
    throw DomainError("estimate_covariance: mean has wrong length");
  }
  const Index n = data.rows();
  const Matrix centered = data.colwise() - mean;
  Matrix cov = Matrix::Zero(n, n);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(
      centered, 1.0 / static_cast<double>(data.cols()));
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return cov;
}

namespace {

void check_symmetric(const Eigen::Ref<const Matrix>& c) {
  if (c.rows() != c.cols()) {
    throw DomainError("eigh: matrix is not square");
  }
  if (!c.allFinite()) {
    throw DomainError("eigh: matrix has non-finite entries");
  }
  const double scale = c.cwiseAbs().maxCoeff();
  const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw DomainError("eigh: matrix is not symmetric (max |C - C^T| = " +
                      std::to_string(asym) + ")");
  }
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j) {
    const double* col = a.data() + j * n;
    for (Index i = 0; i < n; ++i) {
      if (i != j) sum += col[i] * col[i];
    }
  }
  return std::sqrt(sum);
}

// One plane rotation applied as A <- J^T A J on a full symmetric column-major
// matrix, accumulating V <- V J.
inline void rotate(double* a, double* v, Index n, Index p, Index q) {
  double* ap = a + p * n;
  double* aq = a + q * n;
  const double apq = aq[p];
  const double app = ap[p];
  const double aqq = aq[q];
  const double theta = (aqq - app) / (2.0 * apq);
  const double t = std::copysign(1.0, theta) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (Index k = 0; k < n; ++k) {
    const double akp = ap[k];
    const double akq = aq[k];
    ap[k] = c * akp - s * akq;
    aq[k] = s * akp + c * akq;
  }
  for (Index k = 0; k < n; ++k) {
    a[k * n + p] = ap[k];
    a[k * n + q] = aq[k];
  }
  ap[p] = app - t * apq;
  aq[q] = aqq + t * apq;
  ap[q] = 0.0;
  aq[p] = 0.0;

  double* vp = v + p * n;
  double* vq = v + q * n;
  for (Index k = 0; k < n; ++k) {
    const double vkp = vp[k];
    const double vkq = vq[k];
    vp[k] = c * vkp - s * vkq;
    vq[k] = s * vkp + c * vkq;
  }
}

SymmetricSpectrum jacobi(Matrix a, Matrix v, double reference_norm,
                         const JacobiOptions& options) {
  const Index n = a.rows();
  SymmetricSpectrum out;
  const double target = options.relative_tolerance * reference_norm;
  // Rotations smaller than this cannot move the off-diagonal mass by more
  // than 1e-14 * ||C||_F in total, so skipping them keeps the stopping test
  // meaningful.
  const double skip = 1e-14 * reference_norm / static_cast<double>(std::max<Index>(n, 1));

  int sweep = 0;
  while (reference_norm > 0.0 && off_diagonal_norm(a) > target) {
    if (sweep == options.max_sweeps) {
      throw NumericalError("eigh: Jacobi iteration did not converge in " +
                           std::to_string(options.max_sweeps) + " sweeps");
    }
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) > skip) rotate(a.data(), v.data(), n, p, q);
      }
    }
    ++sweep;
  }
  out.sweeps = sweep;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) > a(j, j); });

  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src);
    auto col = out.eigenvectors.col(k);
    col = v.col(src);
    Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < 0.0) col = -col;
  }
  return out;
}

}  // namespace

SymmetricSpectrum eigh(const Eigen::Ref<const Matrix>& c,
                       const JacobiOptions& options) {
  check_symmetric(c);
  const Index n = c.rows();
  Matrix a = 0.5 * (c + c.transpose());
  SymmetricSpectrum s = jacobi(std::move(a), Matrix::Identity(n, n), c.norm(), options);
  if (options.clamp_negative) s.eigenvalues = s.eigenvalues.cwiseMax(0.0);
  return s;
}

SymmetricSpectrum eigh(const Eigen::Ref<const Matrix>& c,
                       const Eigen::Ref<const Matrix>& warm_start,
                       const JacobiOptions& options) {
  check_symmetric(c);
  const Index n = c.rows();
  if (warm_start.rows() != n || warm_start.cols() != n) {
    throw DomainError("eigh: warm-start basis has wrong shape");
  }
  Matrix rotated = warm_start.transpose() * c * warm_start;
  rotated = 0.5 * (rotated + rotated.transpose()).eval();
  SymmetricSpectrum s = jacobi(std::move(rotated), warm_start, c.norm(), options);
  if (options.clamp_negative) s.eigenvalues = s.eigenvalues.cwiseMax(0.0);
  return s;
}

Matrix solve_normal_equations(const Eigen::Ref<const Matrix>& gram,
                              const Eigen::Ref<const Matrix>& rhs,
                              bool* regularized) {
  if (gram.rows() != gram.cols() || gram.rows() != rhs.rows()) {
    throw DomainError("solve_normal_equations: shape mismatch");
  }
  const double trace = gram.trace();
  if (!(trace > 0.0)) {
    throw SingularMatrixError("solve_normal_equations: Gram matrix is zero");
  }
  Eigen::LDLT<Matrix> ldlt(gram);
  bool reg = ldlt.info() != Eigen::Success;
  if (!reg) {
    const Vector pivots = ldlt.vectorD().cwiseAbs();
    const double lo = pivots.minCoeff();
    reg = !(lo > 0.0) || pivots.maxCoeff() / lo > 1e12;
  }
  if (regularized) *regularized = reg;
  if (!reg) return ldlt.solve(rhs);

  const double ridge = 1e-8 * trace / static_cast<double>(gram.rows());
  Matrix damped = gram;
  damped.diagonal().array() += ridge;
  Eigen::LDLT<Matrix> ldlt_reg(damped);
  if (ldlt_reg.info() != Eigen::Success) {
    throw SingularMatrixError("solve_normal_equations: factorization failed");
  }
  return ldlt_reg.solve(rhs);
}

}  // namespace mlstc
