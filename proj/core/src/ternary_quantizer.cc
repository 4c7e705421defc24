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

#include "mlstc/ternary_quantizer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mlstc/errors.h"
#include "mlstc/math_kernels.h"

namespace mlstc {
namespace {

// Below this activation probability a coordinate is treated as never coded;
// the stationary-point ratio would otherwise divide subnormals.
constexpr double kMinAlpha = 1e-290;

double distortion(double sigma, double lambda, double beta, double alpha) {
  if (sigma == 0.0) return 0.0;
  const double t = lambda / sigma;
  return sigma * sigma + 2.0 * beta * beta * alpha -
         4.0 * beta * sigma * normal_pdf(t);
}

}  // namespace

std::vector<std::int8_t> ternarize(std::span<const double> v, double lambda) {
  if (!(lambda >= 0.0)) {
    throw DomainError("ternarize: threshold must be non-negative");
  }
  std::vector<std::int8_t> out(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw DomainError("ternarize: non-finite input");
    if (std::abs(v[i]) > lambda) out[i] = v[i] > 0.0 ? 1 : -1;
  }
  return out;
}

double distortion_per_dim(const QuantizerDim& d) {
  if (d.sigma == 0.0) return 0.0;
  return distortion(d.sigma, d.lambda, d.beta, q_function(d.lambda / d.sigma));
}

double rate_per_dim(const QuantizerDim& d) {
  if (d.sigma == 0.0) return 0.0;
  return ternary_entropy(q_function(d.lambda / d.sigma));
}

double beta_grid_step(double sigma, double lambda, int grid_points) {
  return (lambda + 6.0 * sigma) / static_cast<double>(grid_points - 1);
}

double grid_search_beta(double sigma, double lambda, int grid_points) {
  if (sigma <= 0.0) return 0.0;
  if (grid_points < 2) throw DomainError("grid_search_beta: need >= 2 grid points");
  const double alpha = q_function(lambda / sigma);
  const double step = beta_grid_step(sigma, lambda, grid_points);
  double best_beta = 0.0;
  double best = distortion(sigma, lambda, 0.0, alpha);
  for (int k = 1; k < grid_points; ++k) {
    const double beta = step * k;
    const double d = distortion(sigma, lambda, beta, alpha);
    if (d < best) {
      best = d;
      best_beta = beta;
    }
  }
  return best_beta;
}

double optimal_beta(double sigma, double lambda) {
  if (!(sigma > 0.0)) return 0.0;
  if (!(lambda >= 0.0)) throw DomainError("optimal_beta: negative threshold");
  const double t = lambda / sigma;
  const double alpha = q_function(t);
  if (alpha < kMinAlpha) return 0.0;
  const double grid = grid_search_beta(sigma, lambda);
  const double refined = sigma * normal_pdf(t) / alpha;
  // D(beta) is a convex parabola, so the stationary point is never worse than
  // the grid minimizer; keep the grid answer only if rounding says otherwise.
  return distortion(sigma, lambda, refined, alpha) <=
                 distortion(sigma, lambda, grid, alpha)
             ? refined
             : grid;
}

QuantizerDim make_quantizer_dim(double sigma, double lambda) {
  if (!(sigma >= 0.0)) throw DomainError("make_quantizer_dim: negative sigma");
  if (!(lambda >= 0.0)) throw DomainError("make_quantizer_dim: negative threshold");
  QuantizerDim d;
  d.sigma = sigma;
  d.lambda = lambda;
  if (sigma == 0.0) return d;
  d.alpha = q_function(lambda / sigma);
  d.beta = optimal_beta(sigma, lambda);
  if (d.alpha < kMinAlpha) {
    d.alpha = 0.0;
    d.beta = 0.0;
  }
  return d;
}

double mean_rate(std::span<const double> variances, double lambda) {
  if (variances.empty()) return 0.0;
  double sum = 0.0;
  for (double v : variances) {
    if (v > 0.0) sum += ternary_entropy(q_function(lambda / std::sqrt(v)));
  }
  return sum / static_cast<double>(variances.size());
}

double rate_peak_lambda(std::span<const double> variances) {
  double max_var = 0.0;
  for (double v : variances) max_var = std::max(max_var, v);
  if (!(max_var > 0.0)) return 0.0;
  // Every per-dimension term peaks at Q^-1(1/3) sigma_i, so the maximizer of
  // the mean lies in [0, Q^-1(1/3) sigma_max]. Coarse scan, then golden
  // section around the best grid cell.
  const double top = kEntropyPeakThreshold * std::sqrt(max_var);
  constexpr int kScan = 256;
  int best = kScan;
  double best_rate = mean_rate(variances, top);
  for (int k = kScan - 1; k >= 0; --k) {
    const double r = mean_rate(variances, top * k / kScan);
    if (r > best_rate) {
      best_rate = r;
      best = k;
    }
  }
  double a = top * std::max(best - 1, 0) / kScan;
  double b = top * std::min(best + 1, kScan) / kScan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80 && b - a > 1e-14 * top; ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (mean_rate(variances, c) >= mean_rate(variances, d)) {
      b = d;
    } else {
      a = c;
    }
  }
  const double refined = 0.5 * (a + b);
  return mean_rate(variances, refined) >= best_rate ? refined : top * best / kScan;
}

double lambda_for_rate(std::span<const double> variances, double target_rate,
                       RateBranch branch) {
  if (!(target_rate > 0.0 && target_rate <= std::log2(3.0) + 1e-12)) {
    throw InfeasibleRateError("lambda_for_rate: target rate " +
                              std::to_string(target_rate) +
                              " outside (0, log2 3]");
  }
  double max_var = 0.0;
  for (double v : variances) max_var = std::max(max_var, v);
  if (!(max_var > 0.0)) {
    throw InfeasibleRateError("lambda_for_rate: spectrum has no positive variance");
  }
  const double peak = rate_peak_lambda(variances);
  const double peak_rate = mean_rate(variances, peak);
  const double tol = 1e-7;
  if (target_rate > peak_rate + tol) {
    throw InfeasibleRateError("lambda_for_rate: target " + std::to_string(target_rate) +
                              " bits/dim exceeds the largest rate " +
                              std::to_string(peak_rate) +
                              " reachable with a shared threshold");
  }
  if (std::abs(target_rate - peak_rate) <= tol) return peak;

  // Sparse branch: rate falls from its maximum at `peak` to ~0 at 12 sigma_max.
  // Dense branch: rate rises from its value at lambda = 0 to the maximum.
  double lo = branch == RateBranch::kSparse ? peak : 0.0;
  double hi = branch == RateBranch::kSparse ? 12.0 * std::sqrt(max_var) : peak;
  if (branch == RateBranch::kSparse) {
    if (target_rate < mean_rate(variances, hi)) return hi;
  } else {
    const double rate_zero = mean_rate(variances, 0.0);
    if (std::abs(rate_zero - target_rate) <= tol) return 0.0;
    if (target_rate < rate_zero) {
      throw InfeasibleRateError("lambda_for_rate: target " + std::to_string(target_rate) +
                                " is below the dense-branch minimum " +
                                std::to_string(rate_zero));
    }
  }
  // Bisection keeps rate(lo) and rate(hi) on opposite sides of the target,
  // which brackets a solution even where the mean rate is not monotone.
  const bool decreasing = branch == RateBranch::kSparse;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = mean_rate(variances, mid);
    if (std::abs(r - target_rate) <= tol) return mid;
    if ((r > target_rate) == decreasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mlstc
