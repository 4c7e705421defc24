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

#include <cstdint>
#include <span>
#include <vector>

namespace mlstc {

/// Scalar ternary quantizer for one projected coordinate X ~ N(0, sigma^2).
struct QuantizerDim {
  double sigma = 0.0;   // std-dev of the projected coordinate
  double lambda = 0.0;  // threshold
  double beta = 0.0;    // reconstruction magnitude
  double alpha = 0.0;   // P[X > lambda] = P[X < -lambda]
};

/// Quantizer with alpha = Q(lambda / sigma) and the optimal beta.
QuantizerDim make_quantizer_dim(double sigma, double lambda);

/// Element-wise phi_lambda: sign(v_i) when |v_i| > lambda, 0 otherwise.
std::vector<std::int8_t> ternarize(std::span<const double> v, double lambda);

/// Expected squared error sigma^2 + 2 beta^2 Q(lambda/sigma)
///   - 4 beta sigma / sqrt(2 pi) exp(-lambda^2 / 2 sigma^2).
double distortion_per_dim(const QuantizerDim& d);

/// Ternary entropy of the coordinate's symbol, in bits.
double rate_per_dim(const QuantizerDim& d);

inline constexpr int kBetaGridPoints = 4096;

/// Arg-min of the per-dimension distortion over an evenly spaced grid on
/// [0, lambda + 6 sigma].
double grid_search_beta(double sigma, double lambda,
                        int grid_points = kBetaGridPoints);

/// Grid step used by grid_search_beta.
double beta_grid_step(double sigma, double lambda,
                      int grid_points = kBetaGridPoints);

/// Optimal reconstruction magnitude.
///
/// The grid search is run first; its minimizer is then polished to the
/// stationary point sigma * phi(t) / Q(t), t = lambda / sigma, which is the
/// conditional mean E[X | X > lambda]. Returns 0 for sigma == 0 and whenever
/// the coordinate is never active (Q underflows).
double optimal_beta(double sigma, double lambda);

/// Threshold maximizing the mean analytic rate over the spectrum.
double rate_peak_lambda(std::span<const double> variances);

/// Which side of the entropy peak a shared threshold is searched on. The
/// ternary entropy H_t(Q(lambda/sigma)) rises from 1 bit at lambda = 0 to
/// log2(3) at lambda = sigma * Q^-1(1/3) and decays to 0 beyond, so a target
/// rate generally has two solutions.
enum class RateBranch {
  kSparse,  // threshold above the rate maximizer
  kDense,   // threshold in [0, rate maximizer]
};

/// Shared threshold lambda such that (1/n) sum_i H_t(Q(lambda / sigma_i))
/// equals `target_rate` within 1e-6 bits. `variances` holds sigma_i^2;
/// non-positive entries are dead coordinates. Throws InfeasibleRateError when
/// no threshold on the chosen branch reaches the target.
double lambda_for_rate(std::span<const double> variances, double target_rate,
                       RateBranch branch = RateBranch::kSparse);

/// Mean analytic rate (1/n) sum_i H_t(Q(lambda / sigma_i)).
double mean_rate(std::span<const double> variances, double lambda);

/// Q^-1(1/3): threshold in units of sigma where the ternary entropy peaks.
inline constexpr double kEntropyPeakThreshold = 0.43072729929545749;

}  // namespace mlstc
