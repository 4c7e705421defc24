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

#include <span>
#include <vector>

#include "mlstc/rd_point.h"

namespace mlstc {

/// Reverse water-filling solution for a Gaussian vector with independent
/// components of variance sigma_i^2.
struct WaterfillSolution {
  double water_level = 0.0;
  std::vector<double> per_dim_distortion;  // min(water_level, sigma_i^2)
  std::vector<double> per_dim_rate;        // 0.5 log2(sigma_i^2 / D_i)
  double total_rate = 0.0;                 // bits per dimension
  double total_distortion = 0.0;           // per-dimension MSE
};

/// Optimal allocation achieving mean distortion `target_distortion`.
/// Targets at or above the mean variance give the zero-rate solution;
/// non-positive targets throw DomainError.
WaterfillSolution waterfill(std::span<const double> variances,
                            double target_distortion);

/// Distortion of the optimal allocation at a given rate (bits/dim).
WaterfillSolution waterfill_at_rate(std::span<const double> variances, double rate);

/// Gaussian Shannon lower bound D(R) for each rate of the grid.
std::vector<RDPoint> slb_curve(std::span<const double> variances,
                               std::span<const double> rate_grid);

struct DimAllocation {
  double rate = 0.0;
  double distortion = 0.0;
};

/// Per-dimension rate and distortion of a single STC layer with shared
/// threshold `lambda` and optimal magnitudes.
std::vector<DimAllocation> single_layer_allocation(std::span<const double> variances,
                                                   double lambda);

}  // namespace mlstc
