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

#include "mlstc/slb_oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlstc/errors.h"
#include "mlstc/ternary_quantizer.h"

namespace mlstc {
namespace {

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

WaterfillSolution solution_at_level(std::span<const double> variances, double level) {
  WaterfillSolution s;
  s.water_level = level;
  s.per_dim_distortion.reserve(variances.size());
  s.per_dim_rate.reserve(variances.size());
  double rate = 0.0;
  double dist = 0.0;
  for (double v : variances) {
    const double var = std::max(v, 0.0);
    const double d = std::min(level, var);
    const double r = (var > level && d > 0.0) ? 0.5 * std::log2(var / d) : 0.0;
    s.per_dim_distortion.push_back(d);
    s.per_dim_rate.push_back(r);
    rate += r;
    dist += d;
  }
  const auto n = static_cast<double>(std::max<std::size_t>(variances.size(), 1));
  s.total_rate = rate / n;
  s.total_distortion = dist / n;
  return s;
}

double rate_at_level(std::span<const double> variances, double level) {
  double rate = 0.0;
  for (double v : variances) {
    if (v > level) rate += 0.5 * std::log2(v / level);
  }
  return rate / static_cast<double>(variances.size());
}

}  // namespace

WaterfillSolution waterfill(std::span<const double> variances,
                            double target_distortion) {
  if (!(target_distortion > 0.0)) {
    throw DomainError("waterfill: target distortion must be positive");
  }
  if (variances.empty()) throw DomainError("waterfill: empty spectrum");
  const double max_var = *std::max_element(variances.begin(), variances.end());
  if (target_distortion >= mean_of(variances)) {
    return solution_at_level(variances, std::max(max_var, 0.0));
  }
  // mean_i min(w, sigma_i^2) is continuous and non-decreasing in w.
  double lo = 0.0;
  double hi = max_var;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    double d = 0.0;
    for (double v : variances) d += std::min(mid, std::max(v, 0.0));
    d /= static_cast<double>(variances.size());
    if (d < target_distortion) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return solution_at_level(variances, 0.5 * (lo + hi));
}

WaterfillSolution waterfill_at_rate(std::span<const double> variances, double rate) {
  if (!(rate > 0.0)) throw DomainError("waterfill_at_rate: rate must be positive");
  if (variances.empty()) throw DomainError("waterfill_at_rate: empty spectrum");
  double max_var = 0.0;
  double min_pos = 0.0;
  std::size_t positive = 0;
  for (double v : variances) {
    if (v > 0.0) {
      max_var = std::max(max_var, v);
      min_pos = positive == 0 ? v : std::min(min_pos, v);
      ++positive;
    }
  }
  if (positive == 0) return solution_at_level(variances, 0.0);

  // Every positive coordinate is active below min_pos, so this level gives a
  // rate of at least `rate`. Bisection runs on log(level).
  const double share = static_cast<double>(variances.size()) / static_cast<double>(positive);
  double log_lo = std::log(min_pos) - 2.0 * rate * share * std::log(2.0) - 1.0;
  log_lo = std::max(log_lo, std::log(1e-300));
  double log_hi = std::log(max_var);
  for (int it = 0; it < 300 && log_hi - log_lo > 1e-15; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (rate_at_level(variances, std::exp(mid)) > rate) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
  }
  return solution_at_level(variances, std::exp(0.5 * (log_lo + log_hi)));
}

std::vector<RDPoint> slb_curve(std::span<const double> variances,
                               std::span<const double> rate_grid) {
  std::vector<RDPoint> out;
  out.reserve(rate_grid.size());
  for (double r : rate_grid) {
    const WaterfillSolution s = waterfill_at_rate(variances, r);
    RDPoint p;
    p.method = "slb";
    p.rate = s.total_rate;
    p.distortion = s.total_distortion;
    p.theoretical_distortion = s.total_distortion;
    p.analytic_rate = s.total_rate;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<DimAllocation> single_layer_allocation(std::span<const double> variances,
                                                   double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("single_layer_allocation: negative threshold");
  std::vector<DimAllocation> out;
  out.reserve(variances.size());
  for (double v : variances) {
    const QuantizerDim d = make_quantizer_dim(std::sqrt(std::max(v, 0.0)), lambda);
    out.push_back({rate_per_dim(d), distortion_per_dim(d)});
  }
  return out;
}

}  // namespace mlstc
