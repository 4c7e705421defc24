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
#include <optional>
#include <string>
#include <vector>

namespace mlstc {

/// One point of a rate-distortion curve. Rates are in bits per dimension and
/// distortions are per-dimension mean squared errors, (1/n) ||f - f_hat||^2.
struct RDPoint {
  std::string method;
  std::string dataset;
  double rate = 0.0;        // rate used for plotting (analytic for STC, k/n for hashing)
  double distortion = 0.0;  // measured on the evaluation split
  int layers_used = 0;
  std::vector<double> lambda_schedule;
  std::uint64_t seed = 0;

  std::optional<double> analytic_rate;           // ternary-entropy rate from the model
  std::optional<double> empirical_rate;          // symbol entropy of the evaluation codes
  std::optional<double> theoretical_distortion;  // per-dimension distortion formula
  std::optional<double> train_distortion;        // in-sample distortion
};

}  // namespace mlstc
