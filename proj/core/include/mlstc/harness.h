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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mlstc/datasets.h"
#include "mlstc/math_kernels.h"
#include "mlstc/rd_point.h"

namespace mlstc::harness {

/// (1 / (n M)) sum_i ||f(i) - f_hat(i)||^2 over the columns.
double measure_distortion(const Eigen::Ref<const Matrix>& original,
                          const Eigen::Ref<const Matrix>& reconstructed);

enum class Method { kStc, kMlStc, kPcaHash, kLsh, kSlb };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct SourceConfig {
  std::string kind = "iid";  // iid | ar1 | mnist | gist | fvecs
  data::SyntheticSpec synthetic;
  std::string mnist_dir;
  std::string train_path;    // fvecs (gist: learn file)
  std::string test_path;     // fvecs (gist: base file)
  std::size_t max_train = 0;  // 0 keeps every vector
  std::size_t max_test = 0;
  data::GistSplit gist_split = data::GistSplit::kLearnBase;
};

struct ExperimentConfig {
  SourceConfig source;
  std::vector<Method> methods;
  std::vector<double> rate_grid;    // stc, pcah, lsh and slb points (bits/dim)
  std::vector<double> lambda_grid;  // extra stc points at explicit thresholds
  std::vector<double> layer_rates;  // ml-stc schedule, one entry per layer
  std::uint64_t seed = 1;
  std::string output;               // CSV path; the JSON sidecar is <output>.json
};

/// Throws ConfigError unless the config names at least one method and one
/// rate point for it.
void validate(const ExperimentConfig& config);

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

data::Dataset load_source(const SourceConfig& source);

/// Trains every method at every rate point on the training split and
/// measures distortion on the test split. Results are sorted by
/// (method, rate, layers). Errors are rethrown with the failing cell named.
std::vector<RDPoint> run_sweep(const ExperimentConfig& config);
std::vector<RDPoint> run_sweep(const ExperimentConfig& config, const data::Dataset& dataset);

/// CSV with header
/// method,dataset,rate,distortion,layers_used,lambda_schedule,seed,
/// analytic_rate,empirical_rate,theoretical_distortion,train_distortion
std::string to_csv(std::span<const RDPoint> points);
/// Writes the CSV and the JSON sidecar describing `config`.
void write_results(const ExperimentConfig& config, std::span<const RDPoint> points);

struct AllocationRow {
  double variance = 0.0;
  double stc_rate = 0.0;
  double stc_distortion = 0.0;
  double waterfill_rate = 0.0;
  double waterfill_distortion = 0.0;
};

/// Per-dimension comparison of the single-layer STC allocation at `lambda`
/// with the reverse water-filling allocation at `target_distortion`.
std::vector<AllocationRow> allocation_report(std::span<const double> variances,
                                             double lambda, double target_distortion);
std::string allocation_csv(std::span<const AllocationRow> rows);

}  // namespace mlstc::harness
