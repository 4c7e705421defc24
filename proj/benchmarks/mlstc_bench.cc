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

#include <vector>

#include <benchmark/benchmark.h>

#include "mlstc/baselines.h"
#include "mlstc/datasets.h"
#include "mlstc/math_kernels.h"
#include "mlstc/stc_codec.h"
#include "mlstc/ternary_quantizer.h"

namespace {

using namespace mlstc;

data::Dataset ar1(int n, int count, int test_count = 1000) {
  data::SyntheticSpec spec;
  spec.kind = data::SourceKind::kAr1;
  spec.rho = 0.9;
  spec.n = n;
  spec.count = count;
  spec.test_count = test_count;
  return data::generate(spec);
}

void BM_Covariance(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const data::Dataset d = ar1(n, 10000, 0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_covariance(d.train));
  state.SetItemsProcessed(state.iterations() * d.train.cols());
}
BENCHMARK(BM_Covariance)->Arg(64)->Arg(256)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_JacobiCold(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const Matrix c = estimate_covariance(ar1(n, 4 * n, 0).train);
  for (auto _ : state) benchmark::DoNotOptimize(eigh(c));
}
BENCHMARK(BM_JacobiCold)->Arg(32)->Arg(128)->Arg(256)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_JacobiWarm(benchmark::State& state) {
  // Residual-layer case: the previous basis nearly diagonalizes the matrix.
  const auto n = static_cast<int>(state.range(0));
  const data::Dataset d = ar1(n, 4 * n, 0);
  const SourceModel first = fit_source(d.train);
  const Matrix c = estimate_covariance(d.train.leftCols(3 * n));
  for (auto _ : state) benchmark::DoNotOptimize(eigh(c, first.spectrum.eigenvectors));
}
BENCHMARK(BM_JacobiWarm)->Arg(128)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_OptimalBeta(benchmark::State& state) {
  double lambda = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_beta(1.0, lambda));
    lambda = lambda > 4.0 ? 0.0 : lambda + 0.01;
  }
}
BENCHMARK(BM_OptimalBeta);

void BM_LambdaForRate(benchmark::State& state) {
  std::vector<double> var;
  for (int i = 0; i < 500; ++i) var.push_back(1.0 / (1.0 + 0.05 * i));
  for (auto _ : state) benchmark::DoNotOptimize(lambda_for_rate(var, 0.25));
}
BENCHMARK(BM_LambdaForRate)->Unit(benchmark::kMicrosecond);

class LayerFixture : public benchmark::Fixture {
 public:
  void SetUp(const benchmark::State& state) override {
    if (layer_.dim() == state.range(0)) return;
    d_ = ar1(static_cast<int>(state.range(0)), 5000);
    layer_ = train_single_layer(d_.train, 0.5);
  }

 protected:
  data::Dataset d_;
  LayerParams layer_;
};

BENCHMARK_DEFINE_F(LayerFixture, EncodeBatch)(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(encode_batch(layer_, d_.test));
  state.SetItemsProcessed(state.iterations() * d_.test.cols());
}
BENCHMARK_REGISTER_F(LayerFixture, EncodeBatch)->Arg(128)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_DEFINE_F(LayerFixture, DecodeBatch)(benchmark::State& state) {
  const CodeMatrix codes = encode_batch(layer_, d_.test);
  for (auto _ : state) benchmark::DoNotOptimize(decode_batch(layer_, codes));
  state.SetItemsProcessed(state.iterations() * d_.test.cols());
}
BENCHMARK_REGISTER_F(LayerFixture, DecodeBatch)->Arg(128)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_DEFINE_F(LayerFixture, EncodeSparseSingle)(benchmark::State& state) {
  Eigen::Index j = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode(layer_, d_.test.col(j)));
    j = (j + 1) % d_.test.cols();
  }
}
BENCHMARK_REGISTER_F(LayerFixture, EncodeSparseSingle)->Arg(128)->Arg(500);

BENCHMARK_DEFINE_F(LayerFixture, DecodeSparseSingle)(benchmark::State& state) {
  std::vector<TernaryCode> codes;
  for (Eigen::Index j = 0; j < 64; ++j) codes.push_back(encode(layer_, d_.test.col(j)));
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(layer_, codes[k]));
    k = (k + 1) % codes.size();
  }
}
BENCHMARK_REGISTER_F(LayerFixture, DecodeSparseSingle)->Arg(128)->Arg(500);

void BM_TrainMultiLayer(benchmark::State& state) {
  const data::Dataset d = ar1(128, 5000, 0);
  const auto layers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train_ml(d.train, 0.25, layers));
}
BENCHMARK(BM_TrainMultiLayer)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_TrainLsh(benchmark::State& state) {
  const data::Dataset d = ar1(128, 5000, 0);
  for (auto _ : state) benchmark::DoNotOptimize(baselines::train_lsh(d.train, state.range(0), 1));
}
BENCHMARK(BM_TrainLsh)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
