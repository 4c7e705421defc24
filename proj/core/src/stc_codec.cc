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

#include "mlstc/stc_codec.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mlstc/errors.h"

namespace mlstc {

using Eigen::Index;

namespace {

constexpr double kDeadVarianceRatio = 1e-12;
// Residual energy, relative to the first layer's, below which training stops.
constexpr double kCollapsedResidualRatio = 1e-20;

void check_length(const LayerParams& layer, Index size, const char* what) {
  if (size != layer.dim()) {
    throw DomainError(std::string(what) + ": expected length " +
                      std::to_string(layer.dim()) + ", got " + std::to_string(size));
  }
}

CodeMatrix threshold_projected(const LayerParams& layer, const Matrix& projected) {
  const Index n = projected.rows();
  CodeMatrix codes = CodeMatrix::Zero(n, projected.cols());
  const double lambda = layer.lambda;
  for (Index j = 0; j < projected.cols(); ++j) {
    for (Index i = 0; i < n; ++i) {
      const double v = projected(i, j);
      if (layer.beta(i) != 0.0 && std::abs(v) > lambda) codes(i, j) = v > 0.0 ? 1 : -1;
    }
  }
  return codes;
}

}  // namespace

std::vector<double> SourceModel::variances() const {
  const Index n = spectrum.dim();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return v;
  const double cutoff = kDeadVarianceRatio * spectrum.eigenvalues.maxCoeff();
  for (Index i = 0; i < n; ++i) {
    const double e = spectrum.eigenvalues(i);
    v[static_cast<std::size_t>(i)] = e > cutoff ? e : 0.0;
  }
  return v;
}

SourceModel fit_source(const Eigen::Ref<const Matrix>& data, bool center,
                       const Matrix* warm_start) {
  SourceModel s;
  s.samples = data.cols();
  s.mean = center ? column_mean(data) : Vector::Zero(data.rows());
  const Matrix cov = estimate_covariance(data, s.mean);
  s.spectrum = warm_start ? eigh(cov, *warm_start) : eigh(cov);
  return s;
}

double LayerParams::analytic_rate() const {
  if (dim() == 0) return 0.0;
  double sum = 0.0;
  for (Index i = 0; i < alpha.size(); ++i) sum += ternary_entropy(alpha(i));
  return sum / static_cast<double>(dim());
}

double LayerParams::analytic_distortion() const {
  if (dim() == 0) return 0.0;
  double sum = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) {
    sum += distortion_per_dim({sigma(i), lambda, beta(i), alpha(i)});
  }
  return sum / static_cast<double>(dim());
}

LayerParams make_layer(const SourceModel& source, double lambda, bool keep_mean) {
  const Index n = source.dim();
  LayerParams layer;
  layer.projection = source.spectrum.eigenvectors.transpose();
  if (keep_mean) layer.mean = source.mean;
  layer.lambda = lambda;
  layer.beta = Vector::Zero(n);
  layer.alpha = Vector::Zero(n);
  layer.sigma = Vector::Zero(n);
  const std::vector<double> var = source.variances();
  for (Index i = 0; i < n; ++i) {
    const QuantizerDim d = make_quantizer_dim(std::sqrt(var[static_cast<std::size_t>(i)]), lambda);
    layer.sigma(i) = d.sigma;
    layer.beta(i) = d.beta;
    layer.alpha(i) = d.alpha;
  }
  return layer;
}

namespace {

SourceModel fit_nondegenerate(const Eigen::Ref<const Matrix>& data) {
  if (data.cols() < 2) {
    throw DegenerateDataError("train: need at least 2 training vectors");
  }
  SourceModel source = fit_source(data);
  if (!(source.spectrum.eigenvalues.sum() > 0.0)) {
    throw DegenerateDataError("train: training data has zero covariance");
  }
  return source;
}

}  // namespace

LayerParams train_single_layer(const Eigen::Ref<const Matrix>& train_data,
                               double rate_budget) {
  const SourceModel source = fit_nondegenerate(train_data);
  const std::vector<double> var = source.variances();
  return make_layer(source, lambda_for_rate(var, rate_budget), true);
}

LayerParams train_single_layer_at_lambda(const Eigen::Ref<const Matrix>& train_data,
                                         double lambda) {
  return make_layer(fit_nondegenerate(train_data), lambda, true);
}

TernaryCode encode(const LayerParams& layer, const Eigen::Ref<const Vector>& f,
                   std::uint32_t layer_id) {
  check_length(layer, f.size(), "encode");
  if (!f.allFinite()) throw DomainError("encode: non-finite input");
  const Vector projected =
      layer.has_mean() ? Vector(layer.projection * (f - layer.mean))
                       : Vector(layer.projection * f);
  TernaryCode code;
  code.layer_id = layer_id;
  for (Index i = 0; i < projected.size(); ++i) {
    if (layer.beta(i) == 0.0) continue;
    const double v = projected(i);
    if (std::abs(v) > layer.lambda) {
      code.support.push_back({static_cast<std::uint32_t>(i),
                              static_cast<std::int8_t>(v > 0.0 ? 1 : -1)});
    }
  }
  return code;
}

Vector decode(const LayerParams& layer, const TernaryCode& code) {
  const Index n = layer.dim();
  Vector weighted = Vector::Zero(n);
  Index previous = -1;
  for (const CodeEntry& e : code.support) {
    const auto i = static_cast<Index>(e.index);
    if (i >= n) {
      throw DomainError("decode: support index " + std::to_string(e.index) +
                        " out of range for dimension " + std::to_string(n));
    }
    if (i <= previous) throw DomainError("decode: support indices not strictly increasing");
    if (e.sign != 1 && e.sign != -1) throw DomainError("decode: sign must be +1 or -1");
    weighted(i) = e.sign * layer.beta(i);
    previous = i;
  }
  Vector out = layer.projection.transpose() * weighted;
  if (layer.has_mean()) out += layer.mean;
  return out;
}

CodeMatrix encode_batch(const LayerParams& layer, const Eigen::Ref<const Matrix>& data) {
  check_length(layer, data.rows(), "encode_batch");
  const Matrix projected = layer.has_mean()
                               ? Matrix(layer.projection * (data.colwise() - layer.mean))
                               : Matrix(layer.projection * data);
  return threshold_projected(layer, projected);
}

Matrix decode_batch(const LayerParams& layer, const CodeMatrix& codes) {
  check_length(layer, codes.rows(), "decode_batch");
  const Matrix weighted = layer.beta.asDiagonal() * codes.cast<double>();
  Matrix out = layer.projection.transpose() * weighted;
  if (layer.has_mean()) out.colwise() += layer.mean;
  return out;
}

TernaryCode to_sparse(const CodeMatrix& codes, Index column, std::uint32_t layer_id) {
  TernaryCode code;
  code.layer_id = layer_id;
  for (Index i = 0; i < codes.rows(); ++i) {
    const std::int8_t s = codes(i, column);
    if (s != 0) code.support.push_back({static_cast<std::uint32_t>(i), s});
  }
  return code;
}

double empirical_rate(const CodeMatrix& codes) {
  if (codes.rows() == 0 || codes.cols() == 0) return 0.0;
  const auto m = static_cast<double>(codes.cols());
  double total = 0.0;
  for (Index i = 0; i < codes.rows(); ++i) {
    std::array<Index, 3> count{0, 0, 0};
    for (Index j = 0; j < codes.cols(); ++j) ++count[static_cast<std::size_t>(codes(i, j) + 1)];
    for (Index c : count) {
      if (c > 0) {
        const double p = static_cast<double>(c) / m;
        total -= p * std::log2(p);
      }
    }
  }
  return total / static_cast<double>(codes.rows());
}

Matrix learn_bprime(const LayerParams& layer, const Eigen::Ref<const Matrix>& train_data,
                    const CodeMatrix& codes) {
  check_length(layer, train_data.rows(), "learn_bprime");
  if (codes.rows() != train_data.rows() || codes.cols() != train_data.cols()) {
    throw DomainError("learn_bprime: codes and data shapes differ");
  }
  if (train_data.cols() < train_data.rows()) {
    throw SingularMatrixError("learn_bprime: X X^T is singular with " +
                              std::to_string(train_data.cols()) + " samples in dimension " +
                              std::to_string(train_data.rows()));
  }
  const Matrix x = layer.beta.asDiagonal() * codes.cast<double>();
  const Matrix projected = layer.has_mean()
                               ? Matrix(layer.projection * (train_data.colwise() - layer.mean))
                               : Matrix(layer.projection * train_data);
  Matrix gram = Matrix::Zero(x.rows(), x.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  // (X X^T) B'^T = X (A F)^T
  const Matrix rhs = x * projected.transpose();
  return solve_normal_equations(gram, rhs).transpose();
}

double MLModel::cumulative_rate(std::size_t k) const {
  double r = 0.0;
  for (std::size_t l = 0; l < std::min(k, per_layer_rate.size()); ++l) r += per_layer_rate[l];
  return r;
}

MLModel train_ml(const Eigen::Ref<const Matrix>& train_data,
                 std::span<const double> layer_rates, const SourceModel* first_source) {
  if (layer_rates.empty()) throw ConfigError("train_ml: need at least one layer");
  if (train_data.cols() < 2) {
    throw DegenerateDataError("train_ml: need at least 2 training vectors");
  }
  MLModel model;
  model.dim = train_data.rows();
  Matrix residual = train_data;
  double first_energy = 0.0;
  for (std::size_t l = 0; l < layer_rates.size(); ++l) {
    const bool first = l == 0;
    const Matrix* warm = first ? nullptr : &model.layers.back().projection;
    Matrix warm_basis;
    if (warm) warm_basis = warm->transpose();
    const SourceModel source = (first && first_source)
                                   ? *first_source
                                   : fit_source(residual, first, warm ? &warm_basis : nullptr);
    const double energy = source.spectrum.eigenvalues.sum();
    if (first) {
      if (!(energy > 0.0)) throw DegenerateDataError("train_ml: training data has zero covariance");
      first_energy = energy;
    } else if (energy <= kCollapsedResidualRatio * first_energy) {
      model.notice = "residual collapsed to numerical zero after " + std::to_string(l) +
                     " of " + std::to_string(layer_rates.size()) + " layers";
      break;
    }
    const std::vector<double> var = source.variances();
    LayerParams layer = make_layer(source, lambda_for_rate(var, layer_rates[l]), first);
    const CodeMatrix codes = encode_batch(layer, residual);
    residual -= decode_batch(layer, codes);
    model.per_layer_rate.push_back(layer.analytic_rate());
    model.layers.push_back(std::move(layer));
  }
  return model;
}

MLModel train_ml(const Eigen::Ref<const Matrix>& train_data, double layer_rate,
                 int num_layers) {
  if (num_layers < 1) throw ConfigError("train_ml: need at least one layer");
  const std::vector<double> rates(static_cast<std::size_t>(num_layers), layer_rate);
  return train_ml(train_data, rates);
}

std::vector<TernaryCode> encode_ml(const MLModel& model, const Eigen::Ref<const Vector>& f) {
  if (f.size() != model.dim) throw DomainError("encode_ml: length mismatch");
  std::vector<TernaryCode> codes;
  codes.reserve(model.layers.size());
  Vector residual = f;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    codes.push_back(encode(model.layers[l], residual, static_cast<std::uint32_t>(l)));
    residual -= decode(model.layers[l], codes.back());
  }
  return codes;
}

Vector decode_ml(const MLModel& model, std::span<const TernaryCode> codes,
                 std::optional<std::size_t> up_to) {
  const std::size_t k = up_to.value_or(model.layers.size());
  if (k > model.layers.size() || codes.size() < k) {
    throw DomainError("decode_ml: layer count mismatch (model has " +
                      std::to_string(model.layers.size()) + " layers, got " +
                      std::to_string(codes.size()) + " codes, requested " +
                      std::to_string(k) + ")");
  }
  Vector out = Vector::Zero(model.dim);
  if (!model.layers.empty() && model.layers.front().has_mean()) out = model.layers.front().mean;
  for (std::size_t l = 0; l < k; ++l) {
    if (codes[l].layer_id != l) throw DomainError("decode_ml: codes out of layer order");
    const LayerParams& layer = model.layers[l];
    Vector part = decode(layer, codes[l]);
    if (layer.has_mean()) part -= layer.mean;
    out += part;
  }
  return out;
}

std::vector<CodeMatrix> encode_ml_batch(const MLModel& model,
                                        const Eigen::Ref<const Matrix>& data) {
  if (data.rows() != model.dim) throw DomainError("encode_ml_batch: dimension mismatch");
  std::vector<CodeMatrix> codes;
  Matrix residual = data;
  for (const LayerParams& layer : model.layers) {
    codes.push_back(encode_batch(layer, residual));
    residual -= decode_batch(layer, codes.back());
  }
  return codes;
}

Matrix decode_ml_batch(const MLModel& model, std::span<const CodeMatrix> codes,
                       std::optional<std::size_t> up_to) {
  const std::size_t k = up_to.value_or(model.layers.size());
  if (k > model.layers.size() || codes.size() < k) {
    throw DomainError("decode_ml_batch: layer count mismatch");
  }
  const Index m = codes.empty() ? 0 : codes.front().cols();
  Matrix out = Matrix::Zero(model.dim, m);
  if (!model.layers.empty() && model.layers.front().has_mean()) {
    out.colwise() += model.layers.front().mean;
  }
  for (std::size_t l = 0; l < k; ++l) {
    const LayerParams& layer = model.layers[l];
    out.noalias() += layer.projection.transpose() *
                     (layer.beta.asDiagonal() * codes[l].cast<double>());
  }
  return out;
}

ProgressiveEval evaluate_progressive(const MLModel& model,
                                     const Eigen::Ref<const Matrix>& data) {
  if (data.rows() != model.dim) throw DomainError("evaluate_progressive: dimension mismatch");
  ProgressiveEval eval;
  Matrix residual = data;
  if (!model.layers.empty() && model.layers.front().has_mean()) {
    residual.colwise() -= model.layers.front().mean;
  }
  const auto total = static_cast<double>(data.size());
  eval.distortion.push_back(total > 0 ? residual.squaredNorm() / total : 0.0);
  for (const LayerParams& layer : model.layers) {
    // Residual is kept mean-free, so the first layer is applied without its
    // mean on both sides.
    const CodeMatrix codes = threshold_projected(layer, layer.projection * residual);
    residual.noalias() -= layer.projection.transpose() *
                          (layer.beta.asDiagonal() * codes.cast<double>());
    eval.empirical_rate.push_back(empirical_rate(codes));
    eval.distortion.push_back(total > 0 ? residual.squaredNorm() / total : 0.0);
  }
  return eval;
}

}  // namespace mlstc
