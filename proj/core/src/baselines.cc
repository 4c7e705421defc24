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

#include "mlstc/baselines.h"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "mlstc/datasets.h"
#include "mlstc/errors.h"
#include "mlstc/serialization.h"
#include "mlstc/ternary_quantizer.h"

namespace mlstc::baselines {

using Eigen::Index;

namespace {

CodeMatrix sign_codes(const Matrix& projected) {
  return projected.unaryExpr([](double v) -> std::int8_t { return v < 0.0 ? -1 : 1; });
}

void check_training(const Eigen::Ref<const Matrix>& data, const char* who) {
  if (data.cols() < 2) {
    throw DegenerateDataError(std::string(who) + ": need at least 2 training vectors");
  }
}

}  // namespace

double PcaHashModel::rate() const {
  return dim() == 0 ? 0.0 : static_cast<double>(bits()) / static_cast<double>(dim());
}

double LshModel::rate() const {
  return dim() == 0 ? 0.0 : static_cast<double>(bits()) / static_cast<double>(dim());
}

PcaHashModel train_pca_hash(const Eigen::Ref<const Matrix>& train_data, Index bits) {
  check_training(train_data, "train_pca_hash");
  const Index n = train_data.rows();
  if (bits < 0 || bits > n) {
    throw ConfigError("train_pca_hash: bits must lie in [0, n] (n = " + std::to_string(n) +
                      ", got " + std::to_string(bits) + ")");
  }
  return train_pca_hash(fit_source(train_data), bits);
}

PcaHashModel train_pca_hash(const SourceModel& source, Index bits) {
  const Index n = source.dim();
  if (bits < 0 || bits > n) {
    throw ConfigError("train_pca_hash: bits must lie in [0, n] (n = " + std::to_string(n) +
                      ", got " + std::to_string(bits) + ")");
  }
  if (!(source.spectrum.eigenvalues.sum() > 0.0)) {
    throw DegenerateDataError("train_pca_hash: training data has zero covariance");
  }
  const std::vector<double> var = source.variances();
  PcaHashModel m;
  m.mean = source.mean;
  m.projector = source.spectrum.eigenvectors.leftCols(bits).transpose();
  m.beta.resize(bits);
  for (Index i = 0; i < bits; ++i) {
    m.beta(i) = optimal_beta(std::sqrt(var[static_cast<std::size_t>(i)]), 0.0);
  }
  return m;
}

CodeMatrix encode(const PcaHashModel& model, const Eigen::Ref<const Matrix>& data) {
  if (data.rows() != model.dim()) throw DomainError("pca-hash encode: dimension mismatch");
  return sign_codes(model.projector * (data.colwise() - model.mean));
}

Matrix decode(const PcaHashModel& model, const CodeMatrix& codes) {
  if (codes.rows() != model.bits()) throw DomainError("pca-hash decode: code length mismatch");
  Matrix out = model.projector.transpose() * (model.beta.asDiagonal() * codes.cast<double>());
  out.colwise() += model.mean;
  return out;
}

LshModel train_lsh(const Eigen::Ref<const Matrix>& train_data, Index bits, std::uint64_t seed) {
  check_training(train_data, "train_lsh");
  if (bits < 1) throw ConfigError("train_lsh: need at least one bit");
  const Index n = train_data.rows();
  LshModel m;
  m.mean = column_mean(train_data);
  const Matrix centered = train_data.colwise() - m.mean;
  if (!(centered.squaredNorm() > 0.0)) {
    throw DegenerateDataError("train_lsh: training data has zero variance");
  }
  data::CounterRng rng(seed, 0x15C0DE);
  m.projector.resize(bits, n);
  for (Index i = 0; i < bits; ++i) {
    for (Index j = 0; j < n; ++j) m.projector(i, j) = rng.normal();
  }

  const Matrix x = sign_codes(m.projector * centered).cast<double>();
  Matrix gram = Matrix::Zero(bits, bits);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  // W^T = (X X^T)^-1 X F^T
  m.decoder = solve_normal_equations(gram, x * centered.transpose()).transpose();

  const Matrix recon = m.decoder * x;
  m.global_beta = global_scalar_beta(centered, recon);
  m.decoder *= m.global_beta;
  return m;
}

CodeMatrix encode(const LshModel& model, const Eigen::Ref<const Matrix>& data) {
  if (data.rows() != model.dim()) throw DomainError("lsh encode: dimension mismatch");
  return sign_codes(model.projector * (data.colwise() - model.mean));
}

Matrix decode(const LshModel& model, const CodeMatrix& codes) {
  if (codes.rows() != model.bits()) throw DomainError("lsh decode: code length mismatch");
  Matrix out = model.decoder * codes.cast<double>();
  out.colwise() += model.mean;
  return out;
}

double global_scalar_beta(const Eigen::Ref<const Matrix>& original,
                          const Eigen::Ref<const Matrix>& reconstruction) {
  if (original.rows() != reconstruction.rows() || original.cols() != reconstruction.cols()) {
    throw DomainError("global_scalar_beta: shape mismatch");
  }
  const double denom = reconstruction.squaredNorm();
  if (!(denom > 0.0)) throw DomainError("global_scalar_beta: reconstruction is zero");
  return original.cwiseProduct(reconstruction).sum() / denom;
}

void write_model(std::ostream& out, const PcaHashModel& model) {
  ByteWriter w(out);
  w.magic(kPcaHashMagic);
  w.u32(static_cast<std::uint32_t>(model.dim()));
  w.u32(static_cast<std::uint32_t>(model.bits()));
  w.vector(model.mean);
  w.matrix(model.projector);
  w.vector(model.beta);
  if (!out) throw DataError("write_model: stream write failed");
}

void write_model(std::ostream& out, const LshModel& model) {
  ByteWriter w(out);
  w.magic(kLshMagic);
  w.u32(static_cast<std::uint32_t>(model.dim()));
  w.u32(static_cast<std::uint32_t>(model.bits()));
  w.vector(model.mean);
  w.matrix(model.projector);
  w.matrix(model.decoder);
  w.f64(model.global_beta);
  if (!out) throw DataError("write_model: stream write failed");
}

namespace {

std::pair<std::uint32_t, std::uint32_t> read_shape(ByteReader& r) {
  const std::uint32_t n = r.u32();
  const std::uint32_t k = r.u32();
  if (n == 0 || n > (1u << 16) || k > (1u << 18)) {
    throw DataError("baseline model: implausible header");
  }
  return {n, k};
}

}  // namespace

PcaHashModel read_pca_hash(std::istream& in) {
  ByteReader r(in);
  r.expect_magic(kPcaHashMagic);
  const auto [n, k] = read_shape(r);
  if (k > n) throw DataError("pca-hash model: more bits than dimensions");
  PcaHashModel m;
  m.mean = r.vector(n);
  m.projector = r.matrix(k, n);
  m.beta = r.vector(k);
  return m;
}

LshModel read_lsh(std::istream& in) {
  ByteReader r(in);
  r.expect_magic(kLshMagic);
  const auto [n, k] = read_shape(r);
  LshModel m;
  m.mean = r.vector(n);
  m.projector = r.matrix(k, n);
  m.decoder = r.matrix(n, k);
  m.global_beta = r.f64();
  return m;
}

}  // namespace mlstc::baselines
