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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlstc/math_kernels.h"
#include "mlstc/ternary_quantizer.h"

namespace mlstc {

/// Mean and eigen-spectrum of a training set: the decorrelating basis of a
/// layer and the variances of the projected coordinates.
struct SourceModel {
  Vector mean;                // zero for residual layers
  SymmetricSpectrum spectrum;
  Eigen::Index samples = 0;

  Eigen::Index dim() const { return spectrum.dim(); }
  /// Eigenvalues with values below 1e-12 * max set to exactly zero.
  std::vector<double> variances() const;
};

/// Estimates the source model of the columns of `data`. With `center` false
/// the raw second moment is used (residual layers are zero-mean by
/// construction). `warm_start`, when given, seeds the Jacobi rotations.
SourceModel fit_source(const Eigen::Ref<const Matrix>& data, bool center = true,
                       const Matrix* warm_start = nullptr);

/// Parameters of one STC layer. Codes are phi_lambda(A (f - mean)); the
/// decoder is A^T (code .* beta) + mean.
struct LayerParams {
  Matrix projection;  // A: n x n, rows are eigenvectors
  Vector mean;        // size n on the first layer, empty on residual layers
  double lambda = 0.0;
  Vector beta;
  Vector alpha;
  Vector sigma;

  Eigen::Index dim() const { return projection.rows(); }
  bool has_mean() const { return mean.size() != 0; }
  /// (1/n) sum_i H_t(alpha_i), bits per dimension.
  double analytic_rate() const;
  /// (1/n) sum_i D_i from the closed-form per-dimension distortion.
  double analytic_distortion() const;
};

LayerParams make_layer(const SourceModel& source, double lambda, bool keep_mean);

/// Trains a layer at `rate_budget` bits/dim: center, eigendecompose, choose
/// the shared threshold on the sparse branch, set optimal magnitudes.
LayerParams train_single_layer(const Eigen::Ref<const Matrix>& train_data,
                               double rate_budget);

/// Same, with an explicit threshold instead of a rate target.
LayerParams train_single_layer_at_lambda(const Eigen::Ref<const Matrix>& train_data,
                                         double lambda);

struct CodeEntry {
  std::uint32_t index = 0;
  std::int8_t sign = 0;  // -1 or +1

  friend bool operator==(const CodeEntry&, const CodeEntry&) = default;
};

/// Sparse ternary code of one vector: strictly increasing support indices
/// with their signs. Magnitudes live in the owning LayerParams.
struct TernaryCode {
  std::uint32_t layer_id = 0;
  std::vector<CodeEntry> support;

  friend bool operator==(const TernaryCode&, const TernaryCode&) = default;
};

/// Dense code matrix, one column per vector, entries in {-1, 0, +1}.
using CodeMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

TernaryCode encode(const LayerParams& layer, const Eigen::Ref<const Vector>& f,
                   std::uint32_t layer_id = 0);
Vector decode(const LayerParams& layer, const TernaryCode& code);

CodeMatrix encode_batch(const LayerParams& layer, const Eigen::Ref<const Matrix>& data);
Matrix decode_batch(const LayerParams& layer, const CodeMatrix& codes);

TernaryCode to_sparse(const CodeMatrix& codes, Eigen::Index column,
                      std::uint32_t layer_id = 0);

/// Mean over dimensions of the empirical entropy (bits) of the three symbols,
/// estimated from symbol frequencies across the columns.
double empirical_rate(const CodeMatrix& codes);

/// Least-squares back-projector B' = A F X^T (X X^T)^-1 with X the weighted
/// codes (sign .* beta) of the training columns. Throws SingularMatrixError
/// when there are fewer samples than dimensions; ill-conditioned systems are
/// regularized.
Matrix learn_bprime(const LayerParams& layer, const Eigen::Ref<const Matrix>& train_data,
                    const CodeMatrix& codes);

/// Ordered residual layers. Layer l codes the residual left by layers < l.
struct MLModel {
  Eigen::Index dim = 0;
  std::vector<LayerParams> layers;
  std::vector<double> per_layer_rate;  // analytic, bits/dim
  std::string notice;                  // set when training stopped early

  std::size_t num_layers() const { return layers.size(); }
  double cumulative_rate(std::size_t k) const;
  double total_rate() const { return cumulative_rate(layers.size()); }
};

/// Trains one layer per entry of `layer_rates` on successive residuals,
/// re-estimating the eigenbasis of the residual at every layer. A source
/// model already fitted to `train_data` may be passed to skip the first
/// decomposition.
MLModel train_ml(const Eigen::Ref<const Matrix>& train_data,
                 std::span<const double> layer_rates,
                 const SourceModel* first_source = nullptr);
MLModel train_ml(const Eigen::Ref<const Matrix>& train_data, double layer_rate,
                 int num_layers);

std::vector<TernaryCode> encode_ml(const MLModel& model, const Eigen::Ref<const Vector>& f);

/// Sum of the first `up_to` layer reconstructions (all layers by default).
/// Decoding zero layers yields the training mean.
Vector decode_ml(const MLModel& model, std::span<const TernaryCode> codes,
                 std::optional<std::size_t> up_to = std::nullopt);

std::vector<CodeMatrix> encode_ml_batch(const MLModel& model,
                                        const Eigen::Ref<const Matrix>& data);
Matrix decode_ml_batch(const MLModel& model, std::span<const CodeMatrix> codes,
                       std::optional<std::size_t> up_to = std::nullopt);

/// Distortion after each prefix of layers on `data`, plus the empirical
/// code entropy of every layer.
struct ProgressiveEval {
  std::vector<double> distortion;      // size L + 1, entry k uses k layers
  std::vector<double> empirical_rate;  // size L
};
ProgressiveEval evaluate_progressive(const MLModel& model,
                                     const Eigen::Ref<const Matrix>& data);

}  // namespace mlstc
