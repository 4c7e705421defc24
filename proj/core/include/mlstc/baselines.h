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
#include <string_view>

#include "mlstc/math_kernels.h"
#include "mlstc/stc_codec.h"

namespace mlstc::baselines {

inline constexpr std::string_view kPcaHashMagic = "PCAH1";
inline constexpr std::string_view kLshMagic = "LSH1";

/// Binary codes from the signs of the top-k principal components; decoded by
/// back-projection with per-component magnitudes sigma_i sqrt(2/pi).
struct PcaHashModel {
  Vector mean;
  Matrix projector;  // k x n, orthonormal rows
  Vector beta;       // k

  Eigen::Index dim() const { return mean.size(); }
  Eigen::Index bits() const { return projector.rows(); }
  /// k / n: one stored bit per code entry.
  double rate() const;
};

PcaHashModel train_pca_hash(const Eigen::Ref<const Matrix>& train_data, Eigen::Index bits);
/// Reuses an already fitted source model (sweeps over k).
PcaHashModel train_pca_hash(const SourceModel& source, Eigen::Index bits);

/// Sim-Hash: signs of a seeded Gaussian projection, decoded with the
/// least-squares (pseudo-inverse) map learned on the training codes and a
/// global scale.
struct LshModel {
  Vector mean;
  Matrix projector;  // k x n
  Matrix decoder;    // n x k, already multiplied by global_beta
  double global_beta = 1.0;

  Eigen::Index dim() const { return mean.size(); }
  Eigen::Index bits() const { return projector.rows(); }
  double rate() const;
};

LshModel train_lsh(const Eigen::Ref<const Matrix>& train_data, Eigen::Index bits,
                   std::uint64_t seed);

/// Sign codes in {-1, +1}; zero projections map to +1.
CodeMatrix encode(const PcaHashModel& model, const Eigen::Ref<const Matrix>& data);
Matrix decode(const PcaHashModel& model, const CodeMatrix& codes);
CodeMatrix encode(const LshModel& model, const Eigen::Ref<const Matrix>& data);
Matrix decode(const LshModel& model, const CodeMatrix& codes);

/// Scalar minimizing ||F - beta F_hat||_F^2, i.e. Tr[F F_hat^T] / Tr[F_hat F_hat^T].
/// Throws DomainError when F_hat is identically zero.
double global_scalar_beta(const Eigen::Ref<const Matrix>& original,
                          const Eigen::Ref<const Matrix>& reconstruction);

void write_model(std::ostream& out, const PcaHashModel& model);
void write_model(std::ostream& out, const LshModel& model);
PcaHashModel read_pca_hash(std::istream& in);
LshModel read_lsh(std::istream& in);

}  // namespace mlstc::baselines
