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
#include <optional>
#include <string>
#include <vector>

#include "mlstc/math_kernels.h"

namespace mlstc::data {

/// SplitMix64 run in counter mode: output k is mix(key + k * golden), with the
/// key derived from (seed, stream). Streams are independent and any seed
/// reproduces the same sequence on every platform. Normals use Box-Muller.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

enum class SourceKind { kIid, kAr1 };

struct SyntheticSpec {
  SourceKind kind = SourceKind::kIid;
  int n = 500;
  int count = 10000;       // training vectors
  int test_count = 10000;  // held-out vectors
  double rho = 0.0;        // AR(1) correlation, ignored for i.i.d.
  std::uint64_t seed = 1;
};

struct Dataset {
  Matrix train;  // n x N_train, one vector per column
  Matrix test;   // n x N_test
  std::string name;
};

/// i.i.d. standard normal entries, or unit-variance AR(1) columns
/// x_1 ~ N(0,1), x_t = rho x_{t-1} + sqrt(1 - rho^2) e_t.
Dataset generate(const SyntheticSpec& spec);

/// Theoretical covariance of the source: I or rho^|i-j|.
Matrix source_covariance(const SyntheticSpec& spec);

std::string describe(const SyntheticSpec& spec);

struct IdxImages {
  Matrix images;                       // (rows * cols) x N, pixels scaled to [0, 1]
  std::vector<std::uint8_t> labels;    // empty when no label file was given
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

/// Reads an idx3-ubyte image file (magic 0x00000803) and, optionally, the
/// matching idx1-ubyte label file (magic 0x00000801).
IdxImages load_idx(const std::filesystem::path& images,
                   const std::optional<std::filesystem::path>& labels = std::nullopt,
                   std::optional<std::size_t> max_images = std::nullopt);

/// Reads little-endian fvecs records (i32 d, then d f32) into a d x N matrix.
Matrix load_fvecs(const std::filesystem::path& path,
                  std::optional<std::size_t> max_vectors = std::nullopt);
void write_fvecs(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& vectors);

/// MNIST from a directory with the four official idx files.
Dataset load_mnist(const std::filesystem::path& dir,
                   std::optional<std::size_t> max_train = std::nullopt,
                   std::optional<std::size_t> max_test = std::nullopt);

enum class GistSplit {
  kLearnBase,  // train on the learn file, evaluate on the base file
  kBaseLearn,  // train on the base file, evaluate on the learn file
};

Dataset load_gist(const std::filesystem::path& learn, const std::filesystem::path& base,
                  GistSplit split, std::size_t max_train, std::size_t max_test);

}  // namespace mlstc::data
