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
#include <string_view>
#include <vector>

#include "mlstc/math_kernels.h"
#include "mlstc/stc_codec.h"

namespace mlstc {

// Binary containers. All integers and floats are written little-endian
// regardless of host byte order; floats are IEEE-754 binary64.
//
//   model file   "MLSTC1"  u32 n  u32 L
//                per layer: [layer 1: mean f64 x n]  A f64 x n*n (row-major)
//                           lambda f64  beta, sigma, alpha f64 x n each
//   code file    "STCC1"   u32 n  u32 L  u32 M
//                per vector, per layer: u32 layer_id  u32 count
//                                       count x (u32 index, i8 sign)

inline constexpr std::string_view kModelMagic = "MLSTC1";
inline constexpr std::string_view kCodesMagic = "STCC1";

class ByteWriter {
 public:
  explicit ByteWriter(std::ostream& out) : out_(out) {}

  void magic(std::string_view m);
  void u32(std::uint32_t v);
  void i8(std::int8_t v);
  void f64(double v);
  void f64s(std::span<const double> values);
  void vector(const Vector& v);
  /// Row-major dump of a dense matrix.
  void matrix(const Matrix& m);

 private:
  std::ostream& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  /// Throws DataError unless the next bytes equal `m`.
  void expect_magic(std::string_view m);
  std::uint32_t u32();
  std::int8_t i8();
  double f64();
  Vector vector(Eigen::Index n);
  Matrix matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  void read(char* dst, std::size_t size);
  std::istream& in_;
};

void write_model(std::ostream& out, const MLModel& model);
MLModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const MLModel& model);
MLModel load_model(const std::filesystem::path& path);

void write_code(ByteWriter& w, const TernaryCode& code);
TernaryCode read_code(ByteReader& r, std::uint32_t dim);

/// Codes of M vectors, each a list of per-layer codes.
struct CodeFile {
  std::uint32_t dim = 0;
  std::uint32_t num_layers = 0;
  std::vector<std::vector<TernaryCode>> vectors;
};

void write_codes(std::ostream& out, const CodeFile& codes);
CodeFile read_codes(std::istream& in);
void save_codes(const std::filesystem::path& path, const CodeFile& codes);
CodeFile load_codes(const std::filesystem::path& path);

}  // namespace mlstc
