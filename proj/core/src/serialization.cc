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

#include "mlstc/serialization.h"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "mlstc/errors.h"

namespace mlstc {
namespace {

// Sanity caps so a corrupt header fails before any large allocation.
constexpr std::uint32_t kMaxDim = 1u << 16;
constexpr std::uint32_t kMaxLayers = 1u << 12;

template <typename T>
std::array<char, sizeof(T)> to_le(T v) {
  std::array<char, sizeof(T)> b{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  return b;
}

template <typename T>
T from_le(const std::array<char, sizeof(T)>& b) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void ByteWriter::magic(std::string_view m) { out_.write(m.data(), static_cast<std::streamsize>(m.size())); }

void ByteWriter::u32(std::uint32_t v) {
  const auto b = to_le(v);
  out_.write(b.data(), b.size());
}

void ByteWriter::i8(std::int8_t v) { out_.put(static_cast<char>(v)); }

void ByteWriter::f64(double v) {
  const auto b = to_le(std::bit_cast<std::uint64_t>(v));
  out_.write(b.data(), b.size());
}

void ByteWriter::f64s(std::span<const double> values) {
  for (double v : values) f64(v);
}

void ByteWriter::vector(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
}

void ByteWriter::matrix(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
}

void ByteReader::read(char* dst, std::size_t size) {
  in_.read(dst, static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in_.gcount()) != size) {
    throw DataError("unexpected end of stream: wanted " + std::to_string(size) +
                    " bytes, got " + std::to_string(in_.gcount()));
  }
}

void ByteReader::expect_magic(std::string_view m) {
  std::string got(m.size(), '\0');
  read(got.data(), got.size());
  if (got != m) {
    throw DataError("bad magic: expected \"" + std::string(m) + "\"");
  }
}

std::uint32_t ByteReader::u32() {
  std::array<char, 4> b{};
  read(b.data(), b.size());
  return from_le<std::uint32_t>(b);
}

std::int8_t ByteReader::i8() {
  char c = 0;
  read(&c, 1);
  return static_cast<std::int8_t>(c);
}

double ByteReader::f64() {
  std::array<char, 8> b{};
  read(b.data(), b.size());
  return std::bit_cast<double>(from_le<std::uint64_t>(b));
}

Vector ByteReader::vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = f64();
  return v;
}

Matrix ByteReader::matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = f64();
  }
  return m;
}

void write_model(std::ostream& out, const MLModel& model) {
  ByteWriter w(out);
  w.magic(kModelMagic);
  w.u32(static_cast<std::uint32_t>(model.dim));
  w.u32(static_cast<std::uint32_t>(model.layers.size()));
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const LayerParams& layer = model.layers[l];
    if ((l == 0) != layer.has_mean()) {
      throw DomainError("write_model: only the first layer carries a mean");
    }
    if (l == 0) w.vector(layer.mean);
    w.matrix(layer.projection);
    w.f64(layer.lambda);
    w.vector(layer.beta);
    w.vector(layer.sigma);
    w.vector(layer.alpha);
  }
  if (!out) throw DataError("write_model: stream write failed");
}

MLModel read_model(std::istream& in) {
  ByteReader r(in);
  r.expect_magic(kModelMagic);
  const std::uint32_t n = r.u32();
  const std::uint32_t layers = r.u32();
  if (n == 0 || n > kMaxDim || layers > kMaxLayers) {
    throw DataError("read_model: implausible header (n=" + std::to_string(n) +
                    ", L=" + std::to_string(layers) + ")");
  }
  MLModel model;
  model.dim = n;
  for (std::uint32_t l = 0; l < layers; ++l) {
    LayerParams layer;
    if (l == 0) layer.mean = r.vector(n);
    layer.projection = r.matrix(n, n);
    layer.lambda = r.f64();
    layer.beta = r.vector(n);
    layer.sigma = r.vector(n);
    layer.alpha = r.vector(n);
    for (Eigen::Index i = 0; i < layer.alpha.size(); ++i) {
      if (!(layer.alpha(i) >= 0.0 && layer.alpha(i) <= 0.5)) {
        throw DataError("read_model: activity probability out of range");
      }
    }
    model.per_layer_rate.push_back(layer.analytic_rate());
    model.layers.push_back(std::move(layer));
  }
  return model;
}

void save_model(const std::filesystem::path& path, const MLModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_model(out, model);
}

MLModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_model(in);
}

void write_code(ByteWriter& w, const TernaryCode& code) {
  w.u32(code.layer_id);
  w.u32(static_cast<std::uint32_t>(code.support.size()));
  for (const CodeEntry& e : code.support) {
    w.u32(e.index);
    w.i8(e.sign);
  }
}

TernaryCode read_code(ByteReader& r, std::uint32_t dim) {
  TernaryCode code;
  code.layer_id = r.u32();
  const std::uint32_t count = r.u32();
  if (count > dim) {
    throw DataError("read_code: support size " + std::to_string(count) +
                    " exceeds dimension " + std::to_string(dim));
  }
  code.support.reserve(count);
  std::int64_t previous = -1;
  for (std::uint32_t k = 0; k < count; ++k) {
    CodeEntry e;
    e.index = r.u32();
    e.sign = r.i8();
    if (e.index >= dim || static_cast<std::int64_t>(e.index) <= previous) {
      throw DataError("read_code: support indices must be increasing and below n");
    }
    if (e.sign != 1 && e.sign != -1) throw DataError("read_code: sign must be +1 or -1");
    previous = e.index;
    code.support.push_back(e);
  }
  return code;
}

void write_codes(std::ostream& out, const CodeFile& codes) {
  ByteWriter w(out);
  w.magic(kCodesMagic);
  w.u32(codes.dim);
  w.u32(codes.num_layers);
  w.u32(static_cast<std::uint32_t>(codes.vectors.size()));
  for (const auto& per_vector : codes.vectors) {
    if (per_vector.size() != codes.num_layers) {
      throw DomainError("write_codes: every vector needs one code per layer");
    }
    for (const TernaryCode& c : per_vector) write_code(w, c);
  }
  if (!out) throw DataError("write_codes: stream write failed");
}

CodeFile read_codes(std::istream& in) {
  ByteReader r(in);
  r.expect_magic(kCodesMagic);
  CodeFile codes;
  codes.dim = r.u32();
  codes.num_layers = r.u32();
  const std::uint32_t count = r.u32();
  if (codes.dim == 0 || codes.dim > kMaxDim || codes.num_layers > kMaxLayers) {
    throw DataError("read_codes: implausible header");
  }
  for (std::uint32_t v = 0; v < count; ++v) {
    std::vector<TernaryCode> per_vector;
    per_vector.reserve(codes.num_layers);
    for (std::uint32_t l = 0; l < codes.num_layers; ++l) {
      per_vector.push_back(read_code(r, codes.dim));
    }
    codes.vectors.push_back(std::move(per_vector));
  }
  return codes;
}

void save_codes(const std::filesystem::path& path, const CodeFile& codes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_codes(out, codes);
}

CodeFile load_codes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_codes(in);
}

}  // namespace mlstc
