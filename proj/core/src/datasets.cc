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

#include "mlstc/datasets.h"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mlstc/errors.h"

namespace mlstc::data {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint32_t read_be32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (in.gcount() != 4) throw DataError("idx: truncated header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::uintmax_t size_of(const std::filesystem::path& p) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(p, ec);
  if (ec) throw DataError("cannot stat " + p.string() + ": " + ec.message());
  return size;
}

std::ifstream open_binary(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  return in;
}

void check_size(const std::filesystem::path& p, std::uintmax_t expected, std::uintmax_t actual) {
  if (actual < expected) {
    throw DataError(p.string() + " is truncated: expected " + std::to_string(expected) +
                    " bytes, found " + std::to_string(actual));
  }
}

std::int32_t le_i32(const unsigned char* b) {
  return static_cast<std::int32_t>(std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                                    (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next() { return mix64(key_ + kGolden * ++counter_); }

double CounterRng::uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

namespace {

Matrix draw(const SyntheticSpec& spec, int count, std::uint64_t stream) {
  CounterRng rng(spec.seed, stream);
  Matrix m(spec.n, count);
  const double innovation = std::sqrt(1.0 - spec.rho * spec.rho);
  for (int j = 0; j < count; ++j) {
    if (spec.kind == SourceKind::kIid) {
      for (int i = 0; i < spec.n; ++i) m(i, j) = rng.normal();
    } else {
      double x = rng.normal();
      m(0, j) = x;
      for (int i = 1; i < spec.n; ++i) {
        x = spec.rho * x + innovation * rng.normal();
        m(i, j) = x;
      }
    }
  }
  return m;
}

void validate(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.count < 1 || spec.test_count < 0) {
    throw ConfigError("synthetic source: need n >= 1 and at least one vector");
  }
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) {
    throw ConfigError("synthetic source: rho must lie in [0, 1)");
  }
}

}  // namespace

Dataset generate(const SyntheticSpec& spec) {
  validate(spec);
  Dataset d;
  d.train = draw(spec, spec.count, 0);
  d.test = draw(spec, spec.test_count, 1);
  d.name = describe(spec);
  return d;
}

Matrix source_covariance(const SyntheticSpec& spec) {
  validate(spec);
  Matrix c = Matrix::Identity(spec.n, spec.n);
  if (spec.kind == SourceKind::kAr1) {
    for (int i = 0; i < spec.n; ++i) {
      for (int j = 0; j < spec.n; ++j) c(i, j) = std::pow(spec.rho, std::abs(i - j));
    }
  }
  return c;
}

std::string describe(const SyntheticSpec& spec) {
  std::ostringstream s;
  if (spec.kind == SourceKind::kIid) {
    s << "iid";
  } else {
    s << "ar1-rho" << spec.rho;
  }
  s << "-n" << spec.n;
  return s.str();
}

IdxImages load_idx(const std::filesystem::path& images,
                   const std::optional<std::filesystem::path>& labels,
                   std::optional<std::size_t> max_images) {
  IdxImages out;
  {
    const auto actual = size_of(images);
    std::ifstream in = open_binary(images);
    const std::uint32_t magic = read_be32(in);
    if (magic != 0x00000803u) {
      std::ostringstream s;
      s << images.string() << ": bad idx magic 0x" << std::hex << magic
        << " (expected 0x00000803 for a 3-D byte tensor)";
      throw DataError(s.str());
    }
    const std::uint32_t count = read_be32(in);
    out.rows = read_be32(in);
    out.cols = read_be32(in);
    const std::uintmax_t pixels = std::uintmax_t{out.rows} * out.cols;
    if (pixels == 0) throw DataError(images.string() + ": zero-sized images");
    check_size(images, 16 + std::uintmax_t{count} * pixels, actual);

    const std::size_t n = max_images ? std::min<std::size_t>(*max_images, count) : count;
    out.images.resize(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(n));
    std::vector<unsigned char> buf(static_cast<std::size_t>(pixels));
    for (std::size_t j = 0; j < n; ++j) {
      in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
      if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
        throw DataError(images.string() + ": read failed");
      }
      for (std::size_t i = 0; i < buf.size(); ++i) {
        out.images(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = buf[i] / 255.0;
      }
    }
  }
  if (labels) {
    const auto actual = size_of(*labels);
    std::ifstream in = open_binary(*labels);
    const std::uint32_t magic = read_be32(in);
    if (magic != 0x00000801u) {
      throw DataError(labels->string() + ": bad idx magic (expected 0x00000801)");
    }
    const std::uint32_t count = read_be32(in);
    check_size(*labels, 8 + std::uintmax_t{count}, actual);
    const auto n = static_cast<std::size_t>(out.images.cols());
    if (count < n || (!max_images && count != n)) {
      throw DataError("idx: " + std::to_string(count) + " labels for " + std::to_string(n) +
                      " images");
    }
    out.labels.resize(n);
    in.read(reinterpret_cast<char*>(out.labels.data()), static_cast<std::streamsize>(n));
  }
  return out;
}

Matrix load_fvecs(const std::filesystem::path& path, std::optional<std::size_t> max_vectors) {
  const auto size = size_of(path);
  std::ifstream in = open_binary(path);
  if (size < 4) throw DataError(path.string() + ": truncated fvecs file");
  std::array<unsigned char, 4> head{};
  in.read(reinterpret_cast<char*>(head.data()), 4);
  const std::int32_t d = le_i32(head.data());
  if (d <= 0 || d > (1 << 20)) {
    throw DataError(path.string() + ": invalid fvecs dimension " + std::to_string(d));
  }
  const std::uintmax_t record = 4 + 4 * std::uintmax_t(d);
  if (size % record != 0) {
    throw DataError(path.string() + " is truncated: " + std::to_string(size) +
                    " bytes is not a multiple of the record size " + std::to_string(record));
  }
  std::size_t count = static_cast<std::size_t>(size / record);
  if (max_vectors) count = std::min(count, *max_vectors);

  in.seekg(0);
  Matrix out(d, static_cast<Eigen::Index>(count));
  std::vector<unsigned char> buf(static_cast<std::size_t>(record));
  for (std::size_t j = 0; j < count; ++j) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(record));
    if (static_cast<std::uintmax_t>(in.gcount()) != record) {
      throw DataError(path.string() + ": read failed at record " + std::to_string(j));
    }
    const std::int32_t dj = le_i32(buf.data());
    if (dj != d) {
      throw DataError(path.string() + ": record " + std::to_string(j) + " has dimension " +
                      std::to_string(dj) + ", expected " + std::to_string(d));
    }
    for (std::int32_t i = 0; i < d; ++i) {
      const auto bits = static_cast<std::uint32_t>(le_i32(buf.data() + 4 + 4 * i));
      out(i, static_cast<Eigen::Index>(j)) = std::bit_cast<float>(bits);
    }
  }
  return out;
}

void write_fvecs(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& vectors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  auto put32 = [&](std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                static_cast<char>((v >> 16) & 0xFF),
                                static_cast<char>((v >> 24) & 0xFF)};
    out.write(b.data(), 4);
  };
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    put32(static_cast<std::uint32_t>(vectors.rows()));
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      put32(std::bit_cast<std::uint32_t>(static_cast<float>(vectors(i, j))));
    }
  }
  if (!out) throw DataError("write failed for " + path.string());
}

Dataset load_mnist(const std::filesystem::path& dir, std::optional<std::size_t> max_train,
                   std::optional<std::size_t> max_test) {
  Dataset d;
  d.train = load_idx(dir / "train-images-idx3-ubyte", std::nullopt, max_train).images;
  d.test = load_idx(dir / "t10k-images-idx3-ubyte", std::nullopt, max_test).images;
  d.name = "mnist";
  return d;
}

Dataset load_gist(const std::filesystem::path& learn, const std::filesystem::path& base,
                  GistSplit split, std::size_t max_train, std::size_t max_test) {
  Dataset d;
  const bool learn_first = split == GistSplit::kLearnBase;
  d.train = load_fvecs(learn_first ? learn : base, max_train);
  d.test = load_fvecs(learn_first ? base : learn, max_test);
  if (d.train.rows() != d.test.rows()) throw DataError("gist: train/test dimensions differ");
  d.name = "gist";
  return d;
}

}  // namespace mlstc::data
