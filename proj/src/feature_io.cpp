// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "simulst/error.hpp"
#include "simulst/features.hpp"

namespace simulst {
namespace {

constexpr std::array<char, 4> kMagic{'S', 'G', 'F', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("truncated feature file " + path.string());
  return to_little(v);
}

}  // namespace

void write_features(const std::filesystem::path& path, const FeatureMatrix& f) {
  if (f.frames() > std::numeric_limits<std::uint32_t>::max() || f.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw ArgumentError("feature matrix too large for the file format");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.frames()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.dim()));
  put<float>(out, f.frame_shift_ms());
  for (float x : f.data()) put<float>(out, x);
  if (!out) throw IoError("write failed for " + path.string());
}

FeatureMatrix read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("not a feature file (bad magic): " + path.string());
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) throw ParseError("unsupported feature file version " + std::to_string(version));
  const auto frames = get<std::uint32_t>(in, path);
  const auto dim = get<std::uint32_t>(in, path);
  const auto shift = get<float>(in, path);
  std::vector<float> data(static_cast<std::size_t>(frames) * dim);
  for (float& x : data) x = get<float>(in, path);
  return FeatureMatrix(frames, dim, std::move(data), shift);
}

}  // namespace simulst
