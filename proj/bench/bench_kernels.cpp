// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "simulst/attention.hpp"
#include "simulst/features.hpp"

namespace {

using namespace simulst;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

AttentionTensor random_tensor(std::size_t layers, std::size_t heads, std::size_t m, std::size_t n) {
  std::vector<AttentionMatrix> mats;
  for (std::size_t i = 0; i < layers * heads; ++i) {
    Matrix w = random_matrix(m, n, 100 + i);
    for (std::size_t r = 0; r < m; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < n; ++c) sum += (w(r, c) = std::exp(w(r, c)));
      for (std::size_t c = 0; c < n; ++c) w(r, c) /= sum;
    }
    mats.emplace_back(std::move(w));
  }
  return AttentionTensor(layers, heads, std::move(mats));
}

std::vector<float> tone(std::size_t seconds) {
  std::vector<float> s(16000 * seconds);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<float>(0.3 * std::sin(0.1 * static_cast<double>(i)));
  return s;
}

template <bool Parallel>
void BM_CrossAttention(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Matrix q = random_matrix(m, 64, 1), k = random_matrix(4 * m, 64, 2), v = random_matrix(4 * m, 64, 3);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(cross_attention(q, k, v, 64));
    } else {
      benchmark::DoNotOptimize(serial::cross_attention(q, k, v, 64));
    }
  }
}

template <bool Parallel>
void BM_Aggregate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const AttentionTensor t = random_tensor(6, 8, 64, n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(aggregate_attention(t, 3));
    } else {
      benchmark::DoNotOptimize(serial::aggregate_attention(t, 3));
    }
  }
}

template <bool Parallel>
void BM_LogMel(benchmark::State& state) {
  const auto samples = tone(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(logmel(samples, 16000));
    } else {
      benchmark::DoNotOptimize(serial::logmel(samples, 16000));
    }
  }
}

BENCHMARK(BM_CrossAttention<false>)->Arg(32)->Arg(128);
BENCHMARK(BM_CrossAttention<true>)->Arg(32)->Arg(128);
BENCHMARK(BM_Aggregate<false>)->Arg(256)->Arg(1024);
BENCHMARK(BM_Aggregate<true>)->Arg(256)->Arg(1024);
BENCHMARK(BM_LogMel<false>)->Arg(1)->Arg(10);
BENCHMARK(BM_LogMel<true>)->Arg(1)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
