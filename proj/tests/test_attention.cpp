// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "simulst/attention.hpp"
#include "simulst/error.hpp"

using namespace simulst;

namespace {

Matrix random_stochastic(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix w(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += (w(i, j) = u(rng));
    for (std::size_t j = 0; j < n; ++j) w(i, j) /= s;
  }
  return w;
}

AttentionTensor random_tensor(std::size_t layers, std::size_t heads, std::size_t m, std::size_t n,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<AttentionMatrix> mats;
  for (std::size_t i = 0; i < layers * heads; ++i) mats.emplace_back(random_stochastic(m, n, rng));
  return AttentionTensor(layers, heads, std::move(mats));
}

}  // namespace

TEST_CASE("attention matrix validation") {
  CHECK_NOTHROW(AttentionMatrix(Matrix::from_rows({{0.25, 0.75}})));
  CHECK_THROWS_AS(AttentionMatrix(Matrix::from_rows({{0.5, 0.6}})), ArgumentError);
  CHECK_THROWS_AS(AttentionMatrix(Matrix::from_rows({{1.5, -0.5}})), ArgumentError);
  CHECK_THROWS_AS(AttentionMatrix(Matrix(1, 0)), ArgumentError);
  CHECK_NOTHROW(AttentionMatrix(Matrix(0, 0)));
}

TEST_CASE("cross attention: single key") {
  const auto r = cross_attention(Matrix::from_rows({{1}}), Matrix::from_rows({{1}}), Matrix::from_rows({{5}}), 1);
  CHECK(r.context(0, 0) == doctest::Approx(5.0));
  CHECK(r.weights(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("cross attention: zero query gives uniform weights") {
  const Matrix k = Matrix::from_rows({{1, 2}, {-3, 0.5}, {7, 1}});
  const Matrix v = Matrix::from_rows({{3}, {6}, {9}});
  const auto r = cross_attention(Matrix(1, 2), k, v, 2);
  for (std::size_t j = 0; j < 3; ++j) CHECK(r.weights(0, j) == doctest::Approx(1.0 / 3.0));
  CHECK(r.context(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("cross attention: 2x2 against scalar oracle") {
  const Matrix q = Matrix::from_rows({{0.3, -1.2}, {0.8, 0.5}});
  const Matrix k = Matrix::from_rows({{1.0, 0.2}, {-0.4, 0.9}});
  const Matrix v = Matrix::from_rows({{2.0, -1.0}, {0.5, 3.0}});
  const auto r = cross_attention(q, k, v, 2);
  const double w[2][2] = {{0.7090871177152928, 0.2909128822847073}, {0.6328521557889353, 0.36714784421106467}};
  const double c[2][2] = {{1.563630676572939, 0.16365152913882913}, {1.449278233683403, 0.4685913768442587}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(r.weights(i, j) == doctest::Approx(w[i][j]).epsilon(1e-12));
      CHECK(r.context(i, j) == doctest::Approx(c[i][j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("cross attention: errors") {
  const Matrix a(2, 3), b(4, 3), v(4, 2);
  CHECK_THROWS_AS(cross_attention(a, b, v, 0), ArgumentError);
  CHECK_THROWS_AS(cross_attention(a, Matrix(4, 2), v, 3), DimensionError);
  CHECK_THROWS_AS(cross_attention(a, b, Matrix(3, 2), 3), DimensionError);
  CHECK_THROWS_AS(cross_attention(a, b, v, 2), DimensionError);
}

TEST_CASE("cross attention: weights ignore constant shifts of V and match serial path") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Matrix q(40, 16), k(200, 16), v(200, 8);
  for (auto* m : {&q, &k, &v}) {
    for (std::size_t i = 0; i < m->rows(); ++i) {
      for (std::size_t j = 0; j < m->cols(); ++j) (*m)(i, j) = g(rng);
    }
  }
  Matrix shifted = v;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) shifted(i, j) += 3.0 + static_cast<double>(j);
  }
  const auto a = cross_attention(q, k, v, 16);
  const auto b = cross_attention(q, k, shifted, 16);
  CHECK(a.weights.weights() == b.weights.weights());
  const auto s = serial::cross_attention(q, k, v, 16);
  CHECK(a.weights.weights() == s.weights.weights());
  CHECK(a.context == s.context);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k.rows(); ++j) sum += a.weights(i, j);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("aggregate: mean of one-hot heads") {
  AttentionTensor t(1, 2, {AttentionMatrix(Matrix::from_rows({{1, 0}})), AttentionMatrix(Matrix::from_rows({{0, 1}}))});
  const auto a = aggregate_attention(t, 0);
  CHECK(a(0, 0) == doctest::Approx(0.5));
  CHECK(a(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("aggregate: single head is identity") {
  const AttentionTensor t = random_tensor(3, 1, 4, 5, 3);
  CHECK(aggregate_attention(t, 1).weights() == t.at(1, 0).weights());
}

TEST_CASE("aggregate: layer 3 of a 6x8 tensor against per-entry mean") {
  const AttentionTensor t = random_tensor(6, 8, 5, 9, 42);
  const auto a = aggregate_attention(t, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 9; ++j) {
      double s = 0.0;
      for (std::size_t h = 0; h < 8; ++h) s += t.at(3, h)(i, j);
      CHECK(a(i, j) == doctest::Approx(s / 8.0).epsilon(1e-14));
      row += a(i, j);
    }
    CHECK(std::abs(row - 1.0) < 1e-5);
  }
  CHECK(a.weights() == serial::aggregate_attention(t, 3).weights());
  CHECK_THROWS_AS(aggregate_attention(t, 6), ArgumentError);
}

TEST_CASE("aggregate: permuting heads changes nothing beyond rounding") {
  const AttentionTensor t = random_tensor(2, 5, 3, 7, 8);
  std::vector<AttentionMatrix> perm;
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t h : {4, 2, 0, 3, 1}) perm.push_back(t.at(l, h));
  }
  const AttentionTensor p(2, 5, std::move(perm));
  const auto a = aggregate_attention(t, 1), b = aggregate_attention(p, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 7; ++j) CHECK(a(i, j) == doctest::Approx(b(i, j)).epsilon(1e-14));
  }
}

TEST_CASE("tensor shape checks") {
  CHECK_THROWS_AS(AttentionTensor(1, 2, {AttentionMatrix(Matrix::from_rows({{1.0}}))}), DimensionError);
  CHECK_THROWS_AS(AttentionTensor(1, 2, {AttentionMatrix(Matrix::from_rows({{1.0}})),
                                         AttentionMatrix(Matrix::from_rows({{0.5, 0.5}}))}),
                  DimensionError);
}

TEST_CASE("alignment: argmax with lowest-index ties") {
  CHECK(compute_alignment(AttentionMatrix(Matrix::from_rows({{0.7, 0.2, 0.1}, {0.1, 0.3, 0.6}}))).indices ==
        std::vector<std::size_t>{0, 2});
  CHECK(compute_alignment(AttentionMatrix(Matrix::from_rows({{0.5, 0.5}}))).indices == std::vector<std::size_t>{0});
  CHECK(compute_alignment(AttentionMatrix(Matrix(0, 3))).size() == 0);
}

TEST_CASE("alignment: exhaustive row scan on random matrices") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const AttentionMatrix a(random_stochastic(5, 12, rng));
    const auto al = compute_alignment(a);
    REQUIRE(al.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < 12; ++j) {
        if (a(i, j) > a(i, best)) best = j;
      }
      CHECK(al[i] == best);
    }
    CHECK(al == serial::compute_alignment(a));
  }
}
