// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simulst/error.hpp"

namespace simulst {
namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWorkThreshold = 1 << 14;

void check_cross_attention_shapes(const Matrix& q, const Matrix& k, const Matrix& v,
                                  std::size_t d_k) {
  if (d_k == 0) throw ArgumentError("cross_attention: d_k must be positive");
  if (q.cols() != d_k || k.cols() != d_k) {
    throw DimensionError("cross_attention: Q has " + std::to_string(q.cols()) + " columns, K has " +
                         std::to_string(k.cols()) + ", d_k is " + std::to_string(d_k));
  }
  if (k.rows() != v.rows()) {
    throw DimensionError("cross_attention: K has " + std::to_string(k.rows()) + " rows, V has " +
                         std::to_string(v.rows()));
  }
  if (q.rows() > 0 && k.rows() == 0) {
    throw DimensionError("cross_attention: no keys to attend to");
  }
}

// One output row: scores, stable softmax, weighted sum of values.
void attend_row(const Matrix& q, const Matrix& k, const Matrix& v, double scale, std::size_t i,
                Matrix& weights, Matrix& context) {
  const std::size_t n = k.rows();
  auto w = weights.row(i);
  double max_score = -INFINITY;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t d = 0; d < q.cols(); ++d) s += q(i, d) * k(j, d);
    w[j] = s * scale;
    max_score = std::max(max_score, w[j]);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = std::exp(w[j] - max_score);
    total += w[j];
  }
  for (std::size_t j = 0; j < n; ++j) w[j] /= total;
  auto c = context.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t d = 0; d < v.cols(); ++d) c[d] += w[j] * v(j, d);
  }
}

std::size_t argmax_row(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

void check_aggregate_args(const AttentionTensor& t, std::size_t layer) {
  if (layer >= t.num_layers()) {
    throw ArgumentError("aggregate_attention: layer " + std::to_string(layer) +
                        " out of range for " + std::to_string(t.num_layers()) + " layers");
  }
  if (t.num_heads() == 0) throw ArgumentError("aggregate_attention: tensor has no heads");
}

void check_alignment_args(const AttentionMatrix& a) {
  if (a.num_targets() > 0 && a.num_frames() == 0) {
    throw ArgumentError("compute_alignment: matrix has rows but no frames");
  }
}

}  // namespace

AttentionMatrix::AttentionMatrix(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() > 0 && weights_.cols() == 0) {
    throw ArgumentError("attention matrix with rows must have at least one frame");
  }
  for (std::size_t i = 0; i < weights_.rows(); ++i) {
    double sum = 0.0;
    for (double x : weights_.row(i)) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw ArgumentError("attention weight " + std::to_string(x) + " outside [0, 1] in row " +
                            std::to_string(i));
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ArgumentError("attention row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
}

AttentionMatrix AttentionMatrix::unchecked(Matrix weights) {
  AttentionMatrix m;
  m.weights_ = std::move(weights);
  return m;
}

AttentionMatrix AttentionMatrix::slice_rows(std::size_t first, std::size_t count) const {
  return unchecked(weights_.slice_rows(first, count));
}

AttentionTensor::AttentionTensor(std::size_t num_layers, std::size_t num_heads,
                                 std::vector<AttentionMatrix> per_layer_head)
    : num_layers_(num_layers), num_heads_(num_heads), matrices_(std::move(per_layer_head)) {
  if (matrices_.size() != num_layers * num_heads) {
    throw DimensionError("attention tensor needs " + std::to_string(num_layers * num_heads) +
                         " matrices, got " + std::to_string(matrices_.size()));
  }
  for (const auto& m : matrices_) {
    if (m.num_targets() != matrices_.front().num_targets() ||
        m.num_frames() != matrices_.front().num_frames()) {
      throw DimensionError("attention tensor members differ in shape");
    }
  }
}

std::size_t AttentionTensor::num_targets() const {
  return matrices_.empty() ? 0 : matrices_.front().num_targets();
}

std::size_t AttentionTensor::num_frames() const {
  return matrices_.empty() ? 0 : matrices_.front().num_frames();
}

const AttentionMatrix& AttentionTensor::at(std::size_t layer, std::size_t head) const {
  if (layer >= num_layers_ || head >= num_heads_) throw ArgumentError("attention index out of range");
  return matrices_[layer * num_heads_ + head];
}

AttentionMatrix& AttentionTensor::at(std::size_t layer, std::size_t head) {
  if (layer >= num_layers_ || head >= num_heads_) throw ArgumentError("attention index out of range");
  return matrices_[layer * num_heads_ + head];
}

CrossAttentionResult cross_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                                     std::size_t d_k) {
  check_cross_attention_shapes(q, k, v, d_k);
  const std::size_t m = q.rows();
  Matrix weights(m, k.rows());
  Matrix context(m, v.cols());
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
  const bool big = m > 1 && m * k.rows() * (d_k + v.cols()) >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::size_t i = 0; i < m; ++i) attend_row(q, k, v, scale, i, weights, context);
  return {std::move(context), AttentionMatrix::unchecked(std::move(weights))};
}

AttentionMatrix aggregate_attention(const AttentionTensor& t, std::size_t layer) {
  check_aggregate_args(t, layer);
  const std::size_t m = t.num_targets();
  const std::size_t n = t.num_frames();
  const std::size_t heads = t.num_heads();
  Matrix mean(m, n);
  const bool big = m * n * heads >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t h = 0; h < heads; ++h) s += t.at(layer, h)(i, j);
      mean(i, j) = s / static_cast<double>(heads);
    }
  }
  return AttentionMatrix::unchecked(std::move(mean));
}

AlignmentVector compute_alignment(const AttentionMatrix& a) {
  check_alignment_args(a);
  const std::size_t m = a.num_targets();
  AlignmentVector out{std::vector<std::size_t>(m)};
  const bool big = m * a.num_frames() >= kParallelWorkThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::size_t i = 0; i < m; ++i) out.indices[i] = argmax_row(a.weights().row(i));
  return out;
}

namespace serial {

CrossAttentionResult cross_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                                     std::size_t d_k) {
  check_cross_attention_shapes(q, k, v, d_k);
  Matrix weights(q.rows(), k.rows());
  Matrix context(q.rows(), v.cols());
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
  for (std::size_t i = 0; i < q.rows(); ++i) attend_row(q, k, v, scale, i, weights, context);
  return {std::move(context), AttentionMatrix::unchecked(std::move(weights))};
}

AttentionMatrix aggregate_attention(const AttentionTensor& t, std::size_t layer) {
  check_aggregate_args(t, layer);
  Matrix mean(t.num_targets(), t.num_frames());
  for (std::size_t i = 0; i < mean.rows(); ++i) {
    for (std::size_t j = 0; j < mean.cols(); ++j) {
      double s = 0.0;
      for (std::size_t h = 0; h < t.num_heads(); ++h) s += t.at(layer, h)(i, j);
      mean(i, j) = s / static_cast<double>(t.num_heads());
    }
  }
  return AttentionMatrix::unchecked(std::move(mean));
}

AlignmentVector compute_alignment(const AttentionMatrix& a) {
  check_alignment_args(a);
  AlignmentVector out;
  out.indices.reserve(a.num_targets());
  for (std::size_t i = 0; i < a.num_targets(); ++i) out.indices.push_back(argmax_row(a.weights().row(i)));
  return out;
}

}  // namespace serial
}  // namespace simulst
