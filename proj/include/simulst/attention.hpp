// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Cross-attention math and alignment extraction.
//
// Every kernel exists twice: the functions in namespace `serial` are the
// plain reference loops, the top-level ones split independent rows across
// OpenMP threads. Both produce bit-identical results because each output
// row is computed with the same operation order.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "simulst/matrix.hpp"

namespace simulst {

/// Row-stochastic matrix: target-token rows over source-frame columns.
class AttentionMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-5;

  AttentionMatrix() = default;
  /// Validates that entries lie in [0, 1] and rows sum to one.
  explicit AttentionMatrix(Matrix weights);

  std::size_t num_targets() const { return weights_.rows(); }
  std::size_t num_frames() const { return weights_.cols(); }
  const Matrix& weights() const { return weights_; }
  double operator()(std::size_t i, std::size_t j) const { return weights_(i, j); }

  AttentionMatrix slice_rows(std::size_t first, std::size_t count) const;

  /// Skips validation; for kernels whose output is row-stochastic by construction.
  static AttentionMatrix unchecked(Matrix weights);

 private:
  Matrix weights_;
};

/// Attention weights of every (layer, head) pair of one decode pass.
class AttentionTensor {
 public:
  AttentionTensor() = default;
  /// `per_layer_head` is layer-major: index = layer * num_heads + head.
  AttentionTensor(std::size_t num_layers, std::size_t num_heads,
                  std::vector<AttentionMatrix> per_layer_head);

  std::size_t num_layers() const { return num_layers_; }
  std::size_t num_heads() const { return num_heads_; }
  std::size_t num_targets() const;
  std::size_t num_frames() const;

  const AttentionMatrix& at(std::size_t layer, std::size_t head) const;
  AttentionMatrix& at(std::size_t layer, std::size_t head);

 private:
  std::size_t num_layers_ = 0;
  std::size_t num_heads_ = 0;
  std::vector<AttentionMatrix> matrices_;
};

/// Per target token, the 0-based index of its most attended source frame.
struct AlignmentVector {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  std::size_t operator[](std::size_t i) const { return indices[i]; }
  bool operator==(const AlignmentVector&) const = default;
};

struct CrossAttentionResult {
  Matrix context;
  AttentionMatrix weights;
};

/// softmax(Q K^T / sqrt(d_k)) V.
CrossAttentionResult cross_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                                     std::size_t d_k);

/// Element-wise mean over the heads of one layer.
AttentionMatrix aggregate_attention(const AttentionTensor& t, std::size_t layer);

/// Row argmax, ties resolved to the lowest frame index.
AlignmentVector compute_alignment(const AttentionMatrix& a);

namespace serial {

CrossAttentionResult cross_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                                     std::size_t d_k);
AttentionMatrix aggregate_attention(const AttentionTensor& t, std::size_t layer);
AlignmentVector compute_alignment(const AttentionMatrix& a);

}  // namespace serial

}  // namespace simulst
