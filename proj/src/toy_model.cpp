// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/toy_model.hpp"

#include <cmath>
#include <string>

#include "rng.hpp"
#include "simulst/error.hpp"

namespace simulst {
namespace {

Vocabulary build_toy_vocabulary() {
  std::vector<std::string> pieces{"</s>"};
  for (char c = 'a'; c <= 'z'; ++c) pieces.push_back(std::string(kWordMarker) + c);
  for (char c = 'a'; c <= 'z'; ++c) pieces.push_back(std::string(1, c));
  for (const char* w : {"the", "cat", "sat", "on", "mat", "and", "is", "to"}) {
    pieces.push_back(std::string(kWordMarker) + w);
  }
  for (const char* s : {"ing", "ed", "er"}) pieces.push_back(s);
  return Vocabulary(std::move(pieces), 0);
}

Matrix random_matrix(detail::Rng& rng, std::size_t rows, std::size_t cols, double stddev) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = stddev * rng.normal();
  return m;
}

// out = tanh(in + x * w) for row vectors.
void add_product(std::span<const double> x, const Matrix& w, std::span<double> out) {
  for (std::size_t p = 0; p < x.size(); ++p) {
    const double xp = x[p];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += xp * w(p, j);
  }
}

}  // namespace

const Vocabulary& toy_vocabulary() {
  static const Vocabulary vocab = build_toy_vocabulary();
  return vocab;
}

std::size_t reduced_length(std::size_t raw_frames, std::size_t factor) {
  return (raw_frames + factor - 1) / factor;
}

ToyModel::ToyModel(ToyModelOptions opts) : opts_(opts) {
  if (opts_.feature_dim == 0 || opts_.d_model == 0 || opts_.reduction == 0) {
    throw ArgumentError("toy model: dimensions must be positive");
  }
  if (opts_.decoder_layers == 0 || opts_.decoder_heads == 0 || opts_.d_model % opts_.decoder_heads != 0) {
    throw ArgumentError("toy model: d_model must split evenly across at least one head");
  }
  if (!(opts_.frames_per_token > 0.0) || !(opts_.min_width > 0.0) || opts_.max_width < opts_.min_width) {
    throw ArgumentError("toy model: invalid pointer or width settings");
  }
  const std::size_t d = opts_.d_model;
  const std::size_t dh = head_dim();
  const std::size_t vocab = toy_vocabulary().size();
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  detail::Rng rng(opts_.seed);

  weights_.w_in = random_matrix(rng, opts_.feature_dim, d, 1.5 / std::sqrt(static_cast<double>(opts_.feature_dim)));
  weights_.b_in.resize(d);
  for (double& b : weights_.b_in) b = 0.1 * rng.normal();
  for (std::size_t l = 0; l < opts_.encoder_layers; ++l) {
    weights_.mix_self.push_back(random_matrix(rng, d, d, inv_sqrt_d));
    weights_.mix_prev.push_back(random_matrix(rng, d, d, 0.5 * inv_sqrt_d));
  }
  weights_.embedding = random_matrix(rng, vocab, d, 0.5);
  for (std::size_t l = 0; l < opts_.decoder_layers; ++l) {
    DecoderLayerWeights layer;
    for (std::size_t h = 0; h < opts_.decoder_heads; ++h) {
      layer.wq.push_back(random_matrix(rng, d, dh, inv_sqrt_d));
      layer.wk.push_back(random_matrix(rng, d, dh, inv_sqrt_d));
      layer.wv.push_back(random_matrix(rng, d, dh, inv_sqrt_d));
      layer.width.push_back(rng.uniform(opts_.min_width, opts_.max_width));
    }
    layer.wo = random_matrix(rng, d, d, inv_sqrt_d);
    weights_.decoder.push_back(std::move(layer));
  }
  weights_.w_out = random_matrix(rng, d, vocab, 3.0 * inv_sqrt_d);
  weights_.stride.resize(vocab);
  for (double& s : weights_.stride) s = opts_.frames_per_token * rng.uniform(0.75, 1.25);
}

EncoderStates ToyModel::encode(const FeatureMatrix& raw) const {
  if (raw.frames() == 0) throw ArgumentError("encode: empty input");
  if (raw.dim() != opts_.feature_dim) {
    throw ArgumentError("encode: feature dimension " + std::to_string(raw.dim()) + ", expected " +
                        std::to_string(opts_.feature_dim));
  }
  const std::size_t n = reduced_length(raw.frames(), opts_.reduction);
  const std::size_t d = opts_.d_model;
  Matrix c(n, d);
  std::vector<double> pooled(opts_.feature_dim);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t begin = j * opts_.reduction;
    const std::size_t end = std::min(begin + opts_.reduction, raw.frames());
    std::fill(pooled.begin(), pooled.end(), 0.0);
    for (std::size_t t = begin; t < end; ++t) {
      const auto frame = raw.frame(t);
      for (std::size_t f = 0; f < pooled.size(); ++f) pooled[f] += frame[f];
    }
    for (double& x : pooled) x /= static_cast<double>(end - begin);
    auto row = c.row(j);
    std::copy(weights_.b_in.begin(), weights_.b_in.end(), row.begin());
    add_product(pooled, weights_.w_in, row);
    for (double& x : row) x = std::tanh(x);
  }
  for (std::size_t l = 0; l < opts_.encoder_layers; ++l) {
    Matrix next(n, d);
    for (std::size_t j = 0; j < n; ++j) {
      auto row = next.row(j);
      add_product(c.row(j), weights_.mix_self[l], row);
      if (j > 0) add_product(c.row(j - 1), weights_.mix_prev[l], row);
      for (double& x : row) x = std::tanh(x);
    }
    c = std::move(next);
  }
  return {std::move(c), raw.frames(), 0};
}

DecodeResult ToyModel::decode_greedy(const EncoderStates& enc, std::span<const TokenId> forced_prefix,
                                     std::size_t max_new) const {
  const Vocabulary& vocab = vocabulary();
  if (max_new == 0) throw ArgumentError("decode_greedy: max_new must be at least 1");
  for (TokenId t : forced_prefix) {
    if (!vocab.contains(t)) throw ArgumentError("decode_greedy: unknown token " + std::to_string(t));
    if (t == vocab.eos_id()) throw ArgumentError("decode_greedy: forced prefix contains end-of-sequence");
  }
  const std::size_t n = enc.num_frames();
  if (n == 0) throw ArgumentError("decode_greedy: no encoder states");
  if (enc.states.cols() != opts_.d_model) throw DimensionError("decode_greedy: encoder width mismatch");

  const std::size_t d = opts_.d_model;
  const std::size_t dh = head_dim();
  const std::size_t dk = 3 + dh;
  const std::size_t layers = opts_.decoder_layers;
  const std::size_t heads = opts_.decoder_heads;

  // Keys [j, j^2, 1, content] and values per (layer, head).
  std::vector<Matrix> keys(layers * heads), values(layers * heads);
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t h = 0; h < heads; ++h) {
      const auto& lw = weights_.decoder[l];
      Matrix k_content = matmul(enc.states, lw.wk[h]);
      Matrix k(n, dk);
      for (std::size_t j = 0; j < n; ++j) {
        const double pos = static_cast<double>(j);
        k(j, 0) = pos;
        k(j, 1) = pos * pos;
        k(j, 2) = 1.0;
        for (std::size_t c = 0; c < dh; ++c) k(j, 3 + c) = k_content(j, c);
      }
      keys[l * heads + h] = std::move(k);
      values[l * heads + h] = matmul(enc.states, lw.wv[h]);
    }
  }

  std::vector<std::vector<double>> rows(layers * heads);
  std::vector<TokenId> generated;
  bool eos = false;
  double pointer = 0.5 * opts_.frames_per_token;
  TokenId prev = vocab.eos_id();
  const std::size_t total_steps = forced_prefix.size() + max_new;
  std::vector<double> hidden(d), context(d), q_content(dh);
  Matrix q(1, dk);

  for (std::size_t step = 0; step < total_steps; ++step) {
    auto emb = weights_.embedding.row(static_cast<std::size_t>(prev));
    std::copy(emb.begin(), emb.end(), hidden.begin());
    for (std::size_t l = 0; l < layers; ++l) {
      const auto& lw = weights_.decoder[l];
      for (std::size_t h = 0; h < heads; ++h) {
        const double w = lw.width[h];
        const double kappa = std::sqrt(static_cast<double>(dk)) / (2.0 * w * w);
        std::fill(q_content.begin(), q_content.end(), 0.0);
        add_product(hidden, lw.wq[h], q_content);
        q(0, 0) = 2.0 * kappa * pointer;
        q(0, 1) = -kappa;
        q(0, 2) = -kappa * pointer * pointer;
        for (std::size_t c = 0; c < dh; ++c) q(0, 3 + c) = opts_.content_gain * q_content[c];
        auto att = cross_attention(q, keys[l * heads + h], values[l * heads + h], dk);
        auto wrow = att.weights.weights().row(0);
        rows[l * heads + h].insert(rows[l * heads + h].end(), wrow.begin(), wrow.end());
        for (std::size_t c = 0; c < dh; ++c) context[h * dh + c] = att.context(0, c);
      }
      add_product(context, lw.wo, hidden);
      for (double& x : hidden) x = std::tanh(x);
    }

    TokenId next;
    if (step < forced_prefix.size()) {
      next = forced_prefix[step];
    } else {
      std::vector<double> logits(vocab.size(), 0.0);
      add_product(hidden, weights_.w_out, logits);
      logits[static_cast<std::size_t>(vocab.eos_id())] =
          opts_.eos_slope * (pointer - static_cast<double>(n - 1));
      std::size_t best = 0;
      for (std::size_t v = 1; v < logits.size(); ++v) {
        if (logits[v] > logits[best]) best = v;
      }
      next = static_cast<TokenId>(best);
      if (next == vocab.eos_id()) {
        eos = true;
        break;
      }
      generated.push_back(next);
    }
    pointer += weights_.stride[static_cast<std::size_t>(next)];
    prev = next;
  }

  const std::size_t m = forced_prefix.size() + generated.size() + (eos ? 1 : 0);
  std::vector<AttentionMatrix> mats;
  mats.reserve(layers * heads);
  for (auto& r : rows) mats.push_back(AttentionMatrix::unchecked(Matrix(m, n, std::move(r))));
  return {std::move(generated), AttentionTensor(layers, heads, std::move(mats)), eos};
}

std::size_t ToyModel::count_source_words(const FeatureMatrix& raw) const {
  return count_words_from_posterior(opts_.word_head.posterior(raw));
}

}  // namespace simulst
