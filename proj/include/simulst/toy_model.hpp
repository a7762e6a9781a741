// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Small deterministic encoder-decoder implementing ModelAdapter.
//
// Encoder: mean-pool by 4 in time, a seeded linear map with tanh, then causal
// mixing layers c[j] = tanh(c[j] A + c[j-1] B). Earlier states never change
// when more audio arrives.
//
// Decoder: every (layer, head) attends with a query built from two parts. A
// positional part makes the score -(p - j)^2 / (2 w^2) for a read pointer p
// and a per-head width w, written as a dot product against key features
// [j, j^2, 1]. A content part projects the decoder state and the encoder
// state with seeded matrices. The pointer starts at half a token and moves
// by a per-token seeded stride after every emitted token, so attention walks
// monotonically through the source. The end-of-sequence logit grows with how
// far the pointer has moved past the last received frame.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "simulst/ctc.hpp"
#include "simulst/model.hpp"

namespace simulst {

struct ToyModelOptions {
  std::uint64_t seed = 1234;
  std::size_t feature_dim = kDefaultMelBins;
  std::size_t d_model = 32;
  std::size_t encoder_layers = 2;
  std::size_t decoder_layers = 2;
  std::size_t decoder_heads = 4;
  std::size_t reduction = 4;
  /// Mean pointer advance per emitted token, in encoder frames.
  double frames_per_token = 6.0;
  /// Range of per-head attention widths, in encoder frames.
  double min_width = 1.0;
  double max_width = 3.0;
  /// Weight of the content term relative to the positional term.
  double content_gain = 0.5;
  double eos_slope = 8.0;
  EnergyWordHead word_head{};
};

/// The 64-piece vocabulary of the toy model. Id 0 is end-of-sequence.
const Vocabulary& toy_vocabulary();

class ToyModel final : public ModelAdapter {
 public:
  struct DecoderLayerWeights {
    std::vector<Matrix> wq, wk, wv;  // per head: d_model x d_head
    std::vector<double> width;       // per head
    Matrix wo;                       // d_model x d_model
  };
  struct Weights {
    Matrix w_in;  // feature_dim x d_model
    std::vector<double> b_in;
    std::vector<Matrix> mix_self, mix_prev;  // per encoder layer, d_model x d_model
    Matrix embedding;                        // vocab x d_model
    std::vector<DecoderLayerWeights> decoder;
    Matrix w_out;                  // d_model x vocab
    std::vector<double> stride;    // per token, encoder frames
  };

  explicit ToyModel(ToyModelOptions opts = {});

  const Vocabulary& vocabulary() const override { return toy_vocabulary(); }
  std::size_t num_layers() const override { return opts_.decoder_layers; }
  std::size_t num_heads() const override { return opts_.decoder_heads; }
  std::size_t feature_dim() const override { return opts_.feature_dim; }

  EncoderStates encode(const FeatureMatrix& raw) const override;
  DecodeResult decode_greedy(const EncoderStates& enc, std::span<const TokenId> forced_prefix,
                             std::size_t max_new) const override;
  std::size_t count_source_words(const FeatureMatrix& raw) const override;

  const ToyModelOptions& options() const { return opts_; }
  const Weights& weights() const { return weights_; }
  std::size_t head_dim() const { return opts_.d_model / opts_.decoder_heads; }

 private:
  ToyModelOptions opts_;
  Weights weights_;
};

}  // namespace simulst
