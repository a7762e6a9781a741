// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// The incremental encoder-decoder contract the simulator drives.
//
// An adapter is immutable once built and must be deterministic: the same
// features, prefix and cap always give the same tokens and attention. Each
// call allocates its own scratch, so one adapter can serve many sessions on
// different threads. External bridges (another process, another runtime)
// plug in by implementing this interface.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simulst/attention.hpp"
#include "simulst/features.hpp"
#include "simulst/matrix.hpp"
#include "simulst/vocabulary.hpp"

namespace simulst {

struct EncoderStates {
  Matrix states;  // n x d_model
  std::size_t raw_frames = 0;
  std::uint64_t version = 0;

  std::size_t num_frames() const { return states.rows(); }
};

struct DecodeResult {
  /// Greedy continuation after the forced prefix, end-of-sequence excluded.
  std::vector<TokenId> tokens;
  /// Rows: prefix positions, then `tokens`, then one row for end-of-sequence
  /// when it was produced. Columns: encoder frames.
  AttentionTensor attention;
  bool eos_reached = false;
};

class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  virtual std::size_t num_layers() const = 0;
  virtual std::size_t num_heads() const = 0;
  virtual std::size_t feature_dim() const = 0;

  virtual EncoderStates encode(const FeatureMatrix& raw) const = 0;

  /// At most `max_new` greedy steps after `forced_prefix`; stops early at
  /// end-of-sequence. Throws ArgumentError if the prefix holds end-of-sequence.
  virtual DecodeResult decode_greedy(const EncoderStates& enc,
                                     std::span<const TokenId> forced_prefix,
                                     std::size_t max_new) const = 0;

  /// Completed source words detected so far by the CTC-style word head.
  virtual std::size_t count_source_words(const FeatureMatrix& raw) const = 0;
};

/// ceil(raw_frames / factor).
std::size_t reduced_length(std::size_t raw_frames, std::size_t factor = 4);

}  // namespace simulst
