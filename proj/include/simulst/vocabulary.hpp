// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace simulst {

using TokenId = std::int32_t;

/// SentencePiece-style word-start marker (U+2581, "▁").
inline constexpr std::string_view kWordMarker = "\xE2\x96\x81";

/// True when a piece begins a new word.
bool piece_starts_word(std::string_view piece);

/// Number of whitespace-separated words the pieces detokenize to. A leading
/// piece without the marker still forms a word.
std::size_t count_words(std::span<const std::string> pieces);

/// Closed subword vocabulary with one end-of-sequence symbol.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> pieces, TokenId eos_id);

  std::size_t size() const { return pieces_.size(); }
  TokenId eos_id() const { return eos_id_; }
  bool contains(TokenId id) const { return id >= 0 && static_cast<std::size_t>(id) < pieces_.size(); }

  const std::string& piece(TokenId id) const;
  bool is_word_start(TokenId id) const;
  TokenId id_of(std::string_view piece) const;

  /// Greedy longest-match segmentation; each word opens with a marked piece.
  std::vector<TokenId> tokenize(std::string_view text) const;

  /// Marker pieces become spaces; end-of-sequence is dropped.
  std::string detokenize(std::span<const TokenId> tokens) const;

 private:
  std::vector<std::string> pieces_;
  TokenId eos_id_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Joins pieces the way Vocabulary::detokenize does, without a vocabulary.
std::string detokenize_pieces(std::span<const std::string> pieces);

}  // namespace simulst
