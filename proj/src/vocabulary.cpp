// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/vocabulary.hpp"

#include <string>

#include "simulst/error.hpp"

namespace simulst {

bool piece_starts_word(std::string_view piece) { return piece.starts_with(kWordMarker); }

std::size_t count_words(std::span<const std::string> pieces) {
  std::size_t words = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i == 0 || piece_starts_word(pieces[i])) ++words;
  }
  return words;
}

std::string detokenize_pieces(std::span<const std::string> pieces) {
  std::string out;
  for (const auto& p : pieces) {
    if (piece_starts_word(p)) {
      if (!out.empty()) out += ' ';
      out.append(p, kWordMarker.size());
    } else {
      out += p;
    }
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> pieces, TokenId eos_id)
    : pieces_(std::move(pieces)), eos_id_(eos_id) {
  if (!contains(eos_id_)) throw ArgumentError("end-of-sequence id outside the vocabulary");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (static_cast<TokenId>(i) != eos_id_ && (p.empty() || p == kWordMarker)) {
      throw ArgumentError("empty vocabulary piece at id " + std::to_string(i));
    }
    if (!index_.emplace(p, static_cast<TokenId>(i)).second) {
      throw ArgumentError("duplicate vocabulary piece '" + p + "'");
    }
  }
}

const std::string& Vocabulary::piece(TokenId id) const {
  if (!contains(id)) throw ArgumentError("unknown token id " + std::to_string(id));
  return pieces_[static_cast<std::size_t>(id)];
}

bool Vocabulary::is_word_start(TokenId id) const {
  return id != eos_id_ && piece_starts_word(piece(id));
}

TokenId Vocabulary::id_of(std::string_view piece) const {
  auto it = index_.find(std::string(piece));
  if (it == index_.end()) throw ArgumentError("piece not in vocabulary: '" + std::string(piece) + "'");
  return it->second;
}

std::vector<TokenId> Vocabulary::tokenize(std::string_view text) const {
  std::vector<TokenId> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos == text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view word = text.substr(pos, end - pos);
    std::size_t i = 0;
    bool first = true;
    while (i < word.size()) {
      std::size_t best_len = 0;
      TokenId best = -1;
      for (std::size_t len = word.size() - i; len > 0; --len) {
        std::string candidate = first ? std::string(kWordMarker) : std::string();
        candidate.append(word.substr(i, len));
        auto it = index_.find(candidate);
        if (it != index_.end() && it->second != eos_id_) {
          best = it->second;
          best_len = len;
          break;
        }
      }
      if (best < 0) {
        throw ArgumentError("cannot tokenize '" + std::string(word) + "' at byte " + std::to_string(i));
      }
      out.push_back(best);
      i += best_len;
      first = false;
    }
    pos = end;
  }
  return out;
}

std::string Vocabulary::detokenize(std::span<const TokenId> tokens) const {
  std::vector<std::string> pieces;
  pieces.reserve(tokens.size());
  for (TokenId t : tokens) {
    const std::string& p = piece(t);
    if (t != eos_id_) pieces.push_back(p);
  }
  return detokenize_pieces(pieces);
}

}  // namespace simulst
