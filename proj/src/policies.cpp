// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/policies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simulst/error.hpp"

namespace simulst {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::kInaccessibleFrame: return "inaccessible_frame";
    case StopReason::kThreshold: return "threshold";
    case StopReason::kSchedule: return "schedule";
    case StopReason::kDisagreement: return "disagreement";
    case StopReason::kExhausted: return "exhausted";
  }
  return "unknown";
}

PolicyDecision alignatt_decide(const AlignmentVector& align, std::size_t n, std::size_t f,
                               std::size_t num_candidates) {
  if (f == 0) throw ArgumentError("alignatt: f must be at least 1");
  if (align.size() < num_candidates) {
    throw ArgumentError("alignatt: " + std::to_string(num_candidates) + " candidates but only " +
                        std::to_string(align.size()) + " alignments");
  }
  for (std::size_t i = 0; i < num_candidates; ++i) {
    if (align[i] >= n) {
      throw ArgumentError("alignatt: alignment " + std::to_string(align[i]) + " outside " +
                          std::to_string(n) + " frames");
    }
  }
  // Frames [first_inaccessible, n) are the last f received.
  const std::size_t first_inaccessible = f >= n ? 0 : n - f;
  for (std::size_t i = 0; i < num_candidates; ++i) {
    if (align[i] >= first_inaccessible) return {i, StopReason::kInaccessibleFrame};
  }
  return {num_candidates, StopReason::kExhausted};
}

PolicyDecision edatt_decide(const AttentionMatrix& attn, double alpha, std::size_t lambda,
                            std::size_t num_candidates) {
  if (lambda == 0) throw ArgumentError("edatt: lambda must be at least 1");
  if (!(alpha > 0.0)) throw ArgumentError("edatt: alpha must be positive");
  if (num_candidates > attn.num_targets()) {
    throw ArgumentError("edatt: more candidates than attention rows");
  }
  const std::size_t n = attn.num_frames();
  const std::size_t first_recent = lambda >= n ? 0 : n - lambda;
  for (std::size_t i = 0; i < num_candidates; ++i) {
    double recent = 0.0;
    for (std::size_t j = first_recent; j < n; ++j) recent += attn(i, j);
    if (!(recent < alpha)) return {i, StopReason::kThreshold};
  }
  return {num_candidates, StopReason::kExhausted};
}

std::size_t waitk_allowed(std::size_t k, std::size_t source_words_detected,
                          std::size_t target_words_emitted) {
  if (k == 0) throw ArgumentError("wait-k: k must be at least 1");
  const std::size_t budget = source_words_detected + 1 >= k ? source_words_detected + 1 - k : 0;
  return budget > target_words_emitted ? budget - target_words_emitted : 0;
}

PolicyDecision local_agreement_prefix(std::span<const std::vector<TokenId>> previous,
                                      std::span<const TokenId> current, std::size_t committed) {
  if (previous.empty()) {
    return {0, current.size() > committed ? StopReason::kDisagreement : StopReason::kExhausted};
  }
  std::size_t lcp = current.size();
  for (const auto& prev : previous) {
    auto [a, b] = std::mismatch(prev.begin(), prev.end(), current.begin(), current.end());
    lcp = std::min(lcp, static_cast<std::size_t>(a - prev.begin()));
  }
  const std::size_t count = lcp > committed ? lcp - committed : 0;
  return {count, lcp < current.size() ? StopReason::kDisagreement : StopReason::kExhausted};
}

PolicyDecision local_agreement_prefix(const std::optional<std::vector<TokenId>>& previous,
                                      std::span<const TokenId> current, std::size_t committed) {
  if (!previous) return local_agreement_prefix(std::span<const std::vector<TokenId>>{}, current, committed);
  return local_agreement_prefix(std::span<const std::vector<TokenId>>(&*previous, 1), current, committed);
}

std::size_t tokens_for_complete_words(const Vocabulary& vocab, std::span<const TokenId> candidates,
                                      bool eos_reached, bool prefix_empty, std::size_t word_budget) {
  std::size_t i = 0;
  std::size_t take = 0;
  if (!prefix_empty) {
    while (i < candidates.size() && !vocab.is_word_start(candidates[i])) ++i;
    if (i == candidates.size() && !eos_reached) return 0;
    take = i;
  }
  std::size_t words = 0;
  while (i < candidates.size() && words < word_budget) {
    std::size_t j = i + 1;
    while (j < candidates.size() && !vocab.is_word_start(candidates[j])) ++j;
    if (j == candidates.size() && !eos_reached) break;
    take = j;
    ++words;
    i = j;
  }
  return take;
}

std::size_t count_words(const Vocabulary& vocab, std::span<const TokenId> tokens) {
  std::size_t words = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == vocab.eos_id()) continue;
    if (i == 0 || vocab.is_word_start(tokens[i])) ++words;
  }
  return words;
}

std::string_view policy_name(const PolicyParams& p) {
  struct Visitor {
    std::string_view operator()(const AlignAttParams&) const { return "alignatt"; }
    std::string_view operator()(const EdAttParams&) const { return "edatt"; }
    std::string_view operator()(const WaitKParams&) const { return "waitk"; }
    std::string_view operator()(const LocalAgreementParams&) const { return "local_agreement"; }
  };
  return std::visit(Visitor{}, p);
}

void validate(const PolicyParams& p) {
  struct Visitor {
    void operator()(const AlignAttParams& a) const {
      if (a.f == 0) throw ArgumentError("alignatt: f must be at least 1");
    }
    void operator()(const EdAttParams& e) const {
      if (!(e.alpha > 0.0 && e.alpha <= 1.0)) throw ArgumentError("edatt: alpha must be in (0, 1]");
      if (e.lambda == 0) throw ArgumentError("edatt: lambda must be at least 1");
    }
    void operator()(const WaitKParams& w) const {
      if (w.k == 0) throw ArgumentError("wait-k: k must be at least 1");
    }
    void operator()(const LocalAgreementParams& l) const {
      if (!(l.chunk_ms > 0.0) || !std::isfinite(l.chunk_ms)) {
        throw ArgumentError("local agreement: chunk must be positive");
      }
      if (l.window < 2) throw ArgumentError("local agreement: window must be at least 2");
    }
  };
  std::visit(Visitor{}, p);
}

PolicyState::PolicyState(PolicyParams params) : params_(params) { validate(params_); }

void PolicyState::commit(std::span<const TokenId> tokens) {
  committed_.insert(committed_.end(), tokens.begin(), tokens.end());
}

void PolicyState::remember_hypothesis(std::vector<TokenId> hypothesis) {
  std::size_t keep = 1;
  if (const auto* la = std::get_if<LocalAgreementParams>(&params_)) keep = la->window - 1;
  history_.push_back(std::move(hypothesis));
  while (history_.size() > keep) history_.erase(history_.begin());
}

}  // namespace simulst
