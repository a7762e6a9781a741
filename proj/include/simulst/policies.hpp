// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Decision policies. Each decision is a pure function of the evidence for
// one timestep and returns how many of the offered candidate tokens to
// commit. PolicyState carries what persists across timesteps of a session.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "simulst/attention.hpp"
#include "simulst/vocabulary.hpp"

namespace simulst {

enum class StopReason {
  kInaccessibleFrame,
  kThreshold,
  kSchedule,
  kDisagreement,
  kExhausted,  // every offered candidate was committed
};

std::string_view to_string(StopReason r);

struct PolicyDecision {
  std::size_t commit_count = 0;
  StopReason stopped_by = StopReason::kExhausted;

  bool operator==(const PolicyDecision&) const = default;
};

/// Commits the longest candidate prefix whose aligned frames all lie before
/// the last `f` of the `n` received frames.
PolicyDecision alignatt_decide(const AlignmentVector& align, std::size_t n, std::size_t f,
                               std::size_t num_candidates);

/// Commits candidates while the attention mass a row puts on the last
/// `lambda` frames stays below `alpha`.
PolicyDecision edatt_decide(const AttentionMatrix& attn, double alpha, std::size_t lambda,
                            std::size_t num_candidates);

/// Target words the wait-k schedule still allows:
/// max(0, detected - k + 1 - emitted).
std::size_t waitk_allowed(std::size_t k, std::size_t source_words_detected,
                          std::size_t target_words_emitted);

/// Longest common prefix of the previous and current hypotheses minus what is
/// already committed. Nothing is committed without a previous hypothesis.
PolicyDecision local_agreement_prefix(const std::optional<std::vector<TokenId>>& previous,
                                      std::span<const TokenId> current, std::size_t committed);

/// Same rule over several earlier hypotheses: the prefix must be shared by all.
PolicyDecision local_agreement_prefix(std::span<const std::vector<TokenId>> previous,
                                      std::span<const TokenId> current, std::size_t committed);

/// Number of leading candidate tokens that make up at most `word_budget`
/// complete words. A word is complete once the next word starts or the
/// decoder reached end-of-sequence. Continuation pieces at the head extend
/// the last committed word and do not consume budget.
std::size_t tokens_for_complete_words(const Vocabulary& vocab, std::span<const TokenId> candidates,
                                      bool eos_reached, bool prefix_empty, std::size_t word_budget);

/// Words in a committed token sequence.
std::size_t count_words(const Vocabulary& vocab, std::span<const TokenId> tokens);

struct AlignAttParams {
  std::size_t f = 4;
};
struct EdAttParams {
  double alpha = 0.2;
  std::size_t lambda = 2;
};
struct WaitKParams {
  std::size_t k = 3;
};
struct LocalAgreementParams {
  double chunk_ms = 1000.0;  // T_s
  std::size_t window = 2;    // current hypothesis plus window - 1 earlier ones
};

using PolicyParams = std::variant<AlignAttParams, EdAttParams, WaitKParams, LocalAgreementParams>;

std::string_view policy_name(const PolicyParams& p);
/// Throws ArgumentError for out-of-range hyperparameters.
void validate(const PolicyParams& p);

/// Per-session policy memory. Committed tokens only grow.
class PolicyState {
 public:
  explicit PolicyState(PolicyParams params);

  const PolicyParams& params() const { return params_; }
  std::span<const TokenId> committed() const { return committed_; }
  void commit(std::span<const TokenId> tokens);

  /// Earlier hypotheses kept for Local Agreement, oldest first.
  std::span<const std::vector<TokenId>> history() const { return history_; }
  void remember_hypothesis(std::vector<TokenId> hypothesis);

 private:
  PolicyParams params_;
  std::vector<TokenId> committed_;
  std::vector<std::vector<TokenId>> history_;
};

}  // namespace simulst
