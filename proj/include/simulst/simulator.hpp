// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Streaming session driver.
//
// Per read step: deliver one chunk of frames, re-encode everything received,
// decode greedily from the committed prefix, let the policy gate the
// candidates, and stamp each committed token with two delays. The ideal delay
// is the audio received at commit time. The computation-aware delay adds the
// processing time the session has spent so far, as reported by its Clock.
// When the last chunk arrives the remaining hypothesis is committed without
// gating.

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simulst/error.hpp"
#include "simulst/features.hpp"
#include "simulst/model.hpp"
#include "simulst/policies.hpp"

namespace simulst {

inline constexpr std::size_t kDefaultMaxNewTokens = 128;
inline constexpr std::size_t kDefaultAttentionLayer = 3;

class StreamCursor {
 public:
  StreamCursor(const FeatureMatrix& source, double chunk_ms);

  /// Frames added by each full read.
  std::size_t frames_per_chunk() const { return frames_per_chunk_; }
  std::size_t position() const { return position_; }
  bool exhausted() const { return position_ == source_->frames(); }
  double delivered_s() const;

  /// Advances by one chunk (or the final partial chunk); returns frames added.
  std::size_t read();
  FeatureMatrix delivered() const { return source_->head(position_); }

 private:
  const FeatureMatrix* source_;
  std::size_t frames_per_chunk_;
  std::size_t position_ = 0;
};

struct EmissionEvent {
  TokenId token = 0;
  std::string text;  // subword piece as in the vocabulary
  double ideal_delay_s = 0.0;
  double wallclock_delay_s = 0.0;

  bool operator==(const EmissionEvent&) const = default;
};

struct EmissionLog {
  std::vector<EmissionEvent> events;
  double source_duration_s = 0.0;
  std::string final_text;

  bool operator==(const EmissionLog&) const = default;
};

/// JSON-lines: one {"token","text","ideal_s","wall_s"} object per event, then
/// {"type":"summary","source_duration_s","final_text","num_events"}.
void write_emission_log(std::ostream& os, const EmissionLog& log);
void save_emission_log(const std::filesystem::path& path, const EmissionLog& log);
EmissionLog read_emission_log(std::istream& is);
EmissionLog load_emission_log(const std::filesystem::path& path);

/// Seconds of processing charged to a session so far. Monotone.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  /// Declares the cost of an operation that just finished.
  virtual void charge(double seconds) = 0;
};

/// Advances only by declared costs; fully deterministic.
class SimulatedClock final : public Clock {
 public:
  double now() const override { return elapsed_; }
  void charge(double seconds) override;

 private:
  double elapsed_ = 0.0;
};

/// Reads a steady clock started at construction; declared costs are ignored.
class RealClock final : public Clock {
 public:
  RealClock();
  double now() const override;
  void charge(double) override {}

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Costs charged to a SimulatedClock per adapter call.
struct ComputeCosts {
  double encode_s = 0.010;
  double decode_token_s = 0.004;  // per newly decoded position
  double word_count_s = 0.002;
};

struct SessionOptions {
  double chunk_ms = 1000.0;
  std::size_t max_new = kDefaultMaxNewTokens;
  std::size_t attention_layer = kDefaultAttentionLayer;
  ComputeCosts costs{};
};

/// One read step, recorded for inspection.
struct StepRecord {
  std::size_t frames_delivered = 0;
  std::size_t encoder_frames = 0;
  std::size_t num_candidates = 0;
  std::optional<AlignmentVector> alignment;  // AlignAtt only
  std::size_t source_words = 0;             // wait-k only
  std::size_t target_words = 0;             // after this step's commits
  PolicyDecision decision{};
  bool final_flush = false;
};

struct SessionTrace {
  std::vector<StepRecord> steps;
};

/// Adapter failure during a session, with everything committed before it.
class SessionError : public Error {
 public:
  SessionError(const std::string& what, EmissionLog partial)
      : Error(what), partial_(std::move(partial)) {}
  const EmissionLog& partial_log() const { return partial_; }

 private:
  EmissionLog partial_;
};

/// Chunk duration a policy reads with: Local Agreement uses its T_s.
double effective_chunk_ms(const PolicyParams& params, double chunk_ms);

EmissionLog run_session(const FeatureMatrix& source, const ModelAdapter& adapter, PolicyState& policy,
                        const SessionOptions& options, Clock& clock, SessionTrace* trace = nullptr);

/// Vocabulary-level detokenization; throws ArgumentError on unknown ids.
std::string detokenize(const Vocabulary& vocab, std::span<const TokenId> tokens);

}  // namespace simulst
