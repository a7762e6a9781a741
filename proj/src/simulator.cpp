// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/simulator.hpp"

#include <cmath>
#include <string>

#include "simulst/error.hpp"

namespace simulst {

StreamCursor::StreamCursor(const FeatureMatrix& source, double chunk_ms) : source_(&source) {
  const double shift = source.frame_shift_ms();
  if (!(shift > 0.0)) throw ArgumentError("source has no frame shift");
  if (!(chunk_ms >= shift)) {
    throw ArgumentError("chunk of " + std::to_string(chunk_ms) + " ms is shorter than one frame shift");
  }
  frames_per_chunk_ = static_cast<std::size_t>(std::floor(chunk_ms / shift + 1e-9));
}

double StreamCursor::delivered_s() const {
  return static_cast<double>(position_) * source_->frame_shift_ms() / 1000.0;
}

std::size_t StreamCursor::read() {
  const std::size_t before = position_;
  position_ = std::min(source_->frames(), position_ + frames_per_chunk_);
  return position_ - before;
}

void SimulatedClock::charge(double seconds) {
  if (seconds < 0.0) throw ArgumentError("negative compute cost");
  elapsed_ += seconds;
}

RealClock::RealClock() : start_(std::chrono::steady_clock::now()) {}

double RealClock::now() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

double effective_chunk_ms(const PolicyParams& params, double chunk_ms) {
  if (const auto* la = std::get_if<LocalAgreementParams>(&params)) return la->chunk_ms;
  return chunk_ms;
}

std::string detokenize(const Vocabulary& vocab, std::span<const TokenId> tokens) {
  return vocab.detokenize(tokens);
}

namespace {

class SessionDriver {
 public:
  SessionDriver(const FeatureMatrix& source, const ModelAdapter& adapter, PolicyState& policy,
                const SessionOptions& options, Clock& clock, SessionTrace* trace)
      : source_(source), adapter_(adapter), vocab_(adapter.vocabulary()), policy_(policy),
        options_(options), clock_(clock), trace_(trace) {}

  EmissionLog run() {
    validate(policy_.params());
    if (source_.frames() == 0) throw ArgumentError("run_session: empty source");
    if (options_.max_new == 0) throw ArgumentError("run_session: max_new must be at least 1");
    if (options_.attention_layer >= adapter_.num_layers()) {
      throw ArgumentError("run_session: attention layer " + std::to_string(options_.attention_layer) +
                          " but the decoder has " + std::to_string(adapter_.num_layers()) + " layers");
    }
    StreamCursor cursor(source_, effective_chunk_ms(policy_.params(), options_.chunk_ms));
    log_.source_duration_s = source_.duration_s();
    try {
      for (;;) {
        cursor.read();
        if (cursor.exhausted()) break;
        step(cursor);
      }
      final_flush();
    } catch (const std::exception& e) {
      log_.final_text = vocab_.detokenize(policy_.committed());
      throw SessionError(std::string("session failed: ") + e.what(), log_);
    }
    log_.final_text = vocab_.detokenize(policy_.committed());
    return log_;
  }

 private:
  EncoderStates encode(const FeatureMatrix& seen) {
    EncoderStates enc = adapter_.encode(seen);
    enc.version = version_++;
    clock_.charge(options_.costs.encode_s);
    return enc;
  }

  DecodeResult decode(const EncoderStates& enc) {
    DecodeResult dec = adapter_.decode_greedy(enc, policy_.committed(), options_.max_new);
    const std::size_t expected_rows = policy_.committed().size() + dec.tokens.size() + (dec.eos_reached ? 1 : 0);
    if (dec.attention.num_targets() != expected_rows || dec.attention.num_frames() != enc.num_frames()) {
      throw DimensionError("adapter returned attention of the wrong shape");
    }
    clock_.charge(options_.costs.decode_token_s *
                  static_cast<double>(dec.tokens.size() + (dec.eos_reached ? 1 : 0)));
    return dec;
  }

  AttentionMatrix candidate_attention(const DecodeResult& dec) const {
    const AttentionMatrix agg = aggregate_attention(dec.attention, options_.attention_layer);
    return agg.slice_rows(policy_.committed().size(), dec.tokens.size());
  }

  void emit(std::span<const TokenId> tokens, double ideal_s) {
    for (TokenId t : tokens) {
      log_.events.push_back({t, vocab_.piece(t), ideal_s, ideal_s + clock_.now()});
    }
    policy_.commit(tokens);
  }

  void step(const StreamCursor& cursor) {
    const FeatureMatrix seen = cursor.delivered();
    StepRecord rec;
    rec.frames_delivered = cursor.position();
    std::vector<TokenId> commit;

    if (const auto* p = std::get_if<AlignAttParams>(&policy_.params())) {
      const EncoderStates enc = encode(seen);
      const DecodeResult dec = decode(enc);
      rec.encoder_frames = enc.num_frames();
      rec.num_candidates = dec.tokens.size();
      AlignmentVector align = compute_alignment(candidate_attention(dec));
      rec.decision = alignatt_decide(align, enc.num_frames(), p->f, dec.tokens.size());
      rec.alignment = std::move(align);
      commit.assign(dec.tokens.begin(), dec.tokens.begin() + static_cast<std::ptrdiff_t>(rec.decision.commit_count));
    } else if (const auto* p = std::get_if<EdAttParams>(&policy_.params())) {
      const EncoderStates enc = encode(seen);
      const DecodeResult dec = decode(enc);
      rec.encoder_frames = enc.num_frames();
      rec.num_candidates = dec.tokens.size();
      rec.decision = edatt_decide(candidate_attention(dec), p->alpha, p->lambda, dec.tokens.size());
      commit.assign(dec.tokens.begin(), dec.tokens.begin() + static_cast<std::ptrdiff_t>(rec.decision.commit_count));
    } else if (const auto* p = std::get_if<WaitKParams>(&policy_.params())) {
      rec.source_words = adapter_.count_source_words(seen);
      clock_.charge(options_.costs.word_count_s);
      const std::size_t allowed = waitk_allowed(p->k, rec.source_words, count_words(vocab_, policy_.committed()));
      rec.decision = {0, StopReason::kSchedule};
      if (allowed > 0) {
        const EncoderStates enc = encode(seen);
        const DecodeResult dec = decode(enc);
        rec.encoder_frames = enc.num_frames();
        rec.num_candidates = dec.tokens.size();
        const std::size_t take = tokens_for_complete_words(vocab_, dec.tokens, dec.eos_reached,
                                                           policy_.committed().empty(), allowed);
        rec.decision = {take, take < dec.tokens.size() ? StopReason::kSchedule : StopReason::kExhausted};
        commit.assign(dec.tokens.begin(), dec.tokens.begin() + static_cast<std::ptrdiff_t>(take));
      }
    } else {
      const EncoderStates enc = encode(seen);
      const DecodeResult dec = decode(enc);
      rec.encoder_frames = enc.num_frames();
      rec.num_candidates = dec.tokens.size();
      std::vector<TokenId> current(policy_.committed().begin(), policy_.committed().end());
      current.insert(current.end(), dec.tokens.begin(), dec.tokens.end());
      const std::size_t done = policy_.committed().size();
      rec.decision = local_agreement_prefix(policy_.history(), current, done);
      commit.assign(current.begin() + static_cast<std::ptrdiff_t>(done),
                    current.begin() + static_cast<std::ptrdiff_t>(done + rec.decision.commit_count));
      policy_.remember_hypothesis(std::move(current));
    }

    emit(commit, cursor.delivered_s());
    rec.target_words = count_words(vocab_, policy_.committed());
    if (trace_) trace_->steps.push_back(std::move(rec));
  }

  void final_flush() {
    const EncoderStates enc = encode(source_);
    const DecodeResult dec = decode(enc);
    emit(dec.tokens, log_.source_duration_s);
    if (trace_) {
      StepRecord rec;
      rec.frames_delivered = source_.frames();
      rec.encoder_frames = enc.num_frames();
      rec.num_candidates = dec.tokens.size();
      rec.decision = {dec.tokens.size(), StopReason::kExhausted};
      rec.target_words = count_words(vocab_, policy_.committed());
      rec.final_flush = true;
      trace_->steps.push_back(std::move(rec));
    }
  }

  const FeatureMatrix& source_;
  const ModelAdapter& adapter_;
  const Vocabulary& vocab_;
  PolicyState& policy_;
  const SessionOptions& options_;
  Clock& clock_;
  SessionTrace* trace_;
  EmissionLog log_;
  std::uint64_t version_ = 0;
};

}  // namespace

EmissionLog run_session(const FeatureMatrix& source, const ModelAdapter& adapter, PolicyState& policy,
                        const SessionOptions& options, Clock& clock, SessionTrace* trace) {
  return SessionDriver(source, adapter, policy, options, clock, trace).run();
}

}  // namespace simulst
