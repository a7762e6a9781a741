// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simulst/simulator.hpp"

namespace simulst {

struct WordDelays {
  std::vector<double> ideal_s;
  std::vector<double> wallclock_s;
};

/// One delay per output word: the delay of the event carrying its last piece.
WordDelays word_delays(const EmissionLog& log);

/// 1-based index of the first delay reaching the source duration, or the
/// number of delays when none does.
std::size_t lagging_cutoff(std::span<const double> delays_s, double source_duration_s);

/// (1/tau) * sum_{i<=tau} (d_i - (i-1) * T / denom_len). nullopt for an
/// empty hypothesis.
std::optional<double> lagging(std::span<const double> delays_s, double source_duration_s,
                              std::size_t denom_len, std::size_t tau);

/// Average Lagging: the oracle rate uses the reference length.
std::optional<double> average_lagging(std::span<const double> delays_s, double source_duration_s,
                                      std::size_t ref_len);

/// Length-adaptive Average Lagging: the oracle rate uses
/// max(hypothesis length, reference length).
std::optional<double> laal(std::span<const double> delays_s, double source_duration_s,
                           std::size_t ref_len, std::size_t hyp_len);

struct LatencyReport {
  double al_s = 0.0;
  double laal_s = 0.0;
  double al_ca_s = 0.0;
  double laal_ca_s = 0.0;
  std::vector<double> delays_s;
  std::vector<double> delays_ca_s;
  std::size_t tau = 0;
};

/// AL and LAAL from ideal and computation-aware delays. Both variants use
/// the cutoff found on the ideal delays. nullopt for an empty hypothesis.
std::optional<LatencyReport> latency_report(const EmissionLog& log, std::size_t ref_len);

/// Whitespace word count.
std::size_t count_text_words(std::string_view text);

/// sacreBLEU-compatible 13a tokenization.
std::string tokenize_13a(std::string_view line);

struct QualityReport {
  double bleu = 0.0;                // [0, 100]
  std::vector<double> precisions;   // percentages after smoothing, per order
  std::vector<std::size_t> correct; // matched n-grams per order
  std::vector<std::size_t> total;   // hypothesis n-grams per order
  double brevity_penalty = 0.0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

struct BleuOptions {
  std::size_t max_order = 4;
  /// Average only over orders the hypothesis has n-grams for.
  bool effective_order = false;
};

/// Case-sensitive, 13a tokenization, exponential smoothing, standard brevity
/// penalty; one reference per segment.
QualityReport corpus_bleu(std::span<const std::string> hypotheses,
                          std::span<const std::string> references, const BleuOptions& opts = {});

/// Single segment with effective order, so short segments are scored on the
/// orders they have.
QualityReport bleu(std::string_view hypothesis, std::string_view reference);

}  // namespace simulst
