// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/metrics.hpp"

#include <algorithm>
#include <sstream>

#include "simulst/error.hpp"

namespace simulst {

WordDelays word_delays(const EmissionLog& log) {
  WordDelays out;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const auto& e = log.events[i];
    if (i == 0 || piece_starts_word(e.text)) {
      out.ideal_s.push_back(e.ideal_delay_s);
      out.wallclock_s.push_back(e.wallclock_delay_s);
    } else {
      // A continuation piece completes the current word later.
      out.ideal_s.back() = e.ideal_delay_s;
      out.wallclock_s.back() = e.wallclock_delay_s;
    }
  }
  return out;
}

std::size_t lagging_cutoff(std::span<const double> delays_s, double source_duration_s) {
  for (std::size_t i = 0; i < delays_s.size(); ++i) {
    if (delays_s[i] >= source_duration_s) return i + 1;
  }
  return delays_s.size();
}

std::optional<double> lagging(std::span<const double> delays_s, double source_duration_s,
                              std::size_t denom_len, std::size_t tau) {
  if (delays_s.empty() || tau == 0) return std::nullopt;
  if (denom_len == 0) throw ArgumentError("lagging: length must be positive");
  if (tau > delays_s.size()) throw ArgumentError("lagging: cutoff beyond the hypothesis");
  const double rate = source_duration_s / static_cast<double>(denom_len);
  double sum = 0.0;
  for (std::size_t i = 0; i < tau; ++i) sum += delays_s[i] - static_cast<double>(i) * rate;
  return sum / static_cast<double>(tau);
}

std::optional<double> average_lagging(std::span<const double> delays_s, double source_duration_s,
                                      std::size_t ref_len) {
  if (ref_len == 0) throw ArgumentError("average lagging: reference length must be positive");
  if (!(source_duration_s > 0.0)) throw ArgumentError("average lagging: source duration must be positive");
  return lagging(delays_s, source_duration_s, ref_len, lagging_cutoff(delays_s, source_duration_s));
}

std::optional<double> laal(std::span<const double> delays_s, double source_duration_s, std::size_t ref_len,
                           std::size_t hyp_len) {
  if (ref_len == 0) throw ArgumentError("laal: reference length must be positive");
  if (!(source_duration_s > 0.0)) throw ArgumentError("laal: source duration must be positive");
  if (hyp_len != delays_s.size()) throw ArgumentError("laal: one delay per hypothesis word expected");
  return lagging(delays_s, source_duration_s, std::max(hyp_len, ref_len),
                 lagging_cutoff(delays_s, source_duration_s));
}

std::optional<LatencyReport> latency_report(const EmissionLog& log, std::size_t ref_len) {
  if (ref_len == 0) throw ArgumentError("latency report: reference length must be positive");
  WordDelays d = word_delays(log);
  if (d.ideal_s.empty()) return std::nullopt;
  const double T = log.source_duration_s;
  const std::size_t hyp_len = d.ideal_s.size();
  const std::size_t tau = lagging_cutoff(d.ideal_s, T);
  const std::size_t laal_len = std::max(hyp_len, ref_len);
  LatencyReport r;
  r.al_s = *lagging(d.ideal_s, T, ref_len, tau);
  r.laal_s = *lagging(d.ideal_s, T, laal_len, tau);
  r.al_ca_s = *lagging(d.wallclock_s, T, ref_len, tau);
  r.laal_ca_s = *lagging(d.wallclock_s, T, laal_len, tau);
  r.delays_s = std::move(d.ideal_s);
  r.delays_ca_s = std::move(d.wallclock_s);
  r.tau = tau;
  return r;
}

std::size_t count_text_words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

}  // namespace simulst
