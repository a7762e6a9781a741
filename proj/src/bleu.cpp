// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "simulst/error.hpp"
#include "simulst/metrics.hpp"

namespace simulst {
namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& words, std::size_t max_order) {
  NgramCounts counts;
  for (std::size_t n = 1; n <= max_order; ++n) {
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
      ++counts[std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(i),
                                        words.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
  }
  return counts;
}

}  // namespace

std::string tokenize_13a(std::string_view line) {
  std::string s(line);
  replace_all(s, "<skipped>", "");
  replace_all(s, "-\n", "");
  replace_all(s, "\n", " ");
  if (s.find('&') != std::string::npos) {
    replace_all(s, "&quot;", "\"");
    replace_all(s, "&amp;", "&");
    replace_all(s, "&lt;", "<");
    replace_all(s, "&gt;", ">");
  }
  s = " " + s + " ";
  static const std::regex punct(R"(([\{-\~\[-\` -\&\(-\+\:-\@\/]))");
  static const std::regex period_comma_1(R"(([^0-9])([\.,]))");
  static const std::regex period_comma_2(R"(([\.,])([^0-9]))");
  static const std::regex dash(R"(([0-9])(-))");
  s = std::regex_replace(s, punct, " $1 ");
  s = std::regex_replace(s, period_comma_1, "$1 $2 ");
  s = std::regex_replace(s, period_comma_2, " $1 $2");
  s = std::regex_replace(s, dash, "$1 $2 ");
  const auto words = split(s);
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

QualityReport corpus_bleu(std::span<const std::string> hypotheses, std::span<const std::string> references,
                          const BleuOptions& opts) {
  if (hypotheses.size() != references.size()) throw ArgumentError("bleu: one reference per hypothesis expected");
  if (opts.max_order == 0) throw ArgumentError("bleu: max order must be positive");
  QualityReport r;
  r.correct.assign(opts.max_order, 0);
  r.total.assign(opts.max_order, 0);
  r.precisions.assign(opts.max_order, 0.0);
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto hyp = split(tokenize_13a(hypotheses[s]));
    const auto ref = split(tokenize_13a(references[s]));
    r.hyp_len += hyp.size();
    r.ref_len += ref.size();
    const NgramCounts hyp_counts = count_ngrams(hyp, opts.max_order);
    const NgramCounts ref_counts = count_ngrams(ref, opts.max_order);
    for (const auto& [gram, count] : hyp_counts) {
      const std::size_t order = gram.size() - 1;
      r.total[order] += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) r.correct[order] += std::min(count, it->second);
    }
  }

  if (r.hyp_len < r.ref_len) {
    r.brevity_penalty = r.hyp_len > 0 ? std::exp(1.0 - static_cast<double>(r.ref_len) / static_cast<double>(r.hyp_len)) : 0.0;
  } else {
    r.brevity_penalty = 1.0;
  }
  if (std::none_of(r.correct.begin(), r.correct.end(), [](std::size_t c) { return c > 0; })) {
    r.bleu = 0.0;
    return r;
  }

  double smooth = 1.0;
  std::size_t order_used = opts.max_order;
  for (std::size_t n = 0; n < opts.max_order; ++n) {
    if (r.total[n] == 0) break;
    if (opts.effective_order) order_used = n + 1;
    if (r.correct[n] == 0) {
      smooth *= 2.0;
      r.precisions[n] = 100.0 / (smooth * static_cast<double>(r.total[n]));
    } else {
      r.precisions[n] = 100.0 * static_cast<double>(r.correct[n]) / static_cast<double>(r.total[n]);
    }
  }
  double log_sum = 0.0;
  for (std::size_t n = 0; n < order_used; ++n) {
    if (r.precisions[n] == 0.0) {
      r.bleu = 0.0;
      return r;
    }
    log_sum += std::log(r.precisions[n]);
  }
  r.bleu = r.brevity_penalty * std::exp(log_sum / static_cast<double>(order_used));
  return r;
}

QualityReport bleu(std::string_view hypothesis, std::string_view reference) {
  if (reference.empty()) throw ArgumentError("bleu: empty reference");
  const std::string h(hypothesis), ref(reference);
  return corpus_bleu(std::span<const std::string>(&h, 1), std::span<const std::string>(&ref, 1),
                     BleuOptions{4, true});
}

}  // namespace simulst
