// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simulst/error.hpp"

namespace simulst {

std::vector<CtcLabel> ctc_greedy_collapse(const Matrix& posterior) {
  if (posterior.rows() > 0 && posterior.cols() != kNumCtcLabels) {
    throw DimensionError("ctc posterior must have 3 label columns");
  }
  std::vector<CtcLabel> out;
  std::size_t prev = kNumCtcLabels;  // no previous frame
  for (std::size_t t = 0; t < posterior.rows(); ++t) {
    auto row = posterior.row(t);
    const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    if (best != prev && best != static_cast<std::size_t>(CtcLabel::kBlank)) {
      out.push_back(static_cast<CtcLabel>(best));
    }
    prev = best;
  }
  return out;
}

std::size_t count_boundaries(std::span<const CtcLabel> collapsed) {
  return static_cast<std::size_t>(
      std::count(collapsed.begin(), collapsed.end(), CtcLabel::kWordBoundary));
}

std::size_t count_words_from_posterior(const Matrix& posterior) {
  const auto labels = ctc_greedy_collapse(posterior);
  return count_boundaries(labels);
}

Matrix EnergyWordHead::posterior(const FeatureMatrix& raw) const {
  Matrix post(raw.frames(), kNumCtcLabels);
  double speech_prev = 0.0;
  for (std::size_t t = 0; t < raw.frames(); ++t) {
    const auto frame = raw.frame(t);
    const double energy =
        frame.empty() ? 0.0 : std::accumulate(frame.begin(), frame.end(), 0.0) / static_cast<double>(frame.size());
    const double speech = 1.0 / (1.0 + std::exp(-sharpness * (energy - speech_threshold)));
    post(t, static_cast<std::size_t>(CtcLabel::kChar)) = speech;
    post(t, static_cast<std::size_t>(CtcLabel::kWordBoundary)) = (1.0 - speech) * speech_prev;
    post(t, static_cast<std::size_t>(CtcLabel::kBlank)) = (1.0 - speech) * (1.0 - speech_prev);
    speech_prev = speech;
  }
  return post;
}

}  // namespace simulst
