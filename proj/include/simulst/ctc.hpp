// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "simulst/features.hpp"
#include "simulst/matrix.hpp"

namespace simulst {

/// Label set of the word-detection head.
enum class CtcLabel : std::size_t { kBlank = 0, kChar = 1, kWordBoundary = 2 };
inline constexpr std::size_t kNumCtcLabels = 3;

/// Frame-wise argmax, repeats merged, blanks removed.
std::vector<CtcLabel> ctc_greedy_collapse(const Matrix& posterior);

/// Boundary symbols in a collapsed label sequence; a word counts only once
/// its boundary has been seen.
std::size_t count_boundaries(std::span<const CtcLabel> collapsed);

/// Greedy CTC decode of a (frames x 3) posterior, then count_boundaries.
std::size_t count_words_from_posterior(const Matrix& posterior);

/// Toy energy-driven head: speech frames emit characters, the first
/// non-speech frame after speech emits a word boundary, other silence is
/// blank. Energy is the mean feature value of a frame.
struct EnergyWordHead {
  double speech_threshold = -1.25;
  double sharpness = 4.0;

  Matrix posterior(const FeatureMatrix& raw) const;
};

}  // namespace simulst
