// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded synthetic feature streams for desk-scale runs. An utterance is a
// row of "words", each a fixed spectral template held for 20-45 frames and
// separated by silence, so the toy word head can find the boundaries.

#pragma once

#include <cstdint>
#include <filesystem>

#include "simulst/features.hpp"
#include "simulst/manifest.hpp"
#include "simulst/model.hpp"

namespace simulst {

struct SyntheticOptions {
  std::size_t min_words = 3;
  std::size_t max_words = 8;
  std::size_t dim = kDefaultMelBins;
  std::size_t lexicon_size = 24;
};

FeatureMatrix synthesize_utterance(std::uint64_t seed, const SyntheticOptions& opts = {});

/// Writes <dir>/<id>.sgfb for `count` utterances plus <dir>/manifest.jsonl.
/// References are the adapter's offline greedy output on the full source.
Manifest make_synthetic_suite(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                              const ModelAdapter& reference_model, const SyntheticOptions& opts = {});

}  // namespace simulst
