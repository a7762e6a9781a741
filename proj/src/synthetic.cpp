// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/synthetic.hpp"

#include <cstdio>

#include "rng.hpp"
#include "simulst/error.hpp"

namespace simulst {
namespace {

constexpr std::uint64_t kLexiconSeed = 0x5eed1e7u;
constexpr double kSilenceLevel = -3.0;
constexpr double kNoise = 0.1;
constexpr std::size_t kEdgeSilence = 10;

std::vector<std::vector<float>> lexicon(const SyntheticOptions& opts) {
  detail::Rng rng(kLexiconSeed);
  std::vector<std::vector<float>> words(opts.lexicon_size, std::vector<float>(opts.dim));
  for (auto& w : words) {
    for (auto& x : w) x = static_cast<float>(0.5 + rng.normal());
  }
  return words;
}

}  // namespace

FeatureMatrix synthesize_utterance(std::uint64_t seed, const SyntheticOptions& opts) {
  if (opts.min_words == 0 || opts.max_words < opts.min_words || opts.dim == 0 || opts.lexicon_size == 0) {
    throw ArgumentError("invalid synthetic options");
  }
  const auto words = lexicon(opts);
  detail::Rng rng(seed);
  const std::size_t count = opts.min_words + rng.below(opts.max_words - opts.min_words + 1);

  std::vector<std::vector<float>> frames;
  auto silence = [&](std::size_t length) {
    for (std::size_t i = 0; i < length; ++i) {
      std::vector<float> f(opts.dim);
      for (auto& x : f) x = static_cast<float>(kSilenceLevel + kNoise * rng.normal());
      frames.push_back(std::move(f));
    }
  };
  silence(kEdgeSilence);
  for (std::size_t w = 0; w < count; ++w) {
    if (w > 0) silence(5 + rng.below(8));
    const auto& tmpl = words[rng.below(words.size())];
    const std::size_t length = 20 + rng.below(26);
    for (std::size_t i = 0; i < length; ++i) {
      std::vector<float> f(opts.dim);
      for (std::size_t d = 0; d < opts.dim; ++d) f[d] = static_cast<float>(tmpl[d] + kNoise * rng.normal());
      frames.push_back(std::move(f));
    }
  }
  silence(kEdgeSilence);

  std::vector<float> flat;
  flat.reserve(frames.size() * opts.dim);
  for (const auto& f : frames) flat.insert(flat.end(), f.begin(), f.end());
  return FeatureMatrix(frames.size(), opts.dim, std::move(flat));
}

Manifest make_synthetic_suite(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                              const ModelAdapter& reference_model, const SyntheticOptions& opts) {
  if (count == 0) throw ArgumentError("synthetic suite needs at least one utterance");
  std::filesystem::create_directories(dir);
  const std::size_t reference_budget = 4096;
  Manifest manifest;
  for (std::size_t i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "utt%03zu", i);
    const FeatureMatrix f = synthesize_utterance(seed * 1000003u + i, opts);
    const auto path = dir / (std::string(id) + ".sgfb");
    write_features(path, f);
    const auto enc = reference_model.encode(f);
    const auto out = reference_model.decode_greedy(enc, {}, reference_budget);
    ManifestEntry e;
    e.id = id;
    e.source = std::filesystem::absolute(path);
    e.reference = reference_model.vocabulary().detokenize(out.tokens);
    manifest.entries.push_back(std::move(e));
  }
  save_manifest(dir / "manifest.jsonl", manifest);
  return manifest;
}

}  // namespace simulst
