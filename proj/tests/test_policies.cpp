// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "simulst/error.hpp"
#include "simulst/policies.hpp"

using namespace simulst;

namespace {

// Straight transcription of the per-token stopping loop.
std::size_t alignatt_loop(const std::vector<std::size_t>& align, std::size_t n, std::size_t f, std::size_t m) {
  std::size_t emitted = 0;
  for (std::size_t i = 0; i < m; ++i) {
    bool inaccessible = false;
    for (std::size_t j = (f >= n ? 0 : n - f); j < n; ++j) inaccessible = inaccessible || align[i] == j;
    if (inaccessible) break;
    ++emitted;
  }
  return emitted;
}

Vocabulary pieces_vocab() {
  return Vocabulary({"</s>", "\xE2\x96\x81" "Ich", "\xE2\x96\x81" "werde", "\xE2\x96\x81" "heu", "te",
                     "\xE2\x96\x81" "über", "\xE2\x96\x81" "Klima", "\xE2\x96\x81" "spre", "chen"},
                    0);
}

}  // namespace

TEST_CASE("alignatt: worked examples") {
  CHECK(alignatt_decide({{0, 3, 5, 8}}, 10, 2, 4) == PolicyDecision{3, StopReason::kInaccessibleFrame});
  CHECK(alignatt_decide({{0, 1, 2, 3}}, 10, 2, 4) == PolicyDecision{4, StopReason::kExhausted});
  CHECK(alignatt_decide({}, 10, 2, 0).commit_count == 0);
  CHECK(alignatt_decide({{0, 1}}, 2, 2, 2).commit_count == 0);
  CHECK(alignatt_decide({{0, 1}}, 2, 5, 2) == PolicyDecision{0, StopReason::kInaccessibleFrame});
}

TEST_CASE("alignatt: errors") {
  CHECK_THROWS_AS(alignatt_decide({{0}}, 10, 0, 1), ArgumentError);
  CHECK_THROWS_AS(alignatt_decide({{10}}, 10, 2, 1), ArgumentError);
  CHECK_THROWS_AS(alignatt_decide({{0}}, 10, 2, 2), ArgumentError);
}

TEST_CASE("alignatt: Ich werde heute stops before darueber") {
  // Ich werde heu te darüber, last two of ten frames inaccessible.
  const AlignmentVector align{{1, 3, 5, 6, 8}};
  const auto d = alignatt_decide(align, 10, 2, 5);
  CHECK(d == PolicyDecision{4, StopReason::kInaccessibleFrame});
}

TEST_CASE("alignatt: random instances match the loop and shrink with f") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    const std::size_t m = rng() % 12;
    std::vector<std::size_t> a(m);
    for (auto& x : a) x = rng() % n;
    std::size_t last = m;
    for (std::size_t f = 1; f <= n + 2; ++f) {
      const auto d = alignatt_decide({a}, n, f, m);
      CHECK(d.commit_count == alignatt_loop(a, n, f, m));
      CHECK(d.commit_count <= last);
      CHECK((d.stopped_by == StopReason::kInaccessibleFrame) == (d.commit_count < m));
      last = d.commit_count;
    }
  }
}

TEST_CASE("edatt: threshold examples") {
  const AttentionMatrix a(Matrix::from_rows({{0.5, 0.45, 0.03, 0.02}, {0.4, 0.3, 0.2, 0.1}}));
  CHECK(edatt_decide(a, 0.1, 2, 2) == PolicyDecision{1, StopReason::kThreshold});
  CHECK(edatt_decide(a, 1.0, 2, 2) == PolicyDecision{2, StopReason::kExhausted});
  CHECK(edatt_decide(a, 0.1, 2, 0).commit_count == 0);
  // lambda covering every frame: a row's whole mass is recent.
  CHECK(edatt_decide(a, 1.0, 9, 2).commit_count == 0);
  CHECK_THROWS_AS(edatt_decide(a, 0.1, 0, 2), ArgumentError);
  CHECK_THROWS_AS(edatt_decide(a, 0.0, 2, 2), ArgumentError);
  CHECK_THROWS_AS(edatt_decide(a, 0.1, 2, 3), ArgumentError);
}

TEST_CASE("edatt: seeded 4x10 matrix against per-row sums") {
  const AttentionMatrix a(Matrix::from_rows(
      {{0.17214588724693763, 0.05459181242611406, 0.0788227645311869, 0.2036377907012082, 0.2536479535613164,
        0.03622889419313254, 0.020052749993702438, 0.04605894118079818, 0.09160826050238786, 0.04320494566321578},
       {0.11673266875890163, 0.12229375450847363, 0.020894704034909953, 0.112166879814859, 0.0009179143443851755,
        0.09221867748830839, 0.19343555137671284, 0.15850180649227838, 0.11833132113843263, 0.0645067220427385},
       {0.05570895537004851, 0.11952753387655181, 0.07506592186436534, 0.23622207672120296, 0.05754845384366556,
        0.07404096684961617, 0.2179238774612, 0.07245356486276713, 0.07237190735038762, 0.01913674180019501},
       {0.08376074143820761, 0.04736649413830293, 0.15936866342796419, 0.0513308684173738, 0.13872018245714257,
        0.08735278448525335, 0.08390599924148917, 0.17299174863578562, 0.16103332230826808, 0.01416919545021282}}));
  // Last-two sums: 0.1348, 0.1828, 0.0915, 0.1752.
  CHECK(edatt_decide(a, 0.2, 2, 4).commit_count == 4);
  CHECK(edatt_decide(a, 0.15, 2, 4).commit_count == 1);
  CHECK(edatt_decide(a, 0.1, 2, 4).commit_count == 0);
}

TEST_CASE("edatt: commit count grows with alpha") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng() % 8, n = 1 + rng() % 20;
    Matrix w(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += (w(i, j) = u(rng));
      for (std::size_t j = 0; j < n; ++j) w(i, j) /= s;
    }
    const AttentionMatrix a(w);
    std::size_t last = 0;
    for (double alpha = 0.05; alpha <= 1.0; alpha += 0.05) {
      const auto c = edatt_decide(a, alpha, 2, m).commit_count;
      CHECK(c >= last);
      last = c;
    }
  }
}

TEST_CASE("waitk: schedule") {
  CHECK(waitk_allowed(3, 2, 0) == 0);
  CHECK(waitk_allowed(3, 3, 0) == 1);
  CHECK(waitk_allowed(3, 7, 2) == 3);
  CHECK(waitk_allowed(3, 7, 9) == 0);
  CHECK(waitk_allowed(1, 0, 0) == 0);
}

TEST_CASE("local agreement: examples") {
  const std::vector<TokenId> abc{1, 2, 3}, abd{1, 2, 4}, abce{1, 2, 3, 5};
  CHECK(local_agreement_prefix(abc, abd, 1) == PolicyDecision{1, StopReason::kDisagreement});
  CHECK(local_agreement_prefix(std::nullopt, abd, 0).commit_count == 0);
  CHECK(local_agreement_prefix(abc, abce, 0) == PolicyDecision{3, StopReason::kDisagreement});
  CHECK(local_agreement_prefix(abc, abc, 0) == PolicyDecision{3, StopReason::kExhausted});
  CHECK(local_agreement_prefix(abc, abd, 3).commit_count == 0);
  const std::vector<std::vector<TokenId>> two{{1, 2, 3}, {1, 5}};
  CHECK(local_agreement_prefix(two, abce, 0).commit_count == 1);
}

TEST_CASE("word-granular commits for wait-k") {
  const Vocabulary v = pieces_vocab();
  const std::vector<TokenId> ich_werde_heute{1, 2, 3, 4};
  CHECK(tokens_for_complete_words(v, ich_werde_heute, false, true, 1) == 1);
  CHECK(tokens_for_complete_words(v, ich_werde_heute, false, true, 2) == 2);
  // "heu te" is only complete once something follows it or eos arrives.
  CHECK(tokens_for_complete_words(v, ich_werde_heute, false, true, 3) == 2);
  CHECK(tokens_for_complete_words(v, ich_werde_heute, true, true, 3) == 4);
  CHECK(tokens_for_complete_words(v, ich_werde_heute, false, true, 0) == 0);
  const std::vector<TokenId> tail{4, 5, 6};
  CHECK(tokens_for_complete_words(v, tail, false, false, 1) == 2);
  CHECK(tokens_for_complete_words(v, tail, false, false, 0) == 1);
  CHECK(count_words(v, ich_werde_heute) == 3);
}

TEST_CASE("policy state and validation") {
  PolicyState s(LocalAgreementParams{1000.0, 3});
  s.remember_hypothesis({1});
  s.remember_hypothesis({1, 2});
  s.remember_hypothesis({1, 2, 3});
  REQUIRE(s.history().size() == 2);
  CHECK(s.history()[0] == std::vector<TokenId>{1, 2});
  s.commit(std::vector<TokenId>{1, 2});
  s.commit(std::vector<TokenId>{3});
  CHECK(s.committed().size() == 3);
  CHECK(policy_name(EdAttParams{}) == "edatt");
  CHECK_THROWS_AS(validate(AlignAttParams{0}), ArgumentError);
  CHECK_THROWS_AS(validate(EdAttParams{1.5, 2}), ArgumentError);
  CHECK_THROWS_AS(validate(WaitKParams{0}), ArgumentError);
  CHECK_THROWS_AS(validate(LocalAgreementParams{0.0, 2}), ArgumentError);
  CHECK_NOTHROW(validate(LocalAgreementParams{}));
}
