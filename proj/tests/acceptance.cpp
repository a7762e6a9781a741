// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "simulst/eval.hpp"
#include "simulst/metrics.hpp"
#include "simulst/policies.hpp"
#include "simulst/simulator.hpp"
#include "simulst/synthetic.hpp"
#include "simulst/toy_model.hpp"
#include "support/scripted_adapter.hpp"

namespace {

using namespace simulst;
namespace fs = std::filesystem;

constexpr std::size_t kAlignAttInstances = 1000;
constexpr double kAlignAttBudgetS = 5.0;
constexpr std::size_t kMonotonicityMatrices = 1000;
constexpr double kLatencyTolerance = 1e-9;
constexpr std::size_t kLaalPropertyTuples = 10000;
constexpr std::size_t kLocalAgreementTrials = 10000;
constexpr std::size_t kTrendUtterances = 20;
constexpr double kTrendBudgetS = 60.0;
constexpr double kBleuTolerance = 0.1;
constexpr std::uint64_t kSuiteSeed = 7;

const std::string kMark = "\xE2\x96\x81";

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::path(SIMULST_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Criterion 1 ---------------------------------------------------------------

std::size_t alignatt_reference(const std::vector<std::size_t>& align, std::size_t n, std::size_t f,
                               std::size_t m) {
  // for i in prediction: if Align_i in {n-f+1..n} (1-based): stop; else emit.
  std::size_t out = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t one_based = align[i] + 1;
    if (one_based + f >= n + 1) break;
    ++out;
  }
  return out;
}

Outcome alignatt_oracle() {
  std::mt19937_64 rng(1001);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  for (std::size_t trial = 0; trial < kAlignAttInstances; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    const std::size_t len = rng() % 25;
    const std::size_t m = len == 0 ? 0 : rng() % (len + 1);
    const std::size_t f = 1 + rng() % (n + 3);
    std::vector<std::size_t> a(len);
    for (auto& x : a) x = rng() % n;
    const auto d = alignatt_decide({a}, n, f, m);
    const std::size_t want = alignatt_reference(a, n, f, m);
    const bool reason_ok = (d.stopped_by == StopReason::kInaccessibleFrame) == (want < m);
    if (d.commit_count != want || !reason_ok) ++mismatches;
  }
  const double secs = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu instances, %zu mismatches, %.3f s", kAlignAttInstances, mismatches, secs);
  return {mismatches == 0 && secs < kAlignAttBudgetS, buf};
}

// Criterion 2 ---------------------------------------------------------------

std::vector<std::string> german_pieces() {
  return {"</s>", kMark + "Ich", kMark + "werde", kMark + "heu", "te", kMark + "darüber", kMark + "über",
          kMark + "Klima", kMark + "sprechen"};
}

Outcome fig1_scenario() {
  testing::ScriptedAdapter a(german_pieces());
  a.script(10, {{1, 2, 3, 4, 5, 7, 8}, {1, 3, 5, 6, 8, 9, 9}, false});
  a.script(20, {{1, 2, 3, 4, 6, 7, 8}, {1, 3, 5, 6, 12, 14, 16, 19}, true});
  PolicyState p(AlignAttParams{2});
  SessionOptions o;
  o.chunk_ms = 100.0;
  SimulatedClock clock;
  const EmissionLog log = run_session(testing::blank_source(30), a, p, o, clock);
  std::vector<TokenId> t1, t2, later;
  for (const auto& e : log.events) {
    if (std::abs(e.ideal_delay_s - 0.1) < 1e-12) {
      t1.push_back(e.token);
    } else if (std::abs(e.ideal_delay_s - 0.2) < 1e-12) {
      t2.push_back(e.token);
    } else {
      later.push_back(e.token);
    }
  }
  const std::string s1 = detokenize(a.vocabulary(), t1), s2 = detokenize(a.vocabulary(), t2);
  const bool ok = s1 == "Ich werde heute" && s2 == "über Klima sprechen" && later.empty();
  return {ok, "t1=\"" + s1 + "\" t2=\"" + s2 + "\""};
}

// Criterion 3 ---------------------------------------------------------------

Outcome monotonicity() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t alignatt_violations = 0, edatt_violations = 0;
  for (std::size_t trial = 0; trial < kMonotonicityMatrices; ++trial) {
    const std::size_t m = 1 + rng() % 10, n = 1 + rng() % 30;
    Matrix w(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += (w(i, j) = std::pow(u(rng), 4.0));
      for (std::size_t j = 0; j < n; ++j) w(i, j) /= s;
    }
    const AttentionMatrix a(w);
    const AlignmentVector align = compute_alignment(a);
    std::size_t prev = m;
    for (std::size_t f = 1; f <= n + 1; ++f) {
      const std::size_t c = alignatt_decide(align, n, f, m).commit_count;
      if (c > prev) ++alignatt_violations;
      prev = c;
    }
    const std::size_t lambda = 1 + rng() % 4;
    std::size_t last = 0;
    for (int step = 1; step <= 100; ++step) {
      const std::size_t c = edatt_decide(a, step / 100.0, lambda, m).commit_count;
      if (c < last) ++edatt_violations;
      last = c;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu matrices each; AlignAtt violations %zu, EDAtt violations %zu",
                kMonotonicityMatrices, alignatt_violations, edatt_violations);
  return {alignatt_violations == 0 && edatt_violations == 0, buf};
}

// Criterion 4 ---------------------------------------------------------------

Outcome latency_oracle() {
  const double e1 = *laal(std::vector<double>{2.0}, 2.0, 1, 1);
  const double e2 = *laal(std::vector<double>{1.0, 2.0}, 2.0, 2, 2);
  const std::vector<double> over{0.5, 1.0, 1.5, 2.0};
  const double e3 = *laal(over, 2.0, 2, 4);
  const double e3_al = *average_lagging(over, 2.0, 2);
  const bool examples = std::abs(e1 - 2.0) <= kLatencyTolerance && std::abs(e2 - 1.0) <= kLatencyTolerance &&
                        std::abs(e3 - 0.5) <= kLatencyTolerance && std::abs(e3_al + 0.25) <= kLatencyTolerance;
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  for (std::size_t trial = 0; trial < kLaalPropertyTuples; ++trial) {
    const double T = 0.1 + 10.0 * u(rng);
    const std::size_t hyp = 1 + rng() % 30, ref = 1 + rng() % 30;
    std::vector<double> d(hyp);
    for (auto& x : d) x = 1.3 * T * u(rng);
    std::sort(d.begin(), d.end());
    if (*laal(d, T, ref, hyp) < *average_lagging(d, T, ref) - 1e-12) ++violations;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "examples %.12g %.12g %.12g (AL %.12g); LAAL<AL in %zu of %zu tuples", e1, e2, e3,
                e3_al, violations, kLaalPropertyTuples);
  return {examples && violations == 0, buf};
}

// Criterion 5 ---------------------------------------------------------------

Outcome waitk_law() {
  std::mt19937_64 rng(5005);
  std::size_t violations = 0, steps = 0, sessions = 0, words_before_flush = 0;
  const auto pieces = german_pieces();
  for (std::size_t k = 2; k <= 7; ++k) {
    for (int rep = 0; rep < 20; ++rep) {
      testing::ScriptedAdapter a(pieces);
      std::vector<TokenId> hyp;
      const std::size_t len = 5 + rng() % 30;
      for (std::size_t i = 0; i < len; ++i) hyp.push_back(static_cast<TokenId>(1 + rng() % (pieces.size() - 1)));
      a.script(0, {hyp, {}, true});
      // Detected words grow irregularly with the received frames.
      std::vector<std::size_t> jumps(400);
      std::size_t acc = 0;
      for (auto& j : jumps) j = (acc += (rng() % 7 == 0) ? 1 + rng() % 2 : 0);
      a.word_counter([jumps](std::size_t frames) { return jumps[std::min(frames, jumps.size() - 1)]; });
      PolicyState p(WaitKParams{k});
      SessionOptions o;
      o.chunk_ms = 10.0 * static_cast<double>(5 + rng() % 40);
      SimulatedClock clock;
      SessionTrace trace;
      run_session(testing::blank_source(100 + rng() % 300), a, p, o, clock, &trace);
      ++sessions;
      for (const auto& st : trace.steps) {
        if (st.final_flush) continue;
        ++steps;
        const std::size_t cap = st.source_words + 1 > k ? st.source_words + 1 - k : 0;
        if (st.target_words > cap) ++violations;
      }
      for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
        if (!it->final_flush) {
          words_before_flush += it->target_words;
          break;
        }
      }
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "k=2..7, %zu sessions, %zu read steps, %zu words emitted mid-stream, %zu violations",
                sessions, steps, words_before_flush, violations);
  return {violations == 0 && words_before_flush > 0, buf};
}

// Criterion 6 ---------------------------------------------------------------

Outcome local_agreement_safety() {
  std::mt19937_64 rng(6006);
  std::size_t violations = 0, committed_tokens = 0;
  for (std::size_t trial = 0; trial < kLocalAgreementTrials; ++trial) {
    const std::size_t alphabet = 2 + rng() % 4;
    std::vector<TokenId> prev(rng() % 12), cur;
    for (auto& t : prev) t = static_cast<TokenId>(rng() % alphabet);
    const std::size_t keep = prev.empty() ? 0 : rng() % (prev.size() + 1);
    cur.assign(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(keep));
    for (std::size_t extra = rng() % 8; extra > 0; --extra) cur.push_back(static_cast<TokenId>(rng() % alphabet));
    const std::size_t committed = rng() % (std::min(prev.size(), cur.size()) + 1);
    std::size_t true_lcp = 0;
    while (true_lcp < prev.size() && true_lcp < cur.size() && prev[true_lcp] == cur[true_lcp]) ++true_lcp;
    const auto d = local_agreement_prefix(std::optional<std::vector<TokenId>>(prev), cur, committed);
    for (std::size_t i = committed; i < committed + d.commit_count; ++i) {
      ++committed_tokens;
      if (i >= prev.size() || i >= cur.size() || prev[i] != cur[i]) ++violations;
    }
    if (committed + d.commit_count > std::max(true_lcp, committed)) ++violations;
    if (local_agreement_prefix(std::nullopt, cur, committed).commit_count != 0) ++violations;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu trials, %zu committed tokens checked, %zu violations", kLocalAgreementTrials,
                committed_tokens, violations);
  return {violations == 0, buf};
}

// Criterion 7 ---------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SIMULST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end_determinism() {
  const fs::path root = workdir("determinism");
  if (run_cli("make-synthetic --out-dir " + (root / "suite").string() + " --count 3") != 0) {
    return {false, "make-synthetic failed"};
  }
  const std::string manifest = (root / "suite" / "manifest.jsonl").string();
  const std::string flags = " --policy alignatt --f 4 --seed 1234 --clock simulated";
  const int rc_a = run_cli("run --manifest " + manifest + flags + " --out " + (root / "a").string());
  const int rc_b = run_cli("run --manifest " + manifest + flags + " --out " + (root / "b").string());
  if (rc_a != 0 || rc_b != 0) return {false, "run exited non-zero"};
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    ++files;
    if (!fs::exists(root / "b" / rel) || slurp(entry.path()) != slurp(root / "b" / rel)) ++differing;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu output files compared, %zu differ", files, differing);
  return {files == 4 && differing == 0, buf};
}

// Criterion 8 ---------------------------------------------------------------

Outcome desk_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = workdir("trend");
  SessionConfig base;
  const auto reference = make_adapter(base.adapter);
  const Manifest m = make_synthetic_suite(root / "suite", kTrendUtterances, kSuiteSeed, *reference);
  double mean_laal[2] = {0, 0};
  std::size_t ca_violations = 0, scored = 0;
  const std::size_t grid[2] = {2, 14};
  for (int g = 0; g < 2; ++g) {
    SessionConfig c = base;
    c.policy = AlignAttParams{grid[g]};
    const EvalResult r = run_eval(m, c, root / "runs");
    if (r.num_failed() != 0) return {false, "sessions failed"};
    mean_laal[g] = r.aggregate["laal_s"].get<double>();
    for (const auto& u : r.utterances) {
      if (!u.latency) continue;
      ++scored;
      if (u.latency->laal_ca_s < u.latency->laal_s) ++ca_violations;
    }
  }
  const CurveTable t = sweep(m, base, {2, 14});
  const bool table_ok = t.rows.size() == 2 && t.rows[0].laal_s == mean_laal[0] && t.rows[1].laal_s == mean_laal[1];
  const double secs = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "LAAL(f=2)=%.4f s, LAAL(f=14)=%.4f s, CA<ideal on %zu of %zu, %.2f s",
                mean_laal[0], mean_laal[1], ca_violations, scored, secs);
  return {mean_laal[0] < mean_laal[1] && ca_violations == 0 && scored == 2 * kTrendUtterances && table_ok &&
              secs < kTrendBudgetS,
          buf};
}

// Criterion 9 ---------------------------------------------------------------

Outcome bleu_spot_check() {
  // Reference values from sacreBLEU 2.x sentence_bleu with default settings.
  const double cat = bleu("the cat sat", "the cat sat down").bleu;
  const double same = bleu("the cat sat on the mat", "the cat sat on the mat").bleu;
  const double disjoint = bleu("a b c", "x y z").bleu;
  const bool ok = std::abs(cat - 71.65313105737896) <= kBleuTolerance && std::abs(same - 100.0) <= kBleuTolerance &&
                  std::abs(disjoint - 0.0) <= kBleuTolerance;
  char buf[128];
  std::snprintf(buf, sizeof buf, "cat-sat %.4f, identity %.4f, disjoint %.4f", cat, same, disjoint);
  return {ok, buf};
}

// Criterion 10 --------------------------------------------------------------

// Forwards to the toy model, then overwrites every head of one layer so that
// each candidate row attends the last encoder frame.
class MarkedAdapter final : public ModelAdapter {
 public:
  MarkedAdapter(const ModelAdapter& inner, std::optional<std::size_t> marked_layer)
      : inner_(inner), layer_(marked_layer) {}

  const Vocabulary& vocabulary() const override { return inner_.vocabulary(); }
  std::size_t num_layers() const override { return inner_.num_layers(); }
  std::size_t num_heads() const override { return inner_.num_heads(); }
  std::size_t feature_dim() const override { return inner_.feature_dim(); }
  EncoderStates encode(const FeatureMatrix& raw) const override { return inner_.encode(raw); }
  std::size_t count_source_words(const FeatureMatrix& raw) const override { return inner_.count_source_words(raw); }

  DecodeResult decode_greedy(const EncoderStates& enc, std::span<const TokenId> prefix,
                             std::size_t max_new) const override {
    DecodeResult out = inner_.decode_greedy(enc, prefix, max_new);
    if (!layer_) return out;
    const std::size_t n = enc.num_frames();
    for (std::size_t h = 0; h < out.attention.num_heads(); ++h) {
      Matrix w = out.attention.at(*layer_, h).weights();
      for (std::size_t i = prefix.size(); i < w.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) w(i, j) = j + 1 == n ? 1.0 : 0.0;
      }
      out.attention.at(*layer_, h) = AttentionMatrix(std::move(w));
    }
    return out;
  }

 private:
  const ModelAdapter& inner_;
  std::optional<std::size_t> layer_;
};

std::vector<PolicyDecision> decisions(const ModelAdapter& adapter, const FeatureMatrix& src, std::size_t layer) {
  PolicyState p(AlignAttParams{4});
  SessionOptions o;
  o.chunk_ms = 500.0;
  o.attention_layer = layer;
  SimulatedClock clock;
  SessionTrace trace;
  run_session(src, adapter, p, o, clock, &trace);
  std::vector<PolicyDecision> out;
  for (const auto& st : trace.steps) {
    if (!st.final_flush) out.push_back(st.decision);
  }
  return out;
}

Outcome attention_convention() {
  SessionConfig c;
  c.adapter.decoder_layers = 6;
  c.adapter.decoder_heads = 8;
  const auto toy = make_adapter(c.adapter);
  const std::size_t layer = resolve_attention_layer(c, *toy);
  const FeatureMatrix src = synthesize_utterance(12);
  const auto base = decisions(*toy, src, layer);
  std::size_t base_commits = 0;
  for (const auto& d : base) base_commits += d.commit_count;

  const auto marked3 = decisions(MarkedAdapter(*toy, 3), src, layer);
  const auto marked2 = decisions(MarkedAdapter(*toy, 2), src, layer);
  const auto marked4 = decisions(MarkedAdapter(*toy, 4), src, layer);
  std::size_t marked3_commits = 0;
  for (const auto& d : marked3) marked3_commits += d.commit_count;

  const bool flipped = base_commits > 0 && marked3_commits == 0 && marked3 != base;
  const bool others_inert = marked2 == base && marked4 == base;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "layer used %zu; commits before flush: baseline %zu, marker@3 %zu; marker@2,@4 unchanged: %s", layer,
                base_commits, marked3_commits, others_inert ? "yes" : "no");
  return {layer == 3 && flipped && others_inert, buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {"alignatt matches the reference stopping loop", alignatt_oracle},
      {"two-step German example commits in two stages", fig1_scenario},
      {"AlignAtt/EDAtt monotonicity", monotonicity},
      {"LAAL/AL oracle and LAAL >= AL", latency_oracle},
      {"wait-k schedule law", waitk_law},
      {"Local Agreement safety", local_agreement_safety},
      {"end-to-end determinism of run", end_to_end_determinism},
      {"desk-scale latency trend", desk_trend},
      {"BLEU compatibility", bleu_spot_check},
      {"policy reads the head-mean of layer 3", attention_convention},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d. %s -- %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
