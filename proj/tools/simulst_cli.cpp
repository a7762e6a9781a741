// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: run, sweep, score, extract-features, make-synthetic.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simulst/error.hpp"
#include "simulst/eval.hpp"
#include "simulst/synthetic.hpp"

namespace {

using nlohmann::json;
using namespace simulst;

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;
constexpr int kExitUsage = 2;
constexpr double kDefaultLaalCapS = 3.5;

// Every optional flag mirrors one config key. Unset flags leave the file value alone.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> policy;
  std::optional<std::size_t> f, lambda, k, la_window;
  std::optional<double> alpha, ts_ms, chunk_ms;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> decoder_layers, decoder_heads;
  std::optional<double> frames_per_token;
  std::optional<std::size_t> attention_layer, max_new, workers;
  std::optional<std::string> clock, cmvn;
  std::optional<double> encode_cost, decode_cost, word_count_cost;
  std::optional<double> laal_cap;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file; flags override its keys");
    app->add_option("--policy", policy, "alignatt | edatt | waitk | local_agreement");
    app->add_option("--f", f, "AlignAtt frame threshold");
    app->add_option("--alpha", alpha, "EDAtt attention threshold");
    app->add_option("--lambda", lambda, "EDAtt number of last frames");
    app->add_option("--k", k, "wait-k lag in words");
    app->add_option("--ts-ms", ts_ms, "Local Agreement chunk size in ms");
    app->add_option("--la-window", la_window, "Local Agreement number of agreeing hypotheses");
    app->add_option("--chunk-ms", chunk_ms, "speech chunk size in ms");
    app->add_option("--seed", seed, "toy adapter seed");
    app->add_option("--decoder-layers", decoder_layers, "toy adapter decoder layers");
    app->add_option("--decoder-heads", decoder_heads, "toy adapter attention heads");
    app->add_option("--frames-per-token", frames_per_token, "toy adapter source frames per target token");
    app->add_option("--attention-layer", attention_layer, "0-based decoder layer feeding the policy");
    app->add_option("--max-new", max_new, "decode budget per step");
    app->add_option("--clock", clock, "simulated | real");
    app->add_option("--encode-cost-s", encode_cost, "simulated clock: seconds per encoder call");
    app->add_option("--decode-cost-s", decode_cost, "simulated clock: seconds per decoded position");
    app->add_option("--word-count-cost-s", word_count_cost, "simulated clock: seconds per word count");
    app->add_option("--laal-cap-s", laal_cap, "reporting cap on computation-aware LAAL");
    app->add_option("--cmvn", cmvn, "global CMVN stats applied to WAV sources");
    app->add_option("--workers", workers, "parallel utterances (0: SIMULST_WORKERS or all cores)");
  }

  SessionConfig resolve() const {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ArgumentError("cannot open config " + config_path);
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ArgumentError("config " + config_path + ": " + e.what());
      }
      if (!j.is_object()) throw ArgumentError("config " + config_path + " is not a JSON object");
    }
    if (policy && j.value("policy", std::string()) != *policy) {
      for (const char* key : {"f", "alpha", "lambda", "k", "ts_ms", "la_window"}) j.erase(key);
      j["policy"] = *policy;
    }
    if (!j.contains("policy")) j["policy"] = "alignatt";
    const auto set = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    set("f", f);
    set("alpha", alpha);
    set("lambda", lambda);
    set("k", k);
    set("ts_ms", ts_ms);
    set("la_window", la_window);
    set("chunk_ms", chunk_ms);
    set("attention_layer", attention_layer);
    set("max_new", max_new);
    set("clock", clock);
    set("laal_cap_s", laal_cap);
    set("cmvn", cmvn);
    set("workers", workers);
    if (seed || decoder_layers || decoder_heads || frames_per_token) {
      if (!j.contains("adapter")) j["adapter"] = json::object();
      auto& a = j["adapter"];
      if (seed) a["seed"] = *seed;
      if (decoder_layers) a["decoder_layers"] = *decoder_layers;
      if (decoder_heads) a["decoder_heads"] = *decoder_heads;
      if (frames_per_token) a["frames_per_token"] = *frames_per_token;
    }
    if (encode_cost || decode_cost || word_count_cost) {
      if (!j.contains("costs")) j["costs"] = json::object();
      auto& c = j["costs"];
      if (encode_cost) c["encode_s"] = *encode_cost;
      if (decode_cost) c["decode_token_s"] = *decode_cost;
      if (word_count_cost) c["word_count_s"] = *word_count_cost;
    }
    return config_from_json(j);
  }
};

void print_summary(const EvalResult& r) {
  const auto& a = r.aggregate;
  std::printf("%s: %zu ok, %zu failed, BLEU %.2f, LAAL %.3f s, LAAL(ca) %.3f s, AL %.3f s\n", r.run_id.c_str(),
              a["num_ok"].get<std::size_t>(), a["num_failed"].get<std::size_t>(), a["bleu"].get<double>(),
              a["laal_s"].get<double>(), a["laal_ca_s"].get<double>(), a["al_s"].get<double>());
  for (const auto& u : r.utterances) {
    if (!u.ok) std::fprintf(stderr, "failed %s: %s\n", u.id.c_str(), u.error.c_str());
  }
}

int exit_code_for(const EvalResult& r) { return r.num_failed() == 0 ? kExitOk : kExitFailures; }

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size()) throw ArgumentError("bad grid value '" + item + "'");
      grid.push_back(v);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (grid.empty()) throw ArgumentError("sweep grid is empty");
  return grid;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

FeatureMatrix concat_rows(const std::vector<FeatureMatrix>& parts) {
  std::size_t frames = 0;
  for (const auto& p : parts) frames += p.frames();
  const std::size_t dim = parts.front().dim();
  std::vector<float> data;
  data.reserve(frames * dim);
  for (const auto& p : parts) {
    if (p.dim() != dim) throw DimensionError("inputs have different feature dimensions");
    data.insert(data.end(), p.data().begin(), p.data().end());
  }
  return FeatureMatrix(frames, dim, std::move(data), parts.front().frame_shift_ms());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulst: simultaneous speech translation policy simulator"};
  app.require_subcommand(1);

  std::string manifest_path;
  std::string out_dir;

  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "run one configuration over a manifest");
  run->add_option("--manifest", manifest_path, "JSON-lines manifest")->required();
  run->add_option("--out", out_dir, "output root; logs go to <out>/<run_id>/");
  run_flags.attach(run);

  ConfigFlags sweep_flags;
  std::string grid_text;
  std::string csv_path;
  bool no_cap = false;
  auto* sw = app.add_subcommand("sweep", "sweep the policy hyperparameter and emit a curve table");
  sw->add_option("--manifest", manifest_path, "JSON-lines manifest")->required();
  sw->add_option("--out", out_dir, "output root for per-point runs");
  sw->add_option("--grid", grid_text, "comma-separated hyperparameter values")->required();
  sw->add_option("--csv", csv_path, "write the curve table here instead of stdout");
  sw->add_flag("--no-laal-cap", no_cap, "keep every row regardless of LAAL");
  sweep_flags.attach(sw);

  std::string logs_dir;
  std::string score_out;
  auto* score = app.add_subcommand("score", "score existing emission logs");
  score->add_option("--manifest", manifest_path, "JSON-lines manifest")->required();
  score->add_option("--logs", logs_dir, "directory holding <id>.jsonl logs")->required();
  score->add_option("--output", score_out, "write the aggregate JSON here instead of stdout");

  std::vector<std::string> wav_inputs;
  std::string feat_out_dir;
  std::string apply_cmvn;
  std::string save_cmvn;
  std::size_t mel_bins = kDefaultMelBins;
  auto* extract = app.add_subcommand("extract-features", "WAV to log-Mel feature files");
  extract->add_option("inputs", wav_inputs, "mono 16-bit WAV files")->required();
  extract->add_option("--out-dir", feat_out_dir, "where <stem>.sgfb files are written")->required();
  extract->add_option("--cmvn", apply_cmvn, "apply these global CMVN stats");
  extract->add_option("--save-cmvn", save_cmvn, "compute global CMVN stats over the inputs and save them");
  extract->add_option("--mel-bins", mel_bins, "number of mel filters");

  std::size_t synth_count = 3;
  std::uint64_t synth_seed = 7;
  AdapterSpec synth_adapter;
  auto* synth = app.add_subcommand("make-synthetic", "write a seeded synthetic feature suite and manifest");
  synth->add_option("--out-dir", feat_out_dir, "suite directory")->required();
  synth->add_option("--count", synth_count, "number of utterances");
  synth->add_option("--suite-seed", synth_seed, "seed of the synthetic audio");
  synth->add_option("--seed", synth_adapter.seed, "toy adapter seed used for the references");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      const SessionConfig config = run_flags.resolve();
      const Manifest manifest = load_manifest(manifest_path);
      const EvalResult r = run_eval(manifest, config,
                                    out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir));
      print_summary(r);
      return exit_code_for(r);
    }
    if (*sw) {
      const SessionConfig config = sweep_flags.resolve();
      const std::vector<double> grid = parse_grid(grid_text);
      std::optional<double> cap = config.laal_cap_s ? config.laal_cap_s : std::optional<double>(kDefaultLaalCapS);
      if (no_cap) cap.reset();
      const Manifest manifest = load_manifest(manifest_path);
      const CurveTable table = sweep(manifest, config, grid,
                                     out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir), cap);
      const std::string csv = curve_csv(table);
      if (csv_path.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        write_file(csv_path, csv);
      }
      return kExitOk;
    }
    if (*score) {
      const Manifest manifest = load_manifest(manifest_path);
      const EvalResult r = score_logs(manifest, logs_dir);
      const std::string text = r.aggregate.dump(2) + "\n";
      if (score_out.empty()) {
        std::fputs(text.c_str(), stdout);
      } else {
        write_file(score_out, text);
      }
      for (const auto& u : r.utterances) {
        if (!u.ok) std::fprintf(stderr, "failed %s: %s\n", u.id.c_str(), u.error.c_str());
      }
      return exit_code_for(r);
    }
    if (*extract) {
      LogMelOptions opts;
      opts.num_bins = mel_bins;
      std::vector<FeatureMatrix> feats;
      for (const auto& in : wav_inputs) {
        const PcmAudio audio = read_wav(in);
        feats.push_back(logmel(audio.samples, audio.sample_rate, opts));
      }
      if (!save_cmvn.empty()) save_cmvn_stats(save_cmvn, compute_cmvn_stats(concat_rows(feats)));
      std::optional<CmvnStats> stats;
      if (!apply_cmvn.empty()) stats = load_cmvn_stats(apply_cmvn);
      std::filesystem::create_directories(feat_out_dir);
      for (std::size_t i = 0; i < feats.size(); ++i) {
        const auto out = std::filesystem::path(feat_out_dir) / (std::filesystem::path(wav_inputs[i]).stem().string() + ".sgfb");
        write_features(out, stats ? global_cmvn(feats[i], *stats) : feats[i]);
        std::printf("%s: %zu frames\n", out.string().c_str(), feats[i].frames());
      }
      return kExitOk;
    }
    if (*synth) {
      const auto model = make_adapter(synth_adapter);
      const Manifest m = make_synthetic_suite(feat_out_dir, synth_count, synth_seed, *model);
      std::printf("wrote %zu utterances to %s\n", m.entries.size(), feat_out_dir.c_str());
      return kExitOk;
    }
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailures;
  }
  return kExitUsage;
}
