// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Batch evaluation: session configuration, corpus runs and parameter sweeps.

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "simulst/manifest.hpp"
#include "simulst/metrics.hpp"
#include "simulst/simulator.hpp"
#include "simulst/toy_model.hpp"

namespace simulst {

enum class ClockMode { kSimulated, kReal };

struct AdapterSpec {
  std::uint64_t seed = 1234;
  std::size_t decoder_layers = 2;
  std::size_t decoder_heads = 4;
  double frames_per_token = 6.0;

  ToyModelOptions toy_options() const;
};

struct SessionConfig {
  PolicyParams policy = AlignAttParams{};
  double chunk_ms = 1000.0;  // ignored by Local Agreement, which reads T_s
  AdapterSpec adapter{};
  /// Decoder layer whose head-mean feeds the policy. Unset: layer 3, or the
  /// last layer when the decoder is shallower.
  std::optional<std::size_t> attention_layer;
  std::size_t max_new = kDefaultMaxNewTokens;
  ClockMode clock = ClockMode::kSimulated;
  ComputeCosts costs{};
  std::optional<double> laal_cap_s;
  std::optional<std::filesystem::path> cmvn;
  std::size_t workers = 0;  // 0: SIMULST_WORKERS or the OpenMP default
};

nlohmann::json config_to_json(const SessionConfig& c);
/// Rejects unknown keys, keys of other policies and out-of-range values
/// with ArgumentError.
SessionConfig config_from_json(const nlohmann::json& j);
SessionConfig load_config(const std::filesystem::path& path);

/// Name of the swept hyperparameter of a policy: f, alpha, k or ts_ms.
std::string sweep_parameter(const PolicyParams& p);
double policy_parameter(const PolicyParams& p);
PolicyParams with_policy_parameter(const PolicyParams& p, double value);

/// Short content address of everything that affects results.
std::string run_id(const SessionConfig& c);

std::size_t resolve_workers(std::size_t configured);
std::size_t resolve_attention_layer(const SessionConfig& c, const ModelAdapter& adapter);
std::unique_ptr<ModelAdapter> make_adapter(const AdapterSpec& spec);

struct UtteranceResult {
  std::string id;
  bool ok = false;
  std::string error;
  EmissionLog log;
  std::string reference;
  std::optional<LatencyReport> latency;
};

struct EvalResult {
  std::string run_id;
  std::vector<UtteranceResult> utterances;  // manifest order
  nlohmann::json aggregate;

  std::size_t num_failed() const;
};

/// Runs every manifest entry. Failed entries are recorded and skipped by the
/// aggregate. With `out_dir`, writes <out_dir>/<run_id>/<id>.jsonl per
/// successful entry and <out_dir>/<run_id>/aggregate.json.
EvalResult run_eval(const Manifest& manifest, const SessionConfig& config,
                    const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Corpus record over finished sessions: corpus BLEU, macro-averaged latency.
nlohmann::json aggregate_results(const std::vector<UtteranceResult>& results);

/// Scores existing logs: <logs_dir>/<id>.jsonl for each manifest entry.
EvalResult score_logs(const Manifest& manifest, const std::filesystem::path& logs_dir);

struct CurveRow {
  double param = 0.0;
  double bleu = 0.0;
  double laal_s = 0.0;
  double laal_ca_s = 0.0;
  double al_s = 0.0;
};

struct CurveTable {
  std::string param_name;
  std::vector<CurveRow> rows;  // ascending param
};

CurveRow curve_row(double param, const nlohmann::json& aggregate);

/// One run_eval per grid value. Rows whose mean computation-aware LAAL
/// exceeds `laal_cap_s` are dropped.
CurveTable sweep(const Manifest& manifest, const SessionConfig& base, const std::vector<double>& grid,
                 const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                 std::optional<double> laal_cap_s = std::nullopt);

/// "param,bleu,laal_s,laal_ca_s,al_s" then one line per row.
std::string curve_csv(const CurveTable& t);

}  // namespace simulst
