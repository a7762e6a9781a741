// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/eval.hpp"

#include <omp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "simulst/error.hpp"

namespace simulst {

std::size_t resolve_attention_layer(const SessionConfig& c, const ModelAdapter& adapter) {
  if (c.attention_layer) {
    if (*c.attention_layer >= adapter.num_layers()) {
      throw ArgumentError("attention_layer " + std::to_string(*c.attention_layer) + " out of range for a " +
                          std::to_string(adapter.num_layers()) + "-layer decoder");
    }
    return *c.attention_layer;
  }
  return std::min(kDefaultAttentionLayer, adapter.num_layers() - 1);
}

std::unique_ptr<ModelAdapter> make_adapter(const AdapterSpec& spec) {
  return std::make_unique<ToyModel>(spec.toy_options());
}

std::size_t EvalResult::num_failed() const {
  return static_cast<std::size_t>(
      std::count_if(utterances.begin(), utterances.end(), [](const UtteranceResult& u) { return !u.ok; }));
}

namespace {

void attach_latency(UtteranceResult& r) {
  r.latency = latency_report(r.log, count_text_words(r.reference));
}

UtteranceResult run_one(const ManifestEntry& entry, const SessionConfig& config, const ModelAdapter& adapter,
                        const CmvnStats* cmvn, std::size_t layer) {
  UtteranceResult r;
  r.id = entry.id;
  r.reference = entry.reference;
  try {
    const FeatureMatrix source = load_source(entry, cmvn);
    PolicyState policy(config.policy);
    SessionOptions opts;
    opts.chunk_ms = config.chunk_ms;
    opts.max_new = config.max_new;
    opts.attention_layer = layer;
    opts.costs = config.costs;
    SimulatedClock simulated;
    RealClock real;
    Clock& clock = config.clock == ClockMode::kSimulated ? static_cast<Clock&>(simulated) : real;
    r.log = run_session(source, adapter, policy, opts, clock);
    r.ok = true;
    attach_latency(r);
  } catch (const SessionError& e) {
    r.error = e.what();
    r.log = e.partial_log();
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace

nlohmann::json aggregate_results(const std::vector<UtteranceResult>& results) {
  using nlohmann::ordered_json;
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  std::vector<double> al, laal_v, al_ca, laal_ca;
  ordered_json per = ordered_json::array();
  ordered_json failures = ordered_json::array();
  for (const auto& r : results) {
    if (!r.ok) {
      failures.push_back({{"id", r.id}, {"error", r.error}});
      continue;
    }
    hyps.push_back(r.log.final_text);
    refs.push_back(r.reference);
    ordered_json u;
    u["id"] = r.id;
    u["hypothesis"] = r.log.final_text;
    u["bleu"] = bleu(r.log.final_text, r.reference).bleu;
    if (r.latency) {
      al.push_back(r.latency->al_s);
      laal_v.push_back(r.latency->laal_s);
      al_ca.push_back(r.latency->al_ca_s);
      laal_ca.push_back(r.latency->laal_ca_s);
      u["al_s"] = r.latency->al_s;
      u["laal_s"] = r.latency->laal_s;
      u["al_ca_s"] = r.latency->al_ca_s;
      u["laal_ca_s"] = r.latency->laal_ca_s;
    } else {
      u["al_s"] = nullptr;
      u["laal_s"] = nullptr;
      u["al_ca_s"] = nullptr;
      u["laal_ca_s"] = nullptr;
    }
    per.push_back(std::move(u));
  }
  ordered_json agg;
  agg["num_utterances"] = results.size();
  agg["num_ok"] = results.size() - failures.size();
  agg["num_failed"] = failures.size();
  agg["num_scored_latency"] = laal_v.size();
  agg["bleu"] = hyps.empty() ? 0.0 : corpus_bleu(hyps, refs).bleu;
  agg["al_s"] = mean_of(al);
  agg["laal_s"] = mean_of(laal_v);
  agg["al_ca_s"] = mean_of(al_ca);
  agg["laal_ca_s"] = mean_of(laal_ca);
  agg["failures"] = std::move(failures);
  agg["utterances"] = std::move(per);
  return nlohmann::json(agg);
}

EvalResult run_eval(const Manifest& manifest, const SessionConfig& config,
                    const std::optional<std::filesystem::path>& out_dir) {
  if (manifest.entries.empty()) throw ArgumentError("manifest has no entries");
  validate(config.policy);
  const auto adapter = make_adapter(config.adapter);
  const std::size_t layer = resolve_attention_layer(config, *adapter);
  std::optional<CmvnStats> cmvn;
  if (config.cmvn) cmvn = load_cmvn_stats(*config.cmvn);

  EvalResult result;
  result.run_id = run_id(config);
  result.utterances.resize(manifest.entries.size());
  const auto n = static_cast<std::ptrdiff_t>(manifest.entries.size());
  const std::size_t workers = resolve_workers(config.workers);
  const int threads = workers > 0 ? static_cast<int>(workers) : omp_get_max_threads();
  const CmvnStats* stats = cmvn ? &*cmvn : nullptr;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    result.utterances[idx] = run_one(manifest.entries[idx], config, *adapter, stats, layer);
  }

  result.aggregate = aggregate_results(result.utterances);
  result.aggregate["run_id"] = result.run_id;
  result.aggregate["config"] = config_to_json(config);

  if (out_dir) {
    const auto dir = *out_dir / result.run_id;
    std::filesystem::create_directories(dir);
    for (const auto& u : result.utterances) {
      if (!u.ok) continue;
      save_emission_log(dir / (u.id + ".jsonl"), u.log);
    }
    write_text(dir / "aggregate.json", result.aggregate.dump(2) + "\n");
  }
  return result;
}

EvalResult score_logs(const Manifest& manifest, const std::filesystem::path& logs_dir) {
  EvalResult result;
  result.run_id = logs_dir.filename().string();
  for (const auto& entry : manifest.entries) {
    UtteranceResult r;
    r.id = entry.id;
    r.reference = entry.reference;
    try {
      r.log = load_emission_log(logs_dir / (entry.id + ".jsonl"));
      r.ok = true;
      attach_latency(r);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    result.utterances.push_back(std::move(r));
  }
  result.aggregate = aggregate_results(result.utterances);
  return result;
}

CurveRow curve_row(double param, const nlohmann::json& aggregate) {
  CurveRow row;
  row.param = param;
  row.bleu = aggregate.at("bleu").get<double>();
  row.laal_s = aggregate.at("laal_s").get<double>();
  row.laal_ca_s = aggregate.at("laal_ca_s").get<double>();
  row.al_s = aggregate.at("al_s").get<double>();
  return row;
}

CurveTable sweep(const Manifest& manifest, const SessionConfig& base, const std::vector<double>& grid,
                 const std::optional<std::filesystem::path>& out_dir, std::optional<double> laal_cap_s) {
  if (grid.empty()) throw ArgumentError("sweep grid is empty");
  std::vector<double> points = grid;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  CurveTable table;
  table.param_name = sweep_parameter(base.policy);
  for (double p : points) {
    SessionConfig c = base;
    c.policy = with_policy_parameter(base.policy, p);
    const EvalResult r = run_eval(manifest, c, out_dir);
    const CurveRow row = curve_row(p, r.aggregate);
    if (laal_cap_s && row.laal_ca_s > *laal_cap_s) continue;
    table.rows.push_back(row);
  }
  return table;
}

std::string curve_csv(const CurveTable& t) {
  std::ostringstream os;
  os.precision(10);
  os << "param,bleu,laal_s,laal_ca_s,al_s\n";
  for (const auto& r : t.rows) {
    os << r.param << ',' << r.bleu << ',' << r.laal_s << ',' << r.laal_ca_s << ',' << r.al_s << '\n';
  }
  return os.str();
}

}  // namespace simulst
