// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

#include "simulst/error.hpp"
#include "simulst/eval.hpp"

namespace simulst {
namespace {

using nlohmann::json;

std::size_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ArgumentError(std::string("config: '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_real(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ArgumentError(std::string("config: '") + key + "' must be a number");
  return v.get<double>();
}

void require_only(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ArgumentError("config: unexpected key '" + key + "' in " + where);
  }
}

}  // namespace

ToyModelOptions AdapterSpec::toy_options() const {
  ToyModelOptions o;
  o.seed = seed;
  o.decoder_layers = decoder_layers;
  o.decoder_heads = decoder_heads;
  o.frames_per_token = frames_per_token;
  return o;
}

nlohmann::json config_to_json(const SessionConfig& c) {
  nlohmann::ordered_json j;
  j["policy"] = std::string(policy_name(c.policy));
  if (const auto* a = std::get_if<AlignAttParams>(&c.policy)) {
    j["f"] = a->f;
  } else if (const auto* e = std::get_if<EdAttParams>(&c.policy)) {
    j["alpha"] = e->alpha;
    j["lambda"] = e->lambda;
  } else if (const auto* w = std::get_if<WaitKParams>(&c.policy)) {
    j["k"] = w->k;
  } else if (const auto* l = std::get_if<LocalAgreementParams>(&c.policy)) {
    j["ts_ms"] = l->chunk_ms;
    j["la_window"] = l->window;
  }
  if (!std::holds_alternative<LocalAgreementParams>(c.policy)) j["chunk_ms"] = c.chunk_ms;
  j["adapter"] = {{"kind", "toy"},
                  {"seed", c.adapter.seed},
                  {"decoder_layers", c.adapter.decoder_layers},
                  {"decoder_heads", c.adapter.decoder_heads},
                  {"frames_per_token", c.adapter.frames_per_token}};
  if (c.attention_layer) j["attention_layer"] = *c.attention_layer;
  j["max_new"] = c.max_new;
  j["clock"] = c.clock == ClockMode::kSimulated ? "simulated" : "real";
  j["costs"] = {{"encode_s", c.costs.encode_s},
                {"decode_token_s", c.costs.decode_token_s},
                {"word_count_s", c.costs.word_count_s}};
  if (c.laal_cap_s) j["laal_cap_s"] = *c.laal_cap_s;
  if (c.cmvn) j["cmvn"] = c.cmvn->string();
  j["workers"] = c.workers;
  return nlohmann::json(j);
}

SessionConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  if (!j.contains("policy") || !j["policy"].is_string()) throw ArgumentError("config: missing 'policy'");
  const auto name = j["policy"].get<std::string>();
  std::set<std::string> allowed{"policy", "adapter", "attention_layer", "max_new", "clock",
                                "costs", "laal_cap_s", "cmvn", "workers"};
  SessionConfig c;
  try {
    if (name == "alignatt") {
      allowed.insert({"f", "chunk_ms"});
      AlignAttParams p;
      if (j.contains("f")) p.f = get_count(j, "f");
      c.policy = p;
    } else if (name == "edatt") {
      allowed.insert({"alpha", "lambda", "chunk_ms"});
      EdAttParams p;
      if (j.contains("alpha")) p.alpha = get_real(j, "alpha");
      if (j.contains("lambda")) p.lambda = get_count(j, "lambda");
      c.policy = p;
    } else if (name == "waitk") {
      allowed.insert({"k", "chunk_ms"});
      WaitKParams p;
      if (j.contains("k")) p.k = get_count(j, "k");
      c.policy = p;
    } else if (name == "local_agreement") {
      allowed.insert({"ts_ms", "la_window"});
      LocalAgreementParams p;
      if (j.contains("ts_ms")) p.chunk_ms = get_real(j, "ts_ms");
      if (j.contains("la_window")) p.window = get_count(j, "la_window");
      c.policy = p;
    } else {
      throw ArgumentError("config: unknown policy '" + name + "'");
    }
    require_only(j, allowed, "policy " + name);
    validate(c.policy);

    if (j.contains("chunk_ms")) c.chunk_ms = get_real(j, "chunk_ms");
    if (!(c.chunk_ms > 0.0) || !std::isfinite(c.chunk_ms)) throw ArgumentError("config: chunk_ms must be positive");
    if (j.contains("adapter")) {
      const auto& a = j["adapter"];
      if (!a.is_object()) throw ArgumentError("config: 'adapter' must be an object");
      require_only(a, {"kind", "seed", "decoder_layers", "decoder_heads", "frames_per_token"}, "adapter");
      if (a.contains("kind") && a["kind"] != "toy") {
        throw ArgumentError("config: unsupported adapter kind " + a["kind"].dump());
      }
      if (a.contains("seed")) c.adapter.seed = a["seed"].get<std::uint64_t>();
      if (a.contains("decoder_layers")) c.adapter.decoder_layers = get_count(a, "decoder_layers");
      if (a.contains("decoder_heads")) c.adapter.decoder_heads = get_count(a, "decoder_heads");
      if (a.contains("frames_per_token")) c.adapter.frames_per_token = get_real(a, "frames_per_token");
    }
    if (j.contains("attention_layer")) c.attention_layer = get_count(j, "attention_layer");
    if (j.contains("max_new")) c.max_new = get_count(j, "max_new");
    if (c.max_new == 0) throw ArgumentError("config: max_new must be at least 1");
    if (j.contains("clock")) {
      const auto mode = j["clock"].get<std::string>();
      if (mode == "simulated") {
        c.clock = ClockMode::kSimulated;
      } else if (mode == "real") {
        c.clock = ClockMode::kReal;
      } else {
        throw ArgumentError("config: clock must be 'simulated' or 'real'");
      }
    }
    if (j.contains("costs")) {
      const auto& k = j["costs"];
      require_only(k, {"encode_s", "decode_token_s", "word_count_s"}, "costs");
      if (k.contains("encode_s")) c.costs.encode_s = get_real(k, "encode_s");
      if (k.contains("decode_token_s")) c.costs.decode_token_s = get_real(k, "decode_token_s");
      if (k.contains("word_count_s")) c.costs.word_count_s = get_real(k, "word_count_s");
      if (c.costs.encode_s < 0 || c.costs.decode_token_s < 0 || c.costs.word_count_s < 0) {
        throw ArgumentError("config: compute costs must be non-negative");
      }
    }
    if (j.contains("laal_cap_s")) c.laal_cap_s = get_real(j, "laal_cap_s");
    if (j.contains("cmvn")) c.cmvn = j["cmvn"].get<std::string>();
    if (j.contains("workers")) c.workers = get_count(j, "workers");
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  return c;
}

SessionConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string sweep_parameter(const PolicyParams& p) {
  switch (p.index()) {
    case 0: return "f";
    case 1: return "alpha";
    case 2: return "k";
    default: return "ts_ms";
  }
}

double policy_parameter(const PolicyParams& p) {
  if (const auto* a = std::get_if<AlignAttParams>(&p)) return static_cast<double>(a->f);
  if (const auto* e = std::get_if<EdAttParams>(&p)) return e->alpha;
  if (const auto* w = std::get_if<WaitKParams>(&p)) return static_cast<double>(w->k);
  return std::get<LocalAgreementParams>(p).chunk_ms;
}

PolicyParams with_policy_parameter(const PolicyParams& p, double value) {
  const auto as_count = [&](const char* name) {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw ArgumentError(std::string(name) + " must be a positive integer, got " + std::to_string(value));
    }
    return static_cast<std::size_t>(value);
  };
  PolicyParams out = p;
  if (auto* a = std::get_if<AlignAttParams>(&out)) {
    a->f = as_count("f");
  } else if (auto* e = std::get_if<EdAttParams>(&out)) {
    e->alpha = value;
  } else if (auto* w = std::get_if<WaitKParams>(&out)) {
    w->k = as_count("k");
  } else {
    std::get<LocalAgreementParams>(out).chunk_ms = value;
  }
  validate(out);
  return out;
}

std::string run_id(const SessionConfig& c) {
  nlohmann::json j = config_to_json(c);
  j.erase("workers");
  const std::string canonical = j.dump();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  char param[32];
  std::snprintf(param, sizeof param, "%g", policy_parameter(c.policy));
  return std::string(policy_name(c.policy)) + "-" + sweep_parameter(c.policy) + param + "-" +
         std::string(hex).substr(0, 12);
}

std::size_t resolve_workers(std::size_t configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("SIMULST_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 0;
}

}  // namespace simulst
