// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/manifest.hpp"

#include <fstream>
#include <set>
#include <string>

#include "json.hpp"
#include "simulst/error.hpp"

namespace simulst {

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const auto base = std::filesystem::absolute(path).parent_path();
  Manifest m;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + "invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw ParseError(where + "record is not an object");
    ManifestEntry e;
    for (const char* key : {"id", "source", "reference"}) {
      if (!j.contains(key) || !j[key].is_string()) throw ParseError(where + "missing string field '" + key + "'");
    }
    for (const auto& [key, _] : j.items()) {
      if (key != "id" && key != "source" && key != "reference" && key != "transcript") {
        throw ParseError(where + "unknown field '" + key + "'");
      }
    }
    e.id = j["id"].get<std::string>();
    if (e.id.empty()) throw ParseError(where + "empty id");
    if (!seen.insert(e.id).second) throw ParseError(where + "duplicate id '" + e.id + "'");
    std::filesystem::path src = j["source"].get<std::string>();
    e.source = src.is_absolute() ? src : (base / src).lexically_normal();
    e.reference = j["reference"].get<std::string>();
    if (j.contains("transcript")) {
      if (!j["transcript"].is_string()) throw ParseError(where + "'transcript' must be a string");
      e.transcript = j["transcript"].get<std::string>();
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const auto base = std::filesystem::absolute(path).parent_path();
  for (const auto& e : manifest.entries) {
    nlohmann::json j;
    j["id"] = e.id;
    const auto rel = e.source.lexically_relative(base);
    j["source"] = rel.empty() ? e.source.string() : rel.string();
    j["reference"] = e.reference;
    if (e.transcript) j["transcript"] = *e.transcript;
    out << j.dump() << '\n';
  }
}

FeatureMatrix load_source(const ManifestEntry& entry, const CmvnStats* cmvn) {
  if (!std::filesystem::exists(entry.source)) throw IoError("missing source " + entry.source.string());
  if (entry.source.extension() == ".wav") {
    const PcmAudio audio = read_wav(entry.source);
    FeatureMatrix f = logmel(audio.samples, audio.sample_rate);
    return cmvn ? global_cmvn(f, *cmvn) : f;
  }
  return read_features(entry.source);
}

}  // namespace simulst
