// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <string>

#include "json.hpp"
#include "simulst/error.hpp"
#include "simulst/simulator.hpp"

namespace simulst {

void write_emission_log(std::ostream& os, const EmissionLog& log) {
  for (const auto& e : log.events) {
    nlohmann::ordered_json j;
    j["token"] = e.token;
    j["text"] = e.text;
    j["ideal_s"] = e.ideal_delay_s;
    j["wall_s"] = e.wallclock_delay_s;
    os << j.dump() << '\n';
  }
  nlohmann::ordered_json summary;
  summary["type"] = "summary";
  summary["source_duration_s"] = log.source_duration_s;
  summary["final_text"] = log.final_text;
  summary["num_events"] = log.events.size();
  os << summary.dump() << '\n';
}

void save_emission_log(const std::filesystem::path& path, const EmissionLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_emission_log(out, log);
}

EmissionLog read_emission_log(std::istream& is) {
  EmissionLog log;
  bool have_summary = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "emission log line " + std::to_string(line_no) + ": ";
    if (have_summary) throw ParseError(where + "record after summary");
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("type")) {
        if (j.at("type") != "summary") throw ParseError(where + "unknown record type");
        log.source_duration_s = j.at("source_duration_s").get<double>();
        log.final_text = j.at("final_text").get<std::string>();
        if (j.at("num_events").get<std::size_t>() != log.events.size()) {
          throw ParseError(where + "summary event count does not match");
        }
        have_summary = true;
        continue;
      }
      EmissionEvent e;
      e.token = j.at("token").get<TokenId>();
      e.text = j.at("text").get<std::string>();
      e.ideal_delay_s = j.at("ideal_s").get<double>();
      e.wallclock_delay_s = j.at("wall_s").get<double>();
      log.events.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(where + ex.what());
    }
  }
  if (!have_summary) throw ParseError("emission log has no summary record");
  return log;
}

EmissionLog load_emission_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_emission_log(in);
}

}  // namespace simulst
