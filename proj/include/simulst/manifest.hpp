// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simulst/features.hpp"

namespace simulst {

struct ManifestEntry {
  std::string id;
  std::filesystem::path source;  // resolved against the manifest directory
  std::string reference;
  std::optional<std::string> transcript;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

/// JSON-lines, one {"id","source","reference","transcript"?} object per line.
/// Blank lines are skipped. Duplicate ids and malformed records raise
/// ParseError naming the 1-based line number.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Features for an entry. WAV sources are converted on the fly (log-Mel,
/// then global CMVN when stats are given); anything else is read as a
/// binary feature file and used as stored.
FeatureMatrix load_source(const ManifestEntry& entry, const CmvnStats* cmvn = nullptr);

}  // namespace simulst
