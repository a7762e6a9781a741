// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "simulst/error.hpp"
#include "simulst/features.hpp"

namespace simulst {
namespace {

std::uint32_t le32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t le16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

PcmAudio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& why) { return ParseError(path.string() + ": " + why); };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }
  PcmAudio audio;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw fail("chunk runs past end of file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw fail("short fmt chunk");
      const auto format = le16(bytes.data() + body);
      const auto channels = le16(bytes.data() + body + 2);
      audio.sample_rate = static_cast<int>(le32(bytes.data() + body + 4));
      const auto bits = le16(bytes.data() + body + 14);
      if (format != 1 || channels != 1 || bits != 16) throw fail("only mono 16-bit PCM is supported");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      audio.samples.resize(size / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        const auto s = static_cast<std::int16_t>(le16(bytes.data() + body + 2 * i));
        audio.samples[i] = static_cast<float>(s) / 32768.0f;
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  throw fail("no data chunk");
}

void write_wav(const std::filesystem::path& path, const PcmAudio& audio) {
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string s = "RIFF";
  put32(s, 36 + data_bytes);
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, 1);
  put16(s, 1);
  put32(s, static_cast<std::uint32_t>(audio.sample_rate));
  put32(s, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  put16(s, 2);
  put16(s, 16);
  s += "data";
  put32(s, data_bytes);
  for (float x : audio.samples) {
    const float clipped = std::clamp(x, -1.0f, 32767.0f / 32768.0f);
    put16(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(clipped * 32768.0f))));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

}  // namespace simulst
