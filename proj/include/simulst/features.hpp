// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

// Feature matrices, log-Mel extraction and global CMVN.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace simulst {

inline constexpr std::size_t kDefaultMelBins = 80;
inline constexpr float kDefaultFrameShiftMs = 10.0f;
inline constexpr float kDefaultFrameWindowMs = 25.0f;

/// T frames by F dimensions, row-major float.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t frames, std::size_t dim, float frame_shift_ms = kDefaultFrameShiftMs);
  FeatureMatrix(std::size_t frames, std::size_t dim, std::vector<float> data,
                float frame_shift_ms = kDefaultFrameShiftMs);

  std::size_t frames() const { return frames_; }
  std::size_t dim() const { return dim_; }
  float frame_shift_ms() const { return frame_shift_ms_; }
  double duration_s() const { return static_cast<double>(frames_) * frame_shift_ms_ / 1000.0; }

  float& operator()(std::size_t t, std::size_t d) { return data_[t * dim_ + d]; }
  float operator()(std::size_t t, std::size_t d) const { return data_[t * dim_ + d]; }
  std::span<const float> frame(std::size_t t) const { return {data_.data() + t * dim_, dim_}; }
  std::span<float> frame(std::size_t t) { return {data_.data() + t * dim_, dim_}; }
  std::span<const float> data() const { return data_; }

  /// The first `count` frames.
  FeatureMatrix head(std::size_t count) const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t frames_ = 0;
  std::size_t dim_ = 0;
  float frame_shift_ms_ = kDefaultFrameShiftMs;
  std::vector<float> data_;
};

struct LogMelOptions {
  std::size_t num_bins = kDefaultMelBins;
  float frame_shift_ms = kDefaultFrameShiftMs;
  float frame_window_ms = kDefaultFrameWindowMs;
  double energy_floor = 1e-10;
};

/// Samples per window and per hop for a sample rate (truncating).
std::size_t window_samples(int sample_rate, const LogMelOptions& opts = {});
std::size_t hop_samples(int sample_rate, const LogMelOptions& opts = {});
/// 1 + floor((samples - window) / hop); 0 when shorter than one window.
std::size_t num_frames(std::size_t samples, int sample_rate, const LogMelOptions& opts = {});

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Hann-windowed power spectrum through HTK triangular mel filters spanning
/// 0 Hz to Nyquist, natural log floored at `energy_floor`. Frames are
/// independent and computed in parallel.
FeatureMatrix logmel(std::span<const float> samples, int sample_rate, const LogMelOptions& opts = {});

namespace serial {
FeatureMatrix logmel(std::span<const float> samples, int sample_rate, const LogMelOptions& opts = {});
}  // namespace serial

struct CmvnStats {
  std::vector<double> mean;
  std::vector<double> var;
};

/// Per-dimension mean and (population) variance of a feature matrix.
CmvnStats compute_cmvn_stats(const FeatureMatrix& f);
FeatureMatrix global_cmvn(const FeatureMatrix& f, const CmvnStats& stats);

CmvnStats load_cmvn_stats(const std::filesystem::path& path);
void save_cmvn_stats(const std::filesystem::path& path, const CmvnStats& stats);

/// Binary feature file: "SGFB", u32 version, u32 T, u32 F, f32 frame shift,
/// then T*F little-endian f32, row-major.
void write_features(const std::filesystem::path& path, const FeatureMatrix& f);
FeatureMatrix read_features(const std::filesystem::path& path);

struct PcmAudio {
  int sample_rate = 16000;
  std::vector<float> samples;  // [-1, 1)
};

/// RIFF/WAVE, mono, 16-bit PCM.
PcmAudio read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const PcmAudio& audio);

}  // namespace simulst
