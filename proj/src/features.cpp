// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulst/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "json.hpp"
#include "simulst/error.hpp"

namespace simulst {
namespace {

bool supported_rate(int sr) {
  return sr == 8000 || sr == 16000 || sr == 22050 || sr == 44100 || sr == 48000;
}

std::size_t next_pow2(std::size_t x) {
  std::size_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t fft_size)
      : in(fftw_alloc_real(fft_size)), out(fftw_alloc_complex(fft_size / 2 + 1)) {}
  ~FftwBuffer() {
    fftw_free(in);
    fftw_free(out);
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  double* in;
  fftw_complex* out;
};

class MelFrontEnd {
 public:
  MelFrontEnd(int sample_rate, const LogMelOptions& opts)
      : opts_(opts),
        window_(window_samples(sample_rate, opts)),
        hop_(hop_samples(sample_rate, opts)),
        fft_size_(next_pow2(window_)),
        hann_(window_),
        filters_(opts.num_bins, std::vector<double>(fft_size_ / 2 + 1, 0.0)) {
    for (std::size_t i = 0; i < window_; ++i) {
      hann_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                      static_cast<double>(window_ - 1));
    }
    const double nyquist = sample_rate / 2.0;
    const double mel_hi = hz_to_mel(nyquist);
    const double mel_step = mel_hi / static_cast<double>(opts.num_bins + 1);
    for (std::size_t b = 0; b < opts.num_bins; ++b) {
      const double left = mel_step * static_cast<double>(b);
      const double center = left + mel_step;
      const double right = center + mel_step;
      for (std::size_t k = 0; k <= fft_size_ / 2; ++k) {
        const double mel = hz_to_mel(static_cast<double>(k) * sample_rate / static_cast<double>(fft_size_));
        double w = 0.0;
        if (mel > left && mel <= center) {
          w = (mel - left) / (center - left);
        } else if (mel > center && mel < right) {
          w = (right - mel) / (right - center);
        }
        filters_[b][k] = w;
      }
    }
    FftwBuffer scratch(fft_size_);
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(fft_size_), scratch.in, scratch.out, FFTW_ESTIMATE);
  }
  ~MelFrontEnd() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  MelFrontEnd(const MelFrontEnd&) = delete;
  MelFrontEnd& operator=(const MelFrontEnd&) = delete;

  std::size_t fft_size() const { return fft_size_; }

  void compute_frame(std::span<const float> samples, std::size_t t, FftwBuffer& buf,
                     std::span<float> out) const {
    const std::size_t offset = t * hop_;
    for (std::size_t i = 0; i < window_; ++i) buf.in[i] = samples[offset + i] * hann_[i];
    std::fill(buf.in + window_, buf.in + fft_size_, 0.0);
    fftw_execute_dft_r2c(plan_, buf.in, buf.out);
    for (std::size_t b = 0; b < filters_.size(); ++b) {
      double e = 0.0;
      for (std::size_t k = 0; k <= fft_size_ / 2; ++k) {
        if (filters_[b][k] == 0.0) continue;
        const double power = buf.out[k][0] * buf.out[k][0] + buf.out[k][1] * buf.out[k][1];
        e += filters_[b][k] * power;
      }
      out[b] = static_cast<float>(std::log(std::max(e, opts_.energy_floor)));
    }
  }

 private:
  LogMelOptions opts_;
  std::size_t window_;
  std::size_t hop_;
  std::size_t fft_size_;
  std::vector<double> hann_;
  std::vector<std::vector<double>> filters_;
  fftw_plan plan_ = nullptr;
};

std::size_t checked_frame_count(std::span<const float> samples, int sample_rate, const LogMelOptions& opts) {
  if (!supported_rate(sample_rate)) {
    throw ArgumentError("unsupported sample rate " + std::to_string(sample_rate));
  }
  if (opts.num_bins == 0) throw ArgumentError("logmel: need at least one mel bin");
  const std::size_t frames = num_frames(samples.size(), sample_rate, opts);
  if (frames == 0) {
    throw ArgumentError("audio of " + std::to_string(samples.size()) + " samples is shorter than one window");
  }
  return frames;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t frames, std::size_t dim, float frame_shift_ms)
    : frames_(frames), dim_(dim), frame_shift_ms_(frame_shift_ms), data_(frames * dim, 0.0f) {}

FeatureMatrix::FeatureMatrix(std::size_t frames, std::size_t dim, std::vector<float> data, float frame_shift_ms)
    : frames_(frames), dim_(dim), frame_shift_ms_(frame_shift_ms), data_(std::move(data)) {
  if (data_.size() != frames * dim) throw DimensionError("feature data does not match T x F");
}

FeatureMatrix FeatureMatrix::head(std::size_t count) const {
  count = std::min(count, frames_);
  return FeatureMatrix(count, dim_,
                       std::vector<float>(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(count * dim_)),
                       frame_shift_ms_);
}

std::size_t window_samples(int sample_rate, const LogMelOptions& opts) {
  return static_cast<std::size_t>(sample_rate * 0.001 * opts.frame_window_ms);
}

std::size_t hop_samples(int sample_rate, const LogMelOptions& opts) {
  return static_cast<std::size_t>(sample_rate * 0.001 * opts.frame_shift_ms);
}

std::size_t num_frames(std::size_t samples, int sample_rate, const LogMelOptions& opts) {
  const std::size_t win = window_samples(sample_rate, opts);
  const std::size_t hop = hop_samples(sample_rate, opts);
  if (samples < win || hop == 0) return 0;
  return 1 + (samples - win) / hop;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

FeatureMatrix logmel(std::span<const float> samples, int sample_rate, const LogMelOptions& opts) {
  const std::size_t frames = checked_frame_count(samples, sample_rate, opts);
  const MelFrontEnd fe(sample_rate, opts);
  FeatureMatrix out(frames, opts.num_bins, opts.frame_shift_ms);
#pragma omp parallel
  {
    FftwBuffer buf(fe.fft_size());
#pragma omp for schedule(static)
    for (std::size_t t = 0; t < frames; ++t) fe.compute_frame(samples, t, buf, out.frame(t));
  }
  return out;
}

namespace serial {

FeatureMatrix logmel(std::span<const float> samples, int sample_rate, const LogMelOptions& opts) {
  const std::size_t frames = checked_frame_count(samples, sample_rate, opts);
  const MelFrontEnd fe(sample_rate, opts);
  FeatureMatrix out(frames, opts.num_bins, opts.frame_shift_ms);
  FftwBuffer buf(fe.fft_size());
  for (std::size_t t = 0; t < frames; ++t) fe.compute_frame(samples, t, buf, out.frame(t));
  return out;
}

}  // namespace serial

CmvnStats compute_cmvn_stats(const FeatureMatrix& f) {
  CmvnStats s{std::vector<double>(f.dim(), 0.0), std::vector<double>(f.dim(), 0.0)};
  if (f.frames() == 0) throw ArgumentError("cmvn stats need at least one frame");
  for (std::size_t t = 0; t < f.frames(); ++t) {
    for (std::size_t d = 0; d < f.dim(); ++d) s.mean[d] += f(t, d);
  }
  for (double& m : s.mean) m /= static_cast<double>(f.frames());
  for (std::size_t t = 0; t < f.frames(); ++t) {
    for (std::size_t d = 0; d < f.dim(); ++d) {
      const double x = f(t, d) - s.mean[d];
      s.var[d] += x * x;
    }
  }
  for (double& v : s.var) v /= static_cast<double>(f.frames());
  return s;
}

FeatureMatrix global_cmvn(const FeatureMatrix& f, const CmvnStats& stats) {
  if (stats.mean.size() != f.dim() || stats.var.size() != f.dim()) {
    throw ArgumentError("cmvn stats have dimension " + std::to_string(stats.mean.size()) + ", features " +
                        std::to_string(f.dim()));
  }
  for (double v : stats.var) {
    if (!(v > 0.0)) throw ArgumentError("cmvn variances must be positive");
  }
  FeatureMatrix out = f;
  for (std::size_t t = 0; t < f.frames(); ++t) {
    for (std::size_t d = 0; d < f.dim(); ++d) {
      out(t, d) = static_cast<float>((f(t, d) - stats.mean[d]) / std::sqrt(stats.var[d]));
    }
  }
  return out;
}

CmvnStats load_cmvn_stats(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cmvn stats " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    CmvnStats s{j.at("mean").get<std::vector<double>>(), j.at("var").get<std::vector<double>>()};
    if (s.mean.size() != s.var.size()) throw ParseError("cmvn mean and var differ in length");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad cmvn stats " + path.string() + ": " + e.what());
  }
}

void save_cmvn_stats(const std::filesystem::path& path, const CmvnStats& stats) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << nlohmann::json{{"mean", stats.mean}, {"var", stats.var}}.dump() << '\n';
}

}  // namespace simulst
