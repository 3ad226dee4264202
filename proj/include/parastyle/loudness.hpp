#pragma once

// Integrated loudness (LUFS) after ITU-R BS.1770-4: K-weighting, 400 ms
// gating blocks with 75 % overlap, absolute gate at -70 LUFS and relative
// gate 10 LU below the absolute-gated level.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "parastyle/audio.hpp"
#include "parastyle/error.hpp"

namespace parastyle::loudness {

inline constexpr double kBlockSeconds = 0.4;
inline constexpr double kHopSeconds = 0.1;
inline constexpr double kAbsoluteGateLufs = -70.0;
inline constexpr double kRelativeGateLu = -10.0;
inline constexpr double kLoudnessOffset = -0.691;

/// Direct-form-I biquad, a0 normalized to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;

  double process(double x) {
    const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    return y;
  }
};

/// K-weighting pre-filter (high-shelf then RLB high-pass) designed for an
/// arbitrary sample rate from the analog prototype parameters.
struct KWeighting {
  Biquad shelf;
  Biquad highpass;

  explicit KWeighting(double rate) {
    using std::numbers::pi;
    {
      const double f0 = 1681.974450955533;
      const double gain_db = 3.999843853973347;
      const double q = 0.7071752369554196;
      const double k = std::tan(pi * f0 / rate);
      const double vh = std::pow(10.0, gain_db / 20.0);
      const double vb = std::pow(vh, 0.4996667741545416);
      const double a0 = 1.0 + k / q + k * k;
      shelf.b0 = (vh + vb * k / q + k * k) / a0;
      shelf.b1 = 2.0 * (k * k - vh) / a0;
      shelf.b2 = (vh - vb * k / q + k * k) / a0;
      shelf.a1 = 2.0 * (k * k - 1.0) / a0;
      shelf.a2 = (1.0 - k / q + k * k) / a0;
    }
    {
      const double f0 = 38.13547087602444;
      const double q = 0.5003270373238773;
      const double k = std::tan(pi * f0 / rate);
      const double a0 = 1.0 + k / q + k * k;
      highpass.b0 = 1.0;
      highpass.b1 = -2.0;
      highpass.b2 = 1.0;
      highpass.a1 = 2.0 * (k * k - 1.0) / a0;
      highpass.a2 = (1.0 - k / q + k * k) / a0;
    }
  }

  double process(double x) { return highpass.process(shelf.process(x)); }
};

/// BS.1770 channel weight for a channel index in L, R, C, LFE, Ls, Rs order.
inline double channel_weight(int index, int channels) {
  if (channels <= 3) return 1.0;
  if (index == 3) return 0.0;
  return index >= 4 ? 1.41 : 1.0;
}

/// Integrated loudness of interleaved float samples in [-1, 1].
inline double integrated_loudness(std::span<const double> interleaved, int sample_rate, int channels) {
  if (sample_rate <= 0 || channels <= 0)
    throw Error(ErrorKind::InvalidArgument, "invalid sample rate or channel count");
  const std::size_t frames = interleaved.size() / static_cast<std::size_t>(channels);
  const auto hop = static_cast<std::size_t>(std::lround(kHopSeconds * sample_rate));
  const std::size_t hops_per_block = 4;
  const std::size_t block = hop * hops_per_block;
  if (frames < block)
    throw Error(ErrorKind::TooShort, "audio shorter than one 400 ms gating block");

  // Weighted K-filtered energy per 100 ms hop; a gating block is the sum of
  // four consecutive hops.
  const std::size_t hops = frames / hop;
  std::vector<double> hop_energy(hops, 0.0);
  for (int c = 0; c < channels; ++c) {
    const double weight = channel_weight(c, channels);
    KWeighting filter(sample_rate);
    for (std::size_t h = 0; h < hops; ++h) {
      double acc = 0.0;
      for (std::size_t f = h * hop; f < (h + 1) * hop; ++f) {
        const double y = filter.process(interleaved[f * channels + c]);
        acc += y * y;
      }
      hop_energy[h] += weight * acc;
    }
  }

  const std::size_t blocks = hops - hops_per_block + 1;
  std::vector<double> block_power(blocks);
  for (std::size_t j = 0; j < blocks; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < hops_per_block; ++k) sum += hop_energy[j + k];
    block_power[j] = sum / static_cast<double>(block);
  }

  auto to_lufs = [](double power) { return kLoudnessOffset + 10.0 * std::log10(power); };

  double abs_sum = 0.0;
  std::size_t abs_count = 0;
  for (double p : block_power) {
    if (p > 0.0 && to_lufs(p) > kAbsoluteGateLufs) {
      abs_sum += p;
      ++abs_count;
    }
  }
  if (abs_count == 0) throw Error(ErrorKind::NoLoudness, "every gating block is below the absolute gate");

  const double relative_gate = to_lufs(abs_sum / abs_count) + kRelativeGateLu;
  double sum = 0.0;
  std::size_t count = 0;
  for (double p : block_power) {
    if (p <= 0.0) continue;
    const double l = to_lufs(p);
    if (l > kAbsoluteGateLufs && l > relative_gate) {
      sum += p;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorKind::NoLoudness, "every gating block is below the relative gate");
  return to_lufs(sum / count);
}

inline double measure_lufs(const AudioClip& clip) {
  std::vector<double> x(clip.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = to_float(clip.samples[i]);
  return integrated_loudness(x, clip.sample_rate, clip.channels);
}

}  // namespace parastyle::loudness

namespace parastyle {
using loudness::measure_lufs;
}
