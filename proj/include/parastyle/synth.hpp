#pragma once

// Parametric "speech" for offline runs: one raised-cosine tone burst per
// word at a target speaking rate and level. The carrier mixes two marker
// tones that encode an emotion label and an accent label, which
// MarkerClassifier recovers with Goertzel filters. This lets the DSP judges
// and the restricted-argmax judges run on real signal paths without any
// neural model.

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "parastyle/audio.hpp"
#include "parastyle/model.hpp"

namespace parastyle::synth {

inline const std::vector<std::string>& default_emotion_labels() {
  static const std::vector<std::string> labels = {"angry", "disgusted", "fearful", "happy",   "neutral",
                                                  "other", "sad",       "surprised", "unknown"};
  return labels;
}

inline const std::vector<std::string>& default_accent_labels() {
  static const std::vector<std::string> labels = {
      "north_american", "indian",    "british",      "australian", "irish",   "scottish",
      "welsh",          "south_african", "east_asian", "southeast_asian", "germanic", "romance",
      "slavic",         "semitic",   "northern_irish", "other"};
  return labels;
}

/// Marker frequency of label `index` in a label family.
inline double emotion_marker_hz(std::size_t index) { return 220.0 + 50.0 * static_cast<double>(index); }
inline double accent_marker_hz(std::size_t index) { return 1000.0 + 60.0 * static_cast<double>(index); }

inline std::size_t label_index(const std::vector<std::string>& labels, const std::string& label) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw Error(ErrorKind::InvalidArgument, "unknown marker label '" + label + "'");
}

struct SpeechParams {
  double wpm = 150.0;
  double level_dbfs = -20.0;  // peak level of each burst
  double emotion_hz = emotion_marker_hz(4);
  double accent_hz = accent_marker_hz(0);
};

/// Burst train of `words` words. Duration is words * 60 / wpm, rounded to
/// whole samples, so equal (words, wpm) always give equal durations.
inline AudioClip speechlike(int words, const SpeechParams& p, int sample_rate) {
  using std::numbers::pi;
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels = 1;
  if (words <= 0 || p.wpm <= 0.0) return clip;
  const double slot = 60.0 / p.wpm;
  const auto total = static_cast<std::size_t>(std::lround(words * slot * sample_rate));
  const double peak = std::pow(10.0, p.level_dbfs / 20.0);
  const double burst = 0.7 * slot;
  clip.samples.resize(total);
  for (std::size_t n = 0; n < total; ++n) {
    const double t = static_cast<double>(n) / sample_rate;
    const double within = std::fmod(t, slot);
    if (within >= burst) continue;
    const double env = 0.5 - 0.5 * std::cos(2.0 * pi * within / burst);
    const double carrier = 0.5 * std::sin(2.0 * pi * p.emotion_hz * t) + 0.5 * std::sin(2.0 * pi * p.accent_hz * t);
    clip.samples[n] = to_pcm16(peak * env * carrier);
  }
  return clip;
}

/// Signal power at `hz` over the whole clip (Goertzel).
inline double goertzel_power(const AudioClip& clip, double hz) {
  const AudioClip mono = downmix(clip);
  const double w = 2.0 * std::numbers::pi * hz / mono.sample_rate;
  const double coeff = 2.0 * std::cos(w);
  double s1 = 0.0, s2 = 0.0;
  for (auto s : mono.samples) {
    const double s0 = to_float(s) + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  return s1 * s1 + s2 * s2 - coeff * s1 * s2;
}

/// Deterministic classifier over marker tones. Probabilities are the
/// normalized Goertzel powers at each label's marker frequency.
class MarkerClassifier : public ClassifierClient {
 public:
  enum class Family { Emotion, Accent };

  explicit MarkerClassifier(Family family)
      : family_(family),
        labels_(family == Family::Emotion ? default_emotion_labels() : default_accent_labels()) {}

  LabelDistribution classify(const AudioClip& audio) override {
    if (audio.empty()) throw Error(ErrorKind::InvalidArgument, "empty audio");
    LabelDistribution d;
    d.labels = labels_;
    double sum = 0.0;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const double hz = family_ == Family::Emotion ? emotion_marker_hz(i) : accent_marker_hz(i);
      const double p = goertzel_power(audio, hz) + 1e-12;
      d.probs.push_back(p);
      sum += p;
    }
    for (auto& p : d.probs) p /= sum;
    return d;
  }

  std::string version() override {
    return family_ == Family::Emotion ? "marker-emotion@1" : "marker-accent@1";
  }

 private:
  Family family_;
  std::vector<std::string> labels_;
};

}  // namespace parastyle::synth
