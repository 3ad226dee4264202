#include <random>

#include <gtest/gtest.h>

#include "oracle/reference_loudness.hpp"
#include "support.hpp"

namespace ps = parastyle;
using namespace testing_support;

namespace {

std::vector<double> sine(double hz, double seconds, double amplitude, int rate) {
  std::vector<double> x(static_cast<std::size_t>(std::lround(seconds * rate)));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = amplitude * std::sin(2.0 * M_PI * hz * static_cast<double>(i) / rate);
  return x;
}

ps::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ps::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ps::ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Wav, RoundTripPreservesSamplesAndFormat) {
  std::mt19937_64 rng(3);
  for (int rate : ps::kSupportedSampleRates) {
    ps::AudioClip c;
    c.sample_rate = rate;
    c.channels = 1 + static_cast<int>(rng() % 2);
    c.samples.resize(static_cast<std::size_t>(c.channels) * (1 + rng() % 500));
    for (auto& s : c.samples) s = static_cast<std::int16_t>(rng());
    EXPECT_EQ(ps::decode_wav(ps::encode_wav(c)), c);
    EXPECT_EQ(ps::wav_from_base64(ps::wav_base64(c)), c);
  }
}

TEST(Wav, StreamedHeaderIsReadToEnd) {
  const auto c = tone(440, 0.1, 0.5, 16000);
  auto bytes = ps::encode_wav(c);
  for (int i = 0; i < 4; ++i) bytes[40 + i] = '\xff';
  EXPECT_EQ(ps::decode_wav(bytes).samples, c.samples);
}

TEST(Wav, RejectsGarbage) {
  EXPECT_EQ(kind_of([] { ps::decode_wav("not a wav at all"); }), ps::ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { ps::base64_decode("ab*d"); }), ps::ErrorKind::Parse);
}

TEST(Base64, KnownVectors) {
  EXPECT_EQ(ps::base64_encode(""), "");
  EXPECT_EQ(ps::base64_encode("f"), "Zg==");
  EXPECT_EQ(ps::base64_encode("fo"), "Zm8=");
  EXPECT_EQ(ps::base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(ps::base64_decode("Zm9vYg=="), "foob");
}

TEST(Downmix, AveragesChannels) {
  ps::AudioClip c;
  c.channels = 2;
  c.sample_rate = 16000;
  c.samples = {100, 300, -200, 0};
  const auto m = ps::downmix(c);
  EXPECT_EQ(m.channels, 1);
  EXPECT_EQ(m.samples, (std::vector<std::int16_t>{200, -100}));
}

TEST(Loudness, FullScale997HzSineMatchesReferenceMeter) {
  const auto x = sine(997.0, 10.0, 1.0, 48000);
  const double lib = ps::loudness::integrated_loudness(x, 48000, 1);
  const double ref = oracle::integrated_lufs_48k(x);
  EXPECT_NEAR(lib, ref, 0.1);
  EXPECT_NEAR(lib, -3.0103, 0.01);
  EXPECT_NEAR(ref, -3.010280, 1e-5);  // frozen reference value
}

TEST(Loudness, Pcm16PathMatchesReferenceMeter) {
  const auto clip = tone(997.0, 10.0, 1.0, 48000);
  std::vector<double> x(clip.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = ps::to_float(clip.samples[i]);
  const double ref = oracle::integrated_lufs_48k(x);
  EXPECT_NEAR(ref, -3.010545, 1e-5);  // frozen reference value
  EXPECT_NEAR(ps::measure_lufs(clip), ref, 1e-6);
}

TEST(Loudness, ScalingShiftsByGainInDecibels) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), gain_db(-30.0, 0.0);
  const std::array<int, 3> rates{16000, 24000, 48000};
  for (int trial = 0; trial < 50; ++trial) {
    const int rate = rates[rng() % rates.size()];
    const double seconds = 0.5 + 0.5 * (u(rng) + 1.0);
    std::vector<double> x(static_cast<std::size_t>(seconds * rate));
    const double hz = 100.0 + 3000.0 * (u(rng) + 1.0) / 2.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = 0.3 * std::sin(2.0 * M_PI * hz * static_cast<double>(i) / rate) + 0.2 * u(rng);
    const double g_db = gain_db(rng);
    const double g = std::pow(10.0, g_db / 20.0);
    std::vector<double> y(x);
    for (auto& v : y) v *= g;
    const double a = ps::loudness::integrated_loudness(x, rate, 1);
    const double b = ps::loudness::integrated_loudness(y, rate, 1);
    EXPECT_NEAR(b - a, g_db, 0.01) << "trial " << trial;
  }
}

TEST(Loudness, StereoDuplicateIsThreeDecibelsLouder) {
  const auto mono = sine(1000.0, 2.0, 0.25, 48000);
  std::vector<double> stereo;
  for (double v : mono) {
    stereo.push_back(v);
    stereo.push_back(v);
  }
  EXPECT_NEAR(ps::loudness::integrated_loudness(stereo, 48000, 2) - ps::loudness::integrated_loudness(mono, 48000, 1),
              10.0 * std::log10(2.0), 1e-6);
}

TEST(Loudness, SilenceAndShortClipsAreTyped) {
  const std::vector<double> silence(48000, 0.0);
  EXPECT_EQ(kind_of([&] { ps::loudness::integrated_loudness(silence, 48000, 1); }), ps::ErrorKind::NoLoudness);
  const auto short_clip = sine(440.0, 0.3, 0.5, 48000);
  EXPECT_EQ(kind_of([&] { ps::loudness::integrated_loudness(short_clip, 48000, 1); }), ps::ErrorKind::TooShort);
  const auto faint = sine(440.0, 1.0, 1e-5, 48000);
  EXPECT_EQ(kind_of([&] { ps::loudness::integrated_loudness(faint, 48000, 1); }), ps::ErrorKind::NoLoudness);
}

TEST(Loudness, RelativeGateIgnoresQuietTail) {
  const auto loud = sine(1000.0, 3.0, 0.5, 48000);
  const double loud_only = ps::loudness::integrated_loudness(loud, 48000, 1);
  auto x = sine(1000.0, 6.0, 0.5, 48000);
  for (std::size_t i = loud.size(); i < x.size(); ++i) x[i] *= 0.01;
  // Only the blocks straddling the boundary pull the result down; an
  // ungated average would sit about 3 dB lower.
  EXPECT_NEAR(ps::loudness::integrated_loudness(x, 48000, 1), loud_only, 0.3);
}

TEST(Synth, SpeechlikeDurationFollowsWordsAndRate) {
  ps::synth::SpeechParams p;
  p.wpm = 120.0;
  const auto c = ps::synth::speechlike(10, p, 16000);
  EXPECT_NEAR(c.duration(), 5.0, 1e-9);
  EXPECT_TRUE(ps::synth::speechlike(0, p, 16000).empty());
}

TEST(Synth, MarkerClassifierRecoversEmbeddedMarkers) {
  ps::synth::MarkerClassifier emotion(ps::synth::MarkerClassifier::Family::Emotion);
  ps::synth::MarkerClassifier accent(ps::synth::MarkerClassifier::Family::Accent);
  const auto& el = ps::synth::default_emotion_labels();
  const auto& al = ps::synth::default_accent_labels();
  for (std::size_t e = 0; e < el.size(); ++e)
    for (std::size_t a = 0; a < al.size(); ++a) {
      ps::synth::SpeechParams p;
      p.emotion_hz = ps::synth::emotion_marker_hz(e);
      p.accent_hz = ps::synth::accent_marker_hz(a);
      const auto clip = ps::synth::speechlike(8, p, 16000);
      const auto de = emotion.classify(clip);
      const auto da = accent.classify(clip);
      EXPECT_NO_THROW(de.validate());
      EXPECT_EQ(de.labels[std::max_element(de.probs.begin(), de.probs.end()) - de.probs.begin()], el[e]);
      EXPECT_EQ(da.labels[std::max_element(da.probs.begin(), da.probs.end()) - da.probs.begin()], al[a]);
    }
}
