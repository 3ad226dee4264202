#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "parastyle/parastyle.hpp"

namespace testing_support {

namespace ps = parastyle;
namespace fs = std::filesystem;

/// Directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("parastyle_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

/// LLM that returns queued replies, then a fallback; records every call.
class FakeLlm : public ps::LlmClient {
 public:
  explicit FakeLlm(std::vector<std::string> replies = {}, std::string fallback = "Sounds good to me.")
      : replies_(replies.begin(), replies.end()), fallback_(std::move(fallback)) {}

  std::string complete(const std::vector<ps::ChatTurn>& messages, const ps::LlmOptions& options) override {
    std::lock_guard lock(mu_);
    calls.push_back(messages);
    seeds.push_back(options.seed);
    if (fail_with) throw ps::Error(*fail_with, "injected failure");
    if (replies_.empty()) return fallback_;
    auto r = replies_.front();
    replies_.pop_front();
    return r;
  }

  std::vector<std::vector<ps::ChatTurn>> calls;
  std::vector<std::uint64_t> seeds;
  std::optional<ps::ErrorKind> fail_with;

 private:
  std::mutex mu_;
  std::deque<std::string> replies_;
  std::string fallback_;
};

/// Tone TTS that records the directives it received.
class RecordingTts : public ps::TtsClient {
 public:
  ps::AudioClip synthesize(std::string_view text, std::string_view directive) override {
    std::lock_guard lock(mu_);
    texts.emplace_back(text);
    directives.emplace_back(directive);
    if (fail) throw ps::Error(ps::ErrorKind::Transport, "tts down");
    return ps::ToneTts(16000, 160).synthesize(text, directive);
  }
  std::vector<std::string> texts;
  std::vector<std::string> directives;
  bool fail = false;

 private:
  std::mutex mu_;
};

class FakeAsr : public ps::AsrClient {
 public:
  explicit FakeAsr(std::string reply = "heard words here") : reply_(std::move(reply)) {}
  std::string transcribe(const ps::AudioClip&) override {
    ++calls;
    return reply_;
  }
  std::atomic<int> calls{0};

 private:
  std::string reply_;
};

/// Classifier returning a fixed distribution.
class FixedClassifier : public ps::ClassifierClient {
 public:
  explicit FixedClassifier(ps::LabelDistribution d) : d_(std::move(d)) {}
  ps::LabelDistribution classify(const ps::AudioClip&) override {
    ++calls;
    if (fail) throw ps::Error(ps::ErrorKind::Transport, "classifier down");
    return d_;
  }
  std::string version() override { return "fixed@1"; }
  std::atomic<int> calls{0};
  bool fail = false;

 private:
  ps::LabelDistribution d_;
};

/// Wraps a model and counts calls; optionally fails specific attempts.
class CountingModel : public ps::SpeechModel {
 public:
  explicit CountingModel(ps::SpeechModel& inner) : inner_(inner) {}
  std::string id() const override { return inner_.id(); }
  ps::SlmResponse respond(std::span<const ps::Message> h, const ps::GenerationOptions& o) override {
    ++respond_calls;
    if (throw_transport_until > o.attempt) throw ps::Error(ps::ErrorKind::Transport, "flaky");
    return inner_.respond(h, o);
  }
  ps::SlmResponse read_aloud(std::string_view i, std::string_view t, const ps::GenerationOptions& o) override {
    ++read_calls;
    return inner_.read_aloud(i, t, o);
  }
  std::atomic<int> respond_calls{0};
  std::atomic<int> read_calls{0};
  int throw_transport_until = 0;

 private:
  ps::SpeechModel& inner_;
};

inline ps::AudioClip tone(double hz, double seconds, double amplitude, int rate = 48000) {
  ps::AudioClip c;
  c.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    c.samples[i] = ps::to_pcm16(amplitude * std::sin(2.0 * M_PI * hz * static_cast<double>(i) / rate));
  return c;
}

/// Random labelled distribution over `labels` (hand-rolled generator).
inline ps::LabelDistribution random_distribution(std::mt19937_64& rng, const std::vector<std::string>& labels) {
  std::exponential_distribution<double> e(1.0);
  ps::LabelDistribution d;
  d.labels = labels;
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    d.probs.push_back(e(rng));
    sum += d.probs.back();
  }
  for (auto& p : d.probs) p /= sum;
  return d;
}

inline std::vector<ps::Opener> make_openers(int n) {
  std::vector<ps::Opener> out;
  for (int i = 1; i <= n; ++i) out.push_back({i, "Opener number " + std::to_string(i) + "?", "s" + std::to_string(i)});
  return out;
}

inline ps::RunConfig make_config(ps::StyleValue style, int topic, int turns = 4) {
  ps::RunConfig c;
  c.instruction = ps::render_instruction(style, "default");
  c.opener = {topic, "How can I fight off sleepiness?", "src" + std::to_string(topic)};
  c.assistant_turns = turns;
  c.seed = 7;
  return c;
}

}  // namespace testing_support
