#pragma once

// Style judges (emotion, accent, volume, speed), neutral baseline synthesis
// for the two relative judges, and the LLM text judges for recall answers
// and dialogue coherence.

#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <json.hpp>

#include "parastyle/audio.hpp"
#include "parastyle/loudness.hpp"
#include "parastyle/metrics.hpp"
#include "parastyle/model.hpp"
#include "parastyle/orchestrator.hpp"
#include "parastyle/prompts.hpp"
#include "parastyle/store.hpp"
#include "parastyle/text.hpp"

namespace parastyle {

/// Allowed label with the highest probability. `allowed` is taken in the
/// given (canonical) order and the first of equal maxima wins.
inline std::string restricted_argmax(const LabelDistribution& dist, const std::vector<std::string>& allowed) {
  if (allowed.empty()) throw Error(ErrorKind::InvalidArgument, "allowed label set is empty");
  std::optional<std::size_t> best;
  double best_p = 0.0;
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    const auto p = dist.prob(allowed[i]);
    if (!p) throw Error(ErrorKind::InvalidArgument, "label '" + allowed[i] + "' missing from distribution");
    if (!best || *p > best_p) {
      best = i;
      best_p = *p;
    }
  }
  return allowed[*best];
}

// ---------------------------------------------------------------------------
// Judgment

struct ClassEvidence {
  std::vector<std::string> allowed;  // canonical order
  std::vector<double> probs;         // probability of each allowed label
  std::string winner;
  std::string target;  // classifier label of the instructed style

  bool operator==(const ClassEvidence&) const = default;
};

struct LoudnessEvidence {
  double lufs = 0.0;
  double baseline_lufs = 0.0;

  bool operator==(const LoudnessEvidence&) const = default;
};

struct RateEvidence {
  double wpm = 0.0;
  double baseline_wpm = 0.0;
  int words = 0;
  double seconds = 0.0;
  int baseline_words = 0;
  double baseline_seconds = 0.0;

  bool operator==(const RateEvidence&) const = default;
};

using Evidence = std::variant<std::monostate, ClassEvidence, LoudnessEvidence, RateEvidence>;

struct Judgment {
  int turn = 0;
  StyleValue style = StyleValue::Neutral;
  std::optional<int> indicator;  // empty when unavailable
  Evidence evidence;
  std::string judge_version;
  std::string unavailable_reason;

  bool available() const { return indicator.has_value(); }
  bool operator==(const Judgment&) const = default;
};

inline int decide_volume(StyleValue target, double lufs, double baseline_lufs) {
  if (target == StyleValue::Loud) return lufs > baseline_lufs ? 1 : 0;
  if (target == StyleValue::Quiet) return lufs < baseline_lufs ? 1 : 0;
  throw Error(ErrorKind::Precondition, "volume decision needs a volume style");
}

inline int decide_speed(StyleValue target, double wpm, double baseline_wpm) {
  if (target == StyleValue::Fast) return wpm > baseline_wpm ? 1 : 0;
  if (target == StyleValue::Slow) return wpm < baseline_wpm ? 1 : 0;
  throw Error(ErrorKind::Precondition, "speed decision needs a speed style");
}

/// Indicator implied by the stored evidence alone.
inline int recompute(const Judgment& j) {
  return std::visit(
      [&](const auto& e) -> int {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ClassEvidence>) {
          LabelDistribution d{e.allowed, e.probs};
          return restricted_argmax(d, e.allowed) == e.target ? 1 : 0;
        } else if constexpr (std::is_same_v<T, LoudnessEvidence>) {
          return decide_volume(j.style, e.lufs, e.baseline_lufs);
        } else if constexpr (std::is_same_v<T, RateEvidence>) {
          return decide_speed(j.style, e.wpm, e.baseline_wpm);
        } else {
          throw Error(ErrorKind::Precondition, "judgment carries no evidence");
        }
      },
      j.evidence);
}

inline Judgment unavailable_judgment(int turn, StyleValue style, std::string version, std::string reason) {
  Judgment j;
  j.turn = turn;
  j.style = style;
  j.judge_version = std::move(version);
  j.unavailable_reason = std::move(reason);
  return j;
}

inline nlohmann::json to_json(const Judgment& j) {
  nlohmann::json out{{"turn", j.turn}, {"style", std::string(to_string(j.style))}, {"judge_version", j.judge_version}};
  out["indicator"] = j.indicator ? nlohmann::json(*j.indicator) : nlohmann::json(nullptr);
  if (!j.unavailable_reason.empty()) out["unavailable_reason"] = j.unavailable_reason;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ClassEvidence>)
          out["evidence"] = {{"kind", "class"}, {"allowed", e.allowed}, {"probs", e.probs},
                             {"winner", e.winner}, {"target", e.target}};
        else if constexpr (std::is_same_v<T, LoudnessEvidence>)
          out["evidence"] = {{"kind", "lufs"}, {"lufs", e.lufs}, {"baseline_lufs", e.baseline_lufs}};
        else if constexpr (std::is_same_v<T, RateEvidence>)
          out["evidence"] = {{"kind", "wpm"},          {"wpm", e.wpm},
                             {"baseline_wpm", e.baseline_wpm}, {"words", e.words},
                             {"seconds", e.seconds},   {"baseline_words", e.baseline_words},
                             {"baseline_seconds", e.baseline_seconds}};
      },
      j.evidence);
  return out;
}

inline Judgment judgment_from_json(const nlohmann::json& in) {
  Judgment j;
  try {
    j.turn = in.at("turn").get<int>();
    j.style = parse_style(in.at("style").get<std::string>());
    j.judge_version = in.value("judge_version", std::string());
    if (!in.at("indicator").is_null()) j.indicator = in["indicator"].get<int>();
    j.unavailable_reason = in.value("unavailable_reason", std::string());
    if (in.contains("evidence")) {
      const auto& e = in["evidence"];
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "class")
        j.evidence = ClassEvidence{e.at("allowed").get<std::vector<std::string>>(), e.at("probs").get<std::vector<double>>(),
                                   e.at("winner").get<std::string>(), e.at("target").get<std::string>()};
      else if (kind == "lufs")
        j.evidence = LoudnessEvidence{e.at("lufs").get<double>(), e.at("baseline_lufs").get<double>()};
      else if (kind == "wpm")
        j.evidence = RateEvidence{e.at("wpm").get<double>(),        e.at("baseline_wpm").get<double>(),
                                  e.at("words").get<int>(),         e.at("seconds").get<double>(),
                                  e.at("baseline_words").get<int>(), e.at("baseline_seconds").get<double>()};
      else
        throw Error(ErrorKind::Parse, "unknown evidence kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed judgment: ") + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// Classifier judges

inline Judgment judge_class(const AudioClip& audio, StyleValue target, StyleAttribute attribute,
                            ClassifierClient& classifier, const LabelMap& labels, int turn = 0) {
  if (attribute_of(target) != attribute)
    throw Error(ErrorKind::Precondition, std::string(to_string(target)) + " is not a " + std::string(to_string(attribute)) + " style");
  const std::string version = classifier.version();
  LabelDistribution dist;
  try {
    dist = classifier.classify(audio);
    dist.validate();
  } catch (const Error& e) {
    return unavailable_judgment(turn, target, version, e.what());
  }
  ClassEvidence ev;
  ev.allowed = labels.allowed(attribute);
  ev.target = labels.label(target);
  for (const auto& l : ev.allowed) {
    const auto p = dist.prob(l);
    if (!p) return unavailable_judgment(turn, target, version, "classifier lacks label '" + l + "'");
    ev.probs.push_back(*p);
  }
  ev.winner = restricted_argmax(dist, ev.allowed);
  Judgment j;
  j.turn = turn;
  j.style = target;
  j.indicator = ev.winner == ev.target ? 1 : 0;
  j.evidence = std::move(ev);
  j.judge_version = version;
  return j;
}

inline Judgment judge_emotion(const AudioClip& audio, StyleValue target, ClassifierClient& classifier,
                              const LabelMap& labels = LabelMap::defaults(), int turn = 0) {
  return judge_class(audio, target, StyleAttribute::Emotion, classifier, labels, turn);
}

inline Judgment judge_accent(const AudioClip& audio, StyleValue target, ClassifierClient& classifier,
                             const LabelMap& labels = LabelMap::defaults(), int turn = 0) {
  return judge_class(audio, target, StyleAttribute::Accent, classifier, labels, turn);
}

// ---------------------------------------------------------------------------
// Relative judges

inline constexpr std::string_view kVolumeJudgeVersion = "bs1770-integrated@1";
inline constexpr std::string_view kSpeedJudgeVersion = "wpm@1";

inline Judgment judge_volume(const AudioClip& audio, const AudioClip& baseline, StyleValue target, int turn = 0) {
  if (attribute_of(target) != StyleAttribute::Volume)
    throw Error(ErrorKind::Precondition, std::string(to_string(target)) + " is not a volume style");
  LoudnessEvidence ev;
  try {
    ev.lufs = measure_lufs(audio);
    ev.baseline_lufs = measure_lufs(baseline);
  } catch (const Error& e) {
    return unavailable_judgment(turn, target, std::string(kVolumeJudgeVersion), e.what());
  }
  Judgment j;
  j.turn = turn;
  j.style = target;
  j.indicator = decide_volume(target, ev.lufs, ev.baseline_lufs);
  j.evidence = ev;
  j.judge_version = std::string(kVolumeJudgeVersion);
  return j;
}

struct WpmMeasure {
  double wpm = 0.0;
  int words = 0;
  double seconds = 0.0;
  bool empty_transcript = false;
};

inline WpmMeasure measure_wpm(const AudioClip& audio, std::string_view transcript) {
  const double seconds = audio.duration();
  if (!(seconds > 0.0)) throw Error(ErrorKind::Precondition, "audio has zero duration");
  WpmMeasure m;
  m.words = text::count_words(transcript);
  m.seconds = seconds;
  m.empty_transcript = m.words == 0;
  m.wpm = 60.0 * m.words / seconds;
  return m;
}

inline Judgment judge_speed(const AudioClip& audio, std::string_view transcript, const AudioClip& baseline_audio,
                            std::string_view baseline_transcript, StyleValue target, int turn = 0) {
  if (attribute_of(target) != StyleAttribute::Speed)
    throw Error(ErrorKind::Precondition, std::string(to_string(target)) + " is not a speed style");
  const std::string version(kSpeedJudgeVersion);
  WpmMeasure o, b;
  try {
    o = measure_wpm(audio, transcript);
    b = measure_wpm(baseline_audio, baseline_transcript);
  } catch (const Error& e) {
    return unavailable_judgment(turn, target, version, e.what());
  }
  if (o.empty_transcript || b.empty_transcript)
    return unavailable_judgment(turn, target, version, "empty transcript");
  Judgment j;
  j.turn = turn;
  j.style = target;
  j.indicator = decide_speed(target, o.wpm, b.wpm);
  j.evidence = RateEvidence{o.wpm, b.wpm, o.words, o.seconds, b.words, b.seconds};
  j.judge_version = version;
  return j;
}

// ---------------------------------------------------------------------------
// Baselines

enum class BaselineMode { Volume, Speed };

inline std::string_view to_string(BaselineMode m) { return m == BaselineMode::Volume ? "volume" : "speed"; }

inline std::string_view baseline_instruction(BaselineMode m) {
  return m == BaselineMode::Volume ? prompts::kBaselineVolume : prompts::kBaselineSpeed;
}

/// Re-invokes `model` in read-aloud mode over `text` with the neutral
/// instruction, retrying no-speech answers like a dialogue turn.
inline SlmResponse synthesize_baseline(SpeechModel& model, std::string_view text_to_read, BaselineMode mode,
                                       std::uint64_t seed, int max_retries = 3) {
  if (text::trim(text_to_read).empty()) throw Error(ErrorKind::Precondition, "baseline text is empty");
  std::string reason = "no speech";
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    GenerationOptions opts;
    opts.seed = attempt == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(attempt));
    opts.attempt = attempt;
    try {
      auto r = model.read_aloud(baseline_instruction(mode), text_to_read, opts);
      r.attempt_count = attempt + 1;
      if (r.has_speech()) return r;
    } catch (const Error& e) {
      reason = e.what();
    }
  }
  throw Error(ErrorKind::NoSpeech, "baseline synthesis failed: " + reason);
}

struct Baseline {
  AudioClip audio;
  std::string transcript;
};

/// Concurrent (dialogue, turn, mode) -> baseline map. Concurrent misses on
/// one key share a single synthesis. With a directory, baselines persist
/// across invocations.
class BaselineCache {
 public:
  using Key = std::tuple<std::string, int, BaselineMode>;

  explicit BaselineCache(std::optional<fs::path> dir = std::nullopt) : dir_(std::move(dir)) {}

  template <class Fn>
  Baseline get(const Key& key, Fn&& synthesize) {
    std::promise<Baseline> promise;
    std::shared_future<Baseline> future;
    bool owner = false;
    {
      std::lock_guard lock(mu_);
      auto it = entries_.find(key);
      if (it != entries_.end()) {
        future = it->second;
      } else {
        future = promise.get_future().share();
        entries_.emplace(key, future);
        owner = true;
      }
    }
    if (owner) {
      try {
        auto stored = load(key);
        if (!stored) {
          ++misses_;
          stored = synthesize();
          save(key, *stored);
        }
        promise.set_value(*stored);
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return future.get();
  }

  int misses() const { return misses_; }

 private:
  std::string stem(const Key& key) const {
    return std::get<0>(key) + "_" + std::to_string(std::get<1>(key)) + "_" + std::string(to_string(std::get<2>(key)));
  }

  std::optional<Baseline> load(const Key& key) const {
    if (!dir_) return std::nullopt;
    const auto wav = *dir_ / (stem(key) + ".wav");
    const auto meta = *dir_ / (stem(key) + ".json");
    if (!fs::exists(wav) || !fs::exists(meta)) return std::nullopt;
    return Baseline{read_wav_file(wav.string()), read_json_file(meta).at("transcript").get<std::string>()};
  }

  void save(const Key& key, const Baseline& b) const {
    if (!dir_) return;
    write_file_atomic(*dir_ / (stem(key) + ".wav"), encode_wav(b.audio));
    write_json_file(*dir_ / (stem(key) + ".json"), {{"transcript", b.transcript}});
  }

  std::optional<fs::path> dir_;
  std::mutex mu_;
  std::map<Key, std::shared_future<Baseline>> entries_;
  std::atomic<int> misses_{0};
};

// ---------------------------------------------------------------------------
// LLM text judges

struct RecallGrade {
  Grade grade = Grade::A;
  std::string rationale_text;  // raw judge reply
};

inline char to_char(Grade g) { return static_cast<char>('A' + static_cast<int>(g)); }

inline Grade parse_grade_letter(char c) {
  if (c < 'A' || c > 'D') throw Error(ErrorKind::Parse, std::string("not a grade letter: ") + c);
  return static_cast<Grade>(c - 'A');
}

/// Accepts a bare letter with optional decoration ("D", "(D)", "**D.**"), or
/// a reply naming exactly one "(X)" category.
inline std::optional<Grade> parse_recall_reply(std::string_view reply) {
  std::string core;
  for (char c : text::trim(reply))
    if (c != '*' && c != '(' && c != ')' && c != '.' && c != '`' && c != '"' && c != '\'') core.push_back(c);
  core = text::trim(core);
  if (core.size() == 1 && core[0] >= 'A' && core[0] <= 'D') return parse_grade_letter(core[0]);
  std::optional<char> found;
  for (std::size_t i = 0; i + 2 < reply.size(); ++i) {
    if (reply[i] == '(' && reply[i + 2] == ')' && reply[i + 1] >= 'A' && reply[i + 1] <= 'D') {
      if (found && *found != reply[i + 1]) return std::nullopt;
      found = reply[i + 1];
    }
  }
  if (found) return parse_grade_letter(*found);
  return std::nullopt;
}

inline std::string recall_prompt(std::string_view instruction, std::string_view answer) {
  return text::fill_slots(prompts::kRecallEvaluation, {{"instruction", instruction}, {"response", answer}});
}

/// Grades a recall answer; empty when the judge reply stays unparseable
/// after one re-prompt.
inline std::optional<RecallGrade> judge_recall(std::string_view instruction, std::string_view answer, LlmClient& llm,
                                               std::uint64_t seed = 0) {
  if (text::trim(instruction).empty()) throw Error(ErrorKind::Precondition, "instruction text is empty");
  const std::vector<ChatTurn> chat{{"user", recall_prompt(instruction, answer)}};
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto reply = llm.complete(chat, LlmOptions{0.0, seed + static_cast<std::uint64_t>(attempt)});
    if (auto g = parse_recall_reply(reply)) return RecallGrade{*g, reply};
  }
  return std::nullopt;
}

/// Last "[[n]]" in the reply; Parse error when absent or outside 1..5.
inline int parse_coherence_score(std::string_view reply) {
  static const std::regex re(R"(\[\[\s*(-?\d+)\s*\]\])");
  const std::string s(reply);
  std::optional<int> last;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it)
    last = std::stoi((*it)[1].str());
  if (!last) throw Error(ErrorKind::Parse, "no [[score]] in judge reply");
  if (*last < 1 || *last > 5) throw Error(ErrorKind::Parse, "score " + std::to_string(*last) + " outside 1..5");
  return *last;
}

inline constexpr std::string_view kScoreSet = "{1, 2, 3, 4, 5}";

/// Referee = the user side, Participant = the evaluated model. Recall
/// exchanges are bookkeeping and are left out.
inline std::string coherence_transcript(const DialogueRecord& record) {
  std::string out;
  for (const auto& t : record.turns) {
    out += "Referee: " + t.user.text.value_or("") + "\n";
    out += "Participant: " + t.assistant.transcript.value_or("") + "\n";
  }
  return out;
}

inline std::string coherence_prompt(std::string_view dialogue) {
  return text::fill_slots(prompts::kCoherenceEvaluation, {{"score_set", kScoreSet}, {"dialogue", dialogue}});
}

inline std::optional<int> judge_coherence(const std::string& dialogue_transcript, LlmClient& llm, std::uint64_t seed = 0) {
  if (dialogue_transcript.find("Participant:") == std::string::npos)
    throw Error(ErrorKind::Precondition, "dialogue has no participant turn");
  const std::vector<ChatTurn> chat{{"user", coherence_prompt(dialogue_transcript)}};
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      return parse_coherence_score(llm.complete(chat, LlmOptions{0.0, seed + static_cast<std::uint64_t>(attempt)}));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Parse) throw;
    }
  }
  return std::nullopt;
}

}  // namespace parastyle
