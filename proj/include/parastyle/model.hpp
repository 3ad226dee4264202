#pragma once

// The speech-in/speech-out adapter contract and the service clients that
// back the cascade, the user simulator and the judges.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "parastyle/audio.hpp"
#include "parastyle/core.hpp"
#include "parastyle/error.hpp"

namespace parastyle {

enum class Role { System, User, Assistant, RecallQuery, RecallAnswer };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::RecallQuery: return "recall_query";
    case Role::RecallAnswer: return "recall_answer";
  }
  return "";
}

inline Role parse_role(std::string_view s) {
  for (auto r : {Role::System, Role::User, Role::Assistant, Role::RecallQuery, Role::RecallAnswer})
    if (to_string(r) == s) return r;
  throw Error(ErrorKind::Parse, "unknown role '" + std::string(s) + "'");
}

struct Message {
  Role role = Role::User;
  std::optional<std::string> text;
  std::optional<AudioClip> audio;

  static Message with_text(Role role, std::string t) { return Message{role, std::move(t), std::nullopt}; }

  bool operator==(const Message&) const = default;
};

struct SlmResponse {
  std::optional<AudioClip> audio;
  std::optional<std::string> transcript;
  bool transcript_native = false;  // produced by the model, not by ASR
  int attempt_count = 0;
  bool failed = false;
  std::string failure_reason;

  bool has_speech() const { return audio.has_value() && !audio->empty(); }
};

/// Per-call generation settings forwarded to adapters. `style` and
/// `topic_id` describe the evaluation cell; only adapters that need them
/// (the cascade re-attaches the style at synthesis, the scripted mock keys
/// its schedule on them) read them.
struct GenerationOptions {
  double temperature = 1.0;
  std::uint64_t seed = 0;
  int attempt = 0;
  int topic_id = 0;
  std::optional<StyleInstruction> style;
};

/// Throws Precondition unless the history ends in a turn a model answers.
inline void require_respondable(std::span<const Message> history) {
  if (history.empty()) throw Error(ErrorKind::Precondition, "history is empty");
  const Role last = history.back().role;
  if (last != Role::User && last != Role::RecallQuery)
    throw Error(ErrorKind::Precondition, "history must end with a user or recall-query message");
  for (const auto& m : history)
    if (!m.text && !m.audio) throw Error(ErrorKind::Precondition, "message carries neither text nor audio");
}

/// A dialogue model under evaluation. One call is one attempt: retries
/// belong to the orchestrator. A response without audio signals no-speech;
/// transport problems are thrown as Error{Transport|Timeout}.
/// Implementations must be safe to call concurrently from distinct
/// dialogues and must not retain references to `history`.
class SpeechModel {
 public:
  virtual ~SpeechModel() = default;

  virtual std::string id() const = 0;

  virtual SlmResponse respond(std::span<const Message> history, const GenerationOptions& options) = 0;

  /// TTS mode: read `text` aloud under a neutral `instruction`.
  virtual SlmResponse read_aloud(std::string_view instruction, std::string_view text,
                                 const GenerationOptions& options) {
    std::vector<Message> history{
        Message::with_text(Role::User, std::string(instruction) + "\n\n" + std::string(text))};
    return respond(history, options);
  }

  /// Preflight health check; throws on an unreachable backend.
  virtual void ping() {}
};

// ---------------------------------------------------------------------------
// Service clients

struct ChatTurn {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  bool operator==(const ChatTurn&) const = default;
};

struct LlmOptions {
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::vector<ChatTurn>& messages, const LlmOptions& options) = 0;
  virtual void ping() {}
};

class AsrClient {
 public:
  virtual ~AsrClient() = default;
  virtual std::string transcribe(const AudioClip& audio) = 0;
  virtual void ping() {}
};

class TtsClient {
 public:
  virtual ~TtsClient() = default;
  /// `style_directive` is empty for a neutral voice.
  virtual AudioClip synthesize(std::string_view text, std::string_view style_directive) = 0;
  virtual void ping() {}
};

struct LabelDistribution {
  std::vector<std::string> labels;
  std::vector<double> probs;

  void validate() const {
    if (labels.size() != probs.size())
      throw Error(ErrorKind::InvalidArgument, "label and probability counts differ");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative or NaN probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw Error(ErrorKind::InvalidArgument, "probabilities sum to " + std::to_string(sum));
  }

  std::optional<double> prob(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return probs[i];
    return std::nullopt;
  }
};

class ClassifierClient {
 public:
  virtual ~ClassifierClient() = default;
  virtual LabelDistribution classify(const AudioClip& audio) = 0;
  /// Identifies the hosted model ("name@version") for judge provenance.
  virtual std::string version() { return "unknown"; }
};

/// Classifier label name for each emotion/accent style. Label inventories
/// belong to the hosted models, so the mapping is deployment configuration.
struct LabelMap {
  std::map<StyleValue, std::string> labels;

  static LabelMap defaults() {
    return LabelMap{{{StyleValue::Happiness, "happy"},
                     {StyleValue::Sadness, "sad"},
                     {StyleValue::Anger, "angry"},
                     {StyleValue::Neutral, "neutral"},
                     {StyleValue::NorthAmerican, "north_american"},
                     {StyleValue::Indian, "indian"}}};
  }

  const std::string& label(StyleValue v) const {
    auto it = labels.find(v);
    if (it == labels.end())
      throw Error(ErrorKind::Config, "no classifier label configured for " + std::string(to_string(v)));
    return it->second;
  }

  /// Restricted label set of an attribute, in canonical style order.
  std::vector<std::string> allowed(StyleAttribute a) const {
    std::vector<std::string> out;
    for (auto v : values_of(a)) out.push_back(label(v));
    return out;
  }
};

}  // namespace parastyle
