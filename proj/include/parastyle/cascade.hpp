#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "parastyle/model.hpp"
#include "parastyle/prompts.hpp"
#include "parastyle/text.hpp"

namespace parastyle {

namespace detail {

/// Runs `fn`, re-throwing any failure as a StageError tagged `stage`.
template <class Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.kind(), e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, ErrorKind::Transport, e.what());
  }
}

inline std::string chat_role(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User:
    case Role::RecallQuery: return "user";
    case Role::Assistant:
    case Role::RecallAnswer: return "assistant";
  }
  return "user";
}

}  // namespace detail

/// ASR -> text LLM -> TTS. The TTS receives the style instruction on every
/// turn, which makes this the upper-bound baseline.
class CascadeModel : public SpeechModel {
 public:
  CascadeModel(std::shared_ptr<AsrClient> asr, std::shared_ptr<LlmClient> llm, std::shared_ptr<TtsClient> tts,
               std::string name = "cascade")
      : asr_(std::move(asr)), llm_(std::move(llm)), tts_(std::move(tts)), name_(std::move(name)) {
    if (!llm_ || !tts_) throw Error(ErrorKind::Config, "cascade needs LLM and TTS clients");
  }

  std::string id() const override { return name_; }

  SlmResponse respond(std::span<const Message> history, const GenerationOptions& options) override {
    require_respondable(history);
    std::vector<ChatTurn> chat;
    chat.reserve(history.size());
    for (const auto& m : history) {
      std::string content;
      if (m.text) {
        content = *m.text;
      } else {
        if (!asr_) throw StageError("asr_stage", ErrorKind::Config, "message has only audio and no ASR client is configured");
        content = detail::in_stage("asr_stage", [&] { return asr_->transcribe(*m.audio); });
      }
      chat.push_back({detail::chat_role(m.role), std::move(content)});
    }

    LlmOptions llm_options{options.temperature, options.seed};
    std::string reply = detail::in_stage("llm_stage", [&] { return llm_->complete(chat, llm_options); });

    const std::string directive = options.style ? options.style->rendered_text : std::string();
    SlmResponse r;
    r.transcript = reply;
    r.transcript_native = true;
    r.audio = detail::in_stage("tts_stage", [&] { return tts_->synthesize(reply, directive); });
    return r;
  }

  SlmResponse read_aloud(std::string_view instruction, std::string_view text_to_read,
                         const GenerationOptions&) override {
    SlmResponse r;
    r.transcript = std::string(text_to_read);
    r.transcript_native = true;
    r.audio = detail::in_stage("tts_stage", [&] { return tts_->synthesize(text_to_read, instruction); });
    return r;
  }

  void ping() override {
    if (asr_) asr_->ping();
    llm_->ping();
    tts_->ping();
  }

 private:
  std::shared_ptr<AsrClient> asr_;
  std::shared_ptr<LlmClient> llm_;
  std::shared_ptr<TtsClient> tts_;
  std::string name_;
};

struct SimulatorOptions {
  int word_cap = 20;
  std::string system_prompt = std::string(prompts::kSimulatorSystem);
  std::string inaudible_placeholder = "(inaudible)";
  double temperature = 1.0;
};

/// Cascade user simulator. `transcripts` is the substantive conversation so
/// far: transcripts[0] is the opener, then evaluated-model and simulator
/// utterances alternate.
class UserSimulator {
 public:
  UserSimulator(std::shared_ptr<LlmClient> llm, std::shared_ptr<TtsClient> tts, SimulatorOptions options = {})
      : llm_(std::move(llm)), tts_(std::move(tts)), options_(std::move(options)) {
    if (!llm_ || !tts_) throw Error(ErrorKind::Config, "simulator needs LLM and TTS clients");
  }

  const SimulatorOptions& options() const { return options_; }

  /// Next user message (text + synthesized audio).
  Message next_turn(std::span<const std::string> transcripts, std::uint64_t seed) {
    if (transcripts.empty()) throw Error(ErrorKind::Precondition, "simulator needs at least the opener");
    if (transcripts.size() == 1) return voice(transcripts[0]);
    if (transcripts.size() % 2 != 0)
      throw Error(ErrorKind::Precondition, "the evaluated model must speak before the simulator replies");

    std::vector<ChatTurn> chat{{"system", options_.system_prompt}};
    for (std::size_t i = 0; i < transcripts.size(); ++i) {
      const bool own = i % 2 == 0;
      std::string content = transcripts[i];
      if (!own && text::trim(content).empty()) content = options_.inaudible_placeholder;
      chat.push_back({own ? "assistant" : "user", std::move(content)});
    }

    auto generate = [&](std::uint64_t s) {
      return text::trim(detail::in_stage("simulator_llm", [&] {
        return llm_->complete(chat, LlmOptions{options_.temperature, s});
      }));
    };
    std::string reply = generate(seed);
    if (text::count_words(reply) > options_.word_cap) {
      reply = generate(seed + 1);
      if (text::count_words(reply) > options_.word_cap) reply = text::truncate_to_words(reply, options_.word_cap);
    }
    if (reply.empty()) throw StageError("simulator_llm", ErrorKind::Unavailable, "empty reply");
    return voice(reply);
  }

  /// Speaks `utterance` as a user message.
  Message voice(const std::string& utterance) {
    Message m;
    m.role = Role::User;
    m.text = utterance;
    m.audio = detail::in_stage("simulator_tts", [&] { return tts_->synthesize(utterance, ""); });
    return m;
  }

  void ping() {
    llm_->ping();
    tts_->ping();
  }

 private:
  std::shared_ptr<LlmClient> llm_;
  std::shared_ptr<TtsClient> tts_;
  SimulatorOptions options_;
};

}  // namespace parastyle
