#pragma once

// Drives one K-turn dialogue per RunConfig: builds the first turn, alternates
// evaluated model and user simulator, retries no-speech responses, injects
// the recall exchange and persists after every turn.

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "parastyle/cascade.hpp"
#include "parastyle/model.hpp"
#include "parastyle/prompts.hpp"

namespace parastyle {

struct RecallExchange {
  Message query;
  SlmResponse answer;
};

struct TurnRecord {
  int turn = 0;  // 1-based index of the substantive assistant turn
  Message user;
  SlmResponse assistant;
  std::optional<RecallExchange> recall;
};

enum class DialogueStatus { InProgress, Complete, PartialFailure };

inline std::string_view to_string(DialogueStatus s) {
  switch (s) {
    case DialogueStatus::InProgress: return "in_progress";
    case DialogueStatus::Complete: return "complete";
    case DialogueStatus::PartialFailure: return "partial_failure";
  }
  return "";
}

inline DialogueStatus parse_status(std::string_view s) {
  if (s == "in_progress") return DialogueStatus::InProgress;
  if (s == "complete") return DialogueStatus::Complete;
  if (s == "partial_failure") return DialogueStatus::PartialFailure;
  throw Error(ErrorKind::Parse, "unknown dialogue status '" + std::string(s) + "'");
}

struct TurnFailure {
  int turn = 0;
  int attempts = 0;
  std::string stage;  // "model", "recall", "simulator_llm", ...
  std::string reason;
};

struct DialogueRecord {
  RunConfig config;
  std::string model_id;
  std::optional<Message> system;
  std::vector<TurnRecord> turns;  // only turns that produced speech
  DialogueStatus status = DialogueStatus::InProgress;
  std::optional<TurnFailure> failure;
  std::vector<double> turn_seconds;  // wall clock per turn; not part of the persisted record

  std::string id() const { return dialogue_id(config); }
};

/// Persistence hook. `save` must make every audio clip and the record
/// durable before returning; the orchestrator calls it after each turn.
class Recorder {
 public:
  virtual ~Recorder() = default;
  virtual void save(const DialogueRecord& record) = 0;
  virtual std::optional<DialogueRecord> load(const std::string& dialogue_id) = 0;
};

/// Recorder that keeps records in memory (tests, dry runs).
class MemoryRecorder : public Recorder {
 public:
  void save(const DialogueRecord& record) override {
    std::lock_guard lock(mu_);
    records_[record.id()] = record;
    ++saves_;
  }
  std::optional<DialogueRecord> load(const std::string& id) override {
    std::lock_guard lock(mu_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }
  int saves() const { return saves_; }

 private:
  std::mutex mu_;
  std::map<std::string, DialogueRecord> records_;
  std::atomic<int> saves_{0};
};

/// Messages that open the dialogue. With the user-message position the
/// instruction precedes the opener inside one user message.
inline std::vector<Message> build_first_turn(const RunConfig& config) {
  if (text::trim(config.opener.text).empty())
    throw Error(ErrorKind::Precondition, "opener text is empty");
  if (config.instruction.rendered_text.empty())
    throw Error(ErrorKind::Precondition, "instruction text is empty");
  if (config.prompt_position == PromptPosition::UserMessage)
    return {Message::with_text(Role::User, config.instruction.rendered_text + " " + config.opener.text)};
  return {Message::with_text(Role::System, config.instruction.rendered_text),
          Message::with_text(Role::User, config.opener.text)};
}

namespace detail {
inline std::uint64_t splitmix_finalize(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}
}  // namespace detail

/// Derives a child seed. Both finalizer passes are bijections, so distinct
/// `b` under the same `a` never collide.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return detail::splitmix_finalize(detail::splitmix_finalize(a + 0x9E3779B97F4A7C15ull) ^ b);
}

/// Queries `model` until a response carries speech, at most max_retries + 1
/// times, each attempt with a fresh seed. Transport errors count as
/// attempts.
inline SlmResponse retry_generate(SpeechModel& model, std::span<const Message> history,
                                  GenerationOptions options, int max_retries) {
  if (max_retries < 0) throw Error(ErrorKind::InvalidArgument, "max_retries must be >= 0");
  const std::uint64_t base_seed = options.seed;
  SlmResponse last;
  std::string reason = "no speech";
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    options.attempt = attempt;
    options.seed = attempt == 0 ? base_seed : mix_seed(base_seed, static_cast<std::uint64_t>(attempt));
    try {
      SlmResponse r = model.respond(history, options);
      r.attempt_count = attempt + 1;
      if (r.has_speech()) {
        r.failed = false;
        return r;
      }
      last = std::move(r);
      reason = "no speech";
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Precondition) throw;
      last = SlmResponse{};
      reason = std::string(to_string(e.kind())) + ": " + e.what();
    }
  }
  last.audio.reset();
  last.attempt_count = max_retries + 1;
  last.failed = true;
  last.failure_reason = reason;
  return last;
}

struct DialogueServices {
  SpeechModel& model;
  UserSimulator& simulator;
  AsrClient* asr = nullptr;  // transcribes model speech that lacks a transcript
  bool simulator_sees_recall = false;
  std::string recall_query = std::string(prompts::kRecallQuery);
};

namespace detail {

inline Message assistant_message(const SlmResponse& r, Role role = Role::Assistant) {
  Message m;
  m.role = role;
  m.text = r.transcript;
  m.audio = r.audio;
  return m;
}

inline void ensure_transcript(SlmResponse& r, AsrClient* asr) {
  if (r.transcript || !r.audio || !asr) return;
  r.transcript = asr->transcribe(*r.audio);
  r.transcript_native = false;
}

}  // namespace detail

/// Runs (or resumes) one dialogue. A record already complete or failed in
/// `recorder` is returned untouched; an in-progress record continues after
/// its last persisted turn.
inline DialogueRecord run_dialogue(const RunConfig& config, DialogueServices services, Recorder& recorder) {
  config.validate();
  const std::string id = dialogue_id(config);

  DialogueRecord record;
  if (auto existing = recorder.load(id)) {
    if (existing->config != config)
      throw Error(ErrorKind::Precondition, "stored record " + id + " was produced by a different configuration");
    if (existing->status != DialogueStatus::InProgress) return *existing;
    record = std::move(*existing);
  } else {
    record.config = config;
    record.model_id = services.model.id();
    auto first = build_first_turn(config);
    if (first.size() == 2) record.system = first.front();
  }

  // Evaluated-model view of the conversation so far.
  std::vector<Message> history;
  if (record.system) history.push_back(*record.system);
  // Simulator view: opener, then alternating model / simulator utterances.
  std::vector<std::string> transcripts{config.opener.text};
  for (const auto& t : record.turns) {
    if (t.recall) {
      history.push_back(t.recall->query);
      history.push_back(detail::assistant_message(t.recall->answer, Role::RecallAnswer));
      if (services.simulator_sees_recall && t.recall->answer.transcript)
        transcripts.back() += " " + *t.recall->answer.transcript;
    }
    history.push_back(t.user);
    history.push_back(detail::assistant_message(t.assistant));
    if (t.turn > 1) transcripts.push_back(t.user.text.value_or(""));
    transcripts.push_back(t.assistant.transcript.value_or(""));
  }
  auto fail = [&](int turn, int attempts, std::string stage, std::string reason) {
    record.status = DialogueStatus::PartialFailure;
    record.failure = TurnFailure{turn, attempts, std::move(stage), std::move(reason)};
    recorder.save(record);
    return record;
  };

  GenerationOptions options;
  options.temperature = config.temperature;
  options.topic_id = config.opener.topic_id;
  options.style = config.instruction;
  const std::uint64_t dialogue_seed = mix_seed(config.seed, text::fnv1a64(id));

  for (int j = static_cast<int>(record.turns.size()) + 1; j <= config.assistant_turns; ++j) {
    const auto started = std::chrono::steady_clock::now();
    TurnRecord turn;
    turn.turn = j;
    const std::uint64_t turn_seed = mix_seed(dialogue_seed, static_cast<std::uint64_t>(j));

    if (j >= 2 && config.recall_enabled) {
      RecallExchange exchange;
      exchange.query = Message::with_text(Role::RecallQuery, services.recall_query);
      history.push_back(exchange.query);
      options.seed = mix_seed(turn_seed, 0x5245u);
      exchange.answer = retry_generate(services.model, history, options, config.max_retries);
      if (exchange.answer.failed)
        return fail(j, exchange.answer.attempt_count, "recall", exchange.answer.failure_reason);
      try {
        detail::ensure_transcript(exchange.answer, services.asr);
      } catch (const std::exception& e) {
        return fail(j, exchange.answer.attempt_count, "asr", e.what());
      }
      history.push_back(detail::assistant_message(exchange.answer, Role::RecallAnswer));
      if (services.simulator_sees_recall && exchange.answer.transcript)
        transcripts.back() += " " + *exchange.answer.transcript;
      turn.recall = std::move(exchange);
    }

    try {
      if (j == 1) {
        auto first = build_first_turn(config);
        turn.user = services.simulator.voice(*first.back().text);
      } else {
        turn.user = services.simulator.next_turn(transcripts, mix_seed(turn_seed, 0x55u));
      }
    } catch (const StageError& e) {
      return fail(j, 0, e.stage(), e.what());
    } catch (const std::exception& e) {
      return fail(j, 0, "simulator", e.what());
    }
    history.push_back(turn.user);
    if (j >= 2) transcripts.push_back(turn.user.text.value_or(""));

    options.seed = turn_seed;
    turn.assistant = retry_generate(services.model, history, options, config.max_retries);
    if (turn.assistant.failed) return fail(j, turn.assistant.attempt_count, "model", turn.assistant.failure_reason);
    try {
      detail::ensure_transcript(turn.assistant, services.asr);
    } catch (const std::exception& e) {
      return fail(j, turn.assistant.attempt_count, "asr", e.what());
    }
    history.push_back(detail::assistant_message(turn.assistant));
    transcripts.push_back(turn.assistant.transcript.value_or(""));

    record.turns.push_back(std::move(turn));
    record.turn_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
    if (j < config.assistant_turns) recorder.save(record);
  }
  record.status = DialogueStatus::Complete;
  recorder.save(record);
  return record;
}

struct RunSummary {
  int complete = 0;
  int partial_failures = 0;
  int skipped = 0;  // already finished before this invocation
  std::vector<std::string> errors;
};

/// Runs every config on a bounded worker pool. Dialogues are independent;
/// each one is strictly sequential. `make_services` is invoked per worker.
inline RunSummary run_all(const std::vector<RunConfig>& configs, Recorder& recorder, int workers,
                          const std::function<DialogueServices()>& make_services,
                          const std::function<void(const DialogueRecord&)>& on_done = {}) {
  RunSummary summary;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    DialogueServices services = make_services();
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const auto& config = configs[i];
      try {
        bool finished_before = false;
        if (auto existing = recorder.load(dialogue_id(config)))
          finished_before = existing->status != DialogueStatus::InProgress;
        auto record = run_dialogue(config, services, recorder);
        std::lock_guard lock(mu);
        if (finished_before) ++summary.skipped;
        if (record.status == DialogueStatus::Complete) ++summary.complete;
        else ++summary.partial_failures;
        if (on_done) on_done(record);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        ++summary.partial_failures;
        summary.errors.push_back(dialogue_id(config) + ": " + e.what());
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(configs.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
  }
  return summary;
}

}  // namespace parastyle
