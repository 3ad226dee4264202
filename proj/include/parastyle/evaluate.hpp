#pragma once

// Judging a persisted dialogue: one style judgment per assistant turn, recall
// grades, a coherence score, and (for volume/speed dialogues) the emotion and
// accent the model drifts to by default.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parastyle/judges.hpp"
#include "parastyle/orchestrator.hpp"

namespace parastyle {

enum class WpmTranscript { Asr, Native };

inline WpmTranscript parse_wpm_transcript(std::string_view s) {
  if (s == "asr") return WpmTranscript::Asr;
  if (s == "native") return WpmTranscript::Native;
  throw Error(ErrorKind::Config, "wpm_transcript must be 'asr' or 'native'");
}

struct JudgeServices {
  ClassifierClient* emotion = nullptr;
  ClassifierClient* accent = nullptr;
  AsrClient* asr = nullptr;
  WpmTranscript wpm_transcript = WpmTranscript::Asr;
  LlmClient* llm = nullptr;  // recall grading and coherence
  SpeechModel* baseline_model = nullptr;
  BaselineCache* baselines = nullptr;
  LabelMap labels = LabelMap::defaults();
  bool coherence = true;
  bool default_style = true;
  int baseline_retries = 3;
};

/// Throws Config when a backend needed for `style` is missing.
inline void require_backends(StyleValue style, bool recall_enabled, const JudgeServices& s) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::Config, std::string("judge backend missing: ") + what);
  };
  switch (attribute_of(style)) {
    case StyleAttribute::Emotion: need(s.emotion, "emotion classifier"); break;
    case StyleAttribute::Accent: need(s.accent, "accent classifier"); break;
    case StyleAttribute::Volume:
      need(s.baseline_model && s.baselines, "baseline synthesis");
      break;
    case StyleAttribute::Speed:
      need(s.baseline_model && s.baselines, "baseline synthesis");
      if (s.wpm_transcript == WpmTranscript::Asr) need(s.asr, "ASR for WPM");
      break;
  }
  if (recall_enabled) need(s.llm, "recall grading LLM");
}

struct RecallJudgment {
  int turn = 0;
  std::optional<Grade> grade;
  std::string reply;
  std::string unavailable_reason;
};

struct DefaultStyleObservation {
  int turn = 0;
  std::optional<std::string> emotion;
  std::optional<std::string> accent;
};

struct DialogueJudgments {
  std::string dialogue_id;
  std::string model_id;
  RunConfig config;
  DialogueStatus status = DialogueStatus::Complete;
  std::vector<Judgment> turns;
  std::vector<RecallJudgment> recall;
  std::optional<int> coherence;
  std::string coherence_unavailable;
  std::vector<DefaultStyleObservation> default_style;
  std::map<std::string, std::string> judge_versions;
};

namespace detail {

inline std::string speech_transcript(const AudioClip& audio, const std::optional<std::string>& native,
                                     const JudgeServices& s) {
  if (s.wpm_transcript == WpmTranscript::Asr) return s.asr->transcribe(audio);
  if (!native) throw Error(ErrorKind::Unavailable, "no transcript");
  return *native;
}

inline Judgment judge_relative(const DialogueRecord& record, const TurnRecord& t, const JudgeServices& s) {
  const StyleValue style = record.config.instruction.style;
  const auto attribute = attribute_of(style);
  const std::string version(attribute == StyleAttribute::Volume ? kVolumeJudgeVersion : kSpeedJudgeVersion);
  const std::string text = t.assistant.transcript.value_or("");
  if (text::trim(text).empty()) return unavailable_judgment(t.turn, style, version, "empty transcript");
  const auto mode = attribute == StyleAttribute::Volume ? BaselineMode::Volume : BaselineMode::Speed;
  Baseline baseline;
  try {
    baseline = s.baselines->get({record.id(), t.turn, mode}, [&] {
      const std::uint64_t seed = mix_seed(mix_seed(record.config.seed, text::fnv1a64(record.id())),
                                          0x42000u + static_cast<std::uint64_t>(t.turn));
      auto r = synthesize_baseline(*s.baseline_model, text, mode, seed, s.baseline_retries);
      return Baseline{*r.audio, r.transcript.value_or(text)};
    });
  } catch (const Error& e) {
    return unavailable_judgment(t.turn, style, version, std::string("baseline unavailable: ") + e.what());
  }
  if (mode == BaselineMode::Volume) return judge_volume(*t.assistant.audio, baseline.audio, style, t.turn);
  std::string heard, baseline_heard;
  try {
    heard = speech_transcript(*t.assistant.audio, t.assistant.transcript, s);
    baseline_heard = speech_transcript(baseline.audio, baseline.transcript, s);
  } catch (const Error& e) {
    return unavailable_judgment(t.turn, style, version, std::string("transcription failed: ") + e.what());
  }
  auto j = judge_speed(*t.assistant.audio, heard, baseline.audio, baseline_heard, style, t.turn);
  j.judge_version += s.wpm_transcript == WpmTranscript::Asr ? "+asr" : "+native";
  return j;
}

}  // namespace detail

inline DialogueJudgments judge_dialogue(const DialogueRecord& record, const JudgeServices& s) {
  const StyleValue style = record.config.instruction.style;
  require_backends(style, record.config.recall_enabled, s);
  DialogueJudgments out;
  out.dialogue_id = record.id();
  out.model_id = record.model_id;
  out.config = record.config;
  out.status = record.status;

  for (const auto& t : record.turns) {
    Judgment j;
    if (!t.assistant.audio) {
      j = unavailable_judgment(t.turn, style, "", "no audio");
    } else {
      switch (attribute_of(style)) {
        case StyleAttribute::Emotion: j = judge_emotion(*t.assistant.audio, style, *s.emotion, s.labels, t.turn); break;
        case StyleAttribute::Accent: j = judge_accent(*t.assistant.audio, style, *s.accent, s.labels, t.turn); break;
        case StyleAttribute::Volume:
        case StyleAttribute::Speed: j = detail::judge_relative(record, t, s); break;
      }
    }
    if (!j.judge_version.empty()) out.judge_versions[std::string(to_string(attribute_of(style)))] = j.judge_version;
    out.turns.push_back(std::move(j));

    if (t.recall) {
      RecallJudgment rj;
      rj.turn = t.turn;
      std::optional<std::string> answer = t.recall->answer.transcript;
      try {
        if (!answer && t.recall->answer.audio && s.asr) answer = s.asr->transcribe(*t.recall->answer.audio);
        auto g = judge_recall(record.config.instruction.rendered_text, answer.value_or(""), *s.llm,
                              mix_seed(record.config.seed, static_cast<std::uint64_t>(t.turn)));
        if (g) {
          rj.grade = g->grade;
          rj.reply = g->rationale_text;
        } else {
          rj.unavailable_reason = "unparseable grade";
        }
      } catch (const Error& e) {
        rj.unavailable_reason = e.what();
      }
      out.recall.push_back(std::move(rj));
    }

    const auto attribute = attribute_of(style);
    if (s.default_style && t.assistant.audio && (attribute == StyleAttribute::Volume || attribute == StyleAttribute::Speed)) {
      DefaultStyleObservation obs;
      obs.turn = t.turn;
      auto observe = [&](ClassifierClient* c, StyleAttribute a) -> std::optional<std::string> {
        if (!c) return std::nullopt;
        try {
          return restricted_argmax(c->classify(*t.assistant.audio), s.labels.allowed(a));
        } catch (const Error&) {
          return std::nullopt;
        }
      };
      obs.emotion = observe(s.emotion, StyleAttribute::Emotion);
      obs.accent = observe(s.accent, StyleAttribute::Accent);
      if (obs.emotion || obs.accent) out.default_style.push_back(std::move(obs));
    }
  }
  if (s.emotion) out.judge_versions["emotion"] = s.emotion->version();
  if (s.accent) out.judge_versions["accent"] = s.accent->version();
  if (record.config.recall_enabled) out.judge_versions["recall"] = "llm-recall@1";

  if (s.coherence && s.llm && !record.turns.empty()) {
    try {
      out.coherence = judge_coherence(coherence_transcript(record), *s.llm, record.config.seed);
      if (!out.coherence) out.coherence_unavailable = "unparseable score";
    } catch (const Error& e) {
      out.coherence_unavailable = e.what();
    }
    out.judge_versions["coherence"] = "llm-coherence@1";
  }
  return out;
}

inline nlohmann::json to_json(const DialogueJudgments& d) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& j : d.turns) turns.push_back(to_json(j));
  nlohmann::json recall = nlohmann::json::array();
  for (const auto& r : d.recall) {
    nlohmann::json jr{{"turn", r.turn}, {"reply", r.reply}};
    jr["grade"] = r.grade ? nlohmann::json(std::string(1, to_char(*r.grade))) : nlohmann::json(nullptr);
    if (!r.unavailable_reason.empty()) jr["unavailable_reason"] = r.unavailable_reason;
    recall.push_back(std::move(jr));
  }
  nlohmann::json defaults = nlohmann::json::array();
  for (const auto& o : d.default_style) {
    nlohmann::json jo{{"turn", o.turn}};
    if (o.emotion) jo["emotion"] = *o.emotion;
    if (o.accent) jo["accent"] = *o.accent;
    defaults.push_back(std::move(jo));
  }
  nlohmann::json out{{"dialogue_id", d.dialogue_id}, {"model_id", d.model_id}, {"config", to_json(d.config)},
                     {"status", std::string(to_string(d.status))}, {"turns", std::move(turns)},
                     {"recall", std::move(recall)}, {"default_style", std::move(defaults)},
                     {"judge_versions", d.judge_versions}};
  out["coherence"] = d.coherence ? nlohmann::json(*d.coherence) : nlohmann::json(nullptr);
  if (!d.coherence_unavailable.empty()) out["coherence_unavailable"] = d.coherence_unavailable;
  return out;
}

inline DialogueJudgments dialogue_judgments_from_json(const nlohmann::json& j) {
  DialogueJudgments d;
  try {
    d.dialogue_id = j.at("dialogue_id").get<std::string>();
    d.model_id = j.at("model_id").get<std::string>();
    d.config = run_config_from_json(j.at("config"));
    d.status = parse_status(j.at("status").get<std::string>());
    for (const auto& t : j.at("turns")) d.turns.push_back(judgment_from_json(t));
    for (const auto& r : j.value("recall", nlohmann::json::array())) {
      RecallJudgment rj;
      rj.turn = r.at("turn").get<int>();
      if (!r.at("grade").is_null()) rj.grade = parse_grade_letter(r["grade"].get<std::string>().at(0));
      rj.reply = r.value("reply", std::string());
      rj.unavailable_reason = r.value("unavailable_reason", std::string());
      d.recall.push_back(std::move(rj));
    }
    for (const auto& o : j.value("default_style", nlohmann::json::array())) {
      DefaultStyleObservation obs;
      obs.turn = o.at("turn").get<int>();
      if (o.contains("emotion")) obs.emotion = o["emotion"].get<std::string>();
      if (o.contains("accent")) obs.accent = o["accent"].get<std::string>();
      d.default_style.push_back(std::move(obs));
    }
    if (j.contains("coherence") && !j["coherence"].is_null()) d.coherence = j["coherence"].get<int>();
    d.coherence_unavailable = j.value("coherence_unavailable", std::string());
    d.judge_versions = j.value("judge_versions", std::map<std::string, std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed judgments file: ") + e.what());
  }
  return d;
}

}  // namespace parastyle
