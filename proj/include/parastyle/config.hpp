#pragma once

// Run manifests and judge configuration: JSON documents naming the evaluated
// model, the user simulator, the run matrix and the judge backends. String
// values may reference environment variables as ${NAME}.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "parastyle/cascade.hpp"
#include "parastyle/core.hpp"
#include "parastyle/dataset.hpp"
#include "parastyle/evaluate.hpp"
#include "parastyle/remote.hpp"
#include "parastyle/scripted.hpp"
#include "parastyle/store.hpp"
#include "parastyle/synth.hpp"

namespace parastyle {

namespace detail {

inline fs::path resolve_path(const fs::path& base_dir, const std::string& p) {
  fs::path path(text::expand_env(p));
  return path.is_absolute() ? path : base_dir / path;
}

inline std::string kind_of(const nlohmann::json& spec, const char* what) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw Error(ErrorKind::Config, std::string(what) + " spec needs a \"kind\"");
  return spec["kind"].get<std::string>();
}

}  // namespace detail

inline std::shared_ptr<LlmClient> make_llm(const nlohmann::json& spec) {
  const auto kind = detail::kind_of(spec, "llm");
  if (kind == "openai") return std::make_shared<OpenAiLlm>(endpoint_from_json(spec.at("endpoint")));
  if (kind == "offline") return std::make_shared<OfflineLlm>(spec.value("coherence_score", 4));
  throw Error(ErrorKind::Config, "unknown llm kind '" + kind + "'");
}

inline std::shared_ptr<TtsClient> make_tts(const nlohmann::json& spec) {
  const auto kind = detail::kind_of(spec, "tts");
  if (kind == "openai")
    return std::make_shared<OpenAiTts>(endpoint_from_json(spec.at("endpoint")), spec.value("voice", std::string("alloy")));
  if (kind == "tone") return std::make_shared<ToneTts>(spec.value("sample_rate", 24000), spec.value("wpm", 160.0));
  throw Error(ErrorKind::Config, "unknown tts kind '" + kind + "'");
}

inline std::shared_ptr<AsrClient> make_asr(const nlohmann::json& spec) {
  const auto kind = detail::kind_of(spec, "asr");
  if (kind == "sidecar") return std::make_shared<SidecarAsr>(std::make_shared<SidecarClient>(endpoint_from_json(spec.at("endpoint"))));
  throw Error(ErrorKind::Config, "unknown asr kind '" + kind + "'");
}

inline std::shared_ptr<SpeechModel> make_model(const nlohmann::json& spec) {
  const auto kind = detail::kind_of(spec, "model");
  const auto name = spec.value("name", kind);
  if (kind == "scripted") return std::make_shared<ScriptedModel>(schedule_from_json(spec.at("schedule")), name);
  if (kind == "remote")
    return std::make_shared<RemoteSpeechModel>(endpoint_from_json(spec.at("endpoint")), name,
                                               spec.value("send_user_text", false));
  if (kind == "cascade") {
    std::shared_ptr<AsrClient> asr = spec.contains("asr") ? make_asr(spec["asr"]) : nullptr;
    return std::make_shared<CascadeModel>(asr, make_llm(spec.at("llm")), make_tts(spec.at("tts")), name);
  }
  throw Error(ErrorKind::Config, "unknown model kind '" + kind + "'");
}

struct Manifest {
  std::string run_id;
  nlohmann::json model_spec;
  nlohmann::json simulator_spec;
  nlohmann::json asr_spec;  // null when absent
  std::vector<RunConfig> configs;
  std::string dataset_hash;
  bool simulator_sees_recall = false;
  nlohmann::json source;  // the manifest as read, after expansion
};

inline std::vector<StyleValue> parse_style_list(const nlohmann::json& j) {
  std::vector<StyleValue> out;
  if (j.is_string() && j.get<std::string>() == "all") return {kAllStyles.begin(), kAllStyles.end()};
  for (const auto& s : j) out.push_back(parse_style(s.get<std::string>()));
  return out;
}

/// Parses a manifest; relative paths resolve against `base_dir`.
inline Manifest parse_manifest(const nlohmann::json& j, const fs::path& base_dir = ".") {
  Manifest m;
  try {
    m.source = j;
    m.run_id = text::expand_env(j.at("run_id").get<std::string>());
    if (m.run_id.empty()) throw Error(ErrorKind::Config, "run_id is empty");
    m.model_spec = j.at("model");
    m.simulator_spec = j.value("simulator", nlohmann::json{{"llm", {{"kind", "offline"}}}, {"tts", {{"kind", "tone"}}}});
    m.asr_spec = j.value("asr", nlohmann::json(nullptr));
    m.simulator_sees_recall = m.simulator_spec.value("sees_recall", false);

    if (j.contains("configs")) {
      for (const auto& c : j["configs"]) m.configs.push_back(run_config_from_json(c));
      std::vector<Opener> openers;
      for (const auto& c : m.configs) openers.push_back(c.opener);
      m.dataset_hash = dataset_hash(openers);
    } else {
      const auto& mx = j.at("matrix");
      TemplateRegistry registry = mx.contains("templates")
                                      ? TemplateRegistry::load(detail::resolve_path(base_dir, mx["templates"]).string())
                                      : TemplateRegistry::builtin();
      std::set<std::string> exclusions;
      if (mx.contains("exclusions")) exclusions = load_exclusions(detail::resolve_path(base_dir, mx["exclusions"]).string());
      auto openers = load_openers(detail::resolve_path(base_dir, mx.at("openers")).string(), exclusions);
      if (mx.contains("topics")) {
        const auto n = mx["topics"].get<std::size_t>();
        if (n < openers.size()) openers.resize(n);
      }
      m.dataset_hash = dataset_hash(openers);
      RunConfig base;
      base.instruction.template_id = mx.value("template", std::string("default"));
      base.prompt_position = parse_position(mx.value("prompt_position", std::string("user")));
      base.recall_enabled = mx.value("recall_enabled", false);
      base.assistant_turns = mx.value("assistant_turns", 4);
      base.max_retries = mx.value("max_retries", 3);
      base.seed = mx.value("seed", std::uint64_t{0});
      base.temperature = mx.value("temperature", 1.0);
      const auto styles = parse_style_list(mx.value("styles", nlohmann::json("all")));
      m.configs = expand_run_matrix(styles, openers, base, registry);
    }
    for (const auto& c : m.configs) c.validate();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    throw Error(ErrorKind::Config, std::string("manifest: ") + e.what());
  }
  if (m.configs.empty()) throw Error(ErrorKind::Config, "manifest yields no dialogues");
  return m;
}

inline Manifest load_manifest(const fs::path& path) {
  const auto j = read_json_file(path);
  return parse_manifest(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

/// Backends built from a manifest; each worker gets its own set.
struct RunBackends {
  std::shared_ptr<SpeechModel> model;
  std::shared_ptr<UserSimulator> simulator;
  std::shared_ptr<AsrClient> asr;

  DialogueServices services(bool simulator_sees_recall) const {
    DialogueServices s{*model, *simulator};
    s.asr = asr.get();
    s.simulator_sees_recall = simulator_sees_recall;
    return s;
  }
};

inline RunBackends make_run_backends(const Manifest& m) {
  RunBackends b;
  b.model = make_model(m.model_spec);
  SimulatorOptions opts;
  opts.word_cap = m.simulator_spec.value("word_cap", 20);
  opts.temperature = m.simulator_spec.value("temperature", 1.0);
  b.simulator = std::make_shared<UserSimulator>(make_llm(m.simulator_spec.at("llm")),
                                                make_tts(m.simulator_spec.at("tts")), opts);
  if (!m.asr_spec.is_null()) b.asr = make_asr(m.asr_spec);
  return b;
}

// ---------------------------------------------------------------------------
// Judge configuration

struct JudgeBackends {
  std::shared_ptr<SidecarClient> sidecar;
  std::shared_ptr<ClassifierClient> emotion;
  std::shared_ptr<ClassifierClient> accent;
  std::shared_ptr<AsrClient> asr;
  std::shared_ptr<LlmClient> llm;
  std::shared_ptr<SpeechModel> baseline_model;
  std::shared_ptr<BaselineCache> baselines;
  JudgeServices services;
  int workers = 4;
};

inline std::shared_ptr<ClassifierClient> make_classifier(const nlohmann::json& spec, const std::string& task,
                                                         const std::shared_ptr<SidecarClient>& sidecar) {
  const auto kind = detail::kind_of(spec, "classifier");
  if (kind == "marker")
    return std::make_shared<synth::MarkerClassifier>(task == "emotion" ? synth::MarkerClassifier::Family::Emotion
                                                                       : synth::MarkerClassifier::Family::Accent);
  if (kind == "sidecar") {
    auto client = spec.contains("endpoint") ? std::make_shared<SidecarClient>(endpoint_from_json(spec["endpoint"])) : sidecar;
    if (!client) throw Error(ErrorKind::Config, task + " classifier needs a sidecar endpoint");
    return std::make_shared<SidecarClassifier>(client, task);
  }
  throw Error(ErrorKind::Config, "unknown classifier kind '" + kind + "'");
}

/// `run_model_spec` is the model of the run being judged; baselines reuse it
/// unless the judge config names another.
inline JudgeBackends make_judge_backends(const nlohmann::json& j, const nlohmann::json& run_model_spec,
                                         const fs::path& run_dir) {
  JudgeBackends b;
  try {
    if (j.contains("sidecar")) b.sidecar = std::make_shared<SidecarClient>(endpoint_from_json(j["sidecar"]));
    auto classifier_spec = [&](const char* task) -> nlohmann::json {
      if (j.contains(task)) return j[task];
      if (b.sidecar) return {{"kind", "sidecar"}};
      return nullptr;
    };
    if (auto s = classifier_spec("emotion"); !s.is_null()) b.emotion = make_classifier(s, "emotion", b.sidecar);
    if (auto s = classifier_spec("accent"); !s.is_null()) b.accent = make_classifier(s, "accent", b.sidecar);
    if (j.contains("asr")) b.asr = make_asr(j["asr"]);
    else if (b.sidecar) b.asr = std::make_shared<SidecarAsr>(b.sidecar);
    if (j.contains("llm")) b.llm = make_llm(j["llm"]);
    const auto baseline = j.value("baseline_model", nlohmann::json("run"));
    b.baseline_model = make_model(baseline.is_string() && baseline.get<std::string>() == "run" ? run_model_spec : baseline);
    b.baselines = std::make_shared<BaselineCache>(run_dir / "baselines");
    b.workers = j.value("workers", 4);

    auto& s = b.services;
    s.emotion = b.emotion.get();
    s.accent = b.accent.get();
    s.asr = b.asr.get();
    s.llm = b.llm.get();
    s.baseline_model = b.baseline_model.get();
    s.baselines = b.baselines.get();
    s.wpm_transcript = parse_wpm_transcript(j.value("wpm_transcript", std::string("asr")));
    s.coherence = j.value("coherence", true);
    s.default_style = j.value("default_style", true);
    if (j.contains("labels"))
      for (const auto& [style, label] : j["labels"].items()) s.labels.labels[parse_style(style)] = label.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("judge config: ") + e.what());
  }
  return b;
}

}  // namespace parastyle
