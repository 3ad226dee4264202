#pragma once

// On-disk run directory:
//   manifest.json
//   records/{dialogue}.json          record (byte-stable for equal inputs)
//   records/{dialogue}.timing.json   wall-clock metadata, kept apart
//   audio/{dialogue}_{turn}_{role}.wav
//   judgments/{dialogue}.json
//   baselines/{dialogue}_{turn}_{mode}.wav / .json
// Every file is written to a temporary name and renamed into place, so a
// killed process never leaves a truncated record or clip behind.

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parastyle/audio.hpp"
#include "parastyle/orchestrator.hpp"

namespace parastyle {

namespace fs = std::filesystem;

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline nlohmann::json read_json_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

inline void write_json_file(const fs::path& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

inline std::string audio_file_name(const std::string& dialogue, int turn, Role role) {
  return dialogue + "_" + std::to_string(turn) + "_" + std::string(to_string(role)) + ".wav";
}

class RunStore : public Recorder {
 public:
  explicit RunStore(fs::path root) : root_(std::move(root)) {
    for (const char* sub : {"records", "audio", "judgments", "baselines"}) fs::create_directories(root_ / sub);
  }

  const fs::path& root() const { return root_; }
  fs::path record_path(const std::string& id) const { return root_ / "records" / (id + ".json"); }
  fs::path judgment_path(const std::string& id) const { return root_ / "judgments" / (id + ".json"); }
  fs::path audio_path(const std::string& name) const { return root_ / "audio" / name; }

  void save(const DialogueRecord& record) override {
    const std::string id = record.id();
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : record.turns) {
      nlohmann::json jt{{"turn", t.turn},
                        {"user", put_message(id, t.turn, t.user)},
                        {"assistant", put_response(id, t.turn, Role::Assistant, t.assistant)}};
      if (t.recall)
        jt["recall"] = {{"query", put_message(id, t.turn, t.recall->query)},
                        {"answer", put_response(id, t.turn, Role::RecallAnswer, t.recall->answer)}};
      turns.push_back(std::move(jt));
    }
    nlohmann::json j{{"dialogue_id", id},
                     {"model_id", record.model_id},
                     {"status", std::string(to_string(record.status))},
                     {"config", to_json(record.config)},
                     {"turns", std::move(turns)}};
    if (record.system) j["system"] = put_message(id, 0, *record.system);
    if (record.failure)
      j["failure"] = {{"turn", record.failure->turn},
                      {"attempts", record.failure->attempts},
                      {"stage", record.failure->stage},
                      {"reason", record.failure->reason}};
    write_json_file(record_path(id), j);
    if (!record.turn_seconds.empty())
      write_json_file(root_ / "records" / (id + ".timing.json"), {{"turn_seconds", record.turn_seconds}});
  }

  std::optional<DialogueRecord> load(const std::string& id) override {
    const auto path = record_path(id);
    if (!fs::exists(path)) return std::nullopt;
    const auto j = read_json_file(path);
    DialogueRecord r;
    try {
      r.config = run_config_from_json(j.at("config"));
      r.model_id = j.at("model_id").get<std::string>();
      r.status = parse_status(j.at("status").get<std::string>());
      if (j.contains("system")) r.system = get_message(j["system"]);
      for (const auto& jt : j.at("turns")) {
        TurnRecord t;
        t.turn = jt.at("turn").get<int>();
        t.user = get_message(jt.at("user"));
        t.assistant = get_response(jt.at("assistant"));
        if (jt.contains("recall"))
          t.recall = RecallExchange{get_message(jt["recall"].at("query")), get_response(jt["recall"].at("answer"))};
        r.turns.push_back(std::move(t));
      }
      if (j.contains("failure")) {
        const auto& f = j["failure"];
        r.failure = TurnFailure{f.at("turn").get<int>(), f.at("attempts").get<int>(), f.at("stage").get<std::string>(),
                                f.at("reason").get<std::string>()};
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    if (r.id() != id) throw Error(ErrorKind::Parse, path.string() + ": dialogue id mismatch");
    const auto timing = root_ / "records" / (id + ".timing.json");
    if (fs::exists(timing)) r.turn_seconds = read_json_file(timing).value("turn_seconds", std::vector<double>{});
    return r;
  }

  /// Dialogue ids with a record file, sorted.
  std::vector<std::string> record_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(root_ / "records")) {
      const auto name = e.path().filename().string();
      const std::string suffix = ".json";
      if (name.size() > suffix.size() && name.ends_with(suffix) && !name.ends_with(".timing.json") &&
          !name.ends_with(".tmp"))
        ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  std::vector<DialogueRecord> load_all() {
    std::vector<DialogueRecord> out;
    for (const auto& id : record_ids()) out.push_back(*load(id));
    return out;
  }

  std::optional<nlohmann::json> load_judgments(const std::string& id) const {
    const auto path = judgment_path(id);
    if (!fs::exists(path)) return std::nullopt;
    return read_json_file(path);
  }

  void save_judgments(const std::string& id, const nlohmann::json& j) const { write_json_file(judgment_path(id), j); }

  bool has_manifest() const { return fs::exists(root_ / "manifest.json"); }
  nlohmann::json manifest() const { return read_json_file(root_ / "manifest.json"); }
  void save_manifest(const nlohmann::json& j) const { write_json_file(root_ / "manifest.json", j); }

 private:
  // Clips are immutable once written; re-saving a record skips existing ones.
  std::string put_audio(const std::string& name, const AudioClip& clip) const {
    const auto path = audio_path(name);
    if (!fs::exists(path)) write_file_atomic(path, encode_wav(clip));
    return name;
  }

  nlohmann::json put_message(const std::string& id, int turn, const Message& m) const {
    nlohmann::json j{{"role", std::string(to_string(m.role))}};
    if (m.text) j["text"] = *m.text;
    if (m.audio) j["audio"] = put_audio(audio_file_name(id, turn, m.role), *m.audio);
    return j;
  }

  nlohmann::json put_response(const std::string& id, int turn, Role role, const SlmResponse& r) const {
    nlohmann::json j{{"attempt_count", r.attempt_count}, {"transcript_native", r.transcript_native}};
    if (r.transcript) j["transcript"] = *r.transcript;
    if (r.audio) j["audio"] = put_audio(audio_file_name(id, turn, role), *r.audio);
    return j;
  }

  AudioClip get_audio(const std::string& name) const { return read_wav_file(audio_path(name).string()); }

  Message get_message(const nlohmann::json& j) const {
    Message m;
    m.role = parse_role(j.at("role").get<std::string>());
    if (j.contains("text")) m.text = j["text"].get<std::string>();
    if (j.contains("audio")) m.audio = get_audio(j["audio"].get<std::string>());
    return m;
  }

  SlmResponse get_response(const nlohmann::json& j) const {
    SlmResponse r;
    r.attempt_count = j.at("attempt_count").get<int>();
    r.transcript_native = j.value("transcript_native", false);
    if (j.contains("transcript")) r.transcript = j["transcript"].get<std::string>();
    if (j.contains("audio")) r.audio = get_audio(j["audio"].get<std::string>());
    return r;
  }

  fs::path root_;
};

}  // namespace parastyle
