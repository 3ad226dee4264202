#pragma once

// HTTP clients: generic remote dialogue model, the judge sidecar
// (classification + transcription) and OpenAI-compatible LLM / TTS services.

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "parastyle/audio.hpp"
#include "parastyle/cascade.hpp"
#include "parastyle/error.hpp"
#include "parastyle/model.hpp"
#include "parastyle/text.hpp"

namespace parastyle {

struct Endpoint {
  std::string url;      // "http://host:port[/prefix]"
  std::string api_key;  // sent as a bearer token when non-empty
  double timeout_seconds = 120.0;
  std::string model;    // model name forwarded to OpenAI-compatible services
};

inline void to_json(nlohmann::json& j, const Endpoint& e) {
  j = {{"url", e.url}, {"timeout_seconds", e.timeout_seconds}};
  if (!e.model.empty()) j["model"] = e.model;
}

inline Endpoint endpoint_from_json(const nlohmann::json& j) {
  Endpoint e;
  if (j.is_string()) {
    e.url = text::expand_env(j.get<std::string>());
    return e;
  }
  e.url = text::expand_env(j.at("url").get<std::string>());
  e.api_key = text::expand_env(j.value("api_key", std::string()));
  e.timeout_seconds = j.value("timeout_seconds", 120.0);
  e.model = text::expand_env(j.value("model", std::string()));
  if (e.url.empty()) throw Error(ErrorKind::Config, "endpoint url is empty");
  return e;
}

namespace http {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::Config, "endpoint url lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl s;
  s.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) s.prefix = url.substr(path_start);
  while (!s.prefix.empty() && s.prefix.back() == '/') s.prefix.pop_back();
  return s;
}

inline ErrorKind kind_for_status(int status) {
  if (status == 503) return ErrorKind::Unavailable;
  if (status == 408 || status == 504) return ErrorKind::Timeout;
  return ErrorKind::Transport;
}

/// Thin wrapper that converts every failure mode into parastyle::Error.
class Client {
 public:
  explicit Client(Endpoint endpoint) : endpoint_(std::move(endpoint)), url_(split_url(endpoint_.url)) {}

  const Endpoint& endpoint() const { return endpoint_; }

  httplib::Result raw_post(const std::string& path, const std::string& body, const std::string& content_type) {
    auto cli = make();
    return cli->Post(url_.prefix + path, headers(), body, content_type);
  }

  std::string post_for_body(const std::string& path, const nlohmann::json& body) {
    auto res = raw_post(path, body.dump(), "application/json");
    return check(res, path);
  }

  nlohmann::json post_json(const std::string& path, const nlohmann::json& body) {
    return parse(post_for_body(path, body), path);
  }

  nlohmann::json get_json(const std::string& path) {
    auto cli = make();
    auto res = cli->Get(url_.prefix + path, headers());
    return parse(check(res, path), path);
  }

 private:
  std::unique_ptr<httplib::Client> make() const {
    auto cli = std::make_unique<httplib::Client>(url_.origin);
    const auto secs = static_cast<time_t>(endpoint_.timeout_seconds);
    const auto usecs = static_cast<time_t>((endpoint_.timeout_seconds - static_cast<double>(secs)) * 1e6);
    cli->set_connection_timeout(secs, usecs);
    cli->set_read_timeout(secs, usecs);
    cli->set_write_timeout(secs, usecs);
    return cli;
  }

  httplib::Headers headers() const {
    httplib::Headers h;
    if (!endpoint_.api_key.empty()) h.emplace("Authorization", "Bearer " + endpoint_.api_key);
    return h;
  }

  std::string check(const httplib::Result& res, const std::string& path) const {
    const std::string where = endpoint_.url + path;
    if (!res) {
      const auto err = res.error();
      const auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                            ? ErrorKind::Timeout
                            : ErrorKind::Transport;
      throw Error(kind, where + ": " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300)
      throw Error(kind_for_status(res->status),
                  where + ": HTTP " + std::to_string(res->status) + " " + res->body.substr(0, 200));
    return res->body;
  }

  static nlohmann::json parse(const std::string& body, const std::string& path) {
    try {
      return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, "invalid JSON from " + path + ": " + e.what());
    }
  }

  Endpoint endpoint_;
  SplitUrl url_;
};

}  // namespace http

/// Remote dialogue model speaking the harness wire format:
///   POST {url}/respond {messages:[{role, text?, audio_b64?}], config}
///   -> {audio_b64?, transcript?, sample_rate}
/// User turns that carry audio are sent as audio only, so the model has to
/// listen to them.
class RemoteSpeechModel : public SpeechModel {
 public:
  RemoteSpeechModel(Endpoint endpoint, std::string name, bool send_user_text = false)
      : client_(std::move(endpoint)), name_(std::move(name)), send_user_text_(send_user_text) {}

  std::string id() const override { return name_; }

  static nlohmann::json encode_message(const Message& m, bool send_user_text) {
    nlohmann::json j{{"role", detail::chat_role(m.role)}};
    if (m.role == Role::RecallQuery || m.role == Role::RecallAnswer) j["kind"] = std::string(to_string(m.role));
    const bool heard = m.role == Role::User || m.role == Role::RecallQuery;
    if (m.text && (!heard || !m.audio || send_user_text)) j["text"] = *m.text;
    if (m.audio) j["audio_b64"] = wav_base64(*m.audio);
    return j;
  }

  SlmResponse respond(std::span<const Message> history, const GenerationOptions& options) override {
    require_respondable(history);
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : history) messages.push_back(encode_message(m, send_user_text_));
    nlohmann::json body{{"messages", std::move(messages)},
                        {"config", {{"temperature", options.temperature}, {"seed", options.seed}}}};
    return decode_response(client_.post_json("/respond", body));
  }

  static SlmResponse decode_response(const nlohmann::json& j) {
    SlmResponse r;
    try {
      if (j.contains("transcript") && j["transcript"].is_string()) {
        r.transcript = j["transcript"].get<std::string>();
        r.transcript_native = true;
      }
      if (j.contains("audio_b64") && j["audio_b64"].is_string() && !j["audio_b64"].get<std::string>().empty()) {
        r.audio = wav_from_base64(j["audio_b64"].get<std::string>());
        if (j.contains("sample_rate") && j["sample_rate"].get<int>() != r.audio->sample_rate)
          throw Error(ErrorKind::Parse, "sample_rate field disagrees with the WAV header");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, std::string("malformed model response: ") + e.what());
    }
    return r;
  }

  void ping() override { client_.get_json("/health"); }

 private:
  http::Client client_;
  std::string name_;
  bool send_user_text_;
};

/// Judge sidecar: /classify/emotion, /classify/accent, /transcribe, /health.
/// The first successful /health call pins every hosted model's version; a
/// response reporting a different version afterwards is refused.
class SidecarClient {
 public:
  explicit SidecarClient(Endpoint endpoint) : client_(std::move(endpoint)) {}

  static nlohmann::json request_body(const AudioClip& clip) {
    return {{"audio_b64", wav_base64(clip)}, {"sample_rate", clip.sample_rate}};
  }

  /// model key ("emotion", "accent", "transcribe") -> "model_id@version".
  std::map<std::string, std::string> health() {
    const auto j = client_.get_json("/health");
    std::map<std::string, std::string> out;
    try {
      for (const auto& [key, info] : j.at("models").items())
        out[key] = info.value("model_id", std::string("unknown")) + "@" + info.value("model_version", std::string("unknown"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, std::string("malformed /health response: ") + e.what());
    }
    return out;
  }

  /// Records the versions reported by /health; later calls must match.
  std::map<std::string, std::string> pin() {
    auto versions = health();
    std::lock_guard lock(mu_);
    if (pinned_.empty()) pinned_ = versions;
    else if (pinned_ != versions) throw Error(ErrorKind::Config, "sidecar model versions changed since pinning");
    return pinned_;
  }

  std::string pinned_version(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = pinned_.find(key);
    return it == pinned_.end() ? std::string("unpinned") : it->second;
  }

  LabelDistribution classify(const std::string& task, const AudioClip& clip) {
    const auto j = client_.post_json("/classify/" + task, request_body(clip));
    LabelDistribution d;
    try {
      d.labels = j.at("labels").get<std::vector<std::string>>();
      d.probs = j.at("probs").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, std::string("malformed classification response: ") + e.what());
    }
    d.validate();
    check_version(task, j);
    return d;
  }

  std::string transcribe(const AudioClip& clip) {
    const auto j = client_.post_json("/transcribe", request_body(clip));
    if (!j.contains("transcript") || !j["transcript"].is_string())
      throw Error(ErrorKind::Parse, "transcription response lacks a transcript");
    check_version("transcribe", j);
    return j["transcript"].get<std::string>();
  }

 private:
  void check_version(const std::string& key, const nlohmann::json& j) {
    if (!j.contains("model_version")) return;
    const std::string reported = j.value("model_id", std::string("unknown")) + "@" + j["model_version"].get<std::string>();
    std::lock_guard lock(mu_);
    auto it = pinned_.find(key);
    if (it != pinned_.end() && it->second != reported)
      throw Error(ErrorKind::Config, key + " model changed from " + it->second + " to " + reported);
  }

  http::Client client_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> pinned_;
};

class SidecarClassifier : public ClassifierClient {
 public:
  SidecarClassifier(std::shared_ptr<SidecarClient> sidecar, std::string task)
      : sidecar_(std::move(sidecar)), task_(std::move(task)) {}
  LabelDistribution classify(const AudioClip& audio) override { return sidecar_->classify(task_, audio); }
  std::string version() override { return sidecar_->pinned_version(task_); }

 private:
  std::shared_ptr<SidecarClient> sidecar_;
  std::string task_;
};

class SidecarAsr : public AsrClient {
 public:
  explicit SidecarAsr(std::shared_ptr<SidecarClient> sidecar) : sidecar_(std::move(sidecar)) {}
  std::string transcribe(const AudioClip& audio) override { return sidecar_->transcribe(audio); }
  void ping() override { sidecar_->health(); }

 private:
  std::shared_ptr<SidecarClient> sidecar_;
};

/// POST {url}/chat/completions, OpenAI request and response shape.
class OpenAiLlm : public LlmClient {
 public:
  explicit OpenAiLlm(Endpoint endpoint) : client_(std::move(endpoint)) {}

  std::string complete(const std::vector<ChatTurn>& messages, const LlmOptions& options) override {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json body{{"model", client_.endpoint().model},
                        {"messages", std::move(msgs)},
                        {"temperature", options.temperature},
                        {"seed", options.seed}};
    const auto j = client_.post_json("/chat/completions", body);
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, std::string("malformed completion: ") + e.what());
    }
  }

  void ping() override { client_.get_json("/models"); }

 private:
  http::Client client_;
};

/// POST {url}/audio/speech returning WAV bytes. The style directive travels
/// in the "instructions" field.
class OpenAiTts : public TtsClient {
 public:
  explicit OpenAiTts(Endpoint endpoint, std::string voice = "alloy")
      : client_(std::move(endpoint)), voice_(std::move(voice)) {}

  AudioClip synthesize(std::string_view input, std::string_view style_directive) override {
    nlohmann::json body{{"model", client_.endpoint().model},
                        {"input", std::string(input)},
                        {"voice", voice_},
                        {"response_format", "wav"}};
    if (!style_directive.empty()) body["instructions"] = std::string(style_directive);
    return downmix(decode_wav(client_.post_for_body("/audio/speech", body)));
  }

  void ping() override { client_.get_json("/models"); }

 private:
  http::Client client_;
  std::string voice_;
};

}  // namespace parastyle
