#pragma once

// Conversation openers: LLM rewriting of source dialogues, and loading of
// the reviewed opener file with its manual exclusion list.

#include <fstream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "parastyle/core.hpp"
#include "parastyle/model.hpp"
#include "parastyle/prompts.hpp"
#include "parastyle/text.hpp"

namespace parastyle {

struct SourceDialogue {
  std::string narrative;
  std::string first_utterance;
  std::string source_id;
};

struct Accepted {
  std::string text;
};
struct RejectedByModel {};
struct RejectedManually {
  std::string reason;
};

struct OpenerCandidate {
  std::string source_id;
  std::variant<Accepted, RejectedByModel, RejectedManually> status;

  bool accepted() const { return std::holds_alternative<Accepted>(status); }
};

inline std::string opener_prompt(const SourceDialogue& src) {
  return text::fill_slots(prompts::kOpenerGeneration,
                          {{"narrative", src.narrative}, {"first_utterance", src.first_utterance}});
}

/// Trims the reply, keeps its first non-empty line and strips one layer of
/// matching quotes.
inline std::string normalize_opener_reply(std::string_view reply) {
  std::string line;
  std::size_t start = 0;
  const std::string r(reply);
  while (start <= r.size()) {
    auto end = r.find('\n', start);
    if (end == std::string::npos) end = r.size();
    line = text::trim(std::string_view(r).substr(start, end - start));
    if (!line.empty()) break;
    start = end + 1;
  }
  static const std::pair<std::string_view, std::string_view> kQuotes[] = {
      {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}};
  for (const auto& [open, close] : kQuotes) {
    if (line.size() >= open.size() + close.size() && line.starts_with(open) && line.ends_with(close)) {
      line = text::trim(line.substr(open.size(), line.size() - open.size() - close.size()));
      break;
    }
  }
  return line;
}

inline bool is_rejection(std::string_view normalized) {
  std::string s = text::to_lower(text::trim(normalized));
  while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.pop_back();
  return s == "no";
}

inline OpenerCandidate generate_opener(const SourceDialogue& src, LlmClient& llm, std::uint64_t seed = 0) {
  if (text::trim(src.narrative).empty() || text::trim(src.first_utterance).empty())
    throw Error(ErrorKind::InvalidArgument, "source " + src.source_id + " has an empty narrative or utterance");
  const auto reply = llm.complete({{"user", opener_prompt(src)}}, LlmOptions{1.0, seed});
  const auto line = normalize_opener_reply(reply);
  if (line.empty() || is_rejection(line)) return {src.source_id, RejectedByModel{}};
  return {src.source_id, Accepted{line}};
}

inline std::vector<SourceDialogue> load_sources(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::vector<SourceDialogue> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("narrative").get<std::string>(), j.at("first_utterance").get<std::string>(),
                     j.at("source_id").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

/// Exclusion file: one source id per line, either bare or as a JSON
/// record {"source_id": ..., "reason": ...}. '#' starts a comment line.
inline std::set<std::string> load_exclusions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::set<std::string> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '{') {
      try {
        out.insert(nlohmann::json::parse(t).at("source_id").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, path + ":" + std::to_string(n) + ": " + e.what());
      }
    } else {
      out.insert(t);
    }
  }
  return out;
}

/// Opener file: one JSON record {source_id, text} per line. Excluded
/// sources are dropped and topic ids 1..N follow file order.
inline std::vector<Opener> load_openers(const std::string& path, const std::set<std::string>& exclusions = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::vector<Opener> out;
  std::set<std::string> seen;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(n);
    Opener o;
    try {
      const auto j = nlohmann::json::parse(line);
      o.source_id = j.contains("source_id") ? j["source_id"].get<std::string>()
                                            : std::to_string(j.at("topic_id").get<int>());
      o.text = text::trim(j.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, where + ": " + e.what());
    }
    if (o.text.empty()) throw Error(ErrorKind::Parse, where + ": empty opener text");
    if (!seen.insert(o.source_id).second) throw Error(ErrorKind::Parse, where + ": duplicate source_id '" + o.source_id + "'");
    if (exclusions.count(o.source_id)) continue;
    o.topic_id = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(o));
  }
  return out;
}

/// Fingerprint of a loaded opener set, reported alongside metrics.
inline std::string dataset_hash(const std::vector<Opener>& openers) {
  std::uint64_t h = text::fnv1a64("");
  for (const auto& o : openers)
    h = text::fnv1a64(std::to_string(o.topic_id) + "\t" + o.source_id + "\t" + o.text + "\n", h);
  return text::hex64(h);
}

}  // namespace parastyle
