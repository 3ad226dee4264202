#pragma once

// Domain types shared by every module: the closed style set, instruction
// templates, conversation openers and the style x topic run matrix.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "parastyle/error.hpp"

namespace parastyle {

enum class StyleAttribute { Emotion, Accent, Volume, Speed };

// Canonical order. Within an attribute this order doubles as the tie-break
// order of the restricted-argmax judges.
enum class StyleValue {
  Happiness,
  Sadness,
  Anger,
  Neutral,
  NorthAmerican,
  Indian,
  Loud,
  Quiet,
  Fast,
  Slow,
};

inline constexpr std::array<StyleValue, 10> kAllStyles = {
    StyleValue::Happiness, StyleValue::Sadness,       StyleValue::Anger,
    StyleValue::Neutral,   StyleValue::NorthAmerican, StyleValue::Indian,
    StyleValue::Loud,      StyleValue::Quiet,         StyleValue::Fast,
    StyleValue::Slow,
};

inline constexpr std::array<StyleAttribute, 4> kAllAttributes = {
    StyleAttribute::Emotion, StyleAttribute::Accent, StyleAttribute::Volume,
    StyleAttribute::Speed};

constexpr StyleAttribute attribute_of(StyleValue v) {
  switch (v) {
    case StyleValue::Happiness:
    case StyleValue::Sadness:
    case StyleValue::Anger:
    case StyleValue::Neutral: return StyleAttribute::Emotion;
    case StyleValue::NorthAmerican:
    case StyleValue::Indian: return StyleAttribute::Accent;
    case StyleValue::Loud:
    case StyleValue::Quiet: return StyleAttribute::Volume;
    case StyleValue::Fast:
    case StyleValue::Slow: return StyleAttribute::Speed;
  }
  return StyleAttribute::Emotion;
}

/// Values of one attribute, in canonical order.
inline std::vector<StyleValue> values_of(StyleAttribute a) {
  std::vector<StyleValue> out;
  for (auto v : kAllStyles)
    if (attribute_of(v) == a) out.push_back(v);
  return out;
}

inline std::string_view to_string(StyleAttribute a) {
  switch (a) {
    case StyleAttribute::Emotion: return "emotion";
    case StyleAttribute::Accent: return "accent";
    case StyleAttribute::Volume: return "volume";
    case StyleAttribute::Speed: return "speed";
  }
  return "";
}

inline std::string_view to_string(StyleValue v) {
  switch (v) {
    case StyleValue::Happiness: return "happiness";
    case StyleValue::Sadness: return "sadness";
    case StyleValue::Anger: return "anger";
    case StyleValue::Neutral: return "neutral";
    case StyleValue::NorthAmerican: return "north_american";
    case StyleValue::Indian: return "indian";
    case StyleValue::Loud: return "loud";
    case StyleValue::Quiet: return "quiet";
    case StyleValue::Fast: return "fast";
    case StyleValue::Slow: return "slow";
  }
  return "";
}

inline StyleAttribute parse_attribute(std::string_view s) {
  for (auto a : kAllAttributes)
    if (to_string(a) == s) return a;
  throw Error(ErrorKind::Parse, "unknown style attribute '" + std::string(s) + "'");
}

inline StyleValue parse_style(std::string_view s) {
  for (auto v : kAllStyles)
    if (to_string(v) == s) return v;
  throw Error(ErrorKind::Parse, "unknown style value '" + std::string(s) + "'");
}

/// Checked construction from an (attribute, value) pair; rejects pairs such
/// as (volume, sadness).
inline StyleValue make_style(StyleAttribute a, std::string_view value) {
  auto v = parse_style(value);
  if (attribute_of(v) != a)
    throw Error(ErrorKind::InvalidArgument,
                "style value '" + std::string(value) + "' does not belong to attribute '" +
                    std::string(to_string(a)) + "'");
  return v;
}

/// Imperative phrase spliced into instruction templates ("speak sadly").
inline std::string_view style_phrase(StyleValue v) {
  switch (v) {
    case StyleValue::Happiness: return "speak happily";
    case StyleValue::Sadness: return "speak sadly";
    case StyleValue::Anger: return "speak angrily";
    case StyleValue::Neutral: return "speak in a neutral tone";
    case StyleValue::NorthAmerican: return "speak with a North American accent";
    case StyleValue::Indian: return "speak with an Indian accent";
    case StyleValue::Loud: return "speak loudly";
    case StyleValue::Quiet: return "speak quietly";
    case StyleValue::Fast: return "speak fast";
    case StyleValue::Slow: return "speak slowly";
  }
  return "";
}

/// Third-person form for persona templates ("speaks sadly").
inline std::string style_phrase_third_person(StyleValue v) {
  std::string p(style_phrase(v));
  return "speaks" + p.substr(5);
}

// ---------------------------------------------------------------------------
// Instruction templates

struct StyleInstruction {
  StyleValue style = StyleValue::Neutral;
  std::string template_id;
  std::string rendered_text;

  bool operator==(const StyleInstruction&) const = default;
};

/// Maps template ids to patterns. Patterns carry `{style}` ("speak fast")
/// and/or `{style_3p}` ("speaks fast") slots.
class TemplateRegistry {
 public:
  static TemplateRegistry builtin() {
    TemplateRegistry r;
    r.add("default", "In the following conversation, you must consistently {style}.");
    r.add("from_now_on", "From now on, you can only {style}.");
    r.add("persona", "You are a person who always {style_3p}, no matter what.");
    return r;
  }

  /// Line-delimited JSON records {"template_id": ..., "pattern": ...}.
  static TemplateRegistry load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open templates file " + path);
    TemplateRegistry r;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        auto j = nlohmann::json::parse(line);
        r.add(j.at("template_id").get<std::string>(), j.at("pattern").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse,
                    path + ":" + std::to_string(lineno) + ": malformed template record: " + e.what());
      }
    }
    return r;
  }

  void add(std::string id, std::string pattern) {
    if (pattern.find("{style}") == std::string::npos &&
        pattern.find("{style_3p}") == std::string::npos)
      throw Error(ErrorKind::InvalidArgument, "template '" + id + "' has no style slot");
    patterns_[std::move(id)] = std::move(pattern);
  }

  bool contains(const std::string& id) const { return patterns_.count(id) != 0; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : patterns_) out.push_back(k);
    return out;
  }

  StyleInstruction render(StyleValue style, const std::string& template_id) const {
    auto it = patterns_.find(template_id);
    if (it == patterns_.end())
      throw Error(ErrorKind::InvalidArgument, "unknown template_id '" + template_id + "'");
    std::string text = it->second;
    replace_all(text, "{style_3p}", style_phrase_third_person(style));
    replace_all(text, "{style}", std::string(style_phrase(style)));
    return StyleInstruction{style, template_id, std::move(text)};
  }

 private:
  static void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos;
         pos = s.find(from, pos + to.size()))
      s.replace(pos, from.size(), to);
  }

  std::map<std::string, std::string> patterns_;
};

inline StyleInstruction render_instruction(StyleValue style, const std::string& template_id,
                                           const TemplateRegistry& registry = TemplateRegistry::builtin()) {
  return registry.render(style, template_id);
}

// ---------------------------------------------------------------------------
// Openers and run configuration

struct Opener {
  int topic_id = 0;
  std::string text;
  std::string source_id;

  bool operator==(const Opener&) const = default;
};

enum class PromptPosition { UserMessage, SystemMessage };

inline std::string_view to_string(PromptPosition p) {
  return p == PromptPosition::UserMessage ? "user" : "system";
}

inline PromptPosition parse_position(std::string_view s) {
  if (s == "user") return PromptPosition::UserMessage;
  if (s == "system") return PromptPosition::SystemMessage;
  throw Error(ErrorKind::Parse, "unknown prompt position '" + std::string(s) + "'");
}

struct RunConfig {
  StyleInstruction instruction;
  Opener opener;
  PromptPosition prompt_position = PromptPosition::UserMessage;
  bool recall_enabled = false;
  int assistant_turns = 4;
  int max_retries = 3;
  std::uint64_t seed = 0;
  double temperature = 1.0;

  void validate() const {
    if (assistant_turns < 1)
      throw Error(ErrorKind::InvalidArgument, "assistant_turns must be >= 1");
    if (max_retries < 0) throw Error(ErrorKind::InvalidArgument, "max_retries must be >= 0");
    if (instruction.rendered_text.empty())
      throw Error(ErrorKind::InvalidArgument, "instruction text is empty");
  }

  bool operator==(const RunConfig&) const = default;
};

/// Stable identifier of one dialogue inside a run. The default cell
/// (user-message position, no recall) is "{topic:03}_{style}"; ablation
/// variants append a suffix so they can share a run directory.
inline std::string dialogue_id(const RunConfig& c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", c.opener.topic_id);
  std::string id = std::string(buf) + "_" + std::string(to_string(c.instruction.style));
  if (c.prompt_position == PromptPosition::SystemMessage) id += "_sys";
  if (c.recall_enabled) id += "_recall";
  return id;
}

/// Cartesian product of styles and openers, style-major then topic_id
/// ascending. Instructions are rendered from `base.instruction.template_id`.
inline std::vector<RunConfig> expand_run_matrix(std::span<const StyleValue> styles,
                                                std::span<const Opener> openers,
                                                const RunConfig& base,
                                                const TemplateRegistry& registry = TemplateRegistry::builtin()) {
  if (styles.empty()) throw Error(ErrorKind::InvalidArgument, "style list is empty");
  if (openers.empty()) throw Error(ErrorKind::InvalidArgument, "opener list is empty");

  std::vector<std::string> duplicates;
  std::set<StyleValue> seen_styles;
  for (auto s : styles)
    if (!seen_styles.insert(s).second)
      duplicates.push_back("style " + std::string(to_string(s)));
  std::set<int> seen_topics;
  for (const auto& o : openers) {
    if (!seen_topics.insert(o.topic_id).second)
      duplicates.push_back("topic_id " + std::to_string(o.topic_id));
    if (o.text.empty())
      throw Error(ErrorKind::InvalidArgument, "opener " + std::to_string(o.topic_id) + " has empty text");
  }
  if (!duplicates.empty()) {
    std::string msg = "duplicate (style, topic_id) pairs: ";
    for (std::size_t i = 0; i < duplicates.size(); ++i)
      msg += (i ? ", " : "") + duplicates[i];
    throw Error(ErrorKind::InvalidArgument, msg);
  }

  std::vector<Opener> sorted(openers.begin(), openers.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Opener& a, const Opener& b) { return a.topic_id < b.topic_id; });

  const std::string template_id =
      base.instruction.template_id.empty() ? "default" : base.instruction.template_id;
  std::vector<RunConfig> out;
  out.reserve(styles.size() * sorted.size());
  for (auto style : styles) {
    auto instruction = registry.render(style, template_id);
    for (const auto& opener : sorted) {
      RunConfig c = base;
      c.instruction = instruction;
      c.opener = opener;
      out.push_back(std::move(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization

inline void to_json(nlohmann::json& j, StyleValue v) { j = std::string(to_string(v)); }
inline void from_json(const nlohmann::json& j, StyleValue& v) { v = parse_style(j.get<std::string>()); }

inline nlohmann::json to_json(const RunConfig& c) {
  return {
      {"style", std::string(to_string(c.instruction.style))},
      {"template_id", c.instruction.template_id},
      {"instruction", c.instruction.rendered_text},
      {"topic_id", c.opener.topic_id},
      {"opener", c.opener.text},
      {"source_id", c.opener.source_id},
      {"prompt_position", std::string(to_string(c.prompt_position))},
      {"recall_enabled", c.recall_enabled},
      {"assistant_turns", c.assistant_turns},
      {"max_retries", c.max_retries},
      {"seed", c.seed},
      {"temperature", c.temperature},
  };
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.instruction.style = parse_style(j.at("style").get<std::string>());
  c.instruction.template_id = j.value("template_id", std::string("default"));
  c.instruction.rendered_text = j.at("instruction").get<std::string>();
  c.opener.topic_id = j.at("topic_id").get<int>();
  c.opener.text = j.at("opener").get<std::string>();
  c.opener.source_id = j.value("source_id", std::string());
  c.prompt_position = parse_position(j.value("prompt_position", std::string("user")));
  c.recall_enabled = j.value("recall_enabled", false);
  c.assistant_turns = j.value("assistant_turns", 4);
  c.max_retries = j.value("max_retries", 3);
  c.seed = j.value("seed", std::uint64_t{0});
  c.temperature = j.value("temperature", 1.0);
  c.validate();
  return c;
}

}  // namespace parastyle
