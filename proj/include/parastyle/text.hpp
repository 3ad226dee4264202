#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

namespace parastyle::text {

inline std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// A token counts as a word when it contains at least one ASCII
/// alphanumeric character or any non-ASCII letter byte sequence that is not
/// a known punctuation code point (dashes, ellipsis, quotes).
inline bool is_word_token(std::string_view token) {
  static constexpr std::string_view kPunctuationCodePoints[] = {
      "—", "–", "…", "‘", "’", "“", "”", "«", "»"};
  std::string rest(token);
  for (auto p : kPunctuationCodePoints)
    for (auto pos = rest.find(p); pos != std::string::npos; pos = rest.find(p)) rest.erase(pos, p.size());
  for (unsigned char c : rest) {
    if (std::isalnum(c)) return true;
    if (c >= 0x80) return true;
  }
  return false;
}

/// Whitespace-delimited tokens, ignoring punctuation-only tokens.
inline int count_words(std::string_view s) {
  int n = 0;
  for (const auto& tok : split_whitespace(s))
    if (is_word_token(tok)) ++n;
  return n;
}

/// Splits after '.', '!' or '?' runs followed by whitespace or end.
inline std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cur.push_back(s[i]);
    const bool terminal = s[i] == '.' || s[i] == '!' || s[i] == '?';
    const bool next_terminal = i + 1 < s.size() && (s[i + 1] == '.' || s[i + 1] == '!' || s[i + 1] == '?');
    if (terminal && !next_terminal &&
        (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1])))) {
      auto t = trim(cur);
      if (!t.empty()) out.push_back(std::move(t));
      cur.clear();
    }
  }
  auto t = trim(cur);
  if (!t.empty()) out.push_back(std::move(t));
  return out;
}

/// Longest prefix of whole sentences within `max_words`; when even the first
/// sentence is too long, its first `max_words` words.
inline std::string truncate_to_words(std::string_view s, int max_words) {
  if (count_words(s) <= max_words) return trim(s);
  std::string out;
  int words = 0;
  for (const auto& sentence : split_sentences(s)) {
    const int w = count_words(sentence);
    if (words + w > max_words) break;
    out += (out.empty() ? "" : " ") + sentence;
    words += w;
  }
  if (!out.empty()) return out;
  std::string hard;
  int n = 0;
  for (const auto& tok : split_whitespace(s)) {
    if (n == max_words) break;
    hard += (hard.empty() ? "" : " ") + tok;
    if (is_word_token(tok)) ++n;
  }
  return hard;
}

/// FNV-1a 64-bit, used for content fingerprints and deterministic seeding.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[i] = kDigits[v & 15];
  return out;
}

/// Expands ${NAME} from the environment; unset variables expand to "".
inline std::string expand_env(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '$' && i + 1 < s.size() && s[i + 1] == '{') {
      const auto close = s.find('}', i + 2);
      if (close != std::string_view::npos) {
        const std::string name(s.substr(i + 2, close - i - 2));
        if (const char* v = std::getenv(name.c_str())) out += v;
        i = close;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

/// Single-pass `{name}` slot substitution; substituted values are never
/// rescanned, so slot-like text inside a value stays literal.
inline std::string fill_slots(std::string_view tpl,
                              std::initializer_list<std::pair<std::string_view, std::string_view>> slots) {
  std::string out;
  for (std::size_t i = 0; i < tpl.size();) {
    bool replaced = false;
    if (tpl[i] == '{') {
      for (const auto& [name, value] : slots) {
        if (tpl.substr(i + 1, name.size()) == name && i + 1 + name.size() < tpl.size() &&
            tpl[i + 1 + name.size()] == '}') {
          out += value;
          i += name.size() + 2;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(tpl[i++]);
  }
  return out;
}

}  // namespace parastyle::text
