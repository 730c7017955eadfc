#pragma once

// Word -> (valence, arousal, dominance) lexicon, tab separated:
//   word<TAB>v<TAB>a<TAB>d
// Blank lines and lines starting with '#' are skipped, as is a leading
// header row whose first field is "word" (any case).

#include "expressive/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace expressive::analysis {

struct Vad {
  double valence = 0.0;
  double arousal = 0.0;
  double dominance = 0.0;

  bool operator==(const Vad&) const = default;
};

struct VadLexicon {
  std::map<std::string, Vad, std::less<>> entries;
  std::size_t duplicate_count = 0;
  bool rescaled_from_signed = false;

  std::optional<Vad> find(std::string_view word) const {
    if (auto it = entries.find(word); it != entries.end()) return it->second;
    return std::nullopt;
  }
  std::size_t size() const { return entries.size(); }
};

struct LexiconOptions {
  /// Input values lie in [-1, 1] and are mapped to [0, 1] by (v + 1) / 2.
  bool signed_range = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return parts;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace detail

/**
 * Throws ParseError (carrying the 1-based line number) on malformed lines and
 * on values outside the accepted range. Duplicate words keep the last entry
 * and are counted in duplicate_count.
 */
inline VadLexicon load_lexicon(std::istream& in, const LexiconOptions& options = {}) {
  VadLexicon lex;
  lex.rescaled_from_signed = options.signed_range;
  const double lo = options.signed_range ? -1.0 : 0.0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = detail::split(line, '\t');
    if (line_no == 1 && detail::lower(detail::trim(fields.front())) == "word") continue;
    if (fields.size() != 4) throw ParseError(line_no, "expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    const std::string word = detail::lower(detail::trim(fields[0]));
    if (word.empty()) throw ParseError(line_no, "empty word");
    double v[3];
    for (int k = 0; k < 3; ++k) {
      const auto parsed = detail::parse_double(fields[static_cast<std::size_t>(k + 1)]);
      if (!parsed) throw ParseError(line_no, "field " + std::to_string(k + 2) + " is not a number");
      if (*parsed < lo || *parsed > 1.0)
        throw ParseError(line_no, "value " + std::string(detail::trim(fields[static_cast<std::size_t>(k + 1)])) +
                                      " outside [" + (options.signed_range ? "-1" : "0") + ", 1]");
      v[k] = options.signed_range ? (*parsed + 1.0) / 2.0 : *parsed;
    }
    if (lex.entries.contains(word)) ++lex.duplicate_count;
    lex.entries[word] = {v[0], v[1], v[2]};
  }
  return lex;
}

}  // namespace expressive::analysis
