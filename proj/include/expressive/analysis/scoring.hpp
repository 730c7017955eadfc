#pragma once

// Free-text label -> VAD triple: lowercase, split on anything that is not a
// letter, digit or non-ASCII byte, then average the triples of the tokens the
// lexicon knows. No stemming, no fallback for unknown words.

#include "expressive/analysis/labels.hpp"
#include "expressive/analysis/lexicon.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace expressive::analysis {

struct VadScore {
  std::size_t record = 0;  ///< index into the scored record list
  laban::Expression expression = laban::Expression::Happy;
  std::optional<Vad> vad;  ///< present only when matched_tokens >= 1
  int matched_tokens = 0;
  int oov_tokens = 0;
};

struct OovReport {
  std::vector<std::size_t> unscored_records;
  std::map<std::string, int> oov_token_counts;
  int total_tokens = 0;
  int oov_tokens = 0;
};

struct ScoringResult {
  std::vector<VadScore> scores;  ///< one per record, in input order
  OovReport oov;
};

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

inline ScoringResult score_labels(const std::vector<LabelRecord>& records, const VadLexicon& lexicon) {
  ScoringResult out;
  out.scores.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    VadScore s;
    s.record = i;
    s.expression = records[i].expression_shown;
    Vad sum;
    for (const auto& tok : tokenize(records[i].label_text)) {
      ++out.oov.total_tokens;
      if (auto v = lexicon.find(tok)) {
        ++s.matched_tokens;
        sum.valence += v->valence;
        sum.arousal += v->arousal;
        sum.dominance += v->dominance;
      } else {
        ++s.oov_tokens;
        ++out.oov.oov_tokens;
        ++out.oov.oov_token_counts[tok];
      }
    }
    if (s.matched_tokens > 0) {
      const double n = s.matched_tokens;
      s.vad = Vad{sum.valence / n, sum.arousal / n, sum.dominance / n};
    } else {
      out.oov.unscored_records.push_back(i);
    }
    out.scores.push_back(s);
  }
  return out;
}

}  // namespace expressive::analysis
