#pragma once

// Per-expression descriptive statistics of VAD scores and the full
// labels + lexicon -> report pipeline.

#include "expressive/analysis/scoring.hpp"
#include "expressive/analysis/stats.hpp"
#include "expressive/laban.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace expressive::analysis {

enum class Dimension { Valence, Arousal, Dominance };
inline constexpr std::array kDimensions = {Dimension::Valence, Dimension::Arousal, Dimension::Dominance};

inline std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::Valence: return "valence";
    case Dimension::Arousal: return "arousal";
    case Dimension::Dominance: return "dominance";
  }
  return "?";
}

inline double component(const Vad& v, Dimension d) {
  switch (d) {
    case Dimension::Valence: return v.valence;
    case Dimension::Arousal: return v.arousal;
    case Dimension::Dominance: return v.dominance;
  }
  return 0.0;
}

struct DimensionSummary {
  double mean = 0.0;
  double sd = 0.0;  ///< sample standard deviation (n - 1); 0 for n = 1
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ExpressionSummary {
  laban::Expression expression = laban::Expression::Happy;
  std::size_t n = 0;
  std::array<DimensionSummary, 3> dims{};  ///< valence, arousal, dominance
};

struct SummaryResult {
  std::vector<ExpressionSummary> groups;  ///< ordered by preset name
  std::vector<std::string> warnings;
};

/// Expressions sorted by their display name.
inline std::vector<laban::Expression> expressions_by_name() {
  std::vector<laban::Expression> order(laban::kAllExpressions.begin(), laban::kAllExpressions.end());
  std::sort(order.begin(), order.end(),
            [](auto a, auto b) { return laban::to_string(a) < laban::to_string(b); });
  return order;
}

inline DimensionSummary describe(const std::vector<double>& xs, double confidence = 0.95) {
  DimensionSummary d;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) d.mean += x;
  d.mean /= n;
  if (xs.size() < 2) {
    d.ci_low = d.ci_high = d.mean;
    return d;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - d.mean) * (x - d.mean);
  d.sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t t(n - 1.0);
  const double half = boost::math::quantile(boost::math::complement(t, (1.0 - confidence) / 2.0)) * d.sd / std::sqrt(n);
  d.ci_low = d.mean - half;
  d.ci_high = d.mean + half;
  return d;
}

/// Scores without a VAD triple are skipped. Expressions with no scores are
/// omitted and reported in warnings.
inline SummaryResult summarize_by_expression(const std::vector<VadScore>& scores) {
  SummaryResult out;
  for (auto e : expressions_by_name()) {
    std::array<std::vector<double>, 3> cols;
    for (const auto& s : scores)
      if (s.expression == e && s.vad)
        for (std::size_t d = 0; d < 3; ++d) cols[d].push_back(component(*s.vad, kDimensions[d]));
    if (cols[0].empty()) {
      out.warnings.push_back(std::string(laban::to_string(e)) + ": no scored labels, omitted");
      continue;
    }
    ExpressionSummary es;
    es.expression = e;
    es.n = cols[0].size();
    for (std::size_t d = 0; d < 3; ++d) es.dims[d] = describe(cols[d]);
    out.groups.push_back(es);
  }
  return out;
}

/// Scored values of one dimension grouped by expression (preset-name order),
/// keeping only groups with at least `min_size` values.
inline std::vector<NamedGroup> groups_for(const std::vector<VadScore>& scores, Dimension dim,
                                          std::size_t min_size = 1) {
  std::vector<NamedGroup> groups;
  for (auto e : expressions_by_name()) {
    NamedGroup g{std::string(laban::to_string(e)), {}};
    for (const auto& s : scores)
      if (s.expression == e && s.vad) g.values.push_back(component(*s.vad, dim));
    if (g.values.size() >= min_size) groups.push_back(std::move(g));
  }
  return groups;
}

struct DimensionComparison {
  Dimension dimension = Dimension::Valence;
  std::optional<GroupComparison> comparison;
  std::string error;  ///< set when the comparison could not be computed
};

struct AnalysisReport {
  double alpha = 0.05;
  std::size_t record_count = 0;
  std::size_t scored_count = 0;
  OovReport oov;
  SummaryResult summary;
  std::vector<DimensionComparison> comparisons;  ///< valence, arousal, dominance
  std::vector<std::string> warnings;
};

/**
 * score_labels -> summarize_by_expression -> ANOVA + Tukey HSD per VAD
 * dimension. Every scored label is one observation; expressions with fewer
 * than two scored labels are left out of the group comparison with a warning.
 * A dimension whose comparison fails (too few groups, zero variance) carries
 * the error message instead of results.
 */
inline AnalysisReport analyze_labels(const std::vector<LabelRecord>& records, const VadLexicon& lexicon,
                                     double alpha = 0.05) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  AnalysisReport rep;
  rep.alpha = alpha;
  rep.record_count = records.size();
  auto scored = score_labels(records, lexicon);
  rep.oov = std::move(scored.oov);
  rep.scored_count = records.size() - rep.oov.unscored_records.size();
  rep.summary = summarize_by_expression(scored.scores);
  for (const auto& g : rep.summary.groups)
    if (g.n < 2)
      rep.warnings.push_back(std::string(laban::to_string(g.expression)) +
                             ": only 1 scored label, excluded from group comparison");
  if (lexicon.duplicate_count > 0)
    rep.warnings.push_back("lexicon: " + std::to_string(lexicon.duplicate_count) + " duplicate word(s), last entry kept");
  if (!rep.oov.unscored_records.empty())
    rep.warnings.push_back(std::to_string(rep.oov.unscored_records.size()) + " label(s) had no lexicon match");

  for (auto dim : kDimensions) {
    DimensionComparison dc;
    dc.dimension = dim;
    try {
      dc.comparison = tukey_hsd(groups_for(scored.scores, dim, 2), alpha);
    } catch (const InputError& e) {
      dc.error = e.what();
    }
    rep.comparisons.push_back(std::move(dc));
  }
  return rep;
}

inline nlohmann::ordered_json comparison_to_json(const GroupComparison& c) {
  nlohmann::ordered_json j;
  const auto& a = c.anova;
  j["anova"] = {{"F", a.f},
                {"df_between", a.df_between},
                {"df_within", a.df_within},
                {"p", a.p},
                {"ss_between", a.ss_between},
                {"ss_within", a.ss_within},
                {"ss_total", a.ss_total}};
  j["alpha"] = c.alpha;
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : c.pairs)
    j["pairs"].push_back({{"group_i", p.group_i},
                          {"group_j", p.group_j},
                          {"mean_difference", p.mean_difference},
                          {"q", p.q},
                          {"p_adjusted", p.p_adjusted},
                          {"significant", p.significant}});
  return j;
}

inline nlohmann::ordered_json report_to_json(const AnalysisReport& r) {
  nlohmann::ordered_json j;
  j["alpha"] = r.alpha;
  j["records"] = r.record_count;
  j["scored"] = r.scored_count;
  nlohmann::ordered_json oov;
  oov["total_tokens"] = r.oov.total_tokens;
  oov["oov_tokens"] = r.oov.oov_tokens;
  oov["unscored_records"] = r.oov.unscored_records;
  oov["oov_words"] = nlohmann::ordered_json::object();
  for (const auto& [w, n] : r.oov.oov_token_counts) oov["oov_words"][w] = n;
  j["oov"] = oov;
  j["summary"] = nlohmann::ordered_json::array();
  for (const auto& g : r.summary.groups) {
    nlohmann::ordered_json row;
    row["expression"] = laban::to_string(g.expression);
    row["n"] = g.n;
    for (std::size_t d = 0; d < 3; ++d) {
      const auto& s = g.dims[d];
      row[std::string(to_string(kDimensions[d]))] = {
          {"mean", s.mean}, {"sd", s.sd}, {"ci95", {s.ci_low, s.ci_high}}};
    }
    j["summary"].push_back(row);
  }
  j["comparisons"] = nlohmann::ordered_json::object();
  for (const auto& dc : r.comparisons) {
    const std::string key(to_string(dc.dimension));
    if (dc.comparison) j["comparisons"][key] = comparison_to_json(*dc.comparison);
    else j["comparisons"][key] = {{"error", dc.error}};
  }
  std::vector<std::string> warnings = r.summary.warnings;
  warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  j["warnings"] = warnings;
  return j;
}

}  // namespace expressive::analysis
