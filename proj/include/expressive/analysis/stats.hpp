#pragma once

// One-way ANOVA and Tukey HSD (Tukey-Kramer for unequal group sizes).

#include "expressive/analysis/studentized_range.hpp"
#include "expressive/error.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace expressive::analysis {

struct NamedGroup {
  std::string name;
  std::vector<double> values;
};

struct AnovaResult {
  double f = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p = 1.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double ss_total = 0.0;
  double ms_within = 0.0;
  std::vector<double> means;
};

struct PairComparison {
  std::size_t i = 0;
  std::size_t j = 0;
  std::string group_i;
  std::string group_j;
  double mean_difference = 0.0;  ///< mean_i - mean_j
  double q = 0.0;
  double p_adjusted = 1.0;
  bool significant = false;
};

struct GroupComparison {
  AnovaResult anova;
  std::vector<PairComparison> pairs;  ///< (0,1), (0,2), ..., (k-2,k-1)
  double alpha = 0.05;
};

namespace detail {

inline void check_groups(const std::vector<NamedGroup>& groups) {
  if (groups.size() < 2) throw InputError("need at least 2 groups, got " + std::to_string(groups.size()));
  for (const auto& g : groups) {
    if (g.values.size() < 2)
      throw InputError("group '" + g.name + "' needs at least 2 values, got " + std::to_string(g.values.size()));
    for (double v : g.values)
      if (!std::isfinite(v)) throw InputError("group '" + g.name + "' contains a non-finite value");
  }
}

}  // namespace detail

/// Throws InputError for fewer than two groups or a group with fewer than two
/// values, DegenerateInputError when every group is constant.
inline AnovaResult one_way_anova(const std::vector<NamedGroup>& groups) {
  detail::check_groups(groups);
  AnovaResult r;
  std::size_t n_total = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    double s = 0.0;
    for (double v : g.values) s += v;
    r.means.push_back(s / static_cast<double>(g.values.size()));
    n_total += g.values.size();
    grand_sum += s;
  }
  const double grand = grand_sum / static_cast<double>(n_total);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double m = r.means[gi];
    const double d = m - grand;
    r.ss_between += static_cast<double>(groups[gi].values.size()) * d * d;
    for (double v : groups[gi].values) {
      r.ss_within += (v - m) * (v - m);
      r.ss_total += (v - grand) * (v - grand);
    }
  }
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n_total - groups.size());
  // Constant groups leave rounding residue in SSW, so compare against the data magnitude.
  double mag = 0.0;
  for (const auto& g : groups)
    for (double v : g.values) mag = std::max(mag, std::abs(v));
  const double eps = 1e-12 * mag;
  if (!(r.ss_within > static_cast<double>(n_total) * eps * eps))
    throw DegenerateInputError("within-group variance is zero");
  r.ms_within = r.ss_within / r.df_within;
  r.f = (r.ss_between / r.df_between) / r.ms_within;
  if (r.f <= 0.0) {
    r.p = 1.0;
  } else {
    const boost::math::fisher_f dist(r.df_between, r.df_within);
    r.p = boost::math::cdf(boost::math::complement(dist, r.f));
  }
  return r;
}

/// All-pairs comparison after the ANOVA. q_ij = |m_i - m_j| / sqrt(MSW/2 (1/n_i + 1/n_j)),
/// p from the studentized range with k groups and df_within.
inline GroupComparison tukey_hsd(const std::vector<NamedGroup>& groups, double alpha = 0.05) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  GroupComparison out;
  out.alpha = alpha;
  out.anova = one_way_anova(groups);
  const auto& a = out.anova;
  const int k = static_cast<int>(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      PairComparison pc;
      pc.i = i;
      pc.j = j;
      pc.group_i = groups[i].name;
      pc.group_j = groups[j].name;
      pc.mean_difference = a.means[i] - a.means[j];
      const double se = std::sqrt(a.ms_within / 2.0 *
                                  (1.0 / static_cast<double>(groups[i].values.size()) +
                                   1.0 / static_cast<double>(groups[j].values.size())));
      pc.q = std::abs(pc.mean_difference) / se;
      pc.p_adjusted = pc.q > 0.0 ? studentized_range_sf(pc.q, k, a.df_within) : 1.0;
      pc.significant = pc.p_adjusted < alpha;
      out.pairs.push_back(pc);
    }
  return out;
}

}  // namespace expressive::analysis
