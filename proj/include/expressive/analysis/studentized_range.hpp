#pragma once

// Studentized range distribution by direct numerical integration:
//
//   P(Q <= q; k, nu) = int_0^inf f_nu(s) W(q s) ds
//   W(w)             = k int phi(z) [Phi(z) - Phi(z - w)]^(k-1) dz
//
// f_nu is the density of s = chi_nu / sqrt(nu). Both integrals use fixed
// Gauss-Legendre rules on panels.

#include "expressive/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace expressive::analysis {

namespace detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

template <typename F>
double panel_gauss(F&& f, double a, double b, int panels) {
  using rule = boost::math::quadrature::gauss<double, 20>;
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    sum += rule::integrate(f, lo, lo + h);
  }
  return sum;
}

/// Range CDF of k standard normals: W(w) = P(max - min <= w).
inline double normal_range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  const auto integrand = [&](double z) {
    const double d = norm_cdf(z) - norm_cdf(z - w);
    return d > 0.0 ? norm_pdf(z) * std::pow(d, k - 1) : 0.0;
  };
  // phi(z) vanishes below 1e-16 outside [-8.5, 8.5]; the bracket also starts
  // near 0 well below z = 0 and saturates once z - w is far in the left tail.
  const double lo = -8.5;
  const double hi = std::min(8.5, 8.5 + w);
  const double v = k * panel_gauss(integrand, lo, hi, 24);
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace detail

/// P(Q <= q) for the studentized range with k groups and nu degrees of freedom.
/// nu = infinity (or very large) reduces to the normal range distribution.
inline double studentized_range_cdf(double q, int k, double nu) {
  if (k < 2) throw InputError("studentized range: k must be >= 2");
  if (!(nu > 0.0)) throw InputError("studentized range: degrees of freedom must be positive");
  if (std::isnan(q)) throw InputError("studentized range: q is NaN");
  if (q <= 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (nu > 1e7) return detail::normal_range_cdf(q, k);

  // log f_nu(s) = (nu/2) log(nu) - lgamma(nu/2) - (nu/2 - 1) log 2 + (nu - 1) log s - nu s^2 / 2
  const double log_c = 0.5 * nu * std::log(nu) - std::lgamma(0.5 * nu) - (0.5 * nu - 1.0) * std::log(2.0);
  const auto density = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(log_c + (nu - 1.0) * std::log(s) - 0.5 * nu * s * s);
  };
  const double spread = std::sqrt(1.0 / (2.0 * nu));
  const double lo = std::max(0.0, 1.0 - 12.0 * spread);
  const double hi = 1.0 + 12.0 * spread;
  const auto integrand = [&](double s) {
    const double f = density(s);
    return f > 0.0 ? f * detail::normal_range_cdf(q * s, k) : 0.0;
  };
  const double v = detail::panel_gauss(integrand, lo, hi, 32);
  return std::clamp(v, 0.0, 1.0);
}

/// Upper tail P(Q > q).
inline double studentized_range_sf(double q, int k, double nu) {
  return std::clamp(1.0 - studentized_range_cdf(q, k, nu), 0.0, 1.0);
}

}  // namespace expressive::analysis
