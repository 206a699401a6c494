#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace ndqmc::stats {

/// Two-sided standard normal critical value for the given confidence level.
inline double z_value(double confidence) {
  const boost::math::normal standard;
  return boost::math::quantile(standard, 0.5 + confidence / 2.0);
}

struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
  bool contains(double p) const { return low <= p && p <= high; }
  double halfwidth(double center) const { return std::max(center - low, high - center); }
};

/// Wilson score interval for k successes out of n trials.
inline ConfidenceInterval wilson(std::size_t k, std::size_t n, double confidence) {
  if (n == 0) return {0.0, 1.0};
  const double z = z_value(confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Endpoints at k = 0 and k = n are exactly 0 and 1; rounding would move them.
  return {k == 0 ? 0.0 : std::max(0.0, center - half), k == n ? 1.0 : std::min(1.0, center + half)};
}

/// Upper-tail p-value of a chi-square statistic.
inline double chi_square_pvalue(double statistic, double dof) {
  const boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

/// Pearson chi-square p-value of equiprobable bin counts.
inline double uniform_bins_pvalue(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return chi_square_pvalue(stat, static_cast<double>(counts.size() - 1));
}

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

/// Unbiased sample variance (two-pass).
inline double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

/// Delta-method variance of the sample variance: (m4 - s^4 (n-3)/(n-1)) / n.
inline double variance_of_variance(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  if (n < 4) return 0.0;
  const double m = mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double c = (v - m) * (v - m);
    m2 += c;
    m4 += c * c;
  }
  m2 /= n;
  m4 /= n;
  const double s2 = m2 * n / (n - 1.0);
  return std::max(0.0, (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n);
}

}  // namespace ndqmc::stats
