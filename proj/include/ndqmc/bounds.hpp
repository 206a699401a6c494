#pragma once

// Closed-form probabilistic discrepancy bounds for negatively dependent
// sampling schemes. gamma = exp(rho d) throughout; logarithms are natural.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "ndqmc/discrepancy.hpp"
#include "ndqmc/error.hpp"

namespace ndqmc {

enum class BoundFormula { gh_c, gh_theta, mixed_theta, c0_c, c0_theta, weighted_c, weighted_theta };

inline const char* to_string(BoundFormula f) {
  switch (f) {
    case BoundFormula::gh_c: return "gh_c";
    case BoundFormula::gh_theta: return "gh_theta";
    case BoundFormula::mixed_theta: return "mixed_theta";
    case BoundFormula::c0_c: return "c0_c";
    case BoundFormula::c0_theta: return "c0_theta";
    case BoundFormula::weighted_c: return "weighted_c";
    case BoundFormula::weighted_theta: return "weighted_theta";
  }
  return "?";
}

struct BoundParams {
  std::size_t n = 1;
  std::size_t d = 1;
  double rho = 0.0;
  double theta = 0.5;
  double c = 1.0;
};

struct BoundResult {
  BoundFormula formula = BoundFormula::gh_c;
  double bound_value = 0.0;
  /// Success probability clamped to [0,1].
  double success_prob = 0.0;
  /// Success probability as the formula gives it.
  double unclamped = 0.0;
  bool clamped = false;
  /// The bound is +infinity (theta at its boundary).
  bool diverged = false;
};

namespace detail {

inline void check_common(const BoundParams& p) {
  require(p.n >= 1, "bounds: N must be >= 1");
  require(p.d >= 1, "bounds: d must be >= 1");
  require(p.rho >= 0.0 && std::isfinite(p.rho), "bounds: rho must be >= 0");
}

inline void check_c(const BoundParams& p) {
  check_common(p);
  require(p.c > 0.0 && std::isfinite(p.c), "bounds: c must be > 0");
}

inline void check_theta(const BoundParams& p) {
  check_common(p);
  require(p.theta > 0.0 && p.theta <= 1.0, "bounds: theta must lie in (0,1]");
}

inline BoundResult with_probability(BoundFormula f, double value, double prob) {
  BoundResult r;
  r.formula = f;
  r.bound_value = value;
  r.unclamped = prob;
  r.success_prob = std::clamp(prob, 0.0, 1.0);
  r.clamped = r.success_prob != prob;
  r.diverged = std::isinf(value);
  return r;
}

inline double nd_ratio(const BoundParams& p) {
  return std::sqrt(static_cast<double>(p.d) / static_cast<double>(p.n));
}

}  // namespace detail

/// P(|S| >= t) <= 2 gamma exp(-2 t^2 / N) for S a sum of N centered
/// gamma-negatively dependent indicators.
inline double hoeffding_tail(std::size_t n, double t, double gamma) {
  detail::require(n >= 1, "hoeffding_tail: N must be >= 1");
  detail::require(t > 0.0, "hoeffding_tail: t must be > 0");
  detail::require(gamma >= 1.0, "hoeffding_tail: gamma must be >= 1");
  return 2.0 * gamma * std::exp(-2.0 * t * t / static_cast<double>(n));
}

inline BoundResult gh_bound(const BoundParams& p) {
  detail::check_c(p);
  const double exponent = -(1.6741 * p.c * p.c - 10.7042 - p.rho) * static_cast<double>(p.d);
  return detail::with_probability(BoundFormula::gh_c, p.c * detail::nd_ratio(p), 1.0 - std::exp(exponent));
}

inline BoundResult gh_bound_theta(const BoundParams& p) {
  detail::check_theta(p);
  const double tail = -std::log1p(-p.theta) / static_cast<double>(p.d);
  const double value = 0.7729 * std::sqrt(10.7042 + p.rho + tail) * detail::nd_ratio(p);
  return detail::with_probability(BoundFormula::gh_theta, value, p.theta);
}

/// Twice the gh_bound_theta value; applies to mixed sequences.
inline BoundResult mixed_bound_theta(const BoundParams& p) {
  BoundResult r = gh_bound_theta(p);
  r.formula = BoundFormula::mixed_theta;
  r.bound_value *= 2.0;
  return r;
}

inline BoundResult c0_bound(const BoundParams& p) {
  detail::check_c(p);
  const double n = static_cast<double>(p.n), d = static_cast<double>(p.d);
  const double xi = std::max(1.0, std::log(n / d));
  const double value = p.c * std::sqrt(d / n * xi);
  const double exponent =
      (-0.5 * (p.c * p.c - 1.0) * xi + p.rho + std::log(2.0 * std::numbers::e * (2.0 / p.c + 1.0))) * d;
  return detail::with_probability(BoundFormula::c0_c, value, 1.0 - 2.0 * std::exp(exponent));
}

/// eta(N, d) = 6e max(1, N / (2 d log(6e)))^(1/2).
inline double c0_eta(std::size_t n, std::size_t d) {
  const double six_e = 6.0 * std::numbers::e;
  return six_e * std::sqrt(std::max(1.0, static_cast<double>(n) / (2.0 * static_cast<double>(d) * std::log(six_e))));
}

struct EtaCondition {
  double lhs = 0.0;  // (eta / 2e - 1) sqrt(log eta)
  double rhs = 0.0;  // sqrt(2N / d)
  bool holds() const { return lhs >= rhs; }
};

/// The sufficient condition on eta used to derive c0_bound_theta.
inline EtaCondition c0_eta_condition(std::size_t n, std::size_t d) {
  detail::require(n >= 1 && d >= 1, "c0_eta_condition: need N, d >= 1");
  const double eta = c0_eta(n, d);
  return {(eta / (2.0 * std::numbers::e) - 1.0) * std::sqrt(std::log(eta)),
          std::sqrt(2.0 * static_cast<double>(n) / static_cast<double>(d))};
}

inline BoundResult c0_bound_theta(const BoundParams& p) {
  detail::check_theta(p);
  const double n = static_cast<double>(p.n), d = static_cast<double>(p.d);
  const double inner = d * std::log(c0_eta(p.n, p.d)) + p.rho * d + std::log(2.0) - std::log1p(-p.theta);
  return detail::with_probability(BoundFormula::c0_theta, std::sqrt(2.0 / n) * std::sqrt(inner), p.theta);
}

namespace detail {

/// max over nonempty u of scale * gamma_u * sqrt(|u| / N).
inline double weighted_max(const Weights& w, std::size_t d, std::size_t n, double scale) {
  validate_weights(w, d);
  const double nn = static_cast<double>(n);
  double best = 0.0;
  auto consider = [&](double g, std::size_t size) {
    if (g == 0.0) return;
    best = std::max(best, scale * g * std::sqrt(static_cast<double>(size) / nn));
  };
  if (const auto* prod = std::get_if<ProductWeights>(&w)) {
    // For nonnegative gammas the largest gamma_u with |u| = k is the product
    // of the k largest gamma_j.
    std::vector<double> sorted = prod->gamma;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double g = 1.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      g *= sorted[k];
      consider(g, k + 1);
    }
    return best;
  }
  for (const auto& [mask, g] : std::get<ExplicitWeights>(w).gamma) {
    consider(g, static_cast<std::size_t>(std::popcount(mask)));
  }
  return best;
}

}  // namespace detail

inline BoundResult weighted_bound(const BoundParams& p, const Weights& w) {
  detail::check_c(p);
  const double value = detail::weighted_max(w, p.d, p.n, p.c);
  const double prob =
      2.0 - std::pow(1.0 + std::exp(-(1.674 * p.c * p.c - 10.7042 - p.rho)), static_cast<double>(p.d));
  return detail::with_probability(BoundFormula::weighted_c, value, prob);
}

/// The c giving success probability theta in weighted_bound, as
/// sqrt(|rho + 10.7 + log((2 - theta)^(1/d) - 1)| / 1.674); +inf at theta = 1.
inline double weighted_c_theta(const BoundParams& p) {
  detail::check_theta(p);
  const double inner = std::pow(2.0 - p.theta, 1.0 / static_cast<double>(p.d)) - 1.0;
  if (inner <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::fabs(p.rho + 10.7 + std::log(inner)) / 1.674);
}

inline BoundResult weighted_bound_theta(const BoundParams& p, const Weights& w) {
  const double c = weighted_c_theta(p);
  double value = 0.0;
  if (std::isinf(c)) {
    value = detail::weighted_max(w, p.d, p.n, 1.0) > 0.0 ? c : 0.0;
  } else {
    value = detail::weighted_max(w, p.d, p.n, c);
  }
  BoundResult r = detail::with_probability(BoundFormula::weighted_theta, value, p.theta);
  r.diverged = std::isinf(c);
  return r;
}

}  // namespace ndqmc
