#pragma once

// Negative dependence: exact probability oracles for the constructions that
// admit them, and replication-based testers for everything else.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ndqmc/error.hpp"
#include "ndqmc/geometry.hpp"
#include "ndqmc/io.hpp"
#include "ndqmc/parallel.hpp"
#include "ndqmc/point_set.hpp"
#include "ndqmc/rng.hpp"
#include "ndqmc/samplers.hpp"
#include "ndqmc/stats.hpp"
#include "ndqmc/strata.hpp"
#include "ndqmc/symmetric.hpp"

namespace ndqmc {

enum class Notion { upper_nd, lower_nd, pairwise_nd, conditional_nqd, ci_nqd };
enum class Verdict { holds, violated, inconclusive };
enum class Method { automatic, empirical, exact };

inline const char* to_string(Notion n) {
  switch (n) {
    case Notion::upper_nd: return "upper_nd";
    case Notion::lower_nd: return "lower_nd";
    case Notion::pairwise_nd: return "pairwise_nd";
    case Notion::conditional_nqd: return "conditional_nqd";
    case Notion::ci_nqd: return "ci_nqd";
  }
  return "?";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// Slack for exact comparisons lhs <= rhs.
inline constexpr double kExactTolerance = 1e-12;

/// Below this many conditioning hits a conditional test is inconclusive.
inline constexpr std::size_t kMinConditioningHits = 100;

struct DependenceReport {
  Notion notion = Notion::upper_nd;
  Json event = Json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double ci_halfwidth = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::size_t replications = 0;
  bool exact = false;
};

struct TestOptions {
  double gamma = 1.0;
  std::size_t replications = 10000;
  double confidence = 0.99;
  Method method = Method::automatic;
  std::size_t threads = default_threads();
};

namespace detail {

inline Verdict exact_verdict(double lhs, double rhs) {
  return lhs > rhs + kExactTolerance ? Verdict::violated : Verdict::holds;
}

inline Verdict interval_verdict(double lhs, double halfwidth, double rhs) {
  if (lhs - halfwidth > rhs) return Verdict::violated;
  if (lhs + halfwidth <= rhs) return Verdict::holds;
  return Verdict::inconclusive;
}

inline double overlap_1d(double a, double b, double lo, double hi) {
  return std::max(0.0, std::min(b, hi) - std::max(a, lo));
}

/// w_k = n * length([a,b) cap [k/n, (k+1)/n)).
inline std::vector<double> axis_weights(double a, double b, std::size_t n) {
  std::vector<double> w(n);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = nn * overlap_1d(a, b, static_cast<double>(k) / nn, static_cast<double>(k + 1) / nn);
  }
  return w;
}

/// t points in distinct strata chosen uniformly among ordered t-tuples of
/// the beta = w.size() strata, each uniform in its stratum; w_k is the
/// conditional probability of the event given stratum k.
inline double distinct_strata_prob(std::span<const double> w, std::size_t t) {
  const std::size_t beta = w.size();
  if (t > beta) return 0.0;
  long double scale = 1.0L;
  for (std::size_t i = 0; i < t; ++i) {
    scale *= static_cast<long double>(i + 1) / static_cast<long double>(beta - i);
  }
  return static_cast<double>(scale * static_cast<long double>(elementary_symmetric(w, t)));
}

/// Two points in distinct strata with event weights w1 (first) and w2 (second).
inline double distinct_strata_joint(std::span<const double> w1, std::span<const double> w2) {
  const std::size_t beta = w1.size();
  if (beta < 2) return 0.0;
  long double s1 = 0, s2 = 0, s12 = 0;
  for (std::size_t k = 0; k < beta; ++k) {
    s1 += w1[k];
    s2 += w2[k];
    s12 += static_cast<long double>(w1[k]) * w2[k];
  }
  return static_cast<double>((s1 * s2 - s12) / (static_cast<long double>(beta) * (beta - 1)));
}

inline std::vector<Interval> intervals_of(const Region& region) { return to_disjoint_intervals(region); }

inline std::pair<Interval, Interval> split_interval(const Interval& box, std::size_t d_left) {
  auto cut = [&](const Coords& v, bool left) {
    return left ? Coords(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d_left))
                : Coords(v.begin() + static_cast<std::ptrdiff_t>(d_left), v.end());
  };
  return {Interval(cut(box.a, true), cut(box.b, true)), Interval(cut(box.a, false), cut(box.b, false))};
}

/// Single-interval view of a region, if it is one.
inline std::optional<Interval> as_single_interval(const Region& region) {
  auto parts = intervals_of(region);
  if (parts.size() == 1) return parts.front();
  if (parts.empty()) {
    const std::size_t d = dim(region);
    return Interval(Coords(d, 0.0), Coords(d, 0.0));
  }
  return std::nullopt;
}

}  // namespace detail

// --------------------------------------------------------- strata weights

/// w_k = beta * vol(region cap B_k) for the strata of a generalized
/// stratified scheme.
inline std::vector<double> strata_weights(std::size_t beta, const StrataSpec& strata, const Region& region) {
  std::vector<double> w(beta, 0.0);
  const auto parts = detail::intervals_of(region);
  if (const auto* stripes = std::get_if<Stripes>(&strata)) {
    detail::require(stripes->count == beta, "gss: Stripes count must equal beta");
    for (const auto& box : parts) {
      double rest = 1.0;
      for (std::size_t i = 1; i < box.dim(); ++i) rest *= box.b[i] - box.a[i];
      const auto axis = detail::axis_weights(box.a[0], box.b[0], beta);
      for (std::size_t k = 0; k < beta; ++k) w[k] += axis[k] * rest;
    }
    return w;
  }
  const auto& cells = std::get<LatticeCells>(strata);
  detail::require(cells.n == beta, "gss: LatticeCells n must equal beta");
  detail::require(dim(region) == 2, "gss: lattice cells need d = 2");
  const LatticeCellPartition partition(cells);
  const double bb = static_cast<double>(beta);
  for (const auto& box : parts) {
    for (std::size_t k = 0; k < beta; ++k) w[k] += bb * partition.overlap(k, box);
  }
  return w;
}

// ------------------------------------------------------------ exact oracles

/// P(p_1, ..., p_t all in [0, q)) for Latin hypercube sampling with N points.
inline double lhs_anchored_prob_exact(std::size_t n, std::span<const double> q, std::size_t t) {
  detail::require(n >= 1, "lhs oracle: N must be >= 1");
  detail::require(t >= 1 && t <= n, "lhs oracle: need 1 <= t <= N");
  detail::require_unit_closed(q, "lhs oracle");
  long double prob = 1.0L;
  const long double denom = falling_factorial(static_cast<long double>(n), t);
  for (double qi : q) {
    const long double scaled = static_cast<long double>(qi) * static_cast<long double>(n);
    long double k = std::floor(scaled);
    if (k > static_cast<long double>(n)) k = static_cast<long double>(n);
    const long double theta = scaled - k;
    prob *= (falling_factorial(k, t) + static_cast<long double>(t) * theta * falling_factorial(k, t - 1)) / denom;
  }
  return static_cast<double>(prob);
}

/// P(p_1, ..., p_t all in A) for generalized stratified sampling.
inline double gss_anchored_prob_exact(std::size_t beta, const StrataSpec& strata, const CornerBox0& a,
                                      std::size_t n, std::size_t t) {
  detail::require(beta >= n, "gss oracle: beta must be >= N");
  detail::require(t >= 1 && t <= n, "gss oracle: need 1 <= t <= N");
  const auto w = strata_weights(beta, strata, a);
  return detail::distinct_strata_prob(w, t);
}

inline constexpr std::size_t kRsjSmallMaxN = 31;

/// Exact P(p_1, ..., p_t all in Q) for the randomly shifted and jittered
/// rank-1 lattice in d = 2, with Q a union of cells of the N x N grid.
/// cells[i * N + j] marks [i/N, (i+1)/N) x [j/N, (j+1)/N).
inline double rsj_small_prob(std::size_t n, const std::vector<bool>& cells, std::size_t t) {
  detail::require(is_prime(n), "rsj_small_prob: N must be prime");
  if (n > kRsjSmallMaxN) {
    throw BudgetExceeded("rsj_small_prob: N = " + std::to_string(n) + " exceeds the enumeration cap " +
                         std::to_string(kRsjSmallMaxN));
  }
  detail::require(cells.size() == n * n, "rsj_small_prob: need N*N cell flags");
  detail::require(t >= 1 && t <= n, "rsj_small_prob: need 1 <= t <= N");
  std::vector<long double> ratio(n + 1);
  const long double denom = falling_factorial(static_cast<long double>(n), t);
  for (std::size_t k = 0; k <= n; ++k) ratio[k] = falling_factorial(static_cast<long double>(k), t) / denom;
  long double total = 0.0L;
  for (std::size_t g1 = 1; g1 < n; ++g1) {
    for (std::size_t g2 = 1; g2 < n; ++g2) {
      for (std::size_t u1 = 0; u1 < n; ++u1) {
        for (std::size_t u2 = 0; u2 < n; ++u2) {
          std::size_t hits = 0;
          for (std::size_t j = 0; j < n; ++j) {
            hits += cells[((j * g1 + u1) % n) * n + (j * g2 + u2) % n] ? 1 : 0;
          }
          total += ratio[hits];
        }
      }
    }
  }
  const long double configs = static_cast<long double>((n - 1) * (n - 1) * n * n);
  return static_cast<double>(total / configs);
}

inline double min_copula_cdf(double x, double y) { return std::min({x, y, (x * x + y * y) / 2.0}); }

enum class MinCopulaEvent { lower, upper };

/// lower: P(p1 < u1, p2 < u2); upper: P(p1 >= u1, p2 >= u2).
inline double min_copula_rect_prob(double u1, double u2, MinCopulaEvent which) {
  detail::require(u1 >= 0.0 && u1 <= 1.0 && u2 >= 0.0 && u2 <= 1.0, "mincopula: u must lie in [0,1]^2");
  if (which == MinCopulaEvent::lower) return min_copula_cdf(u1, u2);
  return 1.0 - min_copula_cdf(u1, 1.0) - min_copula_cdf(1.0, u2) + min_copula_cdf(u1, u2);
}

namespace detail {

inline double min_copula_mass(const Interval& e1, const Interval& e2) {
  return min_copula_cdf(e1.b[0], e2.b[0]) - min_copula_cdf(e1.a[0], e2.b[0]) -
         min_copula_cdf(e1.b[0], e2.a[0]) + min_copula_cdf(e1.a[0], e2.a[0]);
}

/// Fraction of slot s covered by e.
inline double slot_fraction(const Interval& e, int slot) {
  const auto o = four_slot_origin(slot);
  return 4.0 * overlap_1d(e.a[0], e.b[0], o[0], o[0] + 0.5) * overlap_1d(e.a[1], e.b[1], o[1], o[1] + 0.5);
}

inline double four_slot_joint(const Interval& e1, const Interval& e2) {
  double p = 0.0;
  for (const auto& row : four_slot_table()) {
    p += row.probability * slot_fraction(e1, row.first) * slot_fraction(e2, row.second);
  }
  return p;
}

inline double swap_joint(const Interval& e1, const Interval& e2) {
  return overlap_1d(e1.a[0], e1.b[0], e2.a[1], e2.b[1]) * overlap_1d(e1.a[1], e1.b[1], e2.a[0], e2.b[0]);
}

inline bool is_two_point_analytic(const SchemeSpec& spec) {
  return spec.is<MinCopula>() || spec.is<FourSlot>() || spec.is<SwapScheme>();
}

inline void require_analytic_shape(const SchemeSpec& spec, std::size_t n, std::size_t d) {
  if (spec.is<MinCopula>()) {
    require(n == 2 && d == 1, "mincopula: requires N = 2, d = 1");
  } else if (is_two_point_analytic(spec)) {
    require(n == 2 && d == 2, scheme_name(spec) + ": requires N = 2, d = 2");
  }
}

/// Grid cells of an interval aligned to multiples of 1/n.
inline std::optional<std::vector<bool>> aligned_cells(const Interval& box, std::size_t n) {
  const double nn = static_cast<double>(n);
  std::size_t lo[2], hi[2];
  for (std::size_t k = 0; k < 2; ++k) {
    const double a = box.a[k] * nn, b = box.b[k] * nn;
    if (a != std::round(a) || b != std::round(b)) return std::nullopt;
    if (box.a[k] != std::round(a) / nn || box.b[k] != std::round(b) / nn) return std::nullopt;
    lo[k] = static_cast<std::size_t>(std::round(a));
    hi[k] = static_cast<std::size_t>(std::round(b));
  }
  std::vector<bool> cells(n * n, false);
  for (std::size_t i = lo[0]; i < hi[0]; ++i) {
    for (std::size_t j = lo[1]; j < hi[1]; ++j) cells[i * n + j] = true;
  }
  return cells;
}

}  // namespace detail

inline std::optional<double> exact_joint_prob(const SchemeSpec& spec, std::size_t n, std::size_t d,
                                              const Region& e1, const Region& e2);

/// Exact P(p_1, ..., p_t all in Q) when the scheme and region admit a closed
/// form; nullopt otherwise.
inline std::optional<double> exact_upper_prob(const SchemeSpec& spec, std::size_t n, std::size_t d,
                                              const Region& q, std::size_t t) {
  detail::require_dims(d, dim(q), "exact_upper_prob");
  detail::require(t <= n, "exact_upper_prob: t must be <= N");
  detail::require_analytic_shape(spec, n, d);
  if (t == 0) return 1.0;
  if (t == 1) return volume(q);
  if (t == 2 && detail::is_two_point_analytic(spec)) return exact_joint_prob(spec, n, d, q, q);

  if (spec.is<MonteCarlo>()) return std::pow(volume(q), static_cast<double>(t));
  if (spec.is<LatinHypercube>() || spec.is<SimpleStratified>()) {
    if (d == 1) {
      std::vector<double> w(n, 0.0);
      for (const auto& box : detail::intervals_of(q)) {
        const auto axis = detail::axis_weights(box.a[0], box.b[0], n);
        for (std::size_t k = 0; k < n; ++k) w[k] += axis[k];
      }
      return detail::distinct_strata_prob(w, t);
    }
    const auto box = detail::as_single_interval(q);
    if (!box) return std::nullopt;
    double p = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      p *= detail::distinct_strata_prob(detail::axis_weights(box->a[i], box->b[i], n), t);
    }
    return p;
  }
  if (const auto* g = std::get_if<GeneralizedStratified>(&spec.kind)) {
    detail::require(g->beta >= n, "gss: beta must be >= N");
    return detail::distinct_strata_prob(strata_weights(g->beta, g->strata, q), t);
  }
  if (const auto* m = std::get_if<Mixed>(&spec.kind)) {
    detail::require(m->d_left + m->d_right == d, "mixed: d must equal d_left + d_right");
    const auto box = detail::as_single_interval(q);
    if (!box) return std::nullopt;
    const auto [left, right] = detail::split_interval(*box, m->d_left);
    const auto pl = exact_upper_prob(*m->left, n, m->d_left, left, t);
    const auto pr = exact_upper_prob(*m->right, n, m->d_right, right, t);
    if (!pl || !pr) return std::nullopt;
    return *pl * *pr;
  }
  if (spec.is<RsjRank1Lattice>()) {
    if (d != 2 || n > kRsjSmallMaxN || !is_prime(n)) return std::nullopt;
    const auto box = detail::as_single_interval(q);
    if (!box) return std::nullopt;
    const auto cells = detail::aligned_cells(*box, n);
    if (!cells) return std::nullopt;
    return rsj_small_prob(n, *cells, t);
  }
  return std::nullopt;
}

/// Exact P(p_1, ..., p_t all outside Q) by inclusion-exclusion over the
/// exact upper probabilities (exchangeability makes P(any k in Q) = P_k).
inline std::optional<double> exact_lower_prob(const SchemeSpec& spec, std::size_t n, std::size_t d,
                                              const Region& q, std::size_t t) {
  long double sum = 0.0L;
  for (std::size_t k = 0; k <= t; ++k) {
    const auto pk = exact_upper_prob(spec, n, d, q, k);
    if (!pk) return std::nullopt;
    const long double term = binomial(t, k) * static_cast<long double>(*pk);
    sum += (k % 2 == 0) ? term : -term;
  }
  return static_cast<double>(std::clamp(sum, 0.0L, 1.0L));
}

/// Exact P(p_1 in E1, p_2 in E2) when available.
inline std::optional<double> exact_joint_prob(const SchemeSpec& spec, std::size_t n, std::size_t d,
                                              const Region& e1, const Region& e2) {
  detail::require_dims(d, dim(e1), "exact_joint_prob");
  detail::require_dims(d, dim(e2), "exact_joint_prob");
  detail::require(n >= 2, "exact_joint_prob: need N >= 2");
  detail::require_analytic_shape(spec, n, d);
  const auto parts1 = detail::intervals_of(e1);
  const auto parts2 = detail::intervals_of(e2);
  auto pairwise_sum = [&](auto joint) {
    double p = 0.0;
    for (const auto& a : parts1) {
      for (const auto& b : parts2) p += joint(a, b);
    }
    return p;
  };
  if (spec.is<MinCopula>()) return pairwise_sum(detail::min_copula_mass);
  if (spec.is<FourSlot>()) return pairwise_sum(detail::four_slot_joint);
  if (spec.is<SwapScheme>()) return pairwise_sum(detail::swap_joint);
  if (spec.is<MonteCarlo>()) return volume(e1) * volume(e2);
  if (spec.is<LatinHypercube>() || spec.is<SimpleStratified>()) {
    if (d == 1) {
      std::vector<double> w1(n, 0.0), w2(n, 0.0);
      for (const auto& a : parts1) {
        const auto axis = detail::axis_weights(a.a[0], a.b[0], n);
        for (std::size_t k = 0; k < n; ++k) w1[k] += axis[k];
      }
      for (const auto& b : parts2) {
        const auto axis = detail::axis_weights(b.a[0], b.b[0], n);
        for (std::size_t k = 0; k < n; ++k) w2[k] += axis[k];
      }
      return detail::distinct_strata_joint(w1, w2);
    }
    return pairwise_sum([&](const Interval& a, const Interval& b) {
      double p = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        p *= detail::distinct_strata_joint(detail::axis_weights(a.a[i], a.b[i], n),
                                           detail::axis_weights(b.a[i], b.b[i], n));
      }
      return p;
    });
  }
  if (const auto* g = std::get_if<GeneralizedStratified>(&spec.kind)) {
    detail::require(g->beta >= n, "gss: beta must be >= N");
    return detail::distinct_strata_joint(strata_weights(g->beta, g->strata, e1),
                                         strata_weights(g->beta, g->strata, e2));
  }
  if (const auto* m = std::get_if<Mixed>(&spec.kind)) {
    detail::require(m->d_left + m->d_right == d, "mixed: d must equal d_left + d_right");
    double p = 0.0;
    for (const auto& a : parts1) {
      for (const auto& b : parts2) {
        const auto [al, ar] = detail::split_interval(a, m->d_left);
        const auto [bl, br] = detail::split_interval(b, m->d_left);
        const auto pl = exact_joint_prob(*m->left, n, m->d_left, al, bl);
        const auto pr = exact_joint_prob(*m->right, n, m->d_right, ar, br);
        if (!pl || !pr) return std::nullopt;
        p += *pl * *pr;
      }
    }
    return p;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- testers

namespace detail {

inline bool want_exact(Method method, bool available, const SchemeSpec& spec) {
  if (method == Method::exact && !available) {
    throw ValidationError("exact probability not available for scheme " + scheme_name(spec) +
                          " with this event");
  }
  return method != Method::empirical && available;
}

/// Number of replications r in which event(draw r) holds; draw r uses
/// rng.split(r), so the count does not depend on the thread count.
template <class Event>
std::size_t count_events(const SchemeSpec& spec, std::size_t n, std::size_t d, const TestOptions& opts,
                         const RngStream& rng, Event event) {
  require(opts.replications >= 1, "replications must be >= 1");
  return parallel_reduce(
      opts.replications, opts.threads, std::size_t{0},
      [&](std::size_t r, std::size_t& acc) {
        RngStream stream = rng.split(r);
        acc += event(sample(spec, n, d, stream)) ? 1 : 0;
      },
      [](std::size_t& acc, const std::size_t& part) { acc += part; });
}

inline DependenceReport empirical_report(Notion notion, Json event, std::size_t hits, double rhs,
                                         const TestOptions& opts) {
  DependenceReport rep;
  rep.notion = notion;
  rep.event = std::move(event);
  rep.replications = opts.replications;
  rep.lhs = static_cast<double>(hits) / static_cast<double>(opts.replications);
  rep.rhs = rhs;
  rep.ci_halfwidth = stats::wilson(hits, opts.replications, opts.confidence).halfwidth(rep.lhs);
  rep.verdict = interval_verdict(rep.lhs, rep.ci_halfwidth, rhs);
  return rep;
}

inline DependenceReport exact_report(Notion notion, Json event, double lhs, double rhs) {
  DependenceReport rep;
  rep.notion = notion;
  rep.event = std::move(event);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.exact = true;
  rep.verdict = exact_verdict(lhs, rhs);
  return rep;
}

template <class Pred>
bool first_t(const PointSet& p, std::size_t t, Pred pred) {
  for (std::size_t j = 0; j < t; ++j) {
    if (!pred(p[j])) return false;
  }
  return true;
}

}  // namespace detail

/// P(p_1..p_t in Q) <= gamma vol(Q)^t.
inline DependenceReport test_upper_nd(const SchemeSpec& spec, std::size_t n, std::size_t d, const Region& q,
                                      std::size_t t, const TestOptions& opts, const RngStream& rng) {
  detail::require_dims(d, dim(q), "test_upper_nd");
  detail::require(t >= 1 && t <= n, "test_upper_nd: need 1 <= t <= N");
  const double rhs = opts.gamma * std::pow(volume(q), static_cast<double>(t));
  Json event{{"region", region_to_json(q)}, {"t", t}, {"gamma", opts.gamma}};
  const auto exact = opts.method == Method::empirical ? std::nullopt : exact_upper_prob(spec, n, d, q, t);
  if (detail::want_exact(opts.method, exact.has_value(), spec)) {
    return detail::exact_report(Notion::upper_nd, std::move(event), exact.value_or(0.0), rhs);
  }
  const auto hits = detail::count_events(spec, n, d, opts, rng, [&](const PointSet& p) {
    return detail::first_t(p, t, [&](std::span<const double> x) { return contains(q, x); });
  });
  return detail::empirical_report(Notion::upper_nd, std::move(event), hits, rhs, opts);
}

/// P(p_1..p_t not in Q) <= gamma (1 - vol(Q))^t.
inline DependenceReport test_lower_nd(const SchemeSpec& spec, std::size_t n, std::size_t d, const Region& q,
                                      std::size_t t, const TestOptions& opts, const RngStream& rng) {
  detail::require_dims(d, dim(q), "test_lower_nd");
  detail::require(t >= 1 && t <= n, "test_lower_nd: need 1 <= t <= N");
  const double rhs = opts.gamma * std::pow(1.0 - volume(q), static_cast<double>(t));
  Json event{{"region", region_to_json(q)}, {"t", t}, {"gamma", opts.gamma}};
  const auto exact = opts.method == Method::empirical ? std::nullopt : exact_lower_prob(spec, n, d, q, t);
  if (detail::want_exact(opts.method, exact.has_value(), spec)) {
    return detail::exact_report(Notion::lower_nd, std::move(event), exact.value_or(0.0), rhs);
  }
  const auto hits = detail::count_events(spec, n, d, opts, rng, [&](const PointSet& p) {
    return detail::first_t(p, t, [&](std::span<const double> x) { return !contains(q, x); });
  });
  return detail::empirical_report(Notion::lower_nd, std::move(event), hits, rhs, opts);
}

/// The two pairwise inequalities for corner boxes anchored at 1: hits in
/// (Q, R) and misses of (Q, R).
struct PairwiseReport {
  DependenceReport nlod;
  DependenceReport nuod;

  Verdict verdict() const {
    if (nlod.verdict == Verdict::violated || nuod.verdict == Verdict::violated) return Verdict::violated;
    if (nlod.verdict == Verdict::holds && nuod.verdict == Verdict::holds) return Verdict::holds;
    return Verdict::inconclusive;
  }
};

inline PairwiseReport test_pairwise_nd(const SchemeSpec& spec, std::size_t n, std::size_t d,
                                       const CornerBox1& q, const CornerBox1& r, const TestOptions& opts,
                                       const RngStream& rng) {
  detail::require_dims(d, q.dim(), "test_pairwise_nd");
  detail::require_dims(d, r.dim(), "test_pairwise_nd");
  detail::require(n >= 2, "test_pairwise_nd: need N >= 2");
  const double vq = volume(q), vr = volume(r);
  const double rhs_hit = vq * vr;
  const double rhs_miss = (1.0 - vq) * (1.0 - vr);
  Json base{{"q", q.lower}, {"r", r.lower}};
  Json hit_event = base, miss_event = base;
  hit_event["inequality"] = "hit";
  miss_event["inequality"] = "miss";

  const auto joint = opts.method == Method::empirical ? std::nullopt : exact_joint_prob(spec, n, d, q, r);
  if (detail::want_exact(opts.method, joint.has_value(), spec)) {
    const double miss = std::clamp(1.0 - vq - vr + joint.value_or(0.0), 0.0, 1.0);
    return {detail::exact_report(Notion::pairwise_nd, std::move(hit_event), joint.value_or(0.0), rhs_hit),
            detail::exact_report(Notion::pairwise_nd, std::move(miss_event), miss, rhs_miss)};
  }
  struct Counts {
    std::size_t hit = 0, miss = 0;
  };
  const Counts c = parallel_reduce(
      opts.replications, opts.threads, Counts{},
      [&](std::size_t rep, Counts& acc) {
        RngStream stream = rng.split(rep);
        const PointSet p = sample(spec, n, d, stream);
        const bool a = contains(q, p[0]), b = contains(r, p[1]);
        acc.hit += (a && b) ? 1 : 0;
        acc.miss += (!a && !b) ? 1 : 0;
      },
      [](Counts& acc, const Counts& part) {
        acc.hit += part.hit;
        acc.miss += part.miss;
      });
  return {detail::empirical_report(Notion::pairwise_nd, std::move(hit_event), c.hit, rhs_hit, opts),
          detail::empirical_report(Notion::pairwise_nd, std::move(miss_event), c.miss, rhs_miss, opts)};
}

struct PairwiseSweepCell {
  std::size_t q_index = 0;
  std::size_t r_index = 0;
  PairwiseReport report;
};

/// test_pairwise_nd for every ordered pair of `corners`, sharing one draw per
/// replication across all pairs.
inline std::vector<PairwiseSweepCell> pairwise_sweep(const SchemeSpec& spec, std::size_t n, std::size_t d,
                                                     const std::vector<CornerBox1>& corners,
                                                     const TestOptions& opts, const RngStream& rng) {
  detail::require(!corners.empty(), "pairwise_sweep: need at least one corner box");
  const std::size_t m = corners.size();
  std::vector<PairwiseSweepCell> out;
  const bool try_exact = opts.method != Method::empirical;
  bool all_exact = try_exact;
  if (try_exact) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        detail::require_dims(d, corners[a].dim(), "pairwise_sweep");
        all_exact = all_exact && exact_joint_prob(spec, n, d, corners[a], corners[b]).has_value();
      }
    }
  }
  if (detail::want_exact(opts.method, all_exact, spec)) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        out.push_back({a, b, test_pairwise_nd(spec, n, d, corners[a], corners[b], opts, rng)});
      }
    }
    return out;
  }
  for (const auto& c : corners) detail::require_dims(d, c.dim(), "pairwise_sweep");
  detail::require(n >= 2, "pairwise_sweep: need N >= 2");
  detail::require(opts.replications >= 1, "replications must be >= 1");
  // hits[a*m + b] and misses[a*m + b]
  using Tally = std::vector<std::size_t>;
  const Tally tally = parallel_reduce(
      opts.replications, opts.threads, Tally(2 * m * m, 0),
      [&](std::size_t rep, Tally& acc) {
        RngStream stream = rng.split(rep);
        const PointSet p = sample(spec, n, d, stream);
        std::vector<char> in1(m), in2(m);
        for (std::size_t a = 0; a < m; ++a) {
          in1[a] = contains(corners[a], p[0]);
          in2[a] = contains(corners[a], p[1]);
        }
        for (std::size_t a = 0; a < m; ++a) {
          for (std::size_t b = 0; b < m; ++b) {
            acc[a * m + b] += (in1[a] && in2[b]) ? 1 : 0;
            acc[m * m + a * m + b] += (!in1[a] && !in2[b]) ? 1 : 0;
          }
        }
      },
      [](Tally& acc, const Tally& part) {
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += part[k];
      });
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double vq = volume(corners[a]), vr = volume(corners[b]);
      Json hit{{"q", corners[a].lower}, {"r", corners[b].lower}, {"inequality", "hit"}};
      Json miss{{"q", corners[a].lower}, {"r", corners[b].lower}, {"inequality", "miss"}};
      out.push_back({a, b,
                     {detail::empirical_report(Notion::pairwise_nd, std::move(hit), tally[a * m + b], vq * vr, opts),
                      detail::empirical_report(Notion::pairwise_nd, std::move(miss), tally[m * m + a * m + b],
                                               (1.0 - vq) * (1.0 - vr), opts)}});
    }
  }
  return out;
}

namespace detail {

/// E1 = A on coordinates < i-1, [alpha, 1) on coordinate i-1 (0-based), free elsewhere.
inline Interval conditional_event(const Interval& prefix, std::size_t d, std::size_t i, double threshold) {
  Coords a(d, 0.0), b(d, 1.0);
  for (std::size_t k = 0; k + 1 < i; ++k) {
    a[k] = prefix.a[k];
    b[k] = prefix.b[k];
  }
  a[i - 1] = threshold;
  return Interval(std::move(a), std::move(b));
}

/// Counts of the four (X, Y) outcomes.
struct PairCounts {
  std::size_t n11 = 0, n10 = 0, n01 = 0, n00 = 0;

  std::size_t total() const { return n11 + n10 + n01 + n00; }
  void add(bool x, bool y) {
    if (x && y) ++n11;
    else if (x) ++n10;
    else if (y) ++n01;
    else ++n00;
  }
  void merge(const PairCounts& o) {
    n11 += o.n11;
    n10 += o.n10;
    n01 += o.n01;
    n00 += o.n00;
  }
};

/// Estimates of P(XY), P(X)P(Y) and a delta-method halfwidth for their
/// difference, from the influence function XY - mu_Y X - mu_X Y.
struct CovarianceEstimate {
  double joint = 0.0;
  double product = 0.0;
  double halfwidth = 0.0;
};

inline CovarianceEstimate covariance_estimate(const PairCounts& c, double confidence) {
  const double n = static_cast<double>(c.total());
  CovarianceEstimate out;
  if (n == 0) return out;
  const double pxy = static_cast<double>(c.n11) / n;
  const double px = static_cast<double>(c.n11 + c.n10) / n;
  const double py = static_cast<double>(c.n11 + c.n01) / n;
  out.joint = pxy;
  out.product = px * py;
  auto influence = [&](double x, double y) { return x * y - py * x - px * y; };
  const double vals[4] = {influence(1, 1), influence(1, 0), influence(0, 1), influence(0, 0)};
  const double counts[4] = {static_cast<double>(c.n11), static_cast<double>(c.n10), static_cast<double>(c.n01),
                            static_cast<double>(c.n00)};
  double mean = 0.0;
  for (int k = 0; k < 4; ++k) mean += counts[k] * vals[k];
  mean /= n;
  double var = 0.0;
  for (int k = 0; k < 4; ++k) var += counts[k] * (vals[k] - mean) * (vals[k] - mean);
  var /= std::max(1.0, n - 1.0);
  out.halfwidth = stats::z_value(confidence) * std::sqrt(var / n);
  return out;
}

}  // namespace detail

/// P(p1^(i) >= alpha, p2^(i) >= beta | C) <= P(p1^(i) >= alpha | C) P(p2^(i) >= beta | C)
/// with C = {p1^(1:i-1) in A, p2^(1:i-1) in B}. Coordinates are 1-based;
/// for i = 1 the boxes are zero-dimensional and C is certain.
inline DependenceReport test_conditional_nqd(const SchemeSpec& spec, std::size_t n, std::size_t d, std::size_t i,
                                             const Interval& a, const Interval& b, double alpha, double beta,
                                             const TestOptions& opts, const RngStream& rng) {
  detail::require(i >= 1 && i <= d, "test_conditional_nqd: need 1 <= i <= d");
  detail::require_dims(i - 1, a.dim(), "test_conditional_nqd (A)");
  detail::require_dims(i - 1, b.dim(), "test_conditional_nqd (B)");
  detail::require(alpha >= 0.0 && alpha < 1.0 && beta >= 0.0 && beta < 1.0,
                  "test_conditional_nqd: thresholds must lie in [0,1)");
  detail::require(n >= 2, "test_conditional_nqd: need N >= 2");
  Json event{{"i", i}, {"A", Json{{"a", a.a}, {"b", a.b}}}, {"B", Json{{"a", b.a}, {"b", b.b}}},
             {"alpha", alpha}, {"beta", beta}};

  const Interval c1 = detail::conditional_event(a, d, i, 0.0), c2 = detail::conditional_event(b, d, i, 0.0);
  const Interval x1 = detail::conditional_event(a, d, i, alpha), y2 = detail::conditional_event(b, d, i, beta);
  std::optional<double> pc, pxy, px, py;
  if (opts.method != Method::empirical) {
    pc = exact_joint_prob(spec, n, d, c1, c2);
    if (pc) {
      pxy = exact_joint_prob(spec, n, d, x1, y2);
      px = exact_joint_prob(spec, n, d, x1, c2);
      py = exact_joint_prob(spec, n, d, c1, y2);
    }
  }
  const bool available = pc && pxy && px && py && *pc > 0.0;
  if (detail::want_exact(opts.method, available, spec)) {
    return detail::exact_report(Notion::conditional_nqd, std::move(event), *pxy / *pc,
                                (*px / *pc) * (*py / *pc));
  }

  const detail::PairCounts counts = parallel_reduce(
      opts.replications, opts.threads, detail::PairCounts{},
      [&](std::size_t r, detail::PairCounts& acc) {
        RngStream stream = rng.split(r);
        const PointSet p = sample(spec, n, d, stream);
        if (!contains(c1, p[0]) || !contains(c2, p[1])) return;
        acc.add(p.at(0, i - 1) >= alpha, p.at(1, i - 1) >= beta);
      },
      [](detail::PairCounts& acc, const detail::PairCounts& part) { acc.merge(part); });
  const auto est = detail::covariance_estimate(counts, opts.confidence);
  DependenceReport rep;
  rep.notion = Notion::conditional_nqd;
  rep.event = std::move(event);
  rep.event["conditioning_hits"] = counts.total();
  rep.replications = opts.replications;
  rep.lhs = est.joint;
  rep.rhs = est.product;
  rep.ci_halfwidth = est.halfwidth;
  rep.verdict = counts.total() < kMinConditioningHits ? Verdict::inconclusive
                                                      : detail::interval_verdict(rep.lhs, rep.ci_halfwidth, rep.rhs);
  return rep;
}

/// One cross-coordinate factorization check
/// P(X_i, X_j) versus P(X_i) P(X_j), X_i = {p1^(i) >= q, p2^(i) >= r},
/// X_j = {p1^(j) >= s, p2^(j) >= u}.
struct FactorizationCheck {
  std::size_t j = 0;  // 1-based other coordinate
  double s = 0.0;
  double u = 0.0;
  double joint = 0.0;
  double product = 0.0;
  double ci_halfwidth = 0.0;
  bool consistent = true;
};

struct CiNqdReport {
  DependenceReport nqd;
  std::vector<FactorizationCheck> factorization;
  /// Independence across coordinates is only probed through finitely many
  /// factorization checks.
  bool partial = true;
};

inline const std::vector<double>& factorization_thresholds() {
  static const std::vector<double> grid{1.0 / 3.0, 2.0 / 3.0};
  return grid;
}

/// Per-coordinate NQD for coordinate i (1-based) at thresholds (q, r), plus
/// factorization checks against every other coordinate.
inline CiNqdReport test_ci_nqd(const SchemeSpec& spec, std::size_t n, std::size_t d, std::size_t i, double q,
                               double r, const TestOptions& opts, const RngStream& rng) {
  detail::require(i >= 1 && i <= d, "test_ci_nqd: need 1 <= i <= d");
  detail::require(q >= 0.0 && q < 1.0 && r >= 0.0 && r < 1.0, "test_ci_nqd: thresholds must lie in [0,1)");
  detail::require(n >= 2, "test_ci_nqd: need N >= 2");
  CiNqdReport out;
  Json event{{"i", i}, {"q", q}, {"r", r}};
  const double rhs = (1.0 - q) * (1.0 - r);
  const auto& grid = factorization_thresholds();

  auto coord_box = [&](std::size_t k, double lo) {
    Coords a(d, 0.0), b(d, 1.0);
    a[k - 1] = lo;
    return Interval(std::move(a), std::move(b));
  };
  auto two_coord_box = [&](std::size_t k1, double lo1, std::size_t k2, double lo2) {
    Coords a(d, 0.0), b(d, 1.0);
    a[k1 - 1] = lo1;
    a[k2 - 1] = lo2;
    return Interval(std::move(a), std::move(b));
  };

  const auto exact_nqd = opts.method == Method::empirical
                             ? std::nullopt
                             : exact_joint_prob(spec, n, d, coord_box(i, q), coord_box(i, r));
  if (detail::want_exact(opts.method, exact_nqd.has_value(), spec)) {
    out.nqd = detail::exact_report(Notion::ci_nqd, event, exact_nqd.value_or(0.0), rhs);
    for (std::size_t j = 1; j <= d; ++j) {
      if (j == i) continue;
      for (double s : grid) {
        for (double u : grid) {
          const auto both = exact_joint_prob(spec, n, d, two_coord_box(i, q, j, s), two_coord_box(i, r, j, u));
          const auto pj = exact_joint_prob(spec, n, d, coord_box(j, s), coord_box(j, u));
          FactorizationCheck fc{j, s, u, both.value_or(0.0), exact_nqd.value_or(0.0) * pj.value_or(0.0), 0.0, true};
          fc.consistent = both && pj && std::fabs(fc.joint - fc.product) <= kExactTolerance;
          out.factorization.push_back(fc);
        }
      }
    }
    return out;
  }

  // Per draw: X_i and, for every (j, s, u), X_j.
  const std::size_t checks_per_j = grid.size() * grid.size();
  struct Tally {
    std::size_t nqd_hits = 0;
    std::vector<detail::PairCounts> pairs;
  };
  Tally init;
  init.pairs.assign(d * checks_per_j, {});
  const Tally tally = parallel_reduce(
      opts.replications, opts.threads, init,
      [&](std::size_t rep, Tally& acc) {
        RngStream stream = rng.split(rep);
        const PointSet p = sample(spec, n, d, stream);
        const bool xi = p.at(0, i - 1) >= q && p.at(1, i - 1) >= r;
        acc.nqd_hits += xi ? 1 : 0;
        for (std::size_t j = 1; j <= d; ++j) {
          if (j == i) continue;
          std::size_t slot = (j - 1) * checks_per_j;
          for (double s : grid) {
            for (double u : grid) {
              acc.pairs[slot++].add(xi, p.at(0, j - 1) >= s && p.at(1, j - 1) >= u);
            }
          }
        }
      },
      [](Tally& acc, const Tally& part) {
        acc.nqd_hits += part.nqd_hits;
        for (std::size_t k = 0; k < acc.pairs.size(); ++k) acc.pairs[k].merge(part.pairs[k]);
      });
  out.nqd = detail::empirical_report(Notion::ci_nqd, event, tally.nqd_hits, rhs, opts);
  for (std::size_t j = 1; j <= d; ++j) {
    if (j == i) continue;
    std::size_t slot = (j - 1) * checks_per_j;
    for (double s : grid) {
      for (double u : grid) {
        const auto est = detail::covariance_estimate(tally.pairs[slot++], opts.confidence);
        out.factorization.push_back({j, s, u, est.joint, est.product, est.halfwidth,
                                     std::fabs(est.joint - est.product) <= est.halfwidth});
      }
    }
  }
  return out;
}

}  // namespace ndqmc
