#pragma once

// Randomized QMC estimation, quasivolumes, variance comparisons against
// Monte Carlo, and a numeric check of the maximum of e_t on the simplex.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ndqmc/error.hpp"
#include "ndqmc/geometry.hpp"
#include "ndqmc/parallel.hpp"
#include "ndqmc/point_set.hpp"
#include "ndqmc/rng.hpp"
#include "ndqmc/samplers.hpp"
#include "ndqmc/stats.hpp"
#include "ndqmc/symmetric.hpp"

namespace ndqmc {

struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> eval;
  /// Exact integral over [0,1)^d, if known.
  std::function<std::optional<double>(std::size_t d)> integral = [](std::size_t) { return std::nullopt; };
  bool quasimonotone = false;       // declared: all quasivolumes >= 0
  bool neg_quasimonotone = false;   // declared: -f is quasimonotone
  bool monotone = false;            // declared: monotone in each coordinate

  double operator()(std::span<const double> x) const { return eval(x); }
};

inline TestFunction product_coords() {
  return {"product",
          [](std::span<const double> x) {
            double p = 1.0;
            for (double v : x) p *= v;
            return p;
          },
          [](std::size_t d) -> std::optional<double> { return std::ldexp(1.0, -static_cast<int>(d)); },
          true, false, true};
}

inline TestFunction sum_coords() {
  return {"sum",
          [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v;
            return s;
          },
          [](std::size_t d) -> std::optional<double> { return static_cast<double>(d) / 2.0; }, true, false,
          true};
}

/// Indicator of [a, 1).
inline TestFunction corner_indicator(Coords a) {
  detail::require_unit_closed(a, "corner_indicator");
  const CornerBox1 box(a);
  return {"corner",
          [box](std::span<const double> x) { return contains(box, x) ? 1.0 : 0.0; },
          [box](std::size_t d) -> std::optional<double> {
            if (d != box.dim()) return std::nullopt;
            return volume(box);
          },
          true, false, true};
}

inline TestFunction neg_product() {
  TestFunction f = product_coords();
  f.name = "neg_product";
  f.eval = [](std::span<const double> x) {
    double p = 1.0;
    for (double v : x) p *= v;
    return -p;
  };
  f.integral = [](std::size_t d) -> std::optional<double> { return -std::ldexp(1.0, -static_cast<int>(d)); };
  f.quasimonotone = false;
  f.neg_quasimonotone = true;
  return f;
}

inline TestFunction constant(double c) {
  return {"constant",
          [c](std::span<const double>) { return c; },
          [c](std::size_t) -> std::optional<double> { return c; },
          true, true, true};
}

/// min of the coordinates; quasimonotone (its content is mass on the diagonal).
inline TestFunction min_coords() {
  return {"min",
          [](std::span<const double> x) {
            double m = 1.0;
            for (double v : x) m = std::min(m, v);
            return x.empty() ? 0.0 : m;
          },
          [](std::size_t d) -> std::optional<double> { return 1.0 / static_cast<double>(d + 1); }, true, false,
          true};
}

inline TestFunction neg_min_coords() {
  TestFunction f = min_coords();
  f.name = "neg_min";
  f.eval = [](std::span<const double> x) {
    double m = 1.0;
    for (double v : x) m = std::min(m, v);
    return x.empty() ? 0.0 : -m;
  };
  f.integral = [](std::size_t d) -> std::optional<double> { return -1.0 / static_cast<double>(d + 1); };
  f.quasimonotone = false;
  f.neg_quasimonotone = true;
  return f;
}

inline TestFunction custom_function(std::string name, std::function<double(std::span<const double>)> eval,
                                    bool quasimonotone, bool neg_quasimonotone, bool monotone) {
  TestFunction f;
  f.name = std::move(name);
  f.eval = std::move(eval);
  f.quasimonotone = quasimonotone;
  f.neg_quasimonotone = neg_quasimonotone;
  f.monotone = monotone;
  return f;
}

/// (1/N) sum f(p_i) for one draw of the scheme.
inline double rqmc_estimate(const SchemeSpec& spec, const TestFunction& f, std::size_t n, std::size_t d,
                            RngStream& rng) {
  const PointSet p = sample(spec, n, d, rng);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f(p[i]);
  return s / static_cast<double>(n);
}

inline constexpr std::size_t kMaxQuasivolumeDim = 20;

/// sum over J of (-1)^|J| f(a_J, b_-J), where coordinates in J take a and
/// the others take b. In one dimension this is f(b) - f(a).
inline double quasivolume(const TestFunction& f, const Interval& box) {
  const std::size_t d = box.dim();
  detail::require(d <= kMaxQuasivolumeDim, "quasivolume: d must be <= 20");
  std::vector<double> x(d);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    int parity = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const bool in_j = (mask >> k) & 1U;
      x[k] = in_j ? box.a[k] : box.b[k];
      parity ^= in_j ? 1 : 0;
    }
    total += parity ? -f(x) : f(x);
  }
  return total;
}

struct QuasimonotoneScan {
  bool passes = true;
  std::optional<Interval> counterexample;
  double value = 0.0;  // quasivolume of the counterexample
  std::size_t intervals_checked = 0;
};

/// Checks quasivolume >= -1e-12 on a dyadic grid of intervals and on
/// `trials` random intervals; stops at the first violation.
inline QuasimonotoneScan is_quasimonotone_scan(const TestFunction& f, std::size_t d, std::size_t trials,
                                               RngStream& rng) {
  detail::require(d >= 1 && d <= kMaxQuasivolumeDim, "is_quasimonotone_scan: need 1 <= d <= 20");
  QuasimonotoneScan scan;
  auto check = [&](const Interval& box) {
    ++scan.intervals_checked;
    const double q = quasivolume(f, box);
    if (q < -1e-12) {
      scan.passes = false;
      scan.counterexample = box;
      scan.value = q;
    }
    return scan.passes;
  };

  // Dyadic grid with 2^level cells per axis, level chosen so the grid of
  // intervals stays below ~1e5.
  unsigned level = 3;
  auto pairs = [](unsigned lv) { return static_cast<double>(((1U << lv) + 1) * (1U << lv) / 2); };
  while (level > 0 && std::pow(pairs(level), static_cast<double>(d)) > 1e5) --level;
  if (level > 0 && std::pow(pairs(level), static_cast<double>(d)) <= 1e5) {
    const unsigned m = 1U << level;
    std::vector<std::pair<unsigned, unsigned>> axis;
    for (unsigned lo = 0; lo < m; ++lo) {
      for (unsigned hi = lo + 1; hi <= m; ++hi) axis.emplace_back(lo, hi);
    }
    std::vector<std::size_t> idx(d, 0);
    while (true) {
      Coords a(d), b(d);
      for (std::size_t k = 0; k < d; ++k) {
        a[k] = static_cast<double>(axis[idx[k]].first) / m;
        b[k] = static_cast<double>(axis[idx[k]].second) / m;
      }
      if (!check(Interval(a, b))) return scan;
      std::size_t k = 0;
      while (k < d && ++idx[k] == axis.size()) idx[k++] = 0;
      if (k == d) break;
    }
  }
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Coords a(d), b(d);
    for (std::size_t k = 0; k < d; ++k) {
      const double u = rng.uniform(), v = rng.uniform();
      a[k] = std::min(u, v);
      b[k] = std::max(u, v);
    }
    if (!check(Interval(a, b))) return scan;
  }
  return scan;
}

struct VarianceStudy {
  std::string scheme;
  std::string function;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t replications = 0;
  double mean_scheme = 0.0;
  double mean_mc = 0.0;
  double var_scheme = 0.0;
  double var_mc = 0.0;
  double ratio = 1.0;
  double ratio_stderr = 0.0;
};

inline constexpr std::size_t kMinStudyReplications = 30;

/// R replications of the scheme (streams rng.split(0).split(r)) and of Monte
/// Carlo (rng.split(1).split(r)); ratio = var_scheme / var_mc with a
/// delta-method standard error.
inline VarianceStudy variance_study(const SchemeSpec& spec, const TestFunction& f, std::size_t n, std::size_t d,
                                    std::size_t replications, const RngStream& rng,
                                    std::size_t threads = default_threads()) {
  detail::require(replications >= kMinStudyReplications, "variance_study: need R >= 30");
  const RngStream scheme_root = rng.split(0), mc_root = rng.split(1);
  std::vector<double> est_scheme(replications), est_mc(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    RngStream a = scheme_root.split(r);
    RngStream b = mc_root.split(r);
    est_scheme[r] = rqmc_estimate(spec, f, n, d, a);
    est_mc[r] = rqmc_estimate(MonteCarlo{}, f, n, d, b);
  });
  VarianceStudy out;
  out.scheme = scheme_name(spec);
  out.function = f.name;
  out.n = n;
  out.d = d;
  out.replications = replications;
  out.mean_scheme = stats::mean(est_scheme);
  out.mean_mc = stats::mean(est_mc);
  out.var_scheme = stats::variance(est_scheme);
  out.var_mc = stats::variance(est_mc);
  if (out.var_mc > 0.0) {
    out.ratio = out.var_scheme / out.var_mc;
    double rel = 0.0;
    if (out.var_scheme > 0.0) rel += stats::variance_of_variance(est_scheme) / (out.var_scheme * out.var_scheme);
    rel += stats::variance_of_variance(est_mc) / (out.var_mc * out.var_mc);
    out.ratio_stderr = out.ratio * std::sqrt(rel);
  } else {
    out.ratio = out.var_scheme > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return out;
}

struct MaxLemmaResult {
  bool passes = true;
  double centroid_value = 0.0;
  double max_found = 0.0;
  std::vector<double> worst_point;
  std::size_t trials = 0;
};

/// Compares e_t at `trials` flat-Dirichlet points of {x >= 0, sum x = xi}
/// with its value C(n, t) (xi/n)^t at the centroid.
inline MaxLemmaResult maxlemma_check(std::size_t nvars, std::size_t t, double xi, std::size_t trials,
                                     RngStream& rng) {
  detail::require(nvars >= 1 && nvars <= 8, "maxlemma_check: need 1 <= Nvars <= 8");
  detail::require(t <= nvars, "maxlemma_check: need t <= Nvars");
  detail::require(xi >= 0.0 && std::isfinite(xi), "maxlemma_check: xi must be >= 0");
  MaxLemmaResult out;
  out.trials = trials;
  const std::vector<double> centroid(nvars, xi / static_cast<double>(nvars));
  out.centroid_value = elementary_symmetric(centroid, t);
  const double limit = out.centroid_value * (1.0 + 1e-12);
  std::vector<double> x(nvars);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    double total = 0.0;
    for (auto& v : x) {
      v = -std::log1p(-rng.uniform());
      total += v;
    }
    for (auto& v : x) v = xi * v / total;
    const double e = elementary_symmetric(x, t);
    if (e > out.max_found || out.worst_point.empty()) {
      out.max_found = e;
      out.worst_point = x;
    }
    if (e > limit) out.passes = false;
  }
  return out;
}

}  // namespace ndqmc
