#pragma once

// Axis-parallel half-open boxes in the unit cube, delta-covers, elementary
// intervals and the (t,m,s)-net checker.
//
// All membership tests are half-open, [a,b) on every axis, and use exact
// floating-point comparisons. Boundaries of elementary intervals are the
// doubles k / b^j, so every double in [0,1) lies in exactly one elementary
// interval of a given resolution.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ndqmc/error.hpp"
#include "ndqmc/point_set.hpp"
#include "ndqmc/rng.hpp"

namespace ndqmc {

using Coords = std::vector<double>;

namespace detail {

inline void require_unit_closed(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ValidationError(std::string(what) + ": coordinates must lie in [0,1]");
    }
  }
}

inline double product(std::span<const double> v) {
  double p = 1.0;
  for (double x : v) p *= x;
  return p;
}

inline std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (r > UINT64_MAX / base) throw ValidationError("integer power overflows 64 bits");
    r *= base;
  }
  return r;
}

}  // namespace detail

/// [0, upper)
struct CornerBox0 {
  Coords upper;

  CornerBox0() = default;
  explicit CornerBox0(Coords u) : upper(std::move(u)) {
    detail::require_unit_closed(upper, "CornerBox0");
  }
  std::size_t dim() const { return upper.size(); }
};

/// [lower, 1)
struct CornerBox1 {
  Coords lower;

  CornerBox1() = default;
  explicit CornerBox1(Coords l) : lower(std::move(l)) {
    detail::require_unit_closed(lower, "CornerBox1");
  }
  std::size_t dim() const { return lower.size(); }
};

/// [a, b); degenerate intervals are allowed.
struct Interval {
  Coords a;
  Coords b;

  Interval() = default;
  Interval(Coords lo, Coords hi) : a(std::move(lo)), b(std::move(hi)) {
    detail::require_dims(a.size(), b.size(), "Interval");
    detail::require_unit_closed(a, "Interval");
    detail::require_unit_closed(b, "Interval");
    for (std::size_t i = 0; i < a.size(); ++i) {
      detail::require(a[i] <= b[i], "Interval: require a <= b componentwise");
    }
  }
  std::size_t dim() const { return a.size(); }
};

/// outer \ inner with inner contained in outer.
struct BoxDiff {
  CornerBox0 outer;
  CornerBox0 inner;

  BoxDiff() = default;
  BoxDiff(CornerBox0 o, CornerBox0 i) : outer(std::move(o)), inner(std::move(i)) {
    detail::require_dims(outer.dim(), inner.dim(), "BoxDiff");
    for (std::size_t k = 0; k < outer.dim(); ++k) {
      detail::require(inner.upper[k] <= outer.upper[k], "BoxDiff: inner must be inside outer");
    }
  }
  /// outer with nothing removed.
  static BoxDiff whole(const CornerBox0& box) {
    return BoxDiff(box, CornerBox0(Coords(box.dim(), 0.0)));
  }
  std::size_t dim() const { return outer.dim(); }
};

/// Product of [k_l b^-j_l, (k_l+1) b^-j_l).
struct ElementaryInterval {
  unsigned base = 2;
  std::vector<unsigned> j;
  std::vector<std::uint64_t> k;

  ElementaryInterval() = default;
  ElementaryInterval(unsigned b, std::vector<unsigned> jj, std::vector<std::uint64_t> kk)
      : base(b), j(std::move(jj)), k(std::move(kk)) {
    detail::require(base >= 2, "ElementaryInterval: base must be >= 2");
    detail::require_dims(j.size(), k.size(), "ElementaryInterval");
    for (std::size_t l = 0; l < j.size(); ++l) {
      detail::require(k[l] < detail::checked_pow(base, j[l]),
                      "ElementaryInterval: k_l must be < b^j_l");
    }
  }
  std::size_t dim() const { return j.size(); }

  Interval as_interval() const {
    Coords a(dim()), b(dim());
    for (std::size_t l = 0; l < dim(); ++l) {
      const auto scale = static_cast<double>(detail::checked_pow(base, j[l]));
      a[l] = static_cast<double>(k[l]) / scale;
      b[l] = static_cast<double>(k[l] + 1) / scale;
    }
    return Interval(std::move(a), std::move(b));
  }
};

using Region = std::variant<CornerBox0, CornerBox1, Interval, BoxDiff, ElementaryInterval>;

// ---------------------------------------------------------------- volume

inline double volume(const CornerBox0& box) { return detail::product(box.upper); }

inline double volume(const CornerBox1& box) {
  double p = 1.0;
  for (double l : box.lower) p *= 1.0 - l;
  return p;
}

inline double volume(const Interval& box) {
  double p = 1.0;
  for (std::size_t i = 0; i < box.dim(); ++i) p *= box.b[i] - box.a[i];
  return p;
}

inline double volume(const BoxDiff& box) { return volume(box.outer) - volume(box.inner); }

inline double volume(const ElementaryInterval& box) {
  unsigned total = std::accumulate(box.j.begin(), box.j.end(), 0U);
  return std::pow(static_cast<double>(box.base), -static_cast<double>(total));
}

inline double volume(const Region& region) {
  return std::visit([](const auto& box) { return volume(box); }, region);
}

inline std::size_t dim(const Region& region) {
  return std::visit([](const auto& box) { return box.dim(); }, region);
}

// -------------------------------------------------------------- contains

inline bool contains(const CornerBox0& box, std::span<const double> p) {
  detail::require_dims(box.dim(), p.size(), "contains");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] < box.upper[i])) return false;
  }
  return true;
}

inline bool contains(const CornerBox1& box, std::span<const double> p) {
  detail::require_dims(box.dim(), p.size(), "contains");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < box.lower[i]) return false;
  }
  return true;
}

inline bool contains(const Interval& box, std::span<const double> p) {
  detail::require_dims(box.dim(), p.size(), "contains");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < box.a[i] || !(p[i] < box.b[i])) return false;
  }
  return true;
}

inline bool contains(const BoxDiff& box, std::span<const double> p) {
  return contains(box.outer, p) && !contains(box.inner, p);
}

inline bool contains(const ElementaryInterval& box, std::span<const double> p) {
  return contains(box.as_interval(), p);
}

inline bool contains(const Region& region, std::span<const double> p) {
  return std::visit([&](const auto& box) { return contains(box, p); }, region);
}

/// Disjoint intervals whose union is the region.
inline std::vector<Interval> to_disjoint_intervals(const Region& region) {
  struct Visitor {
    std::vector<Interval> operator()(const CornerBox0& b) const {
      return {Interval(Coords(b.dim(), 0.0), b.upper)};
    }
    std::vector<Interval> operator()(const CornerBox1& b) const {
      return {Interval(b.lower, Coords(b.dim(), 1.0))};
    }
    std::vector<Interval> operator()(const Interval& b) const { return {b}; }
    std::vector<Interval> operator()(const ElementaryInterval& b) const {
      return {b.as_interval()};
    }
    // Piece k: inside inner on axes < k, beyond inner on axis k, free on axes > k.
    std::vector<Interval> operator()(const BoxDiff& b) const {
      std::vector<Interval> out;
      const std::size_t d = b.dim();
      for (std::size_t k = 0; k < d; ++k) {
        Coords lo(d, 0.0), hi(d);
        for (std::size_t i = 0; i < d; ++i) {
          hi[i] = i < k ? b.inner.upper[i] : b.outer.upper[i];
        }
        lo[k] = b.inner.upper[k];
        Interval piece(lo, hi);
        if (volume(piece) > 0.0) out.push_back(std::move(piece));
      }
      return out;
    }
  };
  return std::visit(Visitor{}, region);
}

// ----------------------------------------------------------- delta covers

/// A delta-cover of [0,1)^d. Grid points with a coordinate equal to 1 are
/// kept apart as upper witnesses so that `points` stays inside [0,1)^d.
struct DeltaCover {
  double delta = 1.0;
  std::size_t dim = 1;
  std::size_t resolution = 1;
  std::vector<Coords> points;
  std::vector<Coords> upper_witnesses;

  std::size_t size() const { return points.size() + upper_witnesses.size(); }
};

inline constexpr std::size_t kMaxCoverSize = 20'000'000;

/// Product grid {0, 1/m, ..., 1}^d minus the origin with m = ceil(d / delta).
/// For d = 1 this has exactly ceil(1/delta) elements, the minimal size.
inline DeltaCover build_delta_cover(std::size_t d, double delta) {
  detail::require(d >= 1, "build_delta_cover: d must be >= 1");
  detail::require(delta > 0.0 && delta <= 1.0, "build_delta_cover: delta must lie in (0,1]");
  const double m_real = std::ceil(static_cast<double>(d) / delta);
  const double nodes = std::pow(m_real + 1.0, static_cast<double>(d));
  if (nodes > static_cast<double>(kMaxCoverSize)) {
    throw BudgetExceeded("build_delta_cover: cover would have " + std::to_string(nodes) +
                         " elements");
  }
  const auto m = static_cast<std::size_t>(m_real);

  DeltaCover cover;
  cover.delta = delta;
  cover.dim = d;
  cover.resolution = m;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    bool origin = true, at_one = false;
    Coords x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = static_cast<double>(idx[i]) / static_cast<double>(m);
      origin = origin && idx[i] == 0;
      at_one = at_one || idx[i] == m;
    }
    if (!origin) (at_one ? cover.upper_witnesses : cover.points).push_back(std::move(x));
    std::size_t axis = 0;
    while (axis < d && ++idx[axis] > m) idx[axis++] = 0;
    if (axis == d) break;
  }
  return cover;
}

/// Randomized check of the cover property: for random y find x <= y <= z in
/// the cover (plus the origin) with vol[0,z] - vol[0,x] <= delta.
inline bool validate_delta_cover(const DeltaCover& cover, std::size_t trials, RngStream& rng) {
  const std::size_t d = cover.dim;
  Coords y(d);
  auto leq = [d](std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < d; ++i) {
      if (a[i] > b[i]) return false;
    }
    return true;
  };
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (auto& c : y) c = rng.uniform();
    double best_below = 0.0;  // the origin
    double best_above = 2.0;
    for (const auto* list : {&cover.points, &cover.upper_witnesses}) {
      for (const auto& g : *list) {
        const double v = detail::product(g);
        if (leq(g, y)) best_below = std::max(best_below, v);
        if (leq(y, g)) best_above = std::min(best_above, v);
      }
    }
    if (!(best_above - best_below <= cover.delta)) return false;
  }
  return true;
}

struct CoverBound {
  std::uint64_t value = 0;
  bool saturated = false;
};

/// ceil(2^d d^d / d! (1/delta + 1)^d), and ceil(1/delta) for d = 1.
/// Results within 1e-12 relative of an integer are rounded to it first so that
/// exact products such as 4500 are not pushed up by rounding error.
inline CoverBound cover_cardinality_bound(std::size_t d, double delta) {
  detail::require(d >= 1, "cover_cardinality_bound: d must be >= 1");
  detail::require(delta > 0.0 && delta <= 1.0, "cover_cardinality_bound: delta must lie in (0,1]");
  auto snap_ceil = [](long double x) {
    const long double r = std::nearbyint(x);
    return std::fabs(x - r) <= 1e-12L * std::max(1.0L, x) ? r : std::ceil(x);
  };
  if (d == 1) return {static_cast<std::uint64_t>(snap_ceil(1.0L / delta)), false};
  const auto dd = static_cast<long double>(d);
  const long double log_value = dd * std::log(2.0L) + dd * std::log(dd) - std::lgamma(dd + 1.0L) +
                                dd * std::log(1.0L / delta + 1.0L);
  if (log_value >= 63.0L * std::log(2.0L)) return {UINT64_MAX, true};
  long double value = 1.0L;
  for (std::size_t i = 1; i <= d; ++i) {
    value *= 2.0L * dd * (1.0L / delta + 1.0L) / static_cast<long double>(i);
  }
  return {static_cast<std::uint64_t>(snap_ceil(value)), false};
}

// ------------------------------------------------- box difference split

/// left x right, each factor a box difference (a plain corner box is a
/// difference with an empty inner box).
struct DiffProduct {
  BoxDiff left;
  BoxDiff right;

  std::size_t dim() const { return left.dim() + right.dim(); }
};

inline double volume(const DiffProduct& piece) { return volume(piece.left) * volume(piece.right); }

inline bool contains(const DiffProduct& piece, std::span<const double> p) {
  detail::require_dims(piece.dim(), p.size(), "contains");
  return contains(piece.left, p.first(piece.left.dim())) &&
         contains(piece.right, p.subspan(piece.left.dim()));
}

/// Splits B \ A along the first d_left coordinates into the disjoint pieces
/// (B' \ A') x B''  and  A' x (B'' \ A'').
inline std::pair<DiffProduct, DiffProduct> split_box_difference(const BoxDiff& diff,
                                                                std::size_t d_left) {
  const std::size_t d = diff.dim();
  detail::require(d_left >= 1 && d_left < d, "split_box_difference: need 1 <= d_left < d");
  auto head = [&](const CornerBox0& b) {
    return CornerBox0(Coords(b.upper.begin(), b.upper.begin() + static_cast<std::ptrdiff_t>(d_left)));
  };
  auto tail = [&](const CornerBox0& b) {
    return CornerBox0(Coords(b.upper.begin() + static_cast<std::ptrdiff_t>(d_left), b.upper.end()));
  };
  const CornerBox0 outer_l = head(diff.outer), outer_r = tail(diff.outer);
  const CornerBox0 inner_l = head(diff.inner), inner_r = tail(diff.inner);
  DiffProduct first{BoxDiff(outer_l, inner_l), BoxDiff::whole(outer_r)};
  DiffProduct second{BoxDiff::whole(inner_l), BoxDiff(outer_r, inner_r)};
  return {std::move(first), std::move(second)};
}

// ------------------------------------------------------ elementary cells

/// Index k of the elementary interval [k b^-j, (k+1) b^-j) containing x.
inline std::uint64_t elementary_index(double x, unsigned base, unsigned j) {
  const std::uint64_t cells = detail::checked_pow(base, j);
  const auto scale = static_cast<double>(cells);
  auto k = static_cast<std::uint64_t>(std::floor(x * scale));
  if (k >= cells) k = cells - 1;
  while (k > 0 && static_cast<double>(k) / scale > x) --k;
  while (k + 1 < cells && static_cast<double>(k + 1) / scale <= x) ++k;
  return k;
}

/// True iff P is a (t,m,s)-net in base b: every elementary interval of volume
/// b^(t-m) holds exactly b^t points.
inline bool is_net(const PointSet& p, unsigned b, unsigned m, unsigned s, unsigned t) {
  detail::require(b >= 2, "is_net: base must be >= 2");
  detail::require(t <= m, "is_net: need t <= m");
  detail::require_dims(s, p.dim(), "is_net");
  const std::uint64_t n = detail::checked_pow(b, m);
  if (p.size() != n) {
    throw ValidationError("is_net: point count " + std::to_string(p.size()) + " != b^m = " +
                          std::to_string(n));
  }
  const unsigned level = m - t;
  const std::uint64_t expected = detail::checked_pow(b, t);
  std::vector<std::uint64_t> counts(detail::checked_pow(b, level));
  // Enumerate all compositions j_1 + ... + j_s = m - t.
  std::vector<unsigned> j(s, 0);
  if (s == 0) return false;
  j[s - 1] = level;
  while (true) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::uint64_t cell = 0;
      for (unsigned l = 0; l < s; ++l) {
        cell = cell * detail::checked_pow(b, j[l]) + elementary_index(p.at(i, l), b, j[l]);
      }
      ++counts[cell];
    }
    for (auto c : counts) {
      if (c != expected) return false;
    }
    // Next composition in lexicographic order of (j_1, ..., j_{s-1}).
    if (s == 1) break;
    int l = static_cast<int>(s) - 2;
    while (l >= 0 && j[s - 1] == 0) {
      j[s - 1] += j[static_cast<std::size_t>(l)];
      j[static_cast<std::size_t>(l)] = 0;
      --l;
    }
    if (l < 0) break;
    ++j[static_cast<std::size_t>(l)];
    --j[s - 1];
  }
  return true;
}

}  // namespace ndqmc
