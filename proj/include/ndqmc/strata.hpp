#pragma once

// Strata families for generalized stratified sampling: vertical stripes in
// any dimension, and the fundamental cells of a two-dimensional rank-1
// lattice on the torus.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "ndqmc/error.hpp"
#include "ndqmc/geometry.hpp"

namespace ndqmc {

/// B_j = [(j-1)/count, j/count) x [0,1)^(d-1).
struct Stripes {
  std::size_t count = 1;
};

/// Cells of the rank-1 lattice {j g / n mod 1}, n prime, d = 2.
struct LatticeCells {
  std::vector<std::int64_t> g;
  std::size_t n = 1;
};

using StrataSpec = std::variant<Stripes, LatticeCells>;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

namespace detail {

inline std::int64_t mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

inline std::int64_t inverse_mod(std::int64_t a, std::int64_t n) {
  std::int64_t t = 0, new_t = 1, r = n, new_r = mod(a, n);
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  return mod(t, n);
}

/// x - floor(x), mapped into [0,1) even when rounding lands on 1.
inline double wrap01(double x) {
  const double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

using Vec2 = std::array<double, 2>;

/// Area of a convex polygon clipped to the rectangle [lo, hi].
inline double clipped_area(std::vector<Vec2> poly, const Vec2& lo, const Vec2& hi) {
  auto clip = [&](int axis, double bound, bool keep_below) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& cur = poly[i];
      const Vec2& nxt = poly[(i + 1) % n];
      auto inside = [&](const Vec2& v) {
        return keep_below ? v[axis] <= bound : v[axis] >= bound;
      };
      const bool ci = inside(cur), ni = inside(nxt);
      if (ci) out.push_back(cur);
      if (ci != ni) {
        const double s = (bound - cur[axis]) / (nxt[axis] - cur[axis]);
        out.push_back({cur[0] + s * (nxt[0] - cur[0]), cur[1] + s * (nxt[1] - cur[1])});
      }
    }
    poly = std::move(out);
  };
  clip(0, lo[0], false);
  if (poly.empty()) return 0.0;
  clip(0, hi[0], true);
  if (poly.empty()) return 0.0;
  clip(1, lo[1], false);
  if (poly.empty()) return 0.0;
  clip(1, hi[1], true);
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a[0] * b[1] - a[1] * b[0];
  }
  return std::fabs(twice) / 2.0;
}

}  // namespace detail

/// Partition of the torus [0,1)^2 into the n translated fundamental
/// parallelograms of a rank-1 lattice, spanned by a Lagrange-Gauss reduced
/// basis. Cell j is anchored at the lattice point j g / n mod 1.
class LatticeCellPartition {
 public:
  explicit LatticeCellPartition(const LatticeCells& spec) : n_(static_cast<std::int64_t>(spec.n)) {
    detail::require(spec.g.size() == 2, "LatticeCells: only d = 2 is supported");
    detail::require(is_prime(spec.n), "LatticeCells: n must be prime");
    g_ = {detail::mod(spec.g[0], n_), detail::mod(spec.g[1], n_)};
    detail::require(g_[0] != 0 && g_[1] != 0, "LatticeCells: g entries must be nonzero mod n");

    // Integer lattice n*L is spanned by (1, g2/g1 mod n) and (0, n).
    const std::int64_t inv = detail::inverse_mod(g_[0], n_);
    std::array<std::int64_t, 2> w1{1, detail::mod(g_[1] * inv, n_)}, w2{0, n_};
    std::int64_t j1 = inv, j2 = 0;
    auto norm2 = [](const std::array<std::int64_t, 2>& w) { return w[0] * w[0] + w[1] * w[1]; };
    while (true) {
      if (norm2(w1) > norm2(w2)) {
        std::swap(w1, w2);
        std::swap(j1, j2);
      }
      const double mu = static_cast<double>(w1[0] * w2[0] + w1[1] * w2[1]) /
                        static_cast<double>(norm2(w1));
      const auto q = static_cast<std::int64_t>(std::llround(mu));
      if (q == 0) break;
      w2 = {w2[0] - q * w1[0], w2[1] - q * w1[1]};
      j2 = detail::mod(j2 - q * j1, n_);
      if (norm2(w2) >= norm2(w1)) break;
    }
    w1_ = w1;
    w2_ = w2;
    j1_ = j1;
    j2_ = j2;
    det_ = w1_[0] * w2_[1] - w1_[1] * w2_[0];
  }

  std::size_t size() const { return static_cast<std::size_t>(n_); }

  /// Reduced basis vectors scaled by n.
  std::array<std::int64_t, 2> basis1() const { return w1_; }
  std::array<std::int64_t, 2> basis2() const { return w2_; }

  detail::Vec2 anchor(std::size_t cell) const {
    const auto c = static_cast<std::int64_t>(cell);
    return {static_cast<double>(detail::mod(c * g_[0], n_)) / static_cast<double>(n_),
            static_cast<double>(detail::mod(c * g_[1], n_)) / static_cast<double>(n_)};
  }

  std::size_t cell_index(std::span<const double> p) const {
    detail::require_dims(2, p.size(), "LatticeCellPartition::cell_index");
    // (a, b) = n W^{-1} p = sign(det) adj(W) p, since |det W| = n.
    const double sign = det_ > 0 ? 1.0 : -1.0;
    const double a = sign * (static_cast<double>(w2_[1]) * p[0] - static_cast<double>(w2_[0]) * p[1]);
    const double b = sign * (-static_cast<double>(w1_[1]) * p[0] + static_cast<double>(w1_[0]) * p[1]);
    const auto ia = static_cast<std::int64_t>(std::floor(a));
    const auto ib = static_cast<std::int64_t>(std::floor(b));
    return static_cast<std::size_t>(detail::mod(ia * j1_ + ib * j2_, n_));
  }

  /// Point anchor(cell) + u1 v1 + u2 v2 mod 1 for u in [0,1)^2.
  std::array<double, 2> point_in_cell(std::size_t cell, double u1, double u2) const {
    const auto y = anchor(cell);
    const double n = static_cast<double>(n_);
    return {detail::wrap01(y[0] + (u1 * static_cast<double>(w1_[0]) + u2 * static_cast<double>(w2_[0])) / n),
            detail::wrap01(y[1] + (u1 * static_cast<double>(w1_[1]) + u2 * static_cast<double>(w2_[1])) / n)};
  }

  /// Lebesgue measure of cell \cap box, the box taken periodically on the torus.
  double overlap(std::size_t cell, const Interval& box) const {
    detail::require_dims(2, box.dim(), "LatticeCellPartition::overlap");
    const auto y = anchor(cell);
    const double n = static_cast<double>(n_);
    const detail::Vec2 v1{static_cast<double>(w1_[0]) / n, static_cast<double>(w1_[1]) / n};
    const detail::Vec2 v2{static_cast<double>(w2_[0]) / n, static_cast<double>(w2_[1]) / n};
    std::vector<detail::Vec2> poly{y,
                                   {y[0] + v1[0], y[1] + v1[1]},
                                   {y[0] + v1[0] + v2[0], y[1] + v1[1] + v2[1]},
                                   {y[0] + v2[0], y[1] + v2[1]}};
    double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
    for (const auto& v : poly) {
      for (int k = 0; k < 2; ++k) {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }
    }
    double area = 0.0;
    for (auto s0 = static_cast<std::int64_t>(std::floor(lo[0])); s0 <= static_cast<std::int64_t>(std::floor(hi[0])); ++s0) {
      for (auto s1 = static_cast<std::int64_t>(std::floor(lo[1])); s1 <= static_cast<std::int64_t>(std::floor(hi[1])); ++s1) {
        const detail::Vec2 blo{box.a[0] + static_cast<double>(s0), box.a[1] + static_cast<double>(s1)};
        const detail::Vec2 bhi{box.b[0] + static_cast<double>(s0), box.b[1] + static_cast<double>(s1)};
        area += detail::clipped_area(poly, blo, bhi);
      }
    }
    return area;
  }

 private:
  std::int64_t n_;
  std::array<std::int64_t, 2> g_{};
  std::array<std::int64_t, 2> w1_{}, w2_{};
  std::int64_t j1_ = 0, j2_ = 0;
  std::int64_t det_ = 1;
};

/// Number of strata in the family.
inline std::size_t strata_count(const StrataSpec& strata) {
  if (const auto* s = std::get_if<Stripes>(&strata)) return s->count;
  return std::get<LatticeCells>(strata).n;
}

}  // namespace ndqmc
