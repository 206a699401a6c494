#pragma once

// Randomized point set constructions. Every sampler returns one draw of an
// exchangeable scheme whose single points are uniform on [0,1)^d; where the
// construction does not already guarantee exchangeability the rows are put
// in uniformly random order at the end.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ndqmc/error.hpp"
#include "ndqmc/geometry.hpp"
#include "ndqmc/point_set.hpp"
#include "ndqmc/rng.hpp"
#include "ndqmc/strata.hpp"

namespace ndqmc {

struct SchemeSpec;

struct MonteCarlo {};
struct SimpleStratified {};
struct GeneralizedStratified {
  std::size_t beta = 1;
  StrataSpec strata = Stripes{1};
};
struct RsjRank1Lattice {};
struct LatinHypercube {};
struct ScrambledNet {
  unsigned base = 2;
  unsigned m = 1;
  unsigned s = 1;
};
struct Mixed {
  std::shared_ptr<const SchemeSpec> left;
  std::size_t d_left = 1;
  std::shared_ptr<const SchemeSpec> right;
  std::size_t d_right = 1;
};
/// Two points in [0,1) with joint CDF min{x, y, (x^2+y^2)/2}; probability-only.
struct MinCopula {};
/// Two points in [0,1)^2 placed in quadrant "slots" by a fixed table.
struct FourSlot {};
/// p1 = (X, Y), p2 = (Y, X) with X, Y independent uniform.
struct SwapScheme {};

struct SchemeSpec {
  using Kind = std::variant<MonteCarlo, SimpleStratified, GeneralizedStratified, RsjRank1Lattice,
                            LatinHypercube, ScrambledNet, Mixed, MinCopula, FourSlot, SwapScheme>;
  Kind kind;

  template <class T>
  SchemeSpec(T k) : kind(std::move(k)) {}  // NOLINT(google-explicit-constructor)

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(kind);
  }
};

inline Mixed make_mixed(SchemeSpec left, std::size_t d_left, SchemeSpec right, std::size_t d_right) {
  return Mixed{std::make_shared<const SchemeSpec>(std::move(left)), d_left,
               std::make_shared<const SchemeSpec>(std::move(right)), d_right};
}

inline std::string scheme_name(const SchemeSpec& spec) {
  struct Visitor {
    std::string operator()(const MonteCarlo&) const { return "mc"; }
    std::string operator()(const SimpleStratified&) const { return "ss"; }
    std::string operator()(const GeneralizedStratified& g) const {
      if (std::holds_alternative<Stripes>(g.strata)) {
        return "gss(beta=" + std::to_string(g.beta) + ",stripes)";
      }
      const auto& l = std::get<LatticeCells>(g.strata);
      return "gss(beta=" + std::to_string(g.beta) + ",lattice(" + std::to_string(l.g[0]) + "," +
             std::to_string(l.g.size() > 1 ? l.g[1] : 0) + "))";
    }
    std::string operator()(const RsjRank1Lattice&) const { return "rsj"; }
    std::string operator()(const LatinHypercube&) const { return "lhs"; }
    std::string operator()(const ScrambledNet& n) const {
      return "net(b=" + std::to_string(n.base) + ",m=" + std::to_string(n.m) +
             ",s=" + std::to_string(n.s) + ")";
    }
    std::string operator()(const Mixed& m) const {
      return "mixed(" + scheme_name(*m.left) + "@" + std::to_string(m.d_left) + "+" +
             scheme_name(*m.right) + "@" + std::to_string(m.d_right) + ")";
    }
    std::string operator()(const MinCopula&) const { return "mincopula"; }
    std::string operator()(const FourSlot&) const { return "fourslot"; }
    std::string operator()(const SwapScheme&) const { return "swap"; }
  };
  return std::visit(Visitor{}, spec.kind);
}

namespace detail {

/// (k + u) / n kept inside the stratum [k/n, (k+1)/n) despite rounding.
inline double stratum_point(std::uint64_t k, double u, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  const double hi = static_cast<double>(k + 1) / nn;
  const double p = (static_cast<double>(k) + u) / nn;
  return p < hi ? p : std::nextafter(hi, 0.0);
}

inline std::vector<std::size_t> random_permutation(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm.begin(), perm.end());
  return perm;
}

inline PointSet shuffle_rows(std::size_t n, std::size_t d, const std::vector<double>& data,
                             RngStream& rng) {
  const auto perm = random_permutation(n, rng);
  std::vector<double> out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(perm[i] * d), d,
                out.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return PointSet(n, d, std::move(out));
}

}  // namespace detail

inline PointSet sample_monte_carlo(std::size_t n, std::size_t d, RngStream& rng) {
  detail::require(n >= 1, "mc: N must be >= 1");
  std::vector<double> data(n * d);
  for (auto& x : data) x = rng.uniform();
  return PointSet(n, d, std::move(data));
}

/// p_j = (pi(j) - U_j) / N with U_j uniform on (0,1]; realized as
/// (pi(j) - 1 + u) / N with u = 1 - U_j uniform on [0,1).
inline PointSet sample_simple_stratified(std::size_t n, RngStream& rng) {
  detail::require(n >= 1, "ss: N must be >= 1");
  const auto perm = detail::random_permutation(n, rng);
  std::vector<double> data(n);
  for (std::size_t j = 0; j < n; ++j) data[j] = detail::stratum_point(perm[j], rng.uniform(), n);
  return PointSet(n, 1, std::move(data));
}

/// Independent permutation and jitter per axis.
inline PointSet sample_lhs(std::size_t n, std::size_t d, RngStream& rng) {
  detail::require(n >= 1, "lhs: N must be >= 1");
  std::vector<double> data(n * d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto perm = detail::random_permutation(n, rng);
    for (std::size_t j = 0; j < n; ++j) {
      data[j * d + i] = detail::stratum_point(perm[j], rng.uniform(), n);
    }
  }
  return PointSet(n, d, std::move(data));
}

/// Randomly shifted and jittered rank-1 lattice: generator g uniform in
/// {1..N-1}^d, shift uniform on the 1/N grid, jitter uniform in a cell of
/// side 1/N, symmetrized order. N = 2 is accepted (g is then the diagonal).
inline PointSet sample_rsj(std::size_t n, std::size_t d, RngStream& rng) {
  detail::require(is_prime(n), "rsj: N must be prime");
  std::vector<std::uint64_t> g(d), shift(d);
  for (auto& gi : g) gi = 1 + rng.below(n - 1);
  for (auto& ui : shift) ui = rng.below(n);
  const auto perm = detail::random_permutation(n, rng);
  std::vector<double> data(n * d);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      const std::uint64_t k = (perm[j] * g[i] + shift[i]) % n;
      data[j * d + i] = detail::stratum_point(k, rng.uniform(), n);
    }
  }
  return PointSet(n, d, std::move(data));
}

/// Uniform N-subset of the beta strata, one uniform point per selected
/// stratum, symmetrized order.
inline PointSet sample_gss(std::size_t beta, const StrataSpec& strata, std::size_t n,
                           std::size_t d, RngStream& rng) {
  detail::require(n >= 1, "gss: N must be >= 1");
  detail::require(beta >= n, "gss: beta must be >= N");
  detail::require(strata_count(strata) == beta, "gss: strata count must equal beta");
  // Partial Fisher-Yates: the first n entries form a uniform n-subset.
  std::vector<std::size_t> cells(beta);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) std::swap(cells[i], cells[i + rng.below(beta - i)]);

  std::vector<double> data(n * d);
  if (std::holds_alternative<Stripes>(strata)) {
    detail::require(d >= 1, "gss: d must be >= 1");
    for (std::size_t j = 0; j < n; ++j) {
      data[j * d] = detail::stratum_point(cells[j], rng.uniform(), beta);
      for (std::size_t i = 1; i < d; ++i) data[j * d + i] = rng.uniform();
    }
  } else {
    detail::require(d == 2, "gss: lattice cells require d = 2");
    const LatticeCellPartition partition(std::get<LatticeCells>(strata));
    for (std::size_t j = 0; j < n; ++j) {
      const double u1 = rng.uniform();
      const double u2 = rng.uniform();
      const auto p = partition.point_in_cell(cells[j], u1, u2);
      data[j * 2] = p[0];
      data[j * 2 + 1] = p[1];
    }
  }
  return detail::shuffle_rows(n, d, data, rng);
}

/// Unscrambled Faure (0,m,s)-net in prime base b >= s. Axis i uses the i-th
/// power of the upper-triangular Pascal matrix mod b on the base-b digits of
/// the point index; coordinates are exact multiples of b^-m.
inline PointSet faure_net(unsigned b, unsigned m, unsigned s) {
  detail::require(is_prime(b), "net: base must be prime");
  detail::require(s >= 1 && s <= b, "net: need 1 <= s <= b");
  detail::require(m >= 1, "net: m must be >= 1");
  const std::uint64_t n = detail::checked_pow(b, m);
  detail::require(n <= (1ULL << 26), "net: b^m too large");

  // binom(c, r) mod b for r, c < m.
  std::vector<std::vector<std::uint64_t>> binom(m, std::vector<std::uint64_t>(m, 0));
  for (unsigned c = 0; c < m; ++c) {
    binom[0][c] = 1;
    for (unsigned r = 1; r <= c; ++r) binom[r][c] = (binom[r - 1][c - 1] + (r <= c - 1 ? binom[r][c - 1] : 0)) % b;
  }
  std::vector<double> data(n * s);
  std::vector<std::uint64_t> digits(m), out(m);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    std::uint64_t v = idx;
    for (unsigned r = 0; r < m; ++r) {
      digits[r] = v % b;
      v /= b;
    }
    for (unsigned axis = 0; axis < s; ++axis) {
      // (P^axis)[r][c] = binom(c, r) axis^(c - r) mod b.
      for (unsigned r = 0; r < m; ++r) {
        std::uint64_t acc = 0, power = 1;
        for (unsigned c = r; c < m; ++c) {
          acc = (acc + binom[r][c] * power % b * digits[c]) % b;
          power = power * axis % b;
        }
        out[r] = acc;
      }
      std::uint64_t k = 0;
      for (unsigned r = 0; r < m; ++r) k = k * b + out[r];
      data[idx * s + axis] = static_cast<double>(k) / static_cast<double>(n);
    }
  }
  return PointSet(n, s, std::move(data));
}

/// Owen nested uniform scrambling of a base-b point set truncated to depth m,
/// followed by a uniform jitter below b^-m and a random row order. The input
/// coordinates must be multiples of b^-m.
inline PointSet owen_scramble(const PointSet& net, unsigned b, unsigned m, RngStream& rng) {
  const std::size_t n = net.size(), s = net.dim();
  const std::uint64_t cells = detail::checked_pow(b, m);
  std::vector<double> data(n * s);
  std::vector<std::uint64_t> digits(m);
  for (std::size_t axis = 0; axis < s; ++axis) {
    // Node key: depth + m * (value of the unscrambled digit prefix).
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> perms;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t k = elementary_index(net.at(i, axis), b, m);
      for (unsigned r = m; r-- > 0;) {
        digits[r] = k % b;
        k /= b;
      }
      std::uint64_t prefix = 0, scrambled = 0;
      for (unsigned r = 0; r < m; ++r) {
        auto [it, fresh] = perms.try_emplace(r + static_cast<std::uint64_t>(m) * prefix);
        if (fresh) {
          it->second.resize(b);
          std::iota(it->second.begin(), it->second.end(), 0U);
          rng.shuffle(it->second.begin(), it->second.end());
        }
        scrambled = scrambled * b + it->second[digits[r]];
        prefix = prefix * b + digits[r];
      }
      data[i * s + axis] = detail::stratum_point(scrambled, rng.uniform(), cells);
    }
  }
  return detail::shuffle_rows(n, s, data, rng);
}

inline PointSet sample_scrambled_net(unsigned b, unsigned m, unsigned s, RngStream& rng) {
  return owen_scramble(faure_net(b, m, s), b, m, rng);
}

/// Row-wise concatenation (x_i, y_i).
inline PointSet concat(const PointSet& left, const PointSet& right) {
  if (left.size() != right.size()) {
    throw ValidationError("concat: point counts differ (" + std::to_string(left.size()) + " vs " +
                          std::to_string(right.size()) + ")");
  }
  const std::size_t n = left.size(), d = left.dim() + right.dim();
  std::vector<double> data;
  data.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    data.insert(data.end(), left[i].begin(), left[i].end());
    data.insert(data.end(), right[i].begin(), right[i].end());
  }
  return PointSet(n, d, std::move(data));
}

struct SlotPairProbability {
  int first;   // slot of p1, 1..4
  int second;  // slot of p2, 1..4
  double probability;
};

/// Slots B1 = [0,1/2)^2, B2 = [1/2,1) x [0,1/2), B3 = [0,1/2) x [1/2,1),
/// B4 = [1/2,1)^2 and the probabilities of (p1, p2) landing in (B_i, B_j).
/// Pairs not listed have probability zero.
inline const std::vector<SlotPairProbability>& four_slot_table() {
  static const std::vector<SlotPairProbability> table{
      {1, 1, 1.0 / 16}, {2, 2, 1.0 / 16}, {3, 3, 1.0 / 16}, {4, 4, 1.0 / 16},
      {1, 3, 1.0 / 32}, {2, 4, 1.0 / 32}, {3, 1, 1.0 / 32}, {4, 2, 1.0 / 32},
      {1, 4, 5.0 / 32}, {2, 3, 5.0 / 32}, {4, 1, 5.0 / 32}, {3, 2, 5.0 / 32},
  };
  return table;
}

/// Lower-left corner of slot 1..4.
inline std::array<double, 2> four_slot_origin(int slot) {
  return {(slot == 2 || slot == 4) ? 0.5 : 0.0, (slot == 3 || slot == 4) ? 0.5 : 0.0};
}

inline PointSet sample_four_slot(RngStream& rng) {
  const auto& table = four_slot_table();
  double u = rng.uniform();
  const SlotPairProbability* pick = &table.back();
  for (const auto& row : table) {
    if (u < row.probability) {
      pick = &row;
      break;
    }
    u -= row.probability;
  }
  std::vector<double> data(4);
  for (int p = 0; p < 2; ++p) {
    const auto o = four_slot_origin(p == 0 ? pick->first : pick->second);
    for (int k = 0; k < 2; ++k) data[static_cast<std::size_t>(2 * p + k)] = o[static_cast<std::size_t>(k)] + 0.5 * rng.uniform();
  }
  return PointSet(2, 2, std::move(data));
}

inline PointSet sample_swap(RngStream& rng) {
  const double x = rng.uniform();
  const double y = rng.uniform();
  return PointSet(2, 2, {x, y, y, x});
}

/// One draw of the scheme.
inline PointSet sample(const SchemeSpec& spec, std::size_t n, std::size_t d, RngStream& rng) {
  struct Visitor {
    std::size_t n, d;
    RngStream& rng;

    PointSet operator()(const MonteCarlo&) const { return sample_monte_carlo(n, d, rng); }
    PointSet operator()(const SimpleStratified&) const {
      detail::require(d == 1, "ss: simple stratified sampling is one-dimensional (d = 1)");
      return sample_simple_stratified(n, rng);
    }
    PointSet operator()(const GeneralizedStratified& g) const {
      return sample_gss(g.beta, g.strata, n, d, rng);
    }
    PointSet operator()(const RsjRank1Lattice&) const { return sample_rsj(n, d, rng); }
    PointSet operator()(const LatinHypercube&) const { return sample_lhs(n, d, rng); }
    PointSet operator()(const ScrambledNet& net) const {
      detail::require(is_prime(net.base), "net: base must be prime");
      detail::require(net.s == d, "net: s must equal d");
      detail::require(n == detail::checked_pow(net.base, net.m), "net: N must equal b^m");
      return sample_scrambled_net(net.base, net.m, net.s, rng);
    }
    PointSet operator()(const Mixed& mixed) const {
      detail::require(mixed.left && mixed.right, "mixed: both components are required");
      detail::require(mixed.d_left + mixed.d_right == d, "mixed: d must equal d_left + d_right");
      RngStream left_rng = rng.split(0);
      RngStream right_rng = rng.split(1);
      return concat(sample(*mixed.left, n, mixed.d_left, left_rng),
                    sample(*mixed.right, n, mixed.d_right, right_rng));
    }
    PointSet operator()(const MinCopula&) const {
      throw ValidationError(
          "mincopula: no sampler; use the exact probability oracle (min_copula_cdf)");
    }
    PointSet operator()(const FourSlot&) const {
      detail::require(n == 2 && d == 2, "fourslot: requires N = 2, d = 2");
      return sample_four_slot(rng);
    }
    PointSet operator()(const SwapScheme&) const {
      detail::require(n == 2 && d == 2, "swap: requires N = 2, d = 2");
      return sample_swap(rng);
    }
  };
  return std::visit(Visitor{n, d, rng}, spec.kind);
}

}  // namespace ndqmc
