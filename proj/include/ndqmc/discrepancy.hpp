#pragma once

// Local, star, delta-cover and weighted star discrepancy of finite point sets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ndqmc/error.hpp"
#include "ndqmc/geometry.hpp"
#include "ndqmc/point_set.hpp"

namespace ndqmc {

/// Default cap on N * (number of critical grid nodes).
inline constexpr double kDefaultDiscrepancyBudget = 1e8;

enum class DiscrepancyKind { exact, cover_lower, cover_upper };

inline const char* to_string(DiscrepancyKind k) {
  switch (k) {
    case DiscrepancyKind::exact: return "exact";
    case DiscrepancyKind::cover_lower: return "cover_lower";
    case DiscrepancyKind::cover_upper: return "cover_upper";
  }
  return "?";
}

struct DiscrepancyResult {
  double value = 0.0;
  DiscrepancyKind kind = DiscrepancyKind::exact;
  /// Corner x of the anchored box attaining the value.
  std::optional<Coords> witness;
  /// True when attained by the closed box [0,x] (too many points); false for
  /// the half-open box [0,x) (too few points).
  bool closed_box = false;
};

template <class Box>
double local_discrepancy(const PointSet& p, const Box& box) {
  detail::require_dims(box.dim(), p.dim(), "local_discrepancy");
  std::size_t count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) count += contains(box, p[i]) ? 1 : 0;
  return std::fabs(static_cast<double>(count) / static_cast<double>(p.size()) - volume(box));
}

/// Exact star discrepancy by the critical-grid method.
///
/// On each axis the candidate coordinates are the distinct point coordinates
/// and 1. For every grid node x the supremum candidates are
///   vol[0,x) - #{p < x}/N     (half-open box, points on the boundary excluded)
///   #{p <= x}/N - vol[0,x]    (closed box, approached from above)
/// Counts for all nodes come from a d-dimensional prefix sum over the rank
/// grid, so the cost is O(d * nodes) plus O(N d log N) for sorting.
inline DiscrepancyResult star_discrepancy_exact(const PointSet& p,
                                                double budget = kDefaultDiscrepancyBudget) {
  const std::size_t n = p.size(), d = p.dim();
  detail::require(d >= 1, "star_discrepancy_exact: d must be >= 1");

  std::vector<std::vector<double>> cand(d);
  std::vector<std::vector<std::size_t>> rank(d, std::vector<std::size_t>(n));
  double nodes = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    auto& c = cand[k];
    c.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) c.push_back(p.at(i, k));
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t i = 0; i < n; ++i) {
      rank[k][i] = static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), p.at(i, k)) - c.begin());
    }
    c.push_back(1.0);
    nodes *= static_cast<double>(c.size());
  }
  if (nodes * static_cast<double>(n) > budget) {
    throw BudgetExceeded("star_discrepancy_exact: N * grid nodes = " +
                         std::to_string(nodes * static_cast<double>(n)) + " exceeds budget " +
                         std::to_string(budget) + "; use the delta-cover approximation");
  }

  std::vector<std::size_t> extent(d), stride(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    extent[k] = cand[k].size();
    stride[k] = total;
    total *= extent[k];
  }
  std::vector<std::uint32_t> closed(total, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < d; ++k) idx += rank[k][i] * stride[k];
    ++closed[idx];
  }
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t idx = 0; idx < total; ++idx) {
      if ((idx / stride[k]) % extent[k] != 0) closed[idx] += closed[idx - stride[k]];
    }
  }

  DiscrepancyResult best;
  best.value = -1.0;
  std::size_t best_idx = 0;
  std::size_t diag = 0;
  for (std::size_t k = 0; k < d; ++k) diag += stride[k];
  const double nn = static_cast<double>(n);
  std::vector<std::size_t> r(d, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    double vol = 1.0;
    bool interior = true;
    for (std::size_t k = 0; k < d; ++k) {
      vol *= cand[k][r[k]];
      interior = interior && r[k] > 0;
    }
    const double open_count = interior ? static_cast<double>(closed[idx - diag]) : 0.0;
    const double deficit = vol - open_count / nn;
    const double excess = static_cast<double>(closed[idx]) / nn - vol;
    if (deficit > best.value) {
      best.value = deficit;
      best.closed_box = false;
      best_idx = idx;
    }
    if (excess > best.value) {
      best.value = excess;
      best.closed_box = true;
      best_idx = idx;
    }
    for (std::size_t k = 0; k < d && ++r[k] == extent[k]; ++k) r[k] = 0;
  }
  Coords witness(d);
  for (std::size_t k = 0; k < d; ++k) witness[k] = cand[k][(best_idx / stride[k]) % extent[k]];
  best.witness = std::move(witness);
  best.kind = DiscrepancyKind::exact;
  return best;
}

struct CoverBounds {
  double lower = 0.0;
  double upper = 1.0;
  double delta = 1.0;
  std::size_t cover_size = 0;
  Coords witness;
};

/// max over a delta-cover of the local discrepancy of [0,x), and that value
/// plus delta. The star discrepancy lies between the two.
inline CoverBounds star_discrepancy_cover(const PointSet& p, double delta,
                                          double budget = kDefaultDiscrepancyBudget) {
  detail::require(p.dim() >= 1, "star_discrepancy_cover: d must be >= 1");
  const DeltaCover cover = build_delta_cover(p.dim(), delta);
  const double work = static_cast<double>(cover.size()) * static_cast<double>(p.size());
  if (work > budget) {
    throw BudgetExceeded("star_discrepancy_cover: cover size * N = " + std::to_string(work) +
                         " exceeds budget " + std::to_string(budget));
  }
  CoverBounds out;
  out.delta = delta;
  out.cover_size = cover.size();
  out.lower = 0.0;
  out.witness = Coords(p.dim(), 0.0);
  for (const auto* list : {&cover.points, &cover.upper_witnesses}) {
    for (const auto& x : *list) {
      const double local = local_discrepancy(p, CornerBox0(x));
      if (local > out.lower) {
        out.lower = local;
        out.witness = x;
      }
    }
  }
  out.upper = out.lower + delta;
  return out;
}

/// Product weights gamma_u = prod_{j in u} gamma_j.
struct ProductWeights {
  std::vector<double> gamma;
};

/// Explicit weights keyed by subset bitmask (bit j set = coordinate j in u).
struct ExplicitWeights {
  std::map<std::uint64_t, double> gamma;
};

using Weights = std::variant<ProductWeights, ExplicitWeights>;

inline constexpr std::size_t kMaxWeightedDim = 20;

/// gamma_u for the subset encoded by mask.
inline double weight_of(const Weights& w, std::uint64_t mask) {
  if (const auto* prod = std::get_if<ProductWeights>(&w)) {
    double g = 1.0;
    for (std::size_t j = 0; j < prod->gamma.size(); ++j) {
      if (mask >> j & 1U) g *= prod->gamma[j];
    }
    return g;
  }
  const auto& ex = std::get<ExplicitWeights>(w).gamma;
  const auto it = ex.find(mask);
  if (it == ex.end()) {
    throw ValidationError("weights: missing explicit weight for subset mask " + std::to_string(mask));
  }
  return it->second;
}

inline void validate_weights(const Weights& w, std::size_t d) {
  if (const auto* prod = std::get_if<ProductWeights>(&w)) {
    detail::require(prod->gamma.size() == d, "weights: product weights need one gamma per coordinate");
    for (double g : prod->gamma) detail::require(g >= 0.0, "weights: weights must be nonnegative");
  } else {
    for (const auto& [mask, g] : std::get<ExplicitWeights>(w).gamma) {
      detail::require(g >= 0.0, "weights: weights must be nonnegative");
      detail::require(mask != 0 && (mask >> d) == 0, "weights: subset outside [d]");
    }
  }
}

inline std::vector<std::size_t> subset_coords(std::uint64_t mask) {
  std::vector<std::size_t> coords;
  for (std::size_t j = 0; mask >> j; ++j) {
    if (mask >> j & 1U) coords.push_back(j);
  }
  return coords;
}

struct WeightedDiscrepancy {
  double value = 0.0;
  std::uint64_t subset = 0;  // maximizing subset, 0 if every weight is 0
};

/// max over nonempty u of gamma_u * D*(projection of P onto u). Anchoring the
/// coordinates outside u at 1 leaves exactly the |u|-dimensional star
/// discrepancy of the projection.
inline WeightedDiscrepancy weighted_star_discrepancy(const PointSet& p, const Weights& w,
                                                     double budget = kDefaultDiscrepancyBudget) {
  const std::size_t d = p.dim();
  detail::require(d >= 1 && d <= kMaxWeightedDim, "weighted_star_discrepancy: need 1 <= d <= 20");
  validate_weights(w, d);
  WeightedDiscrepancy best;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << d); ++mask) {
    const double g = weight_of(w, mask);
    if (g == 0.0) continue;
    const auto coords = subset_coords(mask);
    const double v = g * star_discrepancy_exact(p.project(coords), budget).value;
    if (v > best.value) best = {v, mask};
  }
  return best;
}

}  // namespace ndqmc
