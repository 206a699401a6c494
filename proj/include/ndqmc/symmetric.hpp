#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ndqmc {

/// e_t(x_1, ..., x_n) by the recurrence e_k(x_1..x_i) = e_k(x_1..x_{i-1}) + x_i e_{k-1}(x_1..x_{i-1}).
/// Zero when t > n.
inline double elementary_symmetric(std::span<const double> x, std::size_t t) {
  if (t > x.size()) return 0.0;
  std::vector<long double> e(t + 1, 0.0L);
  e[0] = 1.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t top = i + 1 < t ? i + 1 : t;
    for (std::size_t k = top; k >= 1; --k) e[k] += static_cast<long double>(x[i]) * e[k - 1];
  }
  return static_cast<double>(e[t]);
}

/// (a)_t = a (a-1) ... (a-t+1); zero when t > a.
inline long double falling_factorial(long double a, std::size_t t) {
  long double r = 1.0L;
  for (std::size_t i = 0; i < t; ++i) r *= a - static_cast<long double>(i);
  return r;
}

/// Binomial coefficient as a real.
inline long double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0L;
  long double r = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  }
  return r;
}

}  // namespace ndqmc
