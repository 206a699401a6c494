// Star discrepancy of Monte Carlo, Latin hypercube and scrambled-net points
// in two dimensions, next to the theta-form bound for a negatively
// dependent sampler.

#include <cstdio>

#include "ndqmc/ndqmc.hpp"

int main() {
  using namespace ndqmc;
  const std::size_t n = 81, d = 2;
  const RngStream root(42);

  const SchemeSpec schemes[] = {MonteCarlo{}, LatinHypercube{}, ScrambledNet{3, 4, 2}};
  for (std::size_t k = 0; k < 3; ++k) {
    RngStream rng = root.split(k);
    const PointSet p = sample(schemes[k], n, d, rng);
    const auto r = star_discrepancy_exact(p);
    std::printf("%-8s D* = %.6f\n", scheme_name(schemes[k]).c_str(), r.value);
  }

  BoundParams params;
  params.n = n;
  params.d = d;
  params.theta = 0.9;
  std::printf("bound (theta = 0.9): %.6f\n", c0_bound_theta(params).bound_value);
}
