// Exact and sampled checks of negative dependence for a few schemes.

#include <cstdio>

#include "ndqmc/ndqmc.hpp"

namespace {

void show(const char* label, const ndqmc::DependenceReport& r) {
  std::printf("%-28s lhs %.5f  rhs %.5f  +-%.5f  %s%s\n", label, r.lhs, r.rhs, r.ci_halfwidth,
              ndqmc::to_string(r.verdict), r.exact ? " (exact)" : "");
}

}  // namespace

int main() {
  using namespace ndqmc;
  const RngStream rng(7);
  TestOptions exact;
  exact.method = Method::exact;
  TestOptions sampled;
  sampled.method = Method::empirical;
  sampled.replications = 50000;

  const CornerBox0 box({0.6, 0.6});
  show("lhs N=5 t=3", test_upper_nd(LatinHypercube{}, 5, 2, box, 3, exact, rng));
  show("lhs N=5 t=3 sampled", test_upper_nd(LatinHypercube{}, 5, 2, box, 3, sampled, rng));
  show("rsj N=5 t=3", test_upper_nd(RsjRank1Lattice{}, 5, 2, box, 3, exact, rng));

  const auto pair = test_pairwise_nd(MinCopula{}, 2, 1, CornerBox1({0.75}), CornerBox1({0.25}), exact, rng);
  show("mincopula hits", pair.nlod);
  show("mincopula misses", pair.nuod);

  const Interval upper_half({0.5}, {1.0});
  show("fourslot conditional",
       test_conditional_nqd(FourSlot{}, 2, 2, 2, upper_half, upper_half, 0.5, 0.5, exact, rng));
}
