#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "ndqmc/negdep.hpp"
#include "ndqmc/rng.hpp"
#include "ndqmc/samplers.hpp"
#include "ndqmc/stats.hpp"

using namespace ndqmc;

namespace {

/// Per-axis LHS probability that the first t points fall in [0, q), by
/// enumerating every permutation of the strata.
double lhs_axis_enum(std::size_t n, double q, std::size_t t) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double total = 0.0, count = 0.0;
  do {
    double p = 1.0;
    for (std::size_t j = 0; j < t; ++j) {
      const double lo = static_cast<double>(perm[j]) / static_cast<double>(n);
      const double hi = static_cast<double>(perm[j] + 1) / static_cast<double>(n);
      p *= std::clamp((q - lo) / (hi - lo), 0.0, 1.0);
    }
    total += p;
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / count;
}

TestOptions empirical(std::size_t reps, std::size_t threads = 1) {
  TestOptions o;
  o.replications = reps;
  o.method = Method::empirical;
  o.threads = threads;
  return o;
}

TestOptions exact_only() {
  TestOptions o;
  o.method = Method::exact;
  return o;
}

/// Empirical rate of `event` on fresh draws, checked against p at 99.9%.
template <class Event>
bool agrees(const SchemeSpec& spec, std::size_t n, std::size_t d, double p, std::size_t reps, std::uint64_t seed,
            Event event) {
  RngStream root(seed);
  std::size_t k = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream s = root.split(r);
    k += event(sample(spec, n, d, s)) ? 1 : 0;
  }
  return stats::wilson(k, reps, 0.999).contains(p);
}

}  // namespace

TEST(LhsOracle, MatchesPermutationEnumeration) {
  for (std::size_t n : {2U, 3U, 5U, 6U}) {
    for (std::size_t t = 1; t <= n; ++t) {
      for (double q : {0.0, 0.15, 0.5, 2.0 / 3.0, 0.9, 1.0}) {
        const double e = lhs_axis_enum(n, q, t);
        const std::vector<double> q1{q}, q2{q, 0.4};
        ASSERT_NEAR(lhs_anchored_prob_exact(n, q1, t), e, 1e-12) << n << " " << t << " " << q;
        ASSERT_NEAR(lhs_anchored_prob_exact(n, q2, t), e * lhs_axis_enum(n, 0.4, t), 1e-12);
      }
    }
  }
}

TEST(LhsOracle, KnownValues) {
  const std::vector<double> half{0.5}, two_thirds{2.0 / 3.0};
  EXPECT_DOUBLE_EQ(lhs_anchored_prob_exact(2, half, 2), 0.0);
  EXPECT_NEAR(lhs_anchored_prob_exact(3, two_thirds, 2), 1.0 / 3.0, 1e-15);
  const auto via_dispatch = exact_upper_prob(LatinHypercube{}, 3, 1, CornerBox0({2.0 / 3.0}), 2);
  ASSERT_TRUE(via_dispatch.has_value());
  EXPECT_NEAR(*via_dispatch, 1.0 / 3.0, 1e-15);
}

TEST(LhsOracle, MatchesSampling) {
  const std::vector<double> q{0.45, 0.7};
  const double p = lhs_anchored_prob_exact(4, q, 2);
  EXPECT_TRUE(agrees(LatinHypercube{}, 4, 2, p, 100000, 1, [&](const PointSet& s) {
    return contains(CornerBox0(q), s[0]) && contains(CornerBox0(q), s[1]);
  }));
}

TEST(GssOracle, StripesKnownValue) {
  // beta = 4 stripes, two points, A = [0, 1/2) x [0,1): w = (1, 1, 0, 0).
  const double p = gss_anchored_prob_exact(4, Stripes{4}, CornerBox0({0.5, 1.0}), 2, 2);
  EXPECT_NEAR(p, 1.0 / 6.0, 1e-15);
}

TEST(GssOracle, LatticeCellsMatchSampling) {
  const GeneralizedStratified spec{7, LatticeCells{{1, 3}, 7}};
  const CornerBox0 a({0.6, 0.55});
  const double p = gss_anchored_prob_exact(7, spec.strata, a, 3, 2);
  EXPECT_TRUE(agrees(spec, 3, 2, p, 100000, 2, [&](const PointSet& s) {
    return contains(a, s[0]) && contains(a, s[1]);
  }));
}

TEST(RsjOracle, TrivialCases) {
  const std::size_t n = 5;
  EXPECT_NEAR(rsj_small_prob(n, std::vector<bool>(n * n, true), 3), 1.0, 1e-15);
  EXPECT_EQ(rsj_small_prob(n, std::vector<bool>(n * n, false), 2), 0.0);
  std::vector<bool> cells(n * n, false);
  for (std::size_t k : {0U, 3U, 7U, 12U, 24U}) cells[k] = true;
  EXPECT_NEAR(rsj_small_prob(n, cells, 1), 5.0 / 25.0, 1e-15);
  EXPECT_THROW(rsj_small_prob(6, std::vector<bool>(36, true), 1), ValidationError);
  EXPECT_THROW(rsj_small_prob(37, std::vector<bool>(37 * 37, true), 1), BudgetExceeded);
}

TEST(RsjOracle, MatchesSampling) {
  const std::size_t n = 5;
  std::vector<bool> cells(n * n, false);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) cells[i * n + j] = true;
  }
  const double p = rsj_small_prob(n, cells, 3);
  const CornerBox0 box({0.6, 0.6});
  EXPECT_TRUE(agrees(RsjRank1Lattice{}, n, 2, p, 100000, 3, [&](const PointSet& s) {
    return contains(box, s[0]) && contains(box, s[1]) && contains(box, s[2]);
  }));
  const auto dispatched = exact_upper_prob(RsjRank1Lattice{}, n, 2, box, 3);
  ASSERT_TRUE(dispatched.has_value());
  EXPECT_DOUBLE_EQ(*dispatched, p);
}

TEST(MinCopula, CdfValues) {
  EXPECT_DOUBLE_EQ(min_copula_cdf(0.5, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(min_copula_cdf(0.2, 0.8), 0.2);
  EXPECT_DOUBLE_EQ(min_copula_cdf(1.0, 0.3), 0.3);
  EXPECT_DOUBLE_EQ(min_copula_cdf(0.75, 0.25), 0.25);
  EXPECT_DOUBLE_EQ(min_copula_rect_prob(0.75, 0.25, MinCopulaEvent::upper), 0.25);
  EXPECT_THROW(min_copula_rect_prob(1.5, 0.2, MinCopulaEvent::lower), ValidationError);
}

TEST(MinCopula, PairwiseViolated) {
  const RngStream rng(1);
  const auto r = test_pairwise_nd(MinCopula{}, 2, 1, CornerBox1({0.75}), CornerBox1({0.25}), exact_only(), rng);
  EXPECT_TRUE(r.nuod.exact);
  EXPECT_DOUBLE_EQ(r.nlod.lhs, 0.25);
  EXPECT_DOUBLE_EQ(r.nlod.rhs, 0.1875);
  EXPECT_EQ(r.verdict(), Verdict::violated);
}

TEST(FourSlot, ConditionalNqdViolated) {
  const RngStream rng(2);
  const auto rep = test_conditional_nqd(FourSlot{}, 2, 2, 2, Interval({0.5}, {1.0}), Interval({0.5}, {1.0}), 0.5,
                                        0.5, exact_only(), rng);
  EXPECT_TRUE(rep.exact);
  EXPECT_NEAR(rep.lhs, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(rep.rhs, 0.25, 1e-15);
  EXPECT_EQ(rep.verdict, Verdict::violated);
  const auto emp = test_conditional_nqd(FourSlot{}, 2, 2, 2, Interval({0.5}, {1.0}), Interval({0.5}, {1.0}), 0.5,
                                        0.5, empirical(100000), rng);
  EXPECT_NE(emp.verdict, Verdict::holds);
  EXPECT_NEAR(emp.lhs, 1.0 / 3.0, 0.02);
}

TEST(FourSlot, ExactJointMatchesSampling) {
  const Interval e1({0.3, 0.1}, {0.8, 0.9}), e2({0.0, 0.4}, {0.6, 1.0});
  const auto p = exact_joint_prob(FourSlot{}, 2, 2, e1, e2);
  ASSERT_TRUE(p.has_value());
  EXPECT_TRUE(agrees(FourSlot{}, 2, 2, *p, 100000, 4, [&](const PointSet& s) {
    return contains(e1, s[0]) && contains(e2, s[1]);
  }));
}

TEST(Swap, PairwiseAndConditional) {
  const RngStream rng(3);
  const auto r = test_pairwise_nd(SwapScheme{}, 2, 2, CornerBox1({0.5, 0.5}), CornerBox1({0.5, 0.5}), exact_only(),
                                  rng);
  EXPECT_DOUBLE_EQ(r.nlod.lhs, 0.25);
  EXPECT_DOUBLE_EQ(r.nlod.rhs, 0.0625);
  EXPECT_EQ(r.verdict(), Verdict::violated);
  // Conditioning on the first coordinates fixes the second coordinate event
  // of each point independently of the other's.
  const auto c = test_conditional_nqd(SwapScheme{}, 2, 2, 2, Interval({0.2}, {0.9}), Interval({0.1}, {0.6}), 0.5,
                                      0.5, exact_only(), rng);
  EXPECT_NEAR(c.lhs, c.rhs, 1e-12);
  EXPECT_EQ(c.verdict, Verdict::holds);
}

TEST(MonteCarlo, ExactEqualityHolds) {
  const RngStream rng(4);
  const auto up = test_upper_nd(MonteCarlo{}, 4, 2, CornerBox0({0.3, 0.6}), 3, {}, rng);
  EXPECT_TRUE(up.exact);
  EXPECT_NEAR(up.lhs, up.rhs, 1e-15);
  EXPECT_EQ(up.verdict, Verdict::holds);
  const auto lo = test_lower_nd(MonteCarlo{}, 4, 2, CornerBox0({0.3, 0.6}), 2, {}, rng);
  EXPECT_NEAR(lo.lhs, lo.rhs, 1e-12);
  EXPECT_EQ(lo.verdict, Verdict::holds);
}

TEST(Lhs, UpperAndLowerHold) {
  const RngStream rng(5);
  for (double q : {0.1, 0.35, 0.5, 0.8}) {
    for (std::size_t t = 1; t <= 4; ++t) {
      const CornerBox0 box({q, 1.0 - q / 2});
      ASSERT_EQ(test_upper_nd(LatinHypercube{}, 4, 2, box, t, exact_only(), rng).verdict, Verdict::holds);
      ASSERT_EQ(test_lower_nd(LatinHypercube{}, 4, 2, box, t, exact_only(), rng).verdict, Verdict::holds);
    }
  }
}

TEST(Lhs, LowerProbabilityMatchesSampling) {
  const CornerBox0 box({0.45, 0.7});
  const auto p = exact_lower_prob(LatinHypercube{}, 5, 2, box, 3);
  ASSERT_TRUE(p.has_value());
  EXPECT_TRUE(agrees(LatinHypercube{}, 5, 2, *p, 100000, 6, [&](const PointSet& s) {
    return !contains(box, s[0]) && !contains(box, s[1]) && !contains(box, s[2]);
  }));
}

TEST(Lhs, EmpiricalPairwiseNotViolated) {
  const RngStream rng(7);
  const auto r = test_pairwise_nd(LatinHypercube{}, 4, 2, CornerBox1({0.3, 0.6}), CornerBox1({0.5, 0.2}),
                                  empirical(50000), rng);
  EXPECT_NE(r.verdict(), Verdict::violated);
  const auto ex = test_pairwise_nd(LatinHypercube{}, 4, 2, CornerBox1({0.3, 0.6}), CornerBox1({0.5, 0.2}),
                                   exact_only(), rng);
  EXPECT_EQ(ex.verdict(), Verdict::holds);
  EXPECT_LE(std::fabs(r.nlod.lhs - ex.nlod.lhs), r.nlod.ci_halfwidth);
}

TEST(Mixed, ExactIsProductOfComponents) {
  const SchemeSpec mixed = make_mixed(LatinHypercube{}, 1, MonteCarlo{}, 1);
  const auto p = exact_upper_prob(mixed, 3, 2, CornerBox0({2.0 / 3.0, 0.5}), 2);
  ASSERT_TRUE(p.has_value());
  EXPECT_NEAR(*p, (1.0 / 3.0) * 0.25, 1e-15);
}

TEST(ExactMethod, UnavailableThrows) {
  const RngStream rng(8);
  EXPECT_THROW(test_upper_nd(RsjRank1Lattice{}, 37, 2, CornerBox0({0.5, 0.5}), 2, exact_only(), rng),
               ValidationError);
  EXPECT_THROW(test_upper_nd(LatinHypercube{}, 4, 2, CornerBox0({0.5}), 2, {}, rng), DimensionError);
  EXPECT_THROW(test_upper_nd(LatinHypercube{}, 4, 2, CornerBox0({0.5, 0.5}), 5, {}, rng), ValidationError);
}

TEST(ConditionalNqd, LhsExactMatchesEmpirical) {
  const RngStream rng(9);
  const Interval a({0.2}, {0.9}), b({0.1}, {0.6});
  const auto ex = test_conditional_nqd(LatinHypercube{}, 5, 2, 2, a, b, 0.4, 0.6, exact_only(), rng);
  const auto em = test_conditional_nqd(LatinHypercube{}, 5, 2, 2, a, b, 0.4, 0.6, empirical(100000), rng);
  EXPECT_TRUE(ex.exact);
  EXPECT_EQ(ex.verdict, Verdict::holds);
  EXPECT_NEAR(em.lhs, ex.lhs, 0.01);
  EXPECT_NEAR(em.rhs, ex.rhs, 0.01);
  EXPECT_NE(em.verdict, Verdict::violated);
}

TEST(ConditionalNqd, FewHitsInconclusive) {
  const RngStream rng(10);
  const auto rep = test_conditional_nqd(MonteCarlo{}, 3, 2, 2, Interval({0.0}, {0.05}), Interval({0.0}, {0.05}), 0.5,
                                        0.5, empirical(1000), rng);
  EXPECT_EQ(rep.verdict, Verdict::inconclusive);
}

TEST(CiNqd, MonteCarloFactorizes) {
  const RngStream rng(11);
  const auto ex = test_ci_nqd(MonteCarlo{}, 3, 3, 2, 0.3, 0.6, {}, rng);
  EXPECT_EQ(ex.nqd.verdict, Verdict::holds);
  EXPECT_EQ(ex.factorization.size(), 8U);
  for (const auto& f : ex.factorization) EXPECT_TRUE(f.consistent);
  const auto em = test_ci_nqd(LatinHypercube{}, 4, 2, 1, 0.3, 0.6, empirical(20000), rng);
  EXPECT_EQ(em.factorization.size(), 4U);
  EXPECT_NE(em.nqd.verdict, Verdict::violated);
  EXPECT_TRUE(em.partial);
}

TEST(PairwiseSweep, MatchesSingleTests) {
  const RngStream rng(12);
  const std::vector<CornerBox1> corners{CornerBox1({0.2, 0.6}), CornerBox1({0.6, 0.2}), CornerBox1({0.4, 0.4})};
  for (const TestOptions& opts : {exact_only(), empirical(4000)}) {
    const auto sweep = pairwise_sweep(LatinHypercube{}, 4, 2, corners, opts, rng);
    ASSERT_EQ(sweep.size(), 9U);
    for (const auto& cell : sweep) {
      const auto single = test_pairwise_nd(LatinHypercube{}, 4, 2, corners[cell.q_index], corners[cell.r_index],
                                           opts, rng);
      EXPECT_DOUBLE_EQ(cell.report.nlod.lhs, single.nlod.lhs);
      EXPECT_DOUBLE_EQ(cell.report.nuod.lhs, single.nuod.lhs);
      EXPECT_EQ(cell.report.verdict(), single.verdict());
    }
  }
}

TEST(Threads, ResultsIndependentOfThreadCount) {
  const RngStream rng(13);
  const CornerBox0 box({0.5, 0.5});
  const auto one = test_upper_nd(LatinHypercube{}, 6, 2, box, 2, empirical(20000, 1), rng);
  const auto four = test_upper_nd(LatinHypercube{}, 6, 2, box, 2, empirical(20000, 4), rng);
  EXPECT_EQ(one.lhs, four.lhs);
  const std::vector<CornerBox1> corners{CornerBox1({0.3, 0.3}), CornerBox1({0.7, 0.1})};
  const auto s1 = pairwise_sweep(MonteCarlo{}, 3, 2, corners, empirical(5000, 1), rng);
  const auto s3 = pairwise_sweep(MonteCarlo{}, 3, 2, corners, empirical(5000, 3), rng);
  for (std::size_t k = 0; k < s1.size(); ++k) EXPECT_EQ(s1[k].report.nuod.lhs, s3[k].report.nuod.lhs);
}
