#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "ndqmc/bounds.hpp"

using namespace ndqmc;

namespace {

BoundParams with_c(std::size_t n, std::size_t d, double c, double rho = 0.0) {
  BoundParams p;
  p.n = n;
  p.d = d;
  p.c = c;
  p.rho = rho;
  return p;
}

BoundParams with_theta(std::size_t n, std::size_t d, double theta, double rho = 0.0) {
  BoundParams p;
  p.n = n;
  p.d = d;
  p.theta = theta;
  p.rho = rho;
  return p;
}

}  // namespace

TEST(Hoeffding, Values) {
  EXPECT_NEAR(hoeffding_tail(2, 1.0, 1.0), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(hoeffding_tail(2, 1.0, 1.0), 0.735759, 1e-6);
  EXPECT_NEAR(hoeffding_tail(100, 10.0, std::numbers::e), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(hoeffding_tail(10, 1e3, 1.0), 0.0);
  EXPECT_THROW(hoeffding_tail(10, 0.0, 1.0), ValidationError);
  EXPECT_THROW(hoeffding_tail(10, 1.0, 0.5), ValidationError);
}

TEST(GhBound, ThresholdAndDirectValue) {
  const auto at_threshold = gh_bound(with_c(100, 3, std::sqrt(10.7042 / 1.6741)));
  EXPECT_NEAR(at_threshold.unclamped, 0.0, 1e-14);
  EXPECT_NEAR(at_threshold.success_prob, 0.0, 1e-14);

  const auto r = gh_bound(with_c(1000, 10, 3.0));
  EXPECT_NEAR(r.bound_value, 0.3, 1e-15);
  EXPECT_NEAR(r.success_prob, 1.0 - std::exp(-(1.6741 * 9 - 10.7042) * 10), 1e-15);
  EXPECT_FALSE(r.clamped);

  EXPECT_NEAR(gh_bound(with_c(100, 5, 10.0)).success_prob, 1.0, 1e-15);
}

TEST(GhBound, VacuousIsClamped) {
  const auto r = gh_bound(with_c(100, 2, 1.0));
  EXPECT_LT(r.unclamped, 0.0);
  EXPECT_EQ(r.success_prob, 0.0);
  EXPECT_TRUE(r.clamped);
}

TEST(GhBoundTheta, Values) {
  const auto r = gh_bound_theta(with_theta(200, 2, 0.9));
  EXPECT_NEAR(r.bound_value, 0.7729 * std::sqrt(10.7042 + std::log(10.0) / 2.0) * 0.1, 1e-15);
  EXPECT_EQ(r.success_prob, 0.9);
  const auto small = gh_bound_theta(with_theta(200, 2, 1e-12));
  EXPECT_NEAR(small.bound_value, 0.7729 * std::sqrt(10.7042) * 0.1, 1e-9);
  const auto one = gh_bound_theta(with_theta(200, 2, 1.0));
  EXPECT_TRUE(one.diverged);
  EXPECT_THROW(gh_bound_theta(with_theta(200, 2, 0.0)), ValidationError);
}

TEST(MixedBound, TwiceGhTheta) {
  for (std::size_t n : {10U, 100U, 5000U}) {
    for (std::size_t d : {1U, 4U, 20U}) {
      for (double theta : {0.1, 0.5, 0.95}) {
        const auto p = with_theta(n, d, theta, 0.3);
        ASSERT_DOUBLE_EQ(mixed_bound_theta(p).bound_value, 2.0 * gh_bound_theta(p).bound_value);
        ASSERT_EQ(mixed_bound_theta(p).formula, BoundFormula::mixed_theta);
      }
    }
  }
}

TEST(C0Bound, XiCases) {
  // N = d: xi = 1, value = c.
  EXPECT_NEAR(c0_bound(with_c(3, 3, 2.0)).bound_value, 2.0, 1e-15);
  // N = d e^2: xi = 2, value = c sqrt(2 / e^2).
  const double e2 = std::exp(2.0);
  const std::size_t n = static_cast<std::size_t>(std::llround(1000 * e2));
  const double xi = std::log(static_cast<double>(n) / 1000.0);
  EXPECT_NEAR(xi, 2.0, 1e-3);
  EXPECT_NEAR(c0_bound(with_c(n, 1000, 1.0)).bound_value, std::sqrt(1000.0 / static_cast<double>(n) * xi), 1e-15);
}

TEST(C0Bound, DirectValue) {
  const auto r = c0_bound(with_c(512, 2, 4.0));
  const double xi = std::log(256.0);
  EXPECT_NEAR(r.bound_value, 4.0 * std::sqrt(2.0 / 512.0 * xi), 1e-15);
  const double fail = 2.0 * std::exp((-0.5 * 15.0 * xi + std::log(2.0 * std::numbers::e * 1.5)) * 2.0);
  EXPECT_NEAR(r.success_prob, 1.0 - fail, 1e-15);
  EXPECT_GT(r.success_prob, 0.0);
}

TEST(C0BoundTheta, EtaAndValues) {
  const double six_e = 6.0 * std::numbers::e;
  EXPECT_DOUBLE_EQ(c0_eta(4, 4), six_e);
  EXPECT_NEAR(c0_eta(1000, 2), six_e * std::sqrt(1000.0 / (4.0 * std::log(six_e))), 1e-12);
  const auto r = c0_bound_theta(with_theta(200, 2, 0.95));
  const double inner = 2.0 * std::log(c0_eta(200, 2)) + std::log(2.0 / 0.05);
  EXPECT_NEAR(r.bound_value, std::sqrt(2.0 / 200.0) * std::sqrt(inner), 1e-14);
  EXPECT_TRUE(c0_bound_theta(with_theta(200, 2, 1.0)).diverged);
}

TEST(C0BoundTheta, EtaConditionOnGrid) {
  for (std::size_t d : {1U, 2U, 5U, 10U, 50U}) {
    for (std::size_t n : {1U, 10U, 100U, 1000U, 100000U}) {
      ASSERT_TRUE(c0_eta_condition(n, d).holds()) << n << " " << d;
    }
  }
}

TEST(WeightedBound, Cases) {
  const auto ones = weighted_bound(with_c(100, 4, 2.0), ProductWeights{{1, 1, 1, 1}});
  EXPECT_NEAR(ones.bound_value, 2.0 * std::sqrt(4.0 / 100.0), 1e-15);
  EXPECT_EQ(weighted_bound(with_c(100, 3, 2.0), ProductWeights{{0, 0, 0}}).bound_value, 0.0);
  // gamma = (0.5, 1): candidates 1*sqrt(1/N), 0.5*sqrt(2/N).
  EXPECT_NEAR(weighted_bound(with_c(25, 2, 1.0), ProductWeights{{0.5, 1.0}}).bound_value, 0.2, 1e-15);
  const auto explicit_w = weighted_bound(with_c(25, 2, 1.0), ExplicitWeights{{{1, 0.1}, {2, 0.2}, {3, 0.9}}});
  EXPECT_NEAR(explicit_w.bound_value, 0.9 * std::sqrt(2.0 / 25.0), 1e-15);
  const auto r = weighted_bound(with_c(100, 3, 4.0), ProductWeights{{1, 1, 1}});
  EXPECT_NEAR(r.success_prob, 2.0 - std::pow(1.0 + std::exp(-(1.674 * 16 - 10.7042)), 3.0), 1e-15);
}

TEST(WeightedBoundTheta, Cases) {
  const auto one = weighted_bound_theta(with_theta(100, 2, 1.0), ProductWeights{{1, 1}});
  EXPECT_TRUE(one.diverged);
  EXPECT_TRUE(std::isinf(one.bound_value));
  const auto d1 = weighted_bound_theta(with_theta(100, 1, 0.5), ProductWeights{{1}});
  const double c1 = std::sqrt(std::fabs(10.7 + std::log(0.5)) / 1.674);
  EXPECT_NEAR(d1.bound_value, c1 * 0.1, 1e-15);
  const auto d5 = weighted_bound_theta(with_theta(500, 5, 0.9), ProductWeights{{1, 1, 1, 1, 1}});
  const double c5 = std::sqrt(std::fabs(10.7 + std::log(std::pow(1.1, 0.2) - 1.0)) / 1.674);
  EXPECT_NEAR(d5.bound_value, c5 * std::sqrt(5.0 / 500.0), 1e-15);
  EXPECT_EQ(d5.success_prob, 0.9);
}

TEST(Bounds, MonotoneInNAndRho) {
  for (std::size_t d : {1U, 3U, 8U}) {
    double prev_gh = std::numeric_limits<double>::infinity(), prev_c0 = prev_gh;
    for (std::size_t n : {1U, 5U, 50U, 500U, 5000U}) {
      const double gh = gh_bound_theta(with_theta(n, d, 0.8)).bound_value;
      const double c0 = c0_bound_theta(with_theta(n, d, 0.8)).bound_value;
      ASSERT_LE(gh, prev_gh);
      ASSERT_LE(c0, prev_c0);
      ASSERT_GE(gh, 0.0);
      prev_gh = gh;
      prev_c0 = c0;
    }
    double prev = 0.0;
    for (double rho : {0.0, 0.5, 2.0}) {
      const double v = c0_bound_theta(with_theta(100, d, 0.8, rho)).bound_value;
      ASSERT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Bounds, Validation) {
  EXPECT_THROW(gh_bound(with_c(0, 1, 1.0)), ValidationError);
  EXPECT_THROW(gh_bound(with_c(10, 1, -1.0)), ValidationError);
  EXPECT_THROW(c0_bound(with_c(10, 1, 1.0, -0.1)), ValidationError);
  EXPECT_THROW(weighted_bound(with_c(10, 2, 1.0), ProductWeights{{1.0}}), ValidationError);
}
