#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "ndqmc/geometry.hpp"
#include "ndqmc/point_set.hpp"
#include "ndqmc/rng.hpp"
#include "ndqmc/samplers.hpp"

using namespace ndqmc;

TEST(Volume, Boxes) {
  EXPECT_DOUBLE_EQ(volume(CornerBox0({1.0, 1.0})), 1.0);
  EXPECT_DOUBLE_EQ(volume(BoxDiff(CornerBox0({1.0, 1.0}), CornerBox0({0.5, 0.5}))), 0.75);
  EXPECT_DOUBLE_EQ(volume(ElementaryInterval(2, {1, 2}, {0, 3})), 0.125);
  EXPECT_DOUBLE_EQ(volume(CornerBox1({0.25, 0.5})), 0.375);
  EXPECT_DOUBLE_EQ(volume(Interval({0.1, 0.2}, {0.6, 0.4})), 0.5 * 0.2);
  EXPECT_DOUBLE_EQ(volume(Region(CornerBox0({0.5}))), 0.5);
}

TEST(Contains, BoundaryConventions) {
  const std::vector<double> a{0.5, 0.2}, b{0.5}, c{0.2, 0.5};
  EXPECT_FALSE(contains(CornerBox0({0.5, 0.5}), a));
  EXPECT_TRUE(contains(CornerBox1({0.5}), b));
  EXPECT_TRUE(contains(BoxDiff(CornerBox0({0.8, 0.8}), CornerBox0({0.3, 0.3})), c));
  const std::vector<double> inside{0.1, 0.1};
  EXPECT_FALSE(contains(BoxDiff(CornerBox0({0.8, 0.8}), CornerBox0({0.3, 0.3})), inside));
}

TEST(Contains, ElementaryMatchesInterval) {
  const ElementaryInterval e(3, {1, 2}, {2, 4});
  const Interval box = e.as_interval();
  RngStream rng(3);
  for (int k = 0; k < 2000; ++k) {
    const std::vector<double> p{rng.uniform(), rng.uniform()};
    ASSERT_EQ(contains(e, p), contains(box, p));
  }
}

TEST(Validation, RejectsBadInput) {
  EXPECT_THROW(CornerBox0({1.5}), ValidationError);
  EXPECT_THROW(Interval({0.5}, {0.2}), ValidationError);
  EXPECT_THROW(BoxDiff(CornerBox0({0.2, 0.2}), CornerBox0({0.3, 0.1})), ValidationError);
  EXPECT_THROW(ElementaryInterval(2, {1}, {2}), ValidationError);
  EXPECT_THROW(Interval({0.1, 0.2}, {0.5}), DimensionError);
}

TEST(DisjointIntervals, BoxDiffPartition) {
  RngStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Coords outer(3), inner(3);
    for (int k = 0; k < 3; ++k) {
      outer[k] = rng.uniform();
      inner[k] = outer[k] * rng.uniform();
    }
    const BoxDiff diff{CornerBox0(outer), CornerBox0(inner)};
    const auto parts = to_disjoint_intervals(diff);
    double total = 0.0;
    for (const auto& p : parts) total += volume(p);
    EXPECT_NEAR(total, volume(diff), 1e-12);
    for (int k = 0; k < 500; ++k) {
      const std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform()};
      int hits = 0;
      for (const auto& p : parts) hits += contains(p, x) ? 1 : 0;
      ASSERT_EQ(hits, contains(diff, x) ? 1 : 0);
    }
  }
}

TEST(DeltaCover, OneDimensionalCardinality) {
  EXPECT_EQ(build_delta_cover(1, 0.25).size(), 4U);
  EXPECT_EQ(build_delta_cover(1, 1.0).size(), 1U);
  EXPECT_EQ(build_delta_cover(1, 0.1).size(), 10U);
  EXPECT_EQ(build_delta_cover(1, 0.3).size(), 4U);
}

TEST(DeltaCover, TwoDimensionalGridValidates) {
  const auto cover = build_delta_cover(2, 0.5);
  EXPECT_EQ(cover.resolution, 4U);
  EXPECT_LE(cover.size(), 25U);
  RngStream rng(11);
  EXPECT_TRUE(validate_delta_cover(cover, 10000, rng));
}

TEST(DeltaCover, ThreeDimensionalValidates) {
  RngStream rng(12);
  EXPECT_TRUE(validate_delta_cover(build_delta_cover(3, 0.3), 5000, rng));
}

TEST(DeltaCover, RejectsBadDelta) {
  EXPECT_THROW(build_delta_cover(2, 0.0), ValidationError);
  EXPECT_THROW(build_delta_cover(2, 1.5), ValidationError);
  EXPECT_THROW(build_delta_cover(12, 0.01), BudgetExceeded);
}

TEST(CoverBound, Formula) {
  EXPECT_EQ(cover_cardinality_bound(1, 0.1).value, 10U);
  EXPECT_EQ(cover_cardinality_bound(2, 0.5).value, 72U);
  EXPECT_EQ(cover_cardinality_bound(3, 0.25).value, 4500U);
  EXPECT_TRUE(cover_cardinality_bound(60, 0.001).saturated);
}

TEST(SplitBoxDifference, HalfSquare) {
  const BoxDiff diff(CornerBox0({1.0, 1.0}), CornerBox0({0.5, 0.5}));
  const auto [c1, c2] = split_box_difference(diff, 1);
  EXPECT_DOUBLE_EQ(volume(c1), 0.5);
  EXPECT_DOUBLE_EQ(volume(c2), 0.25);
}

TEST(SplitBoxDifference, DegenerateInnerEqualsOuter) {
  const BoxDiff diff(CornerBox0({0.6, 0.7}), CornerBox0({0.6, 0.7}));
  const auto [c1, c2] = split_box_difference(diff, 1);
  EXPECT_DOUBLE_EQ(volume(c1), 0.0);
  EXPECT_DOUBLE_EQ(volume(c2), 0.0);
}

TEST(SplitBoxDifference, RandomMembershipCrossCheck) {
  RngStream rng(21);
  Coords outer(3), inner(3);
  for (int k = 0; k < 3; ++k) {
    outer[k] = 0.3 + 0.7 * rng.uniform();
    inner[k] = outer[k] * rng.uniform();
  }
  const BoxDiff diff{CornerBox0(outer), CornerBox0(inner)};
  const auto [c1, c2] = split_box_difference(diff, 2);
  EXPECT_NEAR(volume(c1) + volume(c2), volume(diff), 1e-12);
  std::size_t in1 = 0, in2 = 0;
  for (int k = 0; k < 100000; ++k) {
    const std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform()};
    const bool a = contains(c1, x), b = contains(c2, x);
    ASSERT_FALSE(a && b);
    ASSERT_EQ(a || b, contains(diff, x));
    in1 += a;
    in2 += b;
  }
  EXPECT_NEAR(in1 / 1e5, volume(c1), 4 * std::sqrt(0.25 / 1e5));
  EXPECT_NEAR(in2 / 1e5, volume(c2), 4 * std::sqrt(0.25 / 1e5));
}

TEST(IsNet, SmallCases) {
  EXPECT_TRUE(is_net(PointSet(2, 1, {0.0, 0.5}), 2, 1, 1, 0));
  EXPECT_FALSE(is_net(PointSet(2, 1, {0.0, 0.25}), 2, 1, 1, 0));
  EXPECT_TRUE(is_net(faure_net(3, 2, 2), 3, 2, 2, 0));
  EXPECT_THROW(is_net(PointSet(3, 1, {0.0, 0.2, 0.5}), 2, 1, 1, 0), ValidationError);
}

TEST(IsNet, BruteForceAgreement) {
  // Count every elementary interval of volume b^-m directly.
  auto brute = [](const PointSet& p, unsigned b, unsigned m) {
    const std::size_t s = p.dim();
    std::vector<unsigned> j(s, 0);
    std::function<bool(std::size_t, unsigned)> rec = [&](std::size_t axis, unsigned left) -> bool {
      if (axis + 1 == s) {
        j[axis] = left;
        std::vector<std::uint64_t> k(s, 0);
        std::function<bool(std::size_t)> cells = [&](std::size_t a) -> bool {
          if (a == s) {
            const ElementaryInterval e(b, j, k);
            std::size_t c = 0;
            for (std::size_t i = 0; i < p.size(); ++i) c += contains(e, p[i]);
            return c == 1;
          }
          const auto lim = static_cast<std::uint64_t>(std::pow(b, j[a]) + 0.5);
          for (k[a] = 0; k[a] < lim; ++k[a]) {
            if (!cells(a + 1)) return false;
          }
          return true;
        };
        return cells(0);
      }
      for (unsigned v = 0; v <= left; ++v) {
        j[axis] = v;
        if (!rec(axis + 1, left - v)) return false;
      }
      return true;
    };
    return rec(0, m);
  };
  RngStream rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet mc = sample_monte_carlo(9, 2, rng);
    EXPECT_EQ(is_net(mc, 3, 2, 2, 0), brute(mc, 3, 2));
    const PointSet net = sample_scrambled_net(3, 2, 2, rng);
    EXPECT_TRUE(brute(net, 3, 2));
    EXPECT_TRUE(is_net(net, 3, 2, 2, 0));
  }
}

TEST(ElementaryIndex, ExactBoundaries) {
  EXPECT_EQ(elementary_index(0.5, 2, 1), 1U);
  EXPECT_EQ(elementary_index(1.0 / 3.0, 3, 1), 1U);
  EXPECT_EQ(elementary_index(2.0 / 9.0, 3, 2), 2U);
  EXPECT_EQ(elementary_index(0.999999, 5, 2), 24U);
}
