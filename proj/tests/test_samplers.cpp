#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "ndqmc/geometry.hpp"
#include "ndqmc/point_set.hpp"
#include "ndqmc/rng.hpp"
#include "ndqmc/samplers.hpp"
#include "ndqmc/stats.hpp"
#include "ndqmc/strata.hpp"

using namespace ndqmc;

namespace {

/// Index of the 1/n stratum holding x.
std::size_t stratum(double x, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(std::floor(x * static_cast<double>(n))));
}

/// Each axis has exactly one point per 1/n stratum.
bool latin(const PointSet& p) {
  for (std::size_t k = 0; k < p.dim(); ++k) {
    std::vector<int> seen(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) ++seen[stratum(p.at(i, k), p.size())];
    if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) return false;
  }
  return true;
}

}  // namespace

TEST(Rng, SplitIgnoresParentState) {
  RngStream a(7), b(7);
  for (int i = 0; i < 100; ++i) a.uniform();
  EXPECT_EQ(a.split(3).key(), b.split(3).key());
  EXPECT_NE(a.split(3).key(), a.split(4).key());
}

TEST(Rng, UniformAndBelow) {
  RngStream rng(1);
  std::vector<std::size_t> counts(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ++counts[rng.below(10)];
  }
  EXPECT_GT(stats::uniform_bins_pvalue(counts), 1e-4);
}

TEST(SimpleStratified, OnePointPerStratum) {
  RngStream rng(2);
  for (int r = 0; r < 100; ++r) EXPECT_TRUE(latin(sample_simple_stratified(4, rng)));
  const PointSet one = sample_simple_stratified(1, rng);
  EXPECT_EQ(one.size(), 1U);
}

TEST(SimpleStratified, TwoPointsNeverBothInLowerHalf) {
  RngStream rng(3);
  for (int r = 0; r < 100000; ++r) {
    const PointSet p = sample_simple_stratified(2, rng);
    ASSERT_FALSE(p.at(0, 0) < 0.5 && p.at(1, 0) < 0.5);
  }
}

TEST(Lhs, LatinProperty) {
  RngStream rng(4);
  for (int r = 0; r < 200; ++r) {
    EXPECT_TRUE(latin(sample_lhs(3, 2, rng)));
    EXPECT_TRUE(latin(sample_lhs(7, 5, rng)));
  }
}

TEST(Lhs, UniformMarginal) {
  RngStream rng(5);
  std::vector<std::size_t> bins(20, 0);
  for (int r = 0; r < 20000; ++r) ++bins[stratum(sample_lhs(5, 2, rng).at(0, 1), 20)];
  EXPECT_GT(stats::uniform_bins_pvalue(bins), 1e-4);
}

TEST(MonteCarlo, SeedReplay) {
  RngStream a(99), b(99);
  EXPECT_EQ(sample_monte_carlo(2, 1, a), sample_monte_carlo(2, 1, b));
}

TEST(Rsj, RequiresPrime) {
  RngStream rng(1);
  EXPECT_THROW(sample_rsj(6, 2, rng), ValidationError);
  EXPECT_NO_THROW(sample_rsj(2, 2, rng));
}

TEST(Rsj, LatinAndLatticeStructure) {
  RngStream rng(6);
  for (int r = 0; r < 200; ++r) {
    const PointSet p = sample_rsj(7, 3, rng);
    ASSERT_TRUE(latin(p));
    // Cell indices form a shifted lattice: differences of consecutive lattice
    // indices are constant along each axis once sorted by the first axis.
    std::vector<std::array<std::size_t, 3>> cells;
    for (std::size_t i = 0; i < 7; ++i) cells.push_back({stratum(p.at(i, 0), 7), stratum(p.at(i, 1), 7), stratum(p.at(i, 2), 7)});
    std::sort(cells.begin(), cells.end());
    // Axis-0 cells are 0..6 in order; axis k is an affine function mod 7.
    for (int k = 1; k < 3; ++k) {
      const std::size_t step = (cells[1][k] + 7 - cells[0][k]) % 7;
      for (std::size_t i = 1; i < 7; ++i) ASSERT_EQ((cells[i][k] + 7 - cells[i - 1][k]) % 7, step);
    }
  }
}

TEST(Rsj, OneDimensionalMatchesStratified) {
  RngStream rng(7);
  for (int r = 0; r < 100; ++r) EXPECT_TRUE(latin(sample_rsj(5, 1, rng)));
}

TEST(Gss, StripesWithBetaEqualN) {
  RngStream rng(8);
  for (int r = 0; r < 100; ++r) {
    const PointSet p = sample_gss(4, Stripes{4}, 4, 3, rng);
    std::vector<int> seen(4, 0);
    for (std::size_t i = 0; i < 4; ++i) ++seen[stratum(p.at(i, 0), 4)];
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST(Gss, LatticeCellsDistinct) {
  const LatticeCells spec{{1, 2}, 5};
  const LatticeCellPartition part(spec);
  RngStream rng(9);
  for (int r = 0; r < 200; ++r) {
    const PointSet p = sample_gss(5, spec, 5, 2, rng);
    std::set<std::size_t> cells;
    for (std::size_t i = 0; i < 5; ++i) cells.insert(part.cell_index(p[i]));
    ASSERT_EQ(cells.size(), 5U);
  }
}

TEST(Gss, LatticeCellAreasAreEqual) {
  const LatticeCellPartition part(LatticeCells{{1, 3}, 7});
  const Interval all({0.0, 0.0}, {1.0, 1.0});
  for (std::size_t c = 0; c < 7; ++c) EXPECT_NEAR(part.overlap(c, all), 1.0 / 7.0, 1e-12);
  // point_in_cell maps into the named cell.
  RngStream rng(10);
  for (std::size_t c = 0; c < 7; ++c) {
    for (int k = 0; k < 50; ++k) {
      const auto x = part.point_in_cell(c, rng.uniform(), rng.uniform());
      ASSERT_EQ(part.cell_index(x), c);
    }
  }
}

TEST(Gss, Validation) {
  RngStream rng(1);
  EXPECT_THROW(sample_gss(3, Stripes{3}, 4, 1, rng), ValidationError);
  EXPECT_THROW(sample_gss(4, Stripes{5}, 2, 1, rng), ValidationError);
}

TEST(FaureNet, ParametersAndNetProperty) {
  EXPECT_TRUE(is_net(faure_net(2, 3, 1), 2, 3, 1, 0));
  const PointSet p = faure_net(3, 2, 2);
  EXPECT_EQ(p.size(), 9U);
  EXPECT_TRUE(is_net(p, 3, 2, 2, 0));
  EXPECT_TRUE(is_net(faure_net(5, 2, 3), 5, 2, 3, 0));
  EXPECT_TRUE(is_net(faure_net(5, 3, 5), 5, 3, 5, 0));
  EXPECT_THROW(faure_net(4, 2, 2), ValidationError);
  EXPECT_THROW(faure_net(3, 2, 4), ValidationError);
}

TEST(ScrambledNet, KeepsNetPropertyAndReplays) {
  RngStream rng(11);
  for (int r = 0; r < 50; ++r) {
    ASSERT_TRUE(is_net(sample_scrambled_net(2, 3, 1, rng), 2, 3, 1, 0));
    ASSERT_TRUE(is_net(sample_scrambled_net(3, 2, 2, rng), 3, 2, 2, 0));
  }
  RngStream a(5), b(5);
  EXPECT_EQ(sample_scrambled_net(3, 2, 2, a), sample_scrambled_net(3, 2, 2, b));
}

TEST(ScrambledNet, UniformMarginal) {
  RngStream rng(12);
  std::vector<std::size_t> bins(27, 0);
  for (int r = 0; r < 20000; ++r) ++bins[stratum(sample_scrambled_net(3, 2, 2, rng).at(0, 1), 27)];
  EXPECT_GT(stats::uniform_bins_pvalue(bins), 1e-4);
}

TEST(Mixed, ConcatenatesColumns) {
  RngStream rng(13);
  const SchemeSpec spec = make_mixed(LatinHypercube{}, 2, MonteCarlo{}, 3);
  const PointSet p = sample(spec, 16, 5, rng);
  EXPECT_EQ(p.size(), 16U);
  EXPECT_EQ(p.dim(), 5U);
  EXPECT_TRUE(latin(p.project(std::vector<std::size_t>{0, 1})));
  EXPECT_THROW(sample(spec, 16, 4, rng), ValidationError);
}

TEST(Concat, EmptyDimensionIsIdentity) {
  const PointSet p(3, 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  const PointSet empty(3, 0, {});
  EXPECT_EQ(concat(p, empty), p);
  EXPECT_THROW(concat(p, PointSet(2, 1, {0.1, 0.2})), ValidationError);
}

TEST(FourSlot, TableSumsToOneAndSamplesMatch) {
  double total = 0.0;
  for (const auto& row : four_slot_table()) total += row.probability;
  EXPECT_DOUBLE_EQ(total, 1.0);
  RngStream rng(14);
  std::size_t both_upper_right = 0;
  const std::size_t reps = 100000;
  for (std::size_t r = 0; r < reps; ++r) {
    const PointSet p = sample_four_slot(rng);
    both_upper_right += (p.at(0, 0) >= 0.5 && p.at(0, 1) >= 0.5 && p.at(1, 0) >= 0.5 && p.at(1, 1) >= 0.5);
  }
  const auto ci = stats::wilson(both_upper_right, reps, 0.999);
  EXPECT_TRUE(ci.contains(1.0 / 16.0));
}

TEST(Swap, Structure) {
  RngStream rng(15);
  const PointSet p = sample_swap(rng);
  EXPECT_EQ(p.at(0, 0), p.at(1, 1));
  EXPECT_EQ(p.at(0, 1), p.at(1, 0));
}

TEST(Dispatch, ShapeChecks) {
  RngStream rng(16);
  EXPECT_THROW(sample(SimpleStratified{}, 4, 2, rng), ValidationError);
  EXPECT_THROW(sample(MinCopula{}, 2, 1, rng), ValidationError);
  EXPECT_THROW(sample(FourSlot{}, 3, 2, rng), ValidationError);
  EXPECT_EQ(sample(ScrambledNet{3, 2, 2}, 9, 2, rng).size(), 9U);
  EXPECT_THROW(sample(ScrambledNet{3, 2, 2}, 8, 2, rng), ValidationError);
}

TEST(PointSetText, RoundTrip) {
  RngStream rng(17);
  const PointSet p = sample_lhs(8, 2, rng);
  std::stringstream ss;
  write_text(ss, p);
  EXPECT_EQ(read_text(ss), p);
  std::stringstream bad("2 2\n0.1 0.2\n");
  EXPECT_THROW(read_text(bad), ValidationError);
  std::stringstream out_of_range("1 1\n1.5\n");
  EXPECT_THROW(read_text(out_of_range), ValidationError);
}
