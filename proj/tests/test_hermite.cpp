// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/hermite.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace homowit {
namespace {

TEST(Hermite, MatchesBoostPolynomials) {
  for (int n = 0; n <= 6; ++n)
    for (double x = -7.0; x <= 7.0; x += 0.37) EXPECT_NEAR(hermite_function(n, x), oracle::phi(n, x), 1e-13) << n;
}

TEST(Hermite, BatchMatchesSingle) {
  std::vector<double> out(7);
  hermite_functions(1.3, out);
  for (int n = 0; n <= 6; ++n) EXPECT_DOUBLE_EQ(out[n], hermite_function(n, 1.3));
}

TEST(Hermite, Orthonormal) {
  const HermiteWavefunctionTable table(6);
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; m <= 6; ++m) {
      const double v = oracle::integrate_line([&](double x) { return table(n, x) * table(m, x); });
      EXPECT_NEAR(v, n == m ? 1.0 : 0.0, 1e-9) << n << "," << m;
    }
}

TEST(Hermite, VacuumVarianceIsHalf) {
  const double v = oracle::integrate_line([](double x) { return x * x * std::pow(hermite_function(0, x), 2); });
  EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(HalfLineOverlap, KnownValues) {
  EXPECT_NEAR(half_line_overlap(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(half_line_overlap(0, 1), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(half_line_overlap(1, 2), 1.0 / (2.0 * std::sqrt(std::numbers::pi)), 1e-12);
}

TEST(HalfLineOverlap, MatchesQuadrature) {
  const HalfLineOverlapTable table(6);
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; m <= 6; ++m) {
      const double ref =
          oracle::integrate_half_line([&](double x) { return oracle::phi(n, x) * oracle::phi(m, x); });
      EXPECT_NEAR(table(n, m), ref, 1e-10) << n << "," << m;
      EXPECT_DOUBLE_EQ(table(n, m), table(m, n));
      if ((n + m) % 2 == 0) {
        EXPECT_NEAR(table(n, m), n == m ? 0.5 : 0.0, 1e-10);
      }
    }
}

TEST(HalfLineOverlap, RejectsOutOfRange) {
  const HalfLineOverlapTable table(3);
  EXPECT_THROW(table(4, 0), std::out_of_range);
}

TEST(QuadratureGrid, CdfOfSingleLevelIsMonotone) {
  const QuadratureGrid grid(2);
  std::vector<double> coeff(grid.pair_count(), 0.0);
  coeff[grid.pair_index(1, 1)] = 1.0;
  double prev = -1.0;
  for (int g = 0; g < grid.points(); g += 16) {
    const double c = grid.cdf_at(g, coeff);
    EXPECT_GE(c, prev - 1e-15);
    prev = c;
  }
  EXPECT_NEAR(prev, 1.0, 1e-6);
  EXPECT_NEAR(grid.invert(coeff, 0.5), 0.0, 1e-6);
}

}  // namespace
}  // namespace homowit
