#include <cmath>

#include <gtest/gtest.h>

#include "wdecay/smooth.hpp"

using namespace wdecay;

TEST(Smooth, Chi0Plateaus) {
  for (double x : {0.0, 0.3, 1.0}) EXPECT_EQ(chi0(x), 1.0);
  for (double x : {2.0, 2.5, 10.0}) EXPECT_EQ(chi0(x), 0.0);
  for (double x = 1.1; x < 1.95; x += 0.01) {
    EXPECT_GT(chi0(x), 0.0);
    EXPECT_LT(chi0(x), 1.0);
  }
}

TEST(Smooth, PartitionOfUnity) {
  for (double x = 0.0; x <= 3.0; x += 0.0137) {
    EXPECT_NEAR(chi0(x) * chi0(x) + chi_inf(x) * chi_inf(x), 1.0, 1e-14) << x;
    EXPECT_NEAR(chi0_squared(x), chi0(x) * chi0(x), 1e-14) << x;
    EXPECT_NEAR(chi_inf_squared(x), chi_inf(x) * chi_inf(x), 1e-14) << x;
  }
}

TEST(Smooth, MonotoneDecreasing) {
  double prev = 1.0;
  for (double x = 0.0; x <= 2.5; x += 0.001) {
    const double v = chi0(x);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }
}

TEST(Smooth, JetDerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (double x : {1.1, 1.37, 1.5, 1.81}) {
    const Jet2 j = chi0(Jet2::variable(x));
    const double fd1 = (chi0(x + h) - chi0(x - h)) / (2 * h);
    const double fd2 = (chi0(x + h) - 2 * chi0(x) + chi0(x - h)) / (h * h);
    EXPECT_NEAR(j.v, chi0(x), 1e-15);
    EXPECT_NEAR(j.d, fd1, 1e-7);
    EXPECT_NEAR(j.dd, fd2, 1e-3);
  }
}

TEST(Smooth, CutoffScaling) {
  const double sigma = 0.4;
  EXPECT_EQ(cutoff_value(Cutoff::TildeUpper, sigma, 0.3), 0.0);
  EXPECT_EQ(cutoff_value(Cutoff::TildeUpper, sigma, 0.8), 1.0);
  EXPECT_EQ(cutoff_value(Cutoff::Lower, sigma, 0.3), 1.0);
  EXPECT_NEAR(cutoff_value(Cutoff::Lower, sigma, 0.6), chi0(1.5), 1e-15);
}

TEST(Smooth, BumpSupportAndPlateau) {
  const Bump b{1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(b(1.0), 0.0);
  EXPECT_EQ(b(4.0), 0.0);
  EXPECT_EQ(b(2.5), 1.0);
  EXPECT_GT(b(1.5), 0.0);
  EXPECT_LT(b(1.5), 1.0);
  EXPECT_NEAR(b(1.5), 0.5, 1e-15);
  EXPECT_NEAR(b(3.5), 0.5, 1e-15);
}
