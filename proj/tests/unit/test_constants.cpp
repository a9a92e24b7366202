#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "wdecay/constants.hpp"
#include "wdecay/errors.hpp"

using namespace wdecay;

namespace {

HypothesisReport report(double K, double Kt) {
  HypothesisReport r;
  r.K = K;
  r.K_tilde = Kt;
  return r;
}

struct Oracle {
  double C, B, Ct, Bt, Dt, gamma, g1, gd1, eps;
  int N;
};

// written from the closed forms with a different grouping than the library
Oracle oracle(double m1, double mW, double lambda, double delta, double beta, double eta, double K, double Kt,
              double theta) {
  Oracle o{};
  o.C = std::sqrt(3.0 * (1.0 + 1.0 / (m1 * m1)) / mW + 3.0 * beta / (mW * m1 * m1) + 12.0 * eta * (1.0 + beta) / (m1 * m1));
  const double q = (4.0 * beta + 1.0) / (4.0 * beta);
  o.B = std::sqrt(3.0 * q / mW + 12.0 * eta * q + 3.0 / eta);
  const double kr = std::sqrt(mW / (3.0 * K * K * (1.0 + 1.0 / (m1 * m1))));
  o.g1 = theta * std::min(kr, 1.0 / (K * o.C));
  const double x = o.g1 * K * o.C;
  o.Ct = o.C / (1.0 - x);
  o.Bt = o.B + o.B * x / (1.0 - x) * (2.0 + o.g1 * K * o.B * o.C / (1.0 - x));
  o.gamma = 2.0 * (m1 - delta) / (2.0 * m1 - delta);
  o.Dt = std::max(1.0, 4.0 * lambda * o.gamma / (2.0 * m1 - delta)) * Kt * (2.0 * m1 * o.Ct + o.Bt);
  o.N = static_cast<int>(std::ceil(1.0 / o.gamma - 1e-15));
  o.gd1 = theta * std::min({1.0, o.g1, o.gamma * (1.0 - o.gamma) / (3.0 * o.Dt)});
  o.eps = (1.0 - o.gamma - 3.0 * o.gd1 * o.Dt / o.gamma) / (2.0 * o.N);
  return o;
}

void expect_rel(double a, double b, double tol = 1e-12) { EXPECT_LE(std::abs(a - b), tol * std::abs(b)) << a << " vs " << b; }

}  // namespace

TEST(Constants, LedgerMatchesIndependentEvaluator) {
  for (double beta : {0.1, 1.0, 7.0}) {
    for (double eta : {0.05, 1.0, 3.0}) {
      PhysicsParams p;
      p.beta = beta;
      p.eta = eta;
      const ConstantLedger l = compute_ledger(report(0.8, 1.3), p, 5, RunMode::Explore);
      const Oracle o = oracle(1.0, 80.0, 2.0, 0.5, beta, eta, 0.8, 1.3, 0.5);
      expect_rel(l.C_be, o.C);
      expect_rel(l.B_be, o.B);
      expect_rel(l.g1, o.g1);
      expect_rel(l.C_tilde, o.Ct);
      expect_rel(l.B_tilde, o.Bt);
      expect_rel(l.D_tilde, o.Dt);
      expect_rel(l.gamma, o.gamma);
      expect_rel(l.g_delta1, o.gd1);
      expect_rel(l.eps_gamma, o.eps);
      EXPECT_EQ(l.N, o.N);
    }
  }
}

TEST(Constants, SigmaSequenceExample) {
  const std::vector<double> s = sigma_sequence(1.0, 0.5, 2.0, 5);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_DOUBLE_EQ(gamma_of(1.0, 0.5), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s[0], 2.0);
  EXPECT_DOUBLE_EQ(s[1], 0.75);
  EXPECT_DOUBLE_EQ(s[2], 0.5);
  for (int n = 3; n <= 5; ++n) EXPECT_NEAR(s[n], 0.5 * std::pow(2.0 / 3.0, n - 2), 1e-15);
}

TEST(Constants, SigmaSequenceRejectsBadParameters) {
  EXPECT_THROW(sigma_sequence(1.0, 1.5, 2.0, 3), Error);
  EXPECT_THROW(sigma_sequence(1.0, 0.5, 0.9, 3), Error);
  EXPECT_THROW(sigma_sequence(1.0, 0.0, 2.0, 3), Error);
}

TEST(Constants, BadParametersListsEveryViolation) {
  PhysicsParams p;
  p.delta = 2.0;
  p.lambda = 0.5;
  try {
    compute_ledger(report(1.0, 1.0), p, 3, RunMode::Explore);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadParameters);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("0 < delta < m1"), std::string::npos);
    EXPECT_NE(msg.find("Lambda > m1"), std::string::npos);
  }
}

TEST(Constants, CertifyRejectsCouplingAboveThreshold) {
  PhysicsParams p;
  const ConstantLedger l = compute_ledger(report(0.8, 1.3), p, 3, RunMode::Explore);
  p.g = 2.0 * l.g_delta1;
  try {
    compute_ledger(report(0.8, 1.3), p, 3, RunMode::Certify);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ThresholdViolated);
  }
  EXPECT_NO_THROW(compute_ledger(report(0.8, 1.3), p, 3, RunMode::Explore));
  p.g = 0.5 * l.g_delta1;
  EXPECT_NO_THROW(compute_ledger(report(0.8, 1.3), p, 3, RunMode::Certify));
}

TEST(Constants, CertifyRequiresHypotheses) {
  HypothesisReport r = report(0.8, 1.3);
  r.ir_ok = false;
  EXPECT_THROW(compute_ledger(r, PhysicsParams{}, 3, RunMode::Certify), Error);
}

TEST(Constants, UserCouplingG1IsChecked) {
  PhysicsParams p;
  p.g1 = 1e6;
  EXPECT_THROW(compute_ledger(report(0.8, 1.3), p, 3, RunMode::Explore), Error);
}

TEST(Constants, IntervalLedgerEnclosesPointValues) {
  const ConstantLedger l = compute_ledger(report(0.8, 1.3), PhysicsParams{}, 5, RunMode::Explore);
  const IntervalLedger iv = compute_interval_ledger(l);
  EXPECT_TRUE(iv.gamma.contains(l.gamma));
  EXPECT_TRUE(iv.C_be.contains(l.C_be));
  EXPECT_TRUE(iv.B_be.contains(l.B_be));
  EXPECT_TRUE(iv.C_tilde.contains(l.C_tilde));
  EXPECT_TRUE(iv.B_tilde.contains(l.B_tilde));
  EXPECT_TRUE(iv.D_tilde.contains(l.D_tilde));
  EXPECT_TRUE(iv.eps_gamma.contains(l.eps_gamma));
  EXPECT_LE(l.g_delta1, iv.g_delta1_bound.hi());
  EXPECT_LT(iv.D_tilde.width(), 1e-12 * l.D_tilde);
}

TEST(Constants, GapFractionStaysPositiveBelowThreshold) {
  const ConstantLedger l = compute_ledger(report(0.8, 1.3), PhysicsParams{}, 5, RunMode::Explore);
  EXPECT_GT(l.gap_fraction(l.g_delta1), l.gamma);
  EXPECT_GT(l.eps_gamma, 0.0);
}

TEST(Constants, GDelta2IsAtMostGDelta1) {
  const ConstantLedger l = compute_ledger(report(0.8, 1.3), PhysicsParams{}, 5, RunMode::Explore);
  EXPECT_EQ(g_delta2(l, 0.0), l.g_delta1);
  EXPECT_LE(g_delta2(l, 1e-3), l.g_delta1);
  const double big = 1e12;
  EXPECT_NEAR(g_delta2(l, big), (1.0 - l.g_delta1) * l.gamma * l.gamma / (2.0 * big * l.N * l.N), 1e-25);
}

TEST(Constants, BetaEtaOptimumIsGridMinimum) {
  BetaEtaGrid grid;
  grid.points = 9;
  const BetaEtaOptimum o = optimize_beta_eta(report(0.8, 1.3), PhysicsParams{}, grid);
  ASSERT_EQ(o.landscape.size(), 81u);
  for (const BetaEtaSample& s : o.landscape) EXPECT_LE(o.D_tilde, s.D_tilde);
  PhysicsParams p;
  p.beta = o.beta;
  p.eta = o.eta;
  EXPECT_DOUBLE_EQ(compute_ledger(report(0.8, 1.3), p, 1, RunMode::Explore).D_tilde, o.D_tilde);
}
