#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "wdecay/interval.hpp"
#include "wdecay/kernels.hpp"
#include "wdecay/ops.hpp"

namespace wdecay {

enum class RunMode { Certify, Explore };

struct PhysicsParams {
  Masses masses;
  double lambda = 2.0;
  double delta = 0.5;
  double g = 0.0;
  int species = 1;
  double beta = 1.0;
  double eta = 1.0;
  std::optional<double> g1;        // user-fixed g1; derived when absent
  double threshold_fraction = 0.5;  // strict-inequality margin for derived thresholds
};

template <class T>
T c_beta_eta(T m1, T mW, T beta, T eta) {
  using std::sqrt;
  const T m1sq = m1 * m1;
  return sqrt(T(3.0) / mW * (T(1.0) + T(1.0) / m1sq) + T(3.0) * beta / (mW * m1sq) +
              T(12.0) * eta / m1sq * (T(1.0) + beta));
}

template <class T>
T b_beta_eta(T mW, T beta, T eta) {
  using std::sqrt;
  const T q = T(1.0) + T(1.0) / (T(4.0) * beta);
  return sqrt(T(3.0) / mW * q + T(12.0) * (eta * q + T(1.0) / (T(4.0) * eta)));
}

template <class T>
T gamma_of(T m1, T delta) {
  return T(2.0) * (m1 - delta) / (T(2.0) * m1 - delta);
}

template <class T>
T c_tilde(T C, T g1, T K) {
  const T x = g1 * K * C;
  return C * (T(1.0) + x / (T(1.0) - x));
}

template <class T>
T b_tilde(T B, T C, T g1, T K) {
  const T x = g1 * K * C;
  const T d = T(1.0) - x;
  return (T(1.0) + x / d * (T(2.0) + g1 * K * B * C / d)) * B;
}

template <class T>
T d_tilde(T lambda, T gamma, T m1, T delta, T K_tilde, T Ct, T Bt) {
  using std::max;
  const T lead = max(T(4.0) * lambda * gamma / (T(2.0) * m1 - delta), T(1.0));
  return lead * K_tilde * (T(2.0) * m1 * Ct + Bt);
}

// Largest g1 with 3 g1^2 / mW (1/m1^2 + 1) K^2 <= 1.
template <class T>
T g1_kato_rellich(T m1, T mW, T K) {
  using std::sqrt;
  return sqrt(mW / (T(3.0) * (T(1.0) / (m1 * m1) + T(1.0)) * K * K));
}

struct ConstantLedger {
  Masses masses;
  double lambda = 0.0;
  double delta = 0.0;
  double g = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double K = 0.0;
  double K_tilde = 0.0;
  double C_be = 0.0;
  double B_be = 0.0;
  double g1 = 0.0;
  double g1_kato_rellich = 0.0;
  double relative_bound_a = 0.0;  // g1 K C
  double C_tilde = 0.0;
  double B_tilde = 0.0;
  double D_tilde = 0.0;
  double gamma = 0.0;
  int N = 0;
  double eps_gamma = 0.0;
  double g_delta1 = 0.0;
  double C_tilde_delta = 0.0;  // (1 - g_delta1) / 2
  double g_delta2_gap = 0.0;  // g D~/gamma < 1 and <= g_delta1
  std::vector<double> sigma;
  double threshold_fraction = 0.5;

  double energy_bound(double g_) const { return g_ * K * B_be / (1.0 - g1 * K * C_be); }
  double gap_fraction(double g_) const { return 1.0 - 3.0 * g_ * D_tilde / gamma; }
};

// g_delta^(2) = inf(g_delta1, (1 - g_delta1) gamma^2 / (2 C(G) N^2)), C(G) measured
double g_delta2(const ConstantLedger& l, double C_G);

std::vector<double> sigma_sequence(double m1, double delta, double lambda, int nmax);

ConstantLedger compute_ledger(const HypothesisReport& report, const PhysicsParams& params, int nmax = 5,
                              RunMode mode = RunMode::Certify);

struct IntervalLedger {
  Interval gamma, C_be, B_be, g1, C_tilde, B_tilde, D_tilde, g_delta1_bound, eps_gamma;
};
IntervalLedger compute_interval_ledger(const ConstantLedger& point);

struct BetaEtaGrid {
  double min = 1e-3;
  double max = 1e3;
  int points = 25;
  std::vector<double> values() const;
};

struct BetaEtaSample {
  double beta, eta, D_tilde;
};

struct BetaEtaOptimum {
  double beta = 1.0;
  double eta = 1.0;
  double D_tilde = 0.0;
  std::vector<BetaEtaSample> landscape;
};

BetaEtaOptimum optimize_beta_eta(const HypothesisReport& report, const PhysicsParams& params, const BetaEtaGrid& grid);

nlohmann::json to_json(const ConstantLedger& l);
nlohmann::json to_json(const IntervalLedger& l);

}  // namespace wdecay
