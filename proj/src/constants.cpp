#include "wdecay/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wdecay/errors.hpp"

namespace wdecay {

std::vector<double> sigma_sequence(double m1, double delta, double lambda, int nmax) {
  if (!(delta > 0.0) || !(delta < m1) || !(lambda > m1) || nmax < 1) {
    throw Error(ErrorCode::BadParameters, "constants", "sigma_sequence", "need Lambda > m1 > delta > 0 and nmax >= 1");
  }
  const double gamma = gamma_of(m1, delta);
  std::vector<double> s{lambda, m1 - 0.5 * delta};
  for (int n = 2; n <= nmax; ++n) s.push_back(n == 2 ? m1 - delta : gamma * s.back());
  return s;
}

double g_delta2(const ConstantLedger& l, double C_G) {
  if (!(C_G > 0.0)) return l.g_delta1;
  const double n2 = static_cast<double>(l.N) * static_cast<double>(l.N);
  return std::min(l.g_delta1, (1.0 - l.g_delta1) * l.gamma * l.gamma / (2.0 * C_G * n2));
}

namespace {

void validate(const PhysicsParams& p, const char* op) {
  std::vector<std::string> bad;
  const Masses& m = p.masses;
  if (!(p.delta > 0.0 && p.delta < m.m1)) bad.push_back("0 < delta < m1");
  if (!(m.m1 < m.m2 && m.m2 < m.m3 && m.m3 < m.mW)) bad.push_back("m1 < m2 < m3 < mW");
  if (!(p.lambda > m.m1)) bad.push_back("Lambda > m1");
  if (!(p.beta > 0.0 && p.eta > 0.0)) bad.push_back("beta > 0 and eta > 0");
  if (!(p.threshold_fraction > 0.0 && p.threshold_fraction < 1.0)) bad.push_back("0 < threshold_fraction < 1");
  if (p.g < 0.0) bad.push_back("g >= 0");
  if (!bad.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < bad.size(); ++i) os << (i ? "; " : "") << bad[i];
    throw Error(ErrorCode::BadParameters, "constants", op, os.str());
  }
}

int smallest_n(double gamma) {
  int n = 1;
  while (static_cast<double>(n) * gamma < 1.0) ++n;
  return n;
}

}  // namespace

ConstantLedger compute_ledger(const HypothesisReport& report, const PhysicsParams& p, int nmax, RunMode mode) {
  validate(p, "compute_ledger");
  if (mode == RunMode::Certify && !report.all_ok()) {
    throw Error(ErrorCode::BadParameters, "constants", "compute_ledger", "kernel hypotheses do not hold");
  }
  ConstantLedger l;
  l.masses = p.masses;
  l.lambda = p.lambda;
  l.delta = p.delta;
  l.g = p.g;
  l.beta = p.beta;
  l.eta = p.eta;
  l.K = report.K;
  l.K_tilde = report.K_tilde;
  l.threshold_fraction = p.threshold_fraction;
  const double m1 = p.masses.m1;
  const double mW = p.masses.mW;
  l.C_be = c_beta_eta(m1, mW, p.beta, p.eta);
  l.B_be = b_beta_eta(mW, p.beta, p.eta);
  const double theta = p.threshold_fraction;
  l.g1_kato_rellich = l.K > 0.0 ? g1_kato_rellich(m1, mW, l.K) : std::numeric_limits<double>::infinity();
  if (p.g1) {
    l.g1 = *p.g1;
    if (!(l.g1 > 0.0) || !(l.g1 < l.g1_kato_rellich) || !(l.g1 * l.K * l.C_be < 1.0)) {
      throw Error(ErrorCode::ThresholdViolated, "constants", "compute_ledger",
                  "g1 violates 3 g1^2/mW (1/m1^2+1) K^2 < 1 or g1 K C < 1");
    }
  } else {
    l.g1 = l.K > 0.0 ? theta * std::min(l.g1_kato_rellich, 1.0 / (l.K * l.C_be)) : 1.0;
  }
  if (std::isinf(l.g1_kato_rellich)) l.g1_kato_rellich = 0.0;
  l.relative_bound_a = l.g1 * l.K * l.C_be;
  l.C_tilde = c_tilde(l.C_be, l.g1, l.K);
  l.B_tilde = b_tilde(l.B_be, l.C_be, l.g1, l.K);
  l.gamma = gamma_of(m1, p.delta);
  l.D_tilde = d_tilde(p.lambda, l.gamma, m1, p.delta, l.K_tilde, l.C_tilde, l.B_tilde);
  l.N = smallest_n(l.gamma);
  double cap = std::min(1.0, l.g1);
  if (l.D_tilde > 0.0) cap = std::min(cap, (l.gamma - l.gamma * l.gamma) / (3.0 * l.D_tilde));
  l.g_delta1 = theta * cap;
  l.eps_gamma = (1.0 - 3.0 * l.g_delta1 * l.D_tilde / l.gamma - l.gamma) / (2.0 * l.N);
  l.C_tilde_delta = 0.5 * (1.0 - l.g_delta1);
  l.g_delta2_gap = l.D_tilde > 0.0 ? theta * std::min(l.g_delta1, l.gamma / l.D_tilde) : l.g_delta1;
  l.sigma = sigma_sequence(m1, p.delta, p.lambda, nmax);
  if (mode == RunMode::Certify && p.g > l.g_delta1) {
    std::ostringstream os;
    os.precision(17);
    os << "g = " << p.g << " exceeds g_delta1 = " << l.g_delta1;
    throw Error(ErrorCode::ThresholdViolated, "constants", "compute_ledger", os.str());
  }
  return l;
}

IntervalLedger compute_interval_ledger(const ConstantLedger& p) {
  IntervalLedger r;
  const Interval m1 = p.masses.m1, mW = p.masses.mW, beta = p.beta, eta = p.eta, K = p.K, Kt = p.K_tilde;
  const Interval delta = p.delta, lambda = p.lambda, g1 = p.g1;
  r.gamma = gamma_of(m1, delta);
  r.C_be = c_beta_eta(m1, mW, beta, eta);
  r.B_be = b_beta_eta(mW, beta, eta);
  r.g1 = g1;
  r.C_tilde = c_tilde(r.C_be, g1, K);
  r.B_tilde = b_tilde(r.B_be, r.C_be, g1, K);
  r.D_tilde = d_tilde(lambda, r.gamma, m1, delta, Kt, r.C_tilde, r.B_tilde);
  Interval bound = min(Interval(1.0), g1);
  if (p.D_tilde > 0.0) bound = min(bound, (r.gamma - r.gamma * r.gamma) / (Interval(3.0) * r.D_tilde));
  r.g_delta1_bound = bound;
  const Interval gd = p.g_delta1;
  r.eps_gamma = (Interval(1.0) - Interval(3.0) * gd * r.D_tilde / r.gamma - r.gamma) / Interval(2.0 * p.N);
  return r;
}

std::vector<double> BetaEtaGrid::values() const {
  std::vector<double> v;
  if (points <= 1) {
    v.push_back(min);
    return v;
  }
  const double a = std::log10(min), b = std::log10(max);
  for (int i = 0; i < points; ++i) v.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
  return v;
}

BetaEtaOptimum optimize_beta_eta(const HypothesisReport& report, const PhysicsParams& params, const BetaEtaGrid& grid) {
  BetaEtaOptimum best;
  best.D_tilde = std::numeric_limits<double>::infinity();
  const std::vector<double> vals = grid.values();
  for (double beta : vals) {
    for (double eta : vals) {
      PhysicsParams p = params;
      p.beta = beta;
      p.eta = eta;
      double d = std::numeric_limits<double>::infinity();
      try {
        d = compute_ledger(report, p, 1, RunMode::Explore).D_tilde;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ThresholdViolated) throw;
      }
      best.landscape.push_back({beta, eta, d});
      if (d < best.D_tilde) {
        best.D_tilde = d;
        best.beta = beta;
        best.eta = eta;
      }
    }
  }
  return best;
}

nlohmann::json to_json(const ConstantLedger& l) {
  return {{"m1", l.masses.m1},
          {"m2", l.masses.m2},
          {"m3", l.masses.m3},
          {"mW", l.masses.mW},
          {"Lambda", l.lambda},
          {"delta", l.delta},
          {"g", l.g},
          {"beta", l.beta},
          {"eta", l.eta},
          {"K", l.K},
          {"K_tilde", l.K_tilde},
          {"C_beta_eta", l.C_be},
          {"B_beta_eta", l.B_be},
          {"g1", l.g1},
          {"g1_kato_rellich", l.g1_kato_rellich},
          {"g1_K_C", l.relative_bound_a},
          {"C_tilde", l.C_tilde},
          {"B_tilde", l.B_tilde},
          {"D_tilde", l.D_tilde},
          {"gamma", l.gamma},
          {"N", l.N},
          {"eps_gamma", l.eps_gamma},
          {"g_delta1", l.g_delta1},
          {"C_tilde_delta", l.C_tilde_delta},
          {"g_delta2_gap", l.g_delta2_gap},
          {"threshold_fraction", l.threshold_fraction},
          {"sigma", l.sigma},
          {"g_delta2", "inf(g_delta1, (1 - g_delta1) gamma^2 / (2 C(G) N^2)); C(G) measured by the mourre run"}};
}

nlohmann::json to_json(const IntervalLedger& l) {
  auto iv = [](const Interval& x) { return nlohmann::json::array({x.lo(), x.hi()}); };
  return {{"gamma", iv(l.gamma)},     {"C_beta_eta", iv(l.C_be)},   {"B_beta_eta", iv(l.B_be)},
          {"g1", iv(l.g1)},           {"C_tilde", iv(l.C_tilde)},   {"B_tilde", iv(l.B_tilde)},
          {"D_tilde", iv(l.D_tilde)}, {"g_delta1_bound", iv(l.g_delta1_bound)}, {"eps_gamma", iv(l.eps_gamma)}};
}

}  // namespace wdecay
