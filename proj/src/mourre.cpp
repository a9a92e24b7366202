#include "wdecay/mourre.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wdecay/errors.hpp"
#include "wdecay/ops.hpp"
#include "wdecay/spectral.hpp"

namespace wdecay {

Eigen::MatrixXcd dilation_one_particle(const ChannelGrid& neutrino, GeneratorPart part, double sigma) {
  const std::size_t shells = neutrino.shells.size();
  const auto n = static_cast<Eigen::Index>(neutrino.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  if (part == GeneratorPart::Lower) {
    return dilation_one_particle(neutrino, GeneratorPart::Full, sigma) -
           dilation_one_particle(neutrino, GeneratorPart::Upper, sigma);
  }
  const auto& r = neutrino.shells.radii;
  for (int label = 0; label < neutrino.labels; ++label) {
    for (std::size_t j = 0; j + 1 < shells; ++j) {
      const auto m = static_cast<Eigen::Index>(static_cast<std::size_t>(label) * shells + j);
      const double c = (r[j] + r[j + 1]) / (4.0 * (r[j + 1] - r[j]));
      const double v = part == GeneratorPart::Full ? 1.0 : generator_profile(part, sigma, r[j]).v;
      a(m, m + 1) = cplx(0.0, c * v);
      a(m + 1, m) = cplx(0.0, -c * v);
    }
  }
  return a;
}

const SparseMatrix& GeneratorBundle::second_quantized(GeneratorPart part) const {
  switch (part) {
    case GeneratorPart::Upper: return A_upper;
    case GeneratorPart::Lower: return A_lower;
    case GeneratorPart::Full: break;
  }
  return A;
}

GeneratorBundle build_dilation_generator(const FockBasis& basis, std::optional<double> sigma) {
  const ChannelGrid& nu = basis.grid().neutrino;
  if (nu.shells.size() < 3) {
    throw Error(ErrorCode::TooFewShells, "mourre", "build_dilation_generator",
                "need at least 3 neutrino shells, got " + std::to_string(nu.shells.size()));
  }
  GeneratorBundle b;
  b.sigma = sigma;
  b.a = dilation_one_particle(nu, GeneratorPart::Full);
  b.A = assemble_neutrino_dgamma(basis, b.a);
  if (sigma) {
    b.a_upper = dilation_one_particle(nu, GeneratorPart::Upper, *sigma);
    b.a_lower = b.a - b.a_upper;
    b.A_upper = assemble_neutrino_dgamma(basis, b.a_upper);
    b.A_lower = assemble_neutrino_dgamma(basis, b.a_lower);
  }
  return b;
}

SparseMatrix commutator(const SparseMatrix& h, const SparseMatrix& a) {
  if (h.rows() != a.rows() || h.cols() != a.cols() || h.rows() != h.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "mourre", "commutator", "operands must be square of equal size");
  }
  SparseMatrix c = linear_combination(cplx(0.0, 1.0), product(h, a), cplx(0.0, -1.0), product(a, h));
  c.set_hermitian(true);
  return c;
}

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& a) {
  if (h.rows() != a.rows() || h.cols() != a.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "mourre", "commutator", "operands must be square of equal size");
  }
  const Eigen::MatrixXcd ha = h * a;
  const cplx i(0.0, 1.0);
  return i * (ha - ha.adjoint());
}

SparseMatrix formula_commutator(const FockBasis& basis, const KernelSet& kernels, GeneratorPart part, double sigma,
                                double g) {
  const ChannelGrid& nu = basis.grid().neutrino;
  if (kernels.n2 != nu.size()) {
    throw Error(ErrorCode::ShapeMismatch, "mourre", "formula_commutator", "kernel and basis grids differ");
  }
  const auto n = static_cast<Eigen::Index>(nu.size());
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = nu.radius(static_cast<std::size_t>(j));
    w(j, j) = generator_profile(part, sigma, r).v * r;
  }
  SparseMatrix out = assemble_neutrino_dgamma(basis, w);
  if (g != 0.0) {
    out = linear_combination(1.0, out, g, assemble_interaction(basis, apply_formula_generator(kernels, part, sigma)));
  }
  out.set_hermitian(true);
  return out;
}

double virial_check(const SparseMatrix& h, double energy, const Eigen::VectorXcd& psi, const SparseMatrix& a,
                    double tol) {
  const Eigen::VectorXcd hpsi = multiply(h, psi);
  const double res = norm(hpsi - energy * psi);
  if (res > tol * std::max(1.0, hermitian_norm(h))) {
    std::ostringstream os;
    os << "eigenpair residual " << res;
    throw Error(ErrorCode::NotAnEigenpair, "mourre", "virial_check", os.str());
  }
  // <psi, i(HA - AH) psi> = -2 Im <H psi, A psi>
  return std::abs(2.0 * dot(hpsi, multiply(a, psi)).imag());
}

Eigen::VectorXcd smooth_test_vector(const ChannelGrid& neutrino) {
  Eigen::VectorXcd u(static_cast<Eigen::Index>(neutrino.size()));
  for (std::size_t m = 0; m < neutrino.size(); ++m) {
    const double s = std::sin(std::numbers::pi * neutrino.radius(m) / neutrino.shells.pmax);
    u[static_cast<Eigen::Index>(m)] = s * s;
  }
  return u;
}

namespace {

Eigen::MatrixXcd dilation_defect(const ChannelGrid& neutrino) {
  const Eigen::MatrixXcd a = dilation_one_particle(neutrino);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.rows(); ++j) w(j, j) = neutrino.radius(static_cast<std::size_t>(j));
  return commutator(w, a) - w;
}

double dense_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()[0];
}

double hermitian_dense_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  return hermitian_eigenvalues(m).cwiseAbs().maxCoeff();
}

}  // namespace

double dilation_identity_residual(const ChannelGrid& neutrino, const Eigen::VectorXcd& u) {
  Eigen::VectorXcd wu(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) wu[j] = neutrino.radius(static_cast<std::size_t>(j)) * u[j];
  return (dilation_defect(neutrino) * u).norm() / wu.norm();
}

double dilation_identity_norm(const ChannelGrid& neutrino) {
  double wmax = 0.0;
  for (double r : neutrino.shells.radii) wmax = std::max(wmax, r);
  return hermitian_dense_norm(dilation_defect(neutrino)) / wmax;
}

double measure_C_G(const Model& model) {
  const ConstantLedger& l = model.ledger;
  const double mW = model.spec.physics.masses.mW;
  double best = 0.0;
  for (std::size_t n = 1; n < l.sigma.size(); ++n) {
    const double sigma = l.sigma[n];
    const KernelSet k = apply_formula_generator(model.kernels, GeneratorPart::Lower, sigma);
    double acc = 0.0;
    for (int sp = 0; sp < model.spec.physics.species; ++sp) {
      for (Charge eps : {Charge::Plus, Charge::Minus}) {
        const KernelBlock& b1 = k.block(1, sp, eps);
        const KernelBlock& b2 = k.block(2, sp, eps);
        for (std::size_t i = 0; i < k.n1; ++i) {
          for (std::size_t j = 0; j < k.n2; ++j) {
            for (std::size_t kk = 0; kk < k.n3; ++kk) {
              const cplx v = k.normalized(b1, i, j, kk) + k.normalized(b2, i, j, kk);
              acc += std::norm(v) / (std::sqrt(k.r3[kk] * k.r3[kk] + mW * mW) * k.r2[j]);
            }
          }
        }
      }
    }
    best = std::max(best, acc / sigma);
  }
  return best;
}

std::vector<ConvergencePoint> discretization_convergence(const ModelSpec& spec,
                                                        const std::vector<std::size_t>& shells) {
  std::vector<ConvergencePoint> out;
  for (std::size_t n : shells) {
    ModelSpec s = spec;
    s.grid.shells = n;
    s.kernel.lambda = spec.physics.lambda;
    const ModeGrid grid = build_mode_grid(s.grid);
    ConvergencePoint p;
    p.shells = n;
    p.dilation_residual = dilation_identity_residual(grid.neutrino, smooth_test_vector(grid.neutrino));
    p.dilation_norm = dilation_identity_norm(grid.neutrino);
    TruncationCaps caps{1, 1, 1, 1, 1, spec.caps.max_dimension};
    const FockBasis basis = FockBasis::enumerate(grid, spec.physics.species, caps);
    const KernelSet k = sample_kernel(s.family, s.kernel, grid, spec.physics.species);
    const SparseMatrix alg = assemble_interaction(
        basis, apply_generator_to_kernel(k, cplx(0.0, -1.0) * dilation_one_particle(grid.neutrino)));
    const SparseMatrix form = assemble_interaction(basis, apply_formula_generator(k, GeneratorPart::Full, 1.0));
    const double ref = hermitian_norm(form);
    p.commutator_distance = ref > 0.0 ? hermitian_norm(linear_combination(1.0, alg, -1.0, form)) / ref : 0.0;
    out.push_back(p);
  }
  return out;
}

nlohmann::json to_json(const ConvergencePoint& p) {
  return {{"shells", p.shells},
          {"dilation_residual", p.dilation_residual},
          {"dilation_norm", p.dilation_norm},
          {"commutator_distance", p.commutator_distance}};
}

std::string to_string(CommutatorMode mode) { return mode == CommutatorMode::Algebraic ? "algebraic" : "formula"; }

CommutatorMode commutator_mode_from_string(const std::string& name) {
  if (name == "algebraic") return CommutatorMode::Algebraic;
  if (name == "formula") return CommutatorMode::Formula;
  throw Error(ErrorCode::ValidationError, "mourre", "commutator_mode_from_string", "unknown commutator mode " + name);
}

namespace {

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  return hermitian_eigenvalues(m)[0];
}

}  // namespace

MourreWorkspace mourre_workspace(const Model& model, double g, std::size_t dense_limit) {
  MourreWorkspace ws;
  ws.g = g;
  ws.full = FockBasis::enumerate(model.grid, model.spec.physics.species, model.spec.caps);
  ws.h = full_hamiltonian(model, ws.full, g);
  ws.spec = dense_spectrum(ws.h, dense_limit);
  return ws;
}

MourreReport mourre_positivity(const Model& model, int n, double g, const MourreOptions& opts) {
  return mourre_positivity(model, n, mourre_workspace(model, g, opts.dense_limit), opts);
}

MourreReport mourre_positivity(const Model& model, int n, const MourreWorkspace& ws, const MourreOptions& opts) {
  const double g = ws.g;
  if (n < 1) throw Error(ErrorCode::BadParameters, "mourre", "mourre_positivity", "stage index must be >= 1");
  const ConstantLedger& l = model.ledger;
  MourreReport r;
  r.n = n;
  r.g = g;
  r.mode = opts.mode;
  const Stage st = build_stage(model, n, g);
  r.sigma = st.sigma;

  {
    const DenseSpectrum spec = dense_spectrum(st.h, opts.dense_limit);
    const EigenResult gs = ground_state(spec);
    const GeneratorBundle bn = build_dilation_generator(st.basis, st.sigma);
    r.virial = virial_check(st.h, gs.energy, gs.vector, bn.A_upper);
    r.virial_scale = std::max(1.0, spec.norm) * std::max(1.0, hermitian_norm(bn.A_upper));
    r.virial_ok = r.virial <= 1e-8 * r.virial_scale;
  }

  const FockBasis& full = ws.full;
  const SparseMatrix& h = ws.h;
  const DenseSpectrum& spec = ws.spec;
  const SparseMatrix hn = cut_hamiltonian(model, full, st.sigma, g);
  const DenseSpectrum spec_n = dense_spectrum(hn, opts.dense_limit);
  const GeneratorBundle bundle = build_dilation_generator(full, st.sigma);
  const double h_norm = std::max(1.0, spec.norm);
  const double a_norm = std::max(1.0, hermitian_norm(bundle.A));

  const Eigen::MatrixXcd alg_lower = commutator(h, bundle.A_lower).to_dense();
  const Eigen::MatrixXcd form_lower =
      formula_commutator(full, model.kernels, GeneratorPart::Lower, st.sigma, g).to_dense();
  r.formula_distance = hermitian_dense_norm(alg_lower - form_lower) / h_norm;
  const bool formula = opts.mode == CommutatorMode::Formula;
  const Eigen::MatrixXcd& c_lower = formula ? form_lower : alg_lower;

  const double gn = l.gamma / static_cast<double>(l.N);
  r.c_target = l.C_tilde_delta * gn * gn * st.sigma;
  r.tolerance = 1e-8 * h_norm * a_norm;
  const Bump f = cascade_bump(l, st.sigma);

  // compression of F C F - c F^2 to the range of F = f_n(H_n - E_n)
  {
    std::vector<Eigen::Index> cols;
    std::vector<double> fv;
    for (Eigen::Index i = 0; i < spec_n.values.size(); ++i) {
      const double v = f(spec_n.values[i] - spec_n.values[0]);
      if (v > 0.0) {
        cols.push_back(i);
        fv.push_back(v);
      }
    }
    r.f_range = cols.size();
    if (cols.empty()) {
      r.m1_ok = true;
    } else {
      const auto k = static_cast<Eigen::Index>(cols.size());
      Eigen::MatrixXcd u(spec_n.vectors.rows(), k);
      for (Eigen::Index c = 0; c < k; ++c) u.col(c) = spec_n.vectors.col(cols[static_cast<std::size_t>(c)]);
      Eigen::MatrixXcd m = u.adjoint() * c_lower * u;
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) m(a, b) *= fv[static_cast<std::size_t>(a)] * fv[static_cast<std::size_t>(b)];
        m(a, a) -= r.c_target * fv[static_cast<std::size_t>(a)] * fv[static_cast<std::size_t>(a)];
      }
      r.m1_min = min_eigenvalue(m);
      r.m1_ok = r.m1_min >= -r.tolerance;
    }
  }

  // f_n(H - E) [H, iA] f_n(H - E) >= c f_n(H - E)^2 - C~ g sigma_n
  const Eigen::MatrixXcd c_full =
      formula ? formula_commutator(full, model.kernels, GeneratorPart::Full, st.sigma, g).to_dense()
              : commutator(h, bundle.A).to_dense();
  {
    const double e = spec.values[0];
    const Eigen::MatrixXcd fh = smooth_function_of(spec, [&](double x) { return f(x - e); });
    const double lam = min_eigenvalue(fh * c_full * fh - r.c_target * fh * fh);
    const double denom = g * st.sigma;
    r.C_tilde_measured = lam >= 0.0 ? 0.0 : (denom > 0.0 ? -lam / denom : std::numeric_limits<double>::infinity());
    r.C_delta = l.C_tilde_delta - r.C_tilde_measured * g / (gn * gn);
  }

  // E_Delta [H, iA] E_Delta >= C_delta gamma^2 N^-2 sigma_n E_Delta
  {
    const double lo = (l.gamma - l.eps_gamma) * (l.gamma - l.eps_gamma) * st.sigma;
    const double hi = (l.gamma + l.eps_gamma) * st.sigma;
    const Eigen::MatrixXcd u = spectral_subspace(spec, spec.values[0], lo, hi);
    r.window_range = static_cast<std::size_t>(u.cols());
    auto window_min = [&](double cd) {
      if (u.cols() == 0) return 0.0;
      Eigen::MatrixXcd m = u.adjoint() * c_full * u;
      m.diagonal().array() -= cd * gn * gn * st.sigma;
      return min_eigenvalue(m);
    };
    r.m2_min = window_min(r.C_delta);
    r.m2_ok = u.cols() == 0 || (r.C_delta > 0.0 && r.m2_min >= -r.tolerance);
    if (opts.C_delta_user) {
      r.m2_min_user = window_min(*opts.C_delta_user);
      r.m2_ok_user = u.cols() == 0 || *r.m2_min_user >= -r.tolerance;
    }
  }
  return r;
}

ProbeTable resolvent_probe(const SparseMatrix& h, const SparseMatrix& a, const std::vector<double>& lambdas,
                           std::vector<double> epsilons, double s, std::size_t limit) {
  if (!(s > 0.5)) throw Error(ErrorCode::BadParameters, "mourre", "resolvent_probe", "s must exceed 1/2");
  const DenseSpectrum hs = dense_spectrum(h, limit);
  const DenseSpectrum as = dense_spectrum(a, limit);
  Eigen::VectorXd weight(as.values.size());
  for (Eigen::Index i = 0; i < weight.size(); ++i) weight[i] = std::pow(1.0 + as.values[i] * as.values[i], -0.5 * s);
  const Eigen::MatrixXcd bracket = as.vectors * weight.asDiagonal() * as.vectors.adjoint();
  const Eigen::MatrixXcd left = bracket * hs.vectors;
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  ProbeTable t;
  t.s = s;
  for (double lambda : lambdas) {
    double prev = -1.0;
    bool mono = true;
    for (double eps : epsilons) {
      Eigen::VectorXcd d(hs.values.size());
      for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = 1.0 / cplx(hs.values[i] - lambda, -eps);
      const Eigen::MatrixXcd m = left * d.asDiagonal() * left.adjoint();
      const double nrm = dense_norm(m);
      if (nrm < prev * (1.0 - 1e-12)) mono = false;
      prev = nrm;
      t.rows.push_back({lambda, eps, nrm});
    }
    t.monotone.push_back(mono);
  }
  return t;
}

nlohmann::json to_json(const MourreReport& r) {
  nlohmann::json j = {{"n", r.n},
                      {"sigma", r.sigma},
                      {"g", r.g},
                      {"mode", to_string(r.mode)},
                      {"virial", r.virial},
                      {"virial_scale", r.virial_scale},
                      {"virial_ok", r.virial_ok},
                      {"formula_distance", r.formula_distance},
                      {"c_target", r.c_target},
                      {"tolerance", r.tolerance},
                      {"f_range", r.f_range},
                      {"f_range_empty", r.f_range == 0},
                      {"m1_min", r.m1_min},
                      {"m1_ok", r.m1_ok},
                      {"C_tilde_measured", r.C_tilde_measured},
                      {"C_delta", r.C_delta},
                      {"window_range", r.window_range},
                      {"m2_min", r.m2_min},
                      {"m2_ok", r.m2_ok}};
  if (r.m2_min_user) {
    j["m2_min_user"] = *r.m2_min_user;
    j["m2_ok_user"] = *r.m2_ok_user;
  }
  return j;
}

nlohmann::json to_json(const ProbeTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) rows.push_back({{"lambda", row.lambda}, {"epsilon", row.epsilon}, {"norm", row.norm}});
  return {{"s", t.s}, {"rows", rows}, {"monotone", t.monotone}};
}

void write_probe_csv(std::ostream& os, const ProbeTable& t) {
  os << "lambda,epsilon,norm\n" << std::setprecision(17);
  for (const auto& row : t.rows) os << row.lambda << ',' << row.epsilon << ',' << row.norm << '\n';
}

}  // namespace wdecay
