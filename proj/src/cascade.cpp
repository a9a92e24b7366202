#include "wdecay/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "wdecay/errors.hpp"

namespace wdecay {

KernelSet cut_kernels(const KernelSet& k, double sigma) { return apply_cutoff(k, sigma, Cutoff::TildeUpper); }

Stage build_stage(const Model& model, int n, double g, Execution exec) {
  const auto& sig = model.ledger.sigma;
  if (n < 0 || static_cast<std::size_t>(n) >= sig.size()) {
    throw Error(ErrorCode::BadParameters, "cascade", "build_truncated_hamiltonian",
                "stage " + std::to_string(n) + " outside the sigma table");
  }
  Stage st;
  st.n = n;
  st.sigma = sig[static_cast<std::size_t>(n)];
  st.grid = restrict_neutrinos(model.grid, st.sigma, &st.kept);
  if (n >= 1 && st.grid.neutrino.size() == 0) {
    std::ostringstream os;
    os << "no neutrino shell with radius >= sigma_" << n << " = " << st.sigma;
    throw Error(ErrorCode::NoModesAboveCutoff, "cascade", "build_truncated_hamiltonian", os.str());
  }
  st.kernels = restrict_kernel(cut_kernels(model.kernels, st.sigma), st.grid, st.kept);
  st.basis = FockBasis::enumerate(st.grid, model.spec.physics.species, model.spec.caps);
  st.h0 = assemble_h0(st.basis, model.spec.physics.masses, {}, exec);
  st.hI = assemble_interaction(st.basis, st.kernels, exec);
  st.h = total_hamiltonian(st.h0, st.hI, g);
  return st;
}

SparseMatrix build_truncated_hamiltonian(const Model& model, int n, double g) { return build_stage(model, n, g).h; }

SparseMatrix cut_hamiltonian(const Model& model, const FockBasis& full, double sigma, double g, Execution exec) {
  const SparseMatrix h0 = assemble_h0(full, model.spec.physics.masses, {}, exec);
  const SparseMatrix hI = assemble_interaction(full, cut_kernels(model.kernels, sigma), exec);
  return total_hamiltonian(h0, hI, g);
}

SparseMatrix full_hamiltonian(const Model& model, const FockBasis& full, double g, Execution exec) {
  const SparseMatrix h0 = assemble_h0(full, model.spec.physics.masses, {}, exec);
  const SparseMatrix hI = assemble_interaction(full, model.kernels, exec);
  return total_hamiltonian(h0, hI, g);
}

FactorMap factorize(const FockBasis& full, const FockBasis& hard, const std::vector<std::size_t>& kept) {
  const std::size_t nu = full.grid().neutrino.size();
  std::vector<std::optional<std::size_t>> inverse(nu);
  for (std::size_t i = 0; i < kept.size(); ++i) inverse.at(kept[i]) = i;
  FactorMap map;
  const std::size_t dim = full.dimension();
  map.hard.resize(dim);
  map.soft.resize(dim);
  map.sign.resize(dim);
  map.soft_energy.resize(dim);
  std::vector<char> is_soft(full.fermion_modes(), 0);
  for (const Block& b : full.blocks()) {
    if (b.channel != ChannelKind::Neutrino) continue;
    for (std::size_t l = 0; l < b.count; ++l) is_soft[b.first + l] = !inverse[l].has_value();
  }
  for (std::size_t i = 0; i < dim; ++i) {
    const FockState& s = full.state(i);
    FockState hs;
    FockState soft;
    double energy = 0.0;
    for (const Block& b : full.blocks()) {
      const Block& hb = hard.block(b.kind, b.species);
      for (std::size_t l = 0; l < b.count; ++l) {
        const std::size_t m = b.first + l;
        if (!b.fermionic) {
          hs.bosons[hb.first - hard.fermion_modes() + l] = s.bosons[m - full.fermion_modes()];
          continue;
        }
        if (!s.occupied(m)) continue;
        if (b.channel == ChannelKind::Neutrino && !inverse[l]) {
          soft.flip(m);
          energy += full.grid().neutrino.radius(l);
        } else {
          hs.flip(hb.first + (b.channel == ChannelKind::Neutrino ? *inverse[l] : l));
        }
      }
    }
    int pairs = 0;
    int soft_seen = 0;
    for (std::size_t m = 0; m < full.fermion_modes(); ++m) {
      if (!s.occupied(m)) continue;
      if (is_soft[m]) {
        ++soft_seen;
      } else {
        pairs += soft_seen;
      }
    }
    const auto idx = hard.index(hs);
    if (!idx) throw Error(ErrorCode::ShapeMismatch, "cascade", "factorize", "hard part outside the stage basis");
    map.hard[i] = *idx;
    map.soft[i] = soft;
    map.sign[i] = (pairs % 2) ? -1.0 : 1.0;
    map.soft_energy[i] = energy;
  }
  return map;
}

double tensor_defect(const FactorMap& map, const SparseMatrix& full, const SparseMatrix& hard, bool add_soft) {
  const std::size_t dim = map.hard.size();
  std::unordered_map<FockState, std::unordered_map<std::size_t, std::size_t>, FockStateHash> groups;
  for (std::size_t i = 0; i < dim; ++i) groups[map.soft[i]][map.hard[i]] = i;
  std::vector<Triplet> t;
  for (std::size_t s = 0; s < dim; ++s) {
    const auto& group = groups.at(map.soft[s]);
    const std::size_t hs = map.hard[s];
    for (std::size_t p = hard.row_ptr()[hs]; p < hard.row_ptr()[hs + 1]; ++p) {
      const auto it = group.find(hard.col_index()[p]);
      if (it == group.end()) continue;
      t.push_back({s, it->second, map.sign[s] * map.sign[it->second] * hard.values()[p]});
    }
    if (add_soft) t.push_back({s, s, cplx(map.soft_energy[s], 0.0)});
  }
  const SparseMatrix expected = SparseMatrix::from_triplets(dim, dim, std::move(t));
  return linear_combination(1.0, full, -1.0, expected).max_abs();
}

double tensor_defect_dense(const FactorMap& map, const Eigen::MatrixXcd& full, const Eigen::MatrixXcd& hard,
                           const std::function<double(double)>& soft_factor) {
  const std::size_t dim = map.hard.size();
  double worst = 0.0;
  for (std::size_t s = 0; s < dim; ++s) {
    const double fs = soft_factor(map.soft_energy[s]);
    for (std::size_t t = 0; t < dim; ++t) {
      cplx expected = 0.0;
      if (map.soft[s] == map.soft[t]) {
        expected = map.sign[s] * map.sign[t] * hard(static_cast<Eigen::Index>(map.hard[s]),
                                                     static_cast<Eigen::Index>(map.hard[t])) * fs;
      }
      worst = std::max(worst, std::abs(full(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) - expected));
    }
  }
  return worst;
}

Bump cascade_bump(const ConstantLedger& l, double sigma_n) {
  const double g = l.gamma, e = l.eps_gamma;
  return Bump{(g - 2.0 * e) * (g - 2.0 * e) * sigma_n, (g - e) * (g - e) * sigma_n, (g + e) * sigma_n,
              (g + 2.0 * e) * sigma_n};
}

double neutrino_number(const FockBasis& basis, const Eigen::VectorXcd& psi) {
  double total = 0.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const double p = std::norm(psi[static_cast<Eigen::Index>(i)]);
    if (p == 0.0) continue;
    unsigned count = 0;
    for (const Block& b : basis.blocks()) {
      if (b.channel == ChannelKind::Neutrino) count += basis.block_occupation(basis.state(i), b);
    }
    total += p * count;
  }
  return total;
}

PullThroughResult pull_through(const Stage& stage, const Masses& masses, double g, double energy,
                               const Eigen::VectorXcd& ground) {
  PullThroughResult r;
  const FockBasis& basis = stage.basis;
  const double h0_half = std::sqrt(std::max(0.0, dot(ground, multiply(stage.h0, ground)).real()));
  const double psi_norm = norm(ground);
  for (const Block& b : basis.blocks()) {
    if (b.channel != ChannelKind::Neutrino) continue;
    const Charge eps = opposite(b.kind == BlockKind::Neutrino ? Charge::Plus : Charge::Minus);
    for (std::size_t l = 0; l < b.count; ++l) {
      const std::size_t mode = b.first + l;
      const Eigen::VectorXcd psi = multiply(annihilation_matrix(basis, mode), ground);
      const Eigen::VectorXcd lhs = multiply(stage.h, psi) + (stage.grid.neutrino.radius(l) - energy) * psi;
      const Eigen::VectorXcd rhs = g * multiply(assemble_pull_through_vertex(basis, stage.kernels, mode), ground);
      r.max_residual = std::max(r.max_residual, norm(lhs - rhs));
      const double s1 = slice_norm_neutrino(stage.kernels, stage.kernels.block(1, b.species, eps), l);
      const double s2 = slice_norm_neutrino(stage.kernels, stage.kernels.block(2, b.species, eps), l);
      const double bound = g / std::sqrt(masses.mW) * (s1 + s2) * h0_half + g * s2 * psi_norm;
      const double v = norm(rhs);
      if (bound > 0.0) {
        r.max_ratio = std::max(r.max_ratio, v / bound);
      } else if (v > 0.0) {
        r.max_ratio = std::numeric_limits<double>::infinity();
      }
      ++r.modes;
    }
  }
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

namespace {

struct Solved {
  EigenResult ground;
  double h_norm = 0.0;
};

Solved solve(const SparseMatrix& h, const SolverOptions& opts) {
  Solved s;
  if (h.rows() <= opts.dense_limit) {
    const DenseSpectrum spec = dense_spectrum(h, opts.dense_limit);
    s.ground = ground_state(spec);
    s.ground.energy = rayleigh_quotient(h, s.ground.vector);
    s.ground.residual = norm(multiply(h, s.ground.vector) - s.ground.energy * s.ground.vector);
    s.h_norm = spec.norm;
  } else {
    s.ground = ground_state(h, opts);
    s.h_norm = hermitian_norm(h);
  }
  return s;
}

double slack(double h_norm) { return 1e-12 * std::max(1.0, h_norm); }

double max_abs_eigenvalue(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  return hermitian_eigenvalues(m).cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<double> soft_content_sweep(const Model& model, int n, const std::vector<double>& gs) {
  const Stage st = build_stage(model, n, 0.0);
  std::vector<double> out;
  for (double g : gs) {
    const SparseMatrix h = total_hamiltonian(st.h0, st.hI, g);
    const Solved s = solve(h, SolverOptions{});
    out.push_back(neutrino_number(st.basis, s.ground.vector));
  }
  return out;
}

std::vector<bool> interlacing_check(const std::vector<StageReport>& stages, const ConstantLedger& l, double g) {
  std::vector<bool> out;
  for (std::size_t i = 0; i + 1 < stages.size(); ++i) {
    const double diff = std::abs(stages[i].energy - stages[i + 1].energy);
    const double bound = g * l.D_tilde * stages[i + 1].sigma / l.gamma;
    out.push_back(diff <= bound + slack(std::max(stages[i].h_norm, stages[i + 1].h_norm)));
  }
  return out;
}

CascadeReport run_cascade(const Model& model, double g, RunMode mode, const CascadeOptions& opts) {
  const ConstantLedger& l = model.ledger;
  if (g < 0.0) throw Error(ErrorCode::BadParameters, "cascade", "run_cascade", "g must be nonnegative");
  if (mode == RunMode::Certify && g > l.g_delta1) {
    std::ostringstream os;
    os.precision(17);
    os << "g = " << g << " exceeds g_delta1 = " << l.g_delta1;
    throw Error(ErrorCode::ThresholdViolated, "cascade", "run_cascade", os.str());
  }
  const int nmax = static_cast<int>(l.sigma.size()) - 1;
  const Masses& masses = model.spec.physics.masses;
  CascadeReport rep;
  rep.ledger = l;
  rep.g = g;
  rep.stages.resize(static_cast<std::size_t>(nmax + 1));

  std::optional<FockBasis> full;
  std::optional<DenseSpectrum> full_spec;
  if (opts.full_space) {
    full = FockBasis::enumerate(model.grid, model.spec.physics.species, model.spec.caps);
    const SparseMatrix h = full_hamiltonian(model, *full, g);
    full_spec = dense_spectrum(h, opts.solver.dense_limit);
    rep.full_energy = rayleigh_quotient(h, full_spec->vectors.col(0));
  }
  const double min_radius = model.grid.neutrino.shells.radii.empty() ? 0.0 : model.grid.neutrino.shells.radii.front();

  std::vector<std::exception_ptr> errors(rep.stages.size());
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n <= nmax; ++n) {
    try {
      StageReport& sr = rep.stages[static_cast<std::size_t>(n)];
      const Stage st = build_stage(model, n, g, Execution::Serial);
      sr.n = n;
      sr.sigma = st.sigma;
      sr.dimension = st.basis.dimension();
      sr.retained_modes = st.grid.neutrino.size();
      sr.under_resolved = n >= 1 && st.sigma < min_radius;
      const Solved s = solve(st.h, opts.solver);
      const Eigen::VectorXcd& phi = s.ground.vector;
      sr.energy = s.ground.energy;
      sr.gap = s.ground.gap;
      sr.multiplicity = s.ground.multiplicity;
      sr.residual = s.ground.residual;
      sr.method = s.ground.method;
      sr.h_norm = s.h_norm;
      const double reference = n == 0 ? l.sigma[1] : st.sigma;
      sr.gap_bound = l.gap_fraction(g) * reference;
      sr.energy_bound = l.energy_bound(g);
      const double tol = slack(s.h_norm);
      sr.gap_ok = sr.gap >= sr.gap_bound - tol;
      sr.bracket_ok = sr.energy <= tol && sr.energy >= -sr.energy_bound - tol;
      sr.simple_ok = sr.multiplicity == 1;
      sr.h0_ground = norm(multiply(st.h0, phi));
      const double denom = 1.0 - l.g1 * l.K * l.C_be;
      sr.h0_bound = (std::abs(sr.energy) + g * l.K * l.B_be) / denom;
      sr.h0_bound_ok = sr.h0_ground <= sr.h0_bound + tol;
      if (static_cast<std::size_t>(n + 1) < l.sigma.size()) {
        const double next = l.sigma[static_cast<std::size_t>(n + 1)];
        sr.k_window = kernel_norm(apply_window(model.kernels, next, 2.0 * st.sigma));
        sr.k_window_bound = st.sigma * l.K_tilde;
        sr.k_window_bound_gamma =
            std::max(4.0 * l.lambda * l.gamma / (2.0 * masses.m1 - l.delta), 1.0) * l.K_tilde * next / l.gamma;
      }
      sr.soft_content = neutrino_number(st.basis, phi);
      if (opts.pull_through) {
        sr.pull = pull_through(st, masses, g, sr.energy, phi);
        sr.pull_ok = sr.pull->max_residual <= opts.pull_tolerance * std::max(1.0, s.h_norm);
        sr.vertex_bound_ok = sr.pull->max_ratio <= 1.0 + 1e-12;
      }
      if (full) {
        const SparseMatrix hn = cut_hamiltonian(model, *full, st.sigma, g, Execution::Serial);
        const DenseSpectrum spec = dense_spectrum(hn, opts.solver.dense_limit);
        sr.full_energy = rayleigh_quotient(hn, spec.vectors.col(0));
        sr.energy_match = std::abs(*sr.full_energy - sr.energy);
        sr.factorization_defect = tensor_defect(factorize(*full, st.basis, st.kept), hn, st.h, true);
        if (n >= 1) {
          const Bump f = cascade_bump(l, st.sigma);
          const double e = *rep.full_energy;
          const double en = *sr.full_energy;
          const Eigen::MatrixXcd a = smooth_function_of(*full_spec, [&](double x) { return f(x - e); });
          const Eigen::MatrixXcd b = smooth_function_of(spec, [&](double x) { return f(x - en); });
          sr.calculus_distance = max_abs_eigenvalue(a - b);
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(n)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  rep.interlacing = interlacing_check(rep.stages, l, g);
  for (std::size_t i = 0; i + 1 < rep.stages.size(); ++i) {
    StageReport& sr = rep.stages[i];
    sr.step = std::abs(sr.energy - rep.stages[i + 1].energy);
    sr.step_bound = g * l.D_tilde * rep.stages[i + 1].sigma / l.gamma;
    sr.step_ok = rep.interlacing[i];
  }
  if (rep.full_energy && g > 0.0) {
    std::vector<double> sig, diff;
    double d = 0.0, c = 0.0;
    for (const StageReport& sr : rep.stages) {
      if (sr.n < 1) continue;
      const double de = std::abs(*rep.full_energy - *sr.full_energy);
      sig.push_back(sr.sigma);
      diff.push_back(de);
      d = std::max(d, de / (g * sr.sigma * sr.sigma));
      if (sr.calculus_distance) c = std::max(c, *sr.calculus_distance / (g * sr.sigma));
    }
    rep.energy_D = d;
    rep.calculus_C = c;
    const double slope = loglog_slope(sig, diff);
    if (std::isfinite(slope)) rep.energy_slope = slope;
  }
  rep.verdict = true;
  for (const auto& v : rep.verdicts()) rep.verdict = rep.verdict && v.second;
  return rep;
}

std::vector<std::pair<std::string, bool>> CascadeReport::verdicts() const {
  std::vector<std::pair<std::string, bool>> out;
  for (const StageReport& s : stages) {
    const std::string p = "stage " + std::to_string(s.n) + ": ";
    out.emplace_back(p + "gap >= (1 - 3 g D~/gamma) sigma_n", s.gap_ok);
    out.emplace_back(p + "E^n in [-energy bound, 0]", s.bracket_ok);
    out.emplace_back(p + "|E^n - E^(n+1)| <= g D~ sigma_(n+1)/gamma", s.step_ok);
    out.emplace_back(p + "E^n simple", s.simple_ok);
    out.emplace_back(p + "H0 ground-state bound", s.h0_bound_ok);
    if (s.pull) {
      out.emplace_back(p + "pull-through residual", s.pull_ok);
      out.emplace_back(p + "vertex bound", s.vertex_bound_ok);
    }
    if (s.energy_match) {
      const double tol = 1e-8 * std::max(1.0, s.h_norm);
      out.emplace_back(p + "E_n = E^n", *s.energy_match <= tol);
      out.emplace_back(p + "tensor factorization", *s.factorization_defect <= 1e-12 * std::max(1.0, s.h_norm));
    }
  }
  return out;
}

nlohmann::json to_json(const StageReport& s) {
  nlohmann::json j = {{"n", s.n},
                      {"sigma", s.sigma},
                      {"dimension", s.dimension},
                      {"retained_neutrino_modes", s.retained_modes},
                      {"under_resolved", s.under_resolved},
                      {"energy", s.energy},
                      {"gap", s.gap},
                      {"multiplicity", s.multiplicity},
                      {"residual", s.residual},
                      {"method", s.method},
                      {"h_norm", s.h_norm},
                      {"gap_bound", s.gap_bound},
                      {"energy_bound", s.energy_bound},
                      {"gap_ok", s.gap_ok},
                      {"bracket_ok", s.bracket_ok},
                      {"step_ok", s.step_ok},
                      {"simple_ok", s.simple_ok},
                      {"h0_ground", s.h0_ground},
                      {"h0_bound", s.h0_bound},
                      {"h0_bound_ok", s.h0_bound_ok},
                      {"k_window", s.k_window},
                      {"k_window_bound_sigma", s.k_window_bound},
                      {"k_window_bound_gamma", s.k_window_bound_gamma},
                      {"soft_content", s.soft_content}};
  if (s.step) {
    j["step"] = *s.step;
    j["step_bound"] = *s.step_bound;
  }
  if (s.pull) {
    j["pull_through_residual"] = s.pull->max_residual;
    j["vertex_bound_ratio"] = s.pull->max_ratio;
    j["pull_through_modes"] = s.pull->modes;
    j["pull_through_ok"] = s.pull_ok;
    j["vertex_bound_ok"] = s.vertex_bound_ok;
  }
  if (s.full_energy) {
    j["full_space_energy"] = *s.full_energy;
    j["energy_match"] = *s.energy_match;
    j["factorization_defect"] = *s.factorization_defect;
  }
  if (s.calculus_distance) j["functional_calculus_distance"] = *s.calculus_distance;
  return j;
}

nlohmann::json to_json(const CascadeReport& r) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.stages) stages.push_back(to_json(s));
  nlohmann::json j = {{"ledger", to_json(r.ledger)}, {"g", r.g}, {"stages", stages},
                      {"interlacing", r.interlacing}, {"verdict", r.verdict}};
  if (r.full_energy) j["full_energy"] = *r.full_energy;
  if (r.energy_D) j["energy_convergence_D"] = *r.energy_D;
  if (r.energy_slope) j["energy_convergence_slope"] = *r.energy_slope;
  if (r.calculus_C) j["calculus_convergence_C"] = *r.calculus_C;
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& v : r.verdicts()) {
    if (!v.second) failed.push_back(v.first);
  }
  j["failed"] = failed;
  return j;
}

void write_cascade_csv(std::ostream& os, const CascadeReport& r) {
  os << "n,sigma,dim,energy,gap,gap_ok,bracket_ok,step_ok,simple_ok\n" << std::setprecision(17);
  for (const auto& s : r.stages) {
    os << s.n << ',' << s.sigma << ',' << s.dimension << ',' << s.energy << ',' << s.gap << ',' << s.gap_ok << ','
       << s.bracket_ok << ',' << s.step_ok << ',' << s.simple_ok << '\n';
  }
}

}  // namespace wdecay
