#include "wdecay/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "wdecay/cascade.hpp"
#include "wdecay/checks.hpp"
#include "wdecay/errors.hpp"
#include "wdecay/mourre.hpp"
#include "wdecay/report.hpp"
#include "wdecay/spectral.hpp"

namespace wdecay {

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"check-algebra", "verify-bounds", "constants", "thresholds",
                                              "spectrum",      "cascade",       "mourre",    "probe"};
  return names;
}

namespace {

struct Outcome {
  nlohmann::json result;
  Verdicts verdicts;
  std::vector<std::pair<std::string, std::string>> tables;  // file name, contents
};

ModelSpec model_spec(const RunConfig& c) {
  ModelSpec s = c.model;
  if (c.g) s.physics.g = *c.g;
  return s;
}

Model load_model(const RunConfig& c, RunMode mode, double* g) {
  Model m = build_model(model_spec(c), mode);
  *g = coupling(c, m.ledger);
  m.ledger.g = *g;
  return m;
}

void require_threshold(const RunConfig& c, const ConstantLedger& l, double g, const std::string& op) {
  if (c.mode == RunMode::Certify && g > l.g_delta1) {
    std::ostringstream os;
    os.precision(17);
    os << "g = " << g << " exceeds g_delta1 = " << l.g_delta1;
    throw Error(ErrorCode::ThresholdViolated, "cli", op, os.str());
  }
}

Outcome run_check_algebra(const RunConfig& c) {
  double g = 0.0;
  const Model m = load_model(c, RunMode::Explore, &g);
  const FockBasis basis = FockBasis::enumerate(m.grid, m.spec.physics.species, m.spec.caps);
  const AlgebraReport r = check_algebra(basis, m.kernels, m.spec.physics.masses, g, c.seed, c.smeared_samples);
  Outcome o;
  o.result = to_json(r);
  o.result["g"] = g;
  o.verdicts = {{"car", r.car_defect <= 1e-12 && r.car_zero_defect <= 1e-12},
                {"cross_species", r.cross_species_defect <= 1e-12},
                {"ccr", r.ccr_defect <= 1e-12 && r.mixed_defect <= 1e-12},
                {"hermiticity", r.hermiticity <= 1e-12},
                {"smeared_norm", r.smeared_norm_defect <= 1e-10}};
  return o;
}

Outcome run_verify_bounds(const RunConfig& c) {
  double g = 0.0;
  const Model m = load_model(c, RunMode::Explore, &g);
  const BoundsReport r = verify_bounds(m, c.seed, c.samples);
  Outcome o;
  o.result = to_json(r);
  o.verdicts = {{"pair_annihilation", r.annihilation_pair.ok()},
                {"pair_creation", r.creation_pair.ok()},
                {"boson_annihilation_term", r.boson_annihilation.ok()},
                {"boson_creation_term", r.boson_creation.ok()},
                {"relative_bound", r.relative_bound.ok()},
                {"number_vs_energy", r.number_defect <= 1e-12}};
  return o;
}

Outcome run_constants(const RunConfig& c) {
  double g = 0.0;
  ModelSpec spec = model_spec(c);
  Model m = build_model(spec, c.mode);
  g = coupling(c, m.ledger);
  m.ledger.g = g;
  Outcome o;
  o.result["hypotheses"] = to_json(m.hypotheses);
  o.result["ledger"] = to_json(m.ledger);
  o.result["interval_ledger"] = to_json(compute_interval_ledger(m.ledger));
  if (c.model.optimize_beta_eta) {
    const BetaEtaOptimum opt = optimize_beta_eta(m.hypotheses, c.model.physics, c.model.beta_eta_grid);
    nlohmann::json land = nlohmann::json::array();
    for (const BetaEtaSample& s : opt.landscape) land.push_back({s.beta, s.eta, s.D_tilde});
    o.result["beta_eta"] = {{"beta", opt.beta}, {"eta", opt.eta}, {"D_tilde", opt.D_tilde}, {"landscape", land}};
  }
  o.verdicts = {{"hypotheses", m.hypotheses.all_ok()}};
  if (c.mode == RunMode::Certify) o.verdicts.push_back({"g_below_g_delta1", g <= m.ledger.g_delta1});
  return o;
}

Outcome run_thresholds(const RunConfig& c) {
  double g = 0.0;
  const Model m = load_model(c, c.mode, &g);
  const ConstantLedger& l = m.ledger;
  const double cg = measure_C_G(m);
  const double gd2 = g_delta2(l, cg);
  Outcome o;
  o.result = {{"g", g},
              {"g1", l.g1},
              {"g1_kato_rellich", l.g1_kato_rellich},
              {"relative_bound_a", l.relative_bound_a},
              {"g_delta1", l.g_delta1},
              {"g_delta2_gap", l.g_delta2_gap},
              {"C_G", cg},
              {"g_delta2", gd2},
              {"gap_fraction", l.gap_fraction(g)},
              {"energy_bound", l.energy_bound(g)},
              {"threshold_fraction", l.threshold_fraction}};
  o.verdicts = {{"g_below_g1", g < l.g1}, {"g_below_g_delta1", g <= l.g_delta1}, {"gap_fraction_positive", l.gap_fraction(g) > 0.0}};
  if (c.mode == RunMode::Certify) o.verdicts.push_back({"g_below_g_delta2", g <= gd2});
  return o;
}

Outcome run_spectrum(const RunConfig& c) {
  double g = 0.0;
  const Model m = load_model(c, RunMode::Explore, &g);
  const FockBasis full = FockBasis::enumerate(m.grid, m.spec.physics.species, m.spec.caps);
  const SparseMatrix h = full_hamiltonian(m, full, g);
  Outcome o;
  o.result["dimension"] = full.dimension();
  o.result["g"] = g;
  EigenResult gs;
  if (full.dimension() <= c.cascade.solver.dense_limit) {
    const DenseSpectrum spec = dense_spectrum(h, c.cascade.solver.dense_limit);
    gs = ground_state(spec);
    gs.energy = rayleigh_quotient(h, gs.vector);
    gs.residual = norm(multiply(h, gs.vector) - gs.energy * gs.vector);
    const double tol = degeneracy_tolerance(spec.norm);
    std::ostringstream csv;
    write_eigenvalue_csv(csv, spec.values, tol);
    o.tables.push_back({"eigenvalues.csv", csv.str()});
    o.result["norm"] = spec.norm;
    o.result["levels"] = group_levels(spec.values, tol).size();
  } else {
    gs = ground_state(h, c.cascade.solver);
    const GapResult gap = spectral_gap(h, gs.energy, c.cascade.solver);
    gs.gap = gap.gap;
    gs.multiplicity = gap.multiplicity;
  }
  o.result["energy"] = gs.energy;
  o.result["gap"] = gs.gap;
  o.result["multiplicity"] = gs.multiplicity;
  o.result["residual"] = gs.residual;
  o.result["method"] = gs.method;
  o.result["iterations"] = gs.iterations;
  o.result["neutrino_number"] = neutrino_number(full, gs.vector);
  o.verdicts = {{"residual", gs.residual <= 1e-8 * std::max(1.0, hermitian_norm(h))}, {"energy_nonpositive", gs.energy <= 1e-12}};
  return o;
}

Outcome run_cascade_cmd(const RunConfig& c) {
  double g = 0.0;
  const Model m = load_model(c, c.mode, &g);
  const CascadeReport r = run_cascade(m, g, c.mode, c.cascade);
  Outcome o;
  o.result = to_json(r);
  o.verdicts = r.verdicts();
  std::ostringstream csv;
  write_cascade_csv(csv, r);
  o.tables.push_back({"cascade.csv", csv.str()});
  return o;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

Outcome run_mourre(const RunConfig& c) {
  double g = 0.0;
  const Model m = load_model(c, c.mode, &g);
  require_threshold(c, m.ledger, g, "mourre");
  Outcome o;
  nlohmann::json stages = nlohmann::json::array();
  const MourreWorkspace ws = mourre_workspace(m, g, c.mourre.dense_limit);
  for (int n : c.mourre_stages) {
    const MourreReport r = mourre_positivity(m, n, ws, c.mourre);
    stages.push_back(to_json(r));
    const std::string tag = "stage" + std::to_string(n) + "_";
    o.verdicts.push_back({tag + "virial", r.virial_ok});
    o.verdicts.push_back({tag + "compressed_positivity", r.m1_ok});
    o.verdicts.push_back({tag + "window_positivity", r.m2_ok});
  }
  o.result["stages"] = stages;
  const double cg = measure_C_G(m);
  o.result["C_G"] = cg;
  o.result["g_delta2"] = g_delta2(m.ledger, cg);
  const std::size_t s0 = c.model.grid.shells;
  const std::vector<ConvergencePoint> conv = discretization_convergence(c.model, {s0, 2 * s0, 4 * s0});
  nlohmann::json cj = nlohmann::json::array();
  std::vector<double> res, dist;
  for (const ConvergencePoint& p : conv) {
    cj.push_back(to_json(p));
    res.push_back(p.dilation_residual);
    dist.push_back(p.commutator_distance);
  }
  o.result["convergence"] = cj;
  o.verdicts.push_back({"dilation_convergence", strictly_decreasing(res) && res.back() <= 0.05});
  o.verdicts.push_back({"commutator_convergence", strictly_decreasing(dist)});
  return o;
}

Outcome run_probe(const RunConfig& c) {
  double g = 0.0;
  const Model m = load_model(c, c.mode, &g);
  require_threshold(c, m.ledger, g, "probe");
  const Stage st = build_stage(m, c.probe.stage, g);
  const GeneratorBundle b = build_dilation_generator(st.basis, std::nullopt);
  const DenseSpectrum spec = dense_spectrum(st.h, c.probe.dense_limit);
  std::vector<double> lambdas;
  for (double x : c.probe.lambdas) lambdas.push_back(spec.values[0] + x * st.sigma);
  const ProbeTable t = resolvent_probe(st.h, b.A, lambdas, c.probe.epsilons, c.probe.s, c.probe.dense_limit);
  Outcome o;
  o.result = to_json(t);
  o.result["stage"] = st.n;
  o.result["sigma"] = st.sigma;
  o.result["ground_energy"] = spec.values[0];
  o.result["dimension"] = st.basis.dimension();
  std::ostringstream csv;
  write_probe_csv(csv, t);
  o.tables.push_back({"probe.csv", csv.str()});
  bool finite = true;
  for (const ProbeRow& r : t.rows) finite = finite && std::isfinite(r.norm);
  o.verdicts = {{"finite", finite}};
  return o;
}

}  // namespace

int dispatch(const std::string& subcommand, const RunConfig& c, std::ostream& log, std::ostream& err) {
  try {
    if (c.threads > 0) omp_set_num_threads(c.threads);
    Outcome o;
    if (subcommand == "check-algebra") o = run_check_algebra(c);
    else if (subcommand == "verify-bounds") o = run_verify_bounds(c);
    else if (subcommand == "constants") o = run_constants(c);
    else if (subcommand == "thresholds") o = run_thresholds(c);
    else if (subcommand == "spectrum") o = run_spectrum(c);
    else if (subcommand == "cascade") o = run_cascade_cmd(c);
    else if (subcommand == "mourre") o = run_mourre(c);
    else if (subcommand == "probe") o = run_probe(c);
    else throw Error(ErrorCode::BadParameters, "cli", "dispatch", "unknown subcommand '" + subcommand + "'");

    const auto dir = prepare_output(c.out);
    const nlohmann::json env = envelope(c, subcommand, std::move(o.result), o.verdicts);
    write_text(dir / (subcommand + ".json"), dump(env));
    for (const auto& [name, text] : o.tables) write_text(dir / name, text);
    log << subcommand << ": wrote " << (dir / (subcommand + ".json")).string() << "\n";
    int failed = 0;
    for (const auto& [name, ok] : o.verdicts) {
      if (!ok) {
        err << "FAILED " << subcommand << "." << name << "\n";
        ++failed;
      }
    }
    return failed ? kExitVerdict : kExitPass;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::ThresholdViolated ? kExitThreshold : kExitInfrastructure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfrastructure;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Numerical checks for a weak-decay Hamiltonian model"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out, mode;
  long long seed = -1;
  int threads = -1;
  app.add_option("--config", config_path, "YAML run configuration");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "OpenMP threads (0 = default)");
  app.add_option("--mode", mode, "certify or explore")->check(CLI::IsMember({"certify", "explore"}));
  app.set_version_flag("--version", kVersion);
  for (const std::string& name : subcommands()) app.add_subcommand(name);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitInfrastructure;
  }
  RunConfig c;
  try {
    c = config_path.empty() ? parse_config_string("") : parse_config(config_path);
    if (!out.empty()) c.out = out;
    if (seed >= 0) c.seed = static_cast<unsigned>(seed);
    if (threads >= 0) c.threads = threads;
    if (!mode.empty()) c.mode = run_mode_from_string(mode);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitInfrastructure;
  }
  return dispatch(app.get_subcommands().front()->get_name(), c, std::cout, std::cerr);
}

}  // namespace wdecay
