#include "wdecay/model.hpp"

#include <fstream>

#include "wdecay/errors.hpp"

namespace wdecay {

namespace {

KernelParams effective_params(const ModelSpec& spec) {
  KernelParams p = spec.kernel;
  p.lambda = spec.physics.lambda;
  return p;
}

}  // namespace

KernelSet kernels_on(const Model& model, const ModeGrid& grid) {
  if (model.spec.kernel_table) {
    if (grid.neutrino.size() != model.grid.neutrino.size() || grid.massive.size() != model.grid.massive.size() ||
        grid.boson.size() != model.grid.boson.size()) {
      throw Error(ErrorCode::ShapeMismatch, "model", "kernels_on", "kernel tables cannot be resampled");
    }
    return model.kernels;
  }
  return sample_kernel(model.spec.family, effective_params(model.spec), grid, model.spec.physics.species);
}

Model build_model(const ModelSpec& spec, RunMode mode) {
  Model m;
  m.spec = spec;
  m.grid = build_mode_grid(spec.grid);
  const int species = spec.physics.species;
  if (spec.kernel_table) {
    std::ifstream in(*spec.kernel_table);
    if (!in) throw Error(ErrorCode::IoError, "model", "build_model", "cannot open kernel table " + *spec.kernel_table);
    m.kernels = read_kernel_table(in, m.grid, species);
  } else {
    m.kernels = sample_kernel(spec.family, effective_params(spec), m.grid, species);
  }
  m.hypotheses = check_hypotheses(m.kernels, spec.physics.lambda, spec.hypotheses);
  PhysicsParams physics = spec.physics;
  if (spec.optimize_beta_eta) {
    const BetaEtaOptimum opt = optimize_beta_eta(m.hypotheses, physics, spec.beta_eta_grid);
    physics.beta = opt.beta;
    physics.eta = opt.eta;
    m.spec.physics = physics;
  }
  m.ledger = compute_ledger(m.hypotheses, physics, spec.nmax, mode);
  return m;
}

}  // namespace wdecay
