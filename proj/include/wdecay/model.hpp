#pragma once

#include <optional>
#include <string>

#include "wdecay/constants.hpp"
#include "wdecay/fock.hpp"
#include "wdecay/grid.hpp"
#include "wdecay/kernels.hpp"

namespace wdecay {

struct ModelSpec {
  PhysicsParams physics;
  GridSpec grid;
  TruncationCaps caps;
  KernelFamily family = KernelFamily::Gaussian;
  KernelParams kernel;
  std::optional<std::string> kernel_table;  // overrides family when set
  bool optimize_beta_eta = false;
  BetaEtaGrid beta_eta_grid;
  HypothesisOptions hypotheses;
  int nmax = 5;
};

struct Model {
  ModelSpec spec;
  ModeGrid grid;
  KernelSet kernels;
  HypothesisReport hypotheses;
  ConstantLedger ledger;
};

// Samples or reads the kernels, checks the hypotheses and evaluates the constant chain.
Model build_model(const ModelSpec& spec, RunMode mode);

// Same kernel family sampled on another grid. Tables only exist on the configured grid (ShapeMismatch otherwise).
KernelSet kernels_on(const Model& model, const ModeGrid& grid);

}  // namespace wdecay
