#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wdecay/model.hpp"
#include "wdecay/ops.hpp"
#include "wdecay/spectral.hpp"

namespace wdecay {

// Kernels multiplied by the smooth infrared cutoff at sigma (full neutrino grid).
KernelSet cut_kernels(const KernelSet& k, double sigma);

// H^n on the space of neutrino modes with radius >= sigma_n.
struct Stage {
  int n = 0;
  double sigma = 0.0;
  ModeGrid grid;
  std::vector<std::size_t> kept;  // original neutrino mode of each retained mode
  KernelSet kernels;              // cut and restricted
  FockBasis basis;
  SparseMatrix h0;
  SparseMatrix hI;
  SparseMatrix h;
};

Stage build_stage(const Model& model, int n, double g, Execution exec = Execution::Parallel);
SparseMatrix build_truncated_hamiltonian(const Model& model, int n, double g);
// H_n = H0 + g H_I(cut kernels) on the basis of the full grid.
SparseMatrix cut_hamiltonian(const Model& model, const FockBasis& full, double sigma, double g,
                             Execution exec = Execution::Parallel);
SparseMatrix full_hamiltonian(const Model& model, const FockBasis& full, double g,
                              Execution exec = Execution::Parallel);

// Full basis state = sign * (hard state in the stage basis) x (soft neutrino state).
struct FactorMap {
  std::vector<std::size_t> hard;
  std::vector<FockState> soft;  // full-basis numbering, hard modes cleared
  std::vector<double> sign;
  std::vector<double> soft_energy;
};
FactorMap factorize(const FockBasis& full, const FockBasis& hard, const std::vector<std::size_t>& kept);

// max |full - (hard x 1 + 1 x soft_diag)| entrywise over the full basis; soft_diag = soft energy when add_soft.
double tensor_defect(const FactorMap& map, const SparseMatrix& full, const SparseMatrix& hard, bool add_soft);
// max |full - hard x f(soft energy)| entrywise.
double tensor_defect_dense(const FactorMap& map, const Eigen::MatrixXcd& full, const Eigen::MatrixXcd& hard,
                           const std::function<double(double)>& soft_factor);

// f_n(lambda) = f(lambda / sigma_n) with plateau [(gamma - eps)^2, gamma + eps].
Bump cascade_bump(const ConstantLedger& l, double sigma_n);

struct PullThroughResult {
  double max_residual = 0.0;  // max over modes of the pull-through residual
  double max_ratio = 0.0;     // max ||g V psi|| / bound
  std::size_t modes = 0;
};
PullThroughResult pull_through(const Stage& stage, const Masses& masses, double g, double energy,
                               const Eigen::VectorXcd& ground);

double neutrino_number(const FockBasis& basis, const Eigen::VectorXcd& psi);

struct StageReport {
  int n = 0;
  double sigma = 0.0;
  std::size_t dimension = 0;
  std::size_t retained_modes = 0;
  bool under_resolved = false;
  double energy = 0.0;
  double gap = 0.0;
  int multiplicity = 1;
  double residual = 0.0;
  std::string method;
  double h_norm = 0.0;
  double gap_bound = 0.0;
  double energy_bound = 0.0;
  std::optional<double> step;
  std::optional<double> step_bound;
  bool gap_ok = false;
  bool bracket_ok = false;
  bool step_ok = true;
  bool simple_ok = false;
  double h0_ground = 0.0;
  double h0_bound = 0.0;
  bool h0_bound_ok = false;
  double k_window = 0.0;
  double k_window_bound = 0.0;       // sigma_n K~
  double k_window_bound_gamma = 0.0;  // sup(4 Lambda gamma/(2 m1 - delta), 1) K~ sigma_{n+1}/gamma
  double soft_content = 0.0;
  std::optional<PullThroughResult> pull;
  bool pull_ok = true;
  bool vertex_bound_ok = true;
  std::optional<double> full_energy;  // E_n on the full grid
  std::optional<double> energy_match;
  std::optional<double> factorization_defect;
  std::optional<double> calculus_distance;

  bool certified() const { return gap_ok && bracket_ok && step_ok && simple_ok; }
};

struct CascadeOptions {
  bool full_space = true;
  bool pull_through = true;
  double pull_tolerance = 1e-8;
  SolverOptions solver;
};

struct CascadeReport {
  ConstantLedger ledger;
  double g = 0.0;
  std::vector<StageReport> stages;
  std::vector<bool> interlacing;
  std::optional<double> full_energy;
  std::optional<double> energy_D;
  std::optional<double> energy_slope;
  std::optional<double> calculus_C;
  bool verdict = false;

  std::vector<std::pair<std::string, bool>> verdicts() const;
};

CascadeReport run_cascade(const Model& model, double g, RunMode mode, const CascadeOptions& opts = {});
std::vector<bool> interlacing_check(const std::vector<StageReport>& stages, const ConstantLedger& l, double g);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// <N_nu> of the stage ground state for each g.
std::vector<double> soft_content_sweep(const Model& model, int n, const std::vector<double>& gs);

nlohmann::json to_json(const StageReport& s);
nlohmann::json to_json(const CascadeReport& r);
void write_cascade_csv(std::ostream& os, const CascadeReport& r);

}  // namespace wdecay
