#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wdecay/cascade.hpp"
#include "wdecay/kernels.hpp"
#include "wdecay/model.hpp"
#include "wdecay/sparse.hpp"

namespace wdecay {

// Symmetrized dilation generator (i/2)(R_v D + D R_v) on the neutrino channel, one label block per label.
// Edge (j, j+1) carries i (r_j + r_{j+1}) / (4 (r_{j+1} - r_j)) times v at the lower radius.
Eigen::MatrixXcd dilation_one_particle(const ChannelGrid& neutrino, GeneratorPart part = GeneratorPart::Full,
                                       double sigma = 1.0);

struct GeneratorBundle {
  std::optional<double> sigma;
  Eigen::MatrixXcd a, a_upper, a_lower;
  SparseMatrix A, A_upper, A_lower;

  const SparseMatrix& second_quantized(GeneratorPart part) const;
};

GeneratorBundle build_dilation_generator(const FockBasis& basis, std::optional<double> sigma);

// i (H A - A H)
SparseMatrix commutator(const SparseMatrix& h, const SparseMatrix& a);
Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& a);

// dGamma(v w) + g H_I(-i a_v G) with v selected by part.
SparseMatrix formula_commutator(const FockBasis& basis, const KernelSet& kernels, GeneratorPart part, double sigma,
                                double g);

// |<psi, [H, iA] psi>|; NotAnEigenpair when ||H psi - E psi|| exceeds tol * max(1, ||H||).
double virial_check(const SparseMatrix& h, double energy, const Eigen::VectorXcd& psi, const SparseMatrix& a,
                    double tol = 1e-6);

// Test vector sin^2(pi r / pmax) on every label.
Eigen::VectorXcd smooth_test_vector(const ChannelGrid& neutrino);
// ||(i[w, a] - w) u|| / ||w u||
double dilation_identity_residual(const ChannelGrid& neutrino, const Eigen::VectorXcd& u);
// ||i[w, a] - w|| / ||w|| in operator norm
double dilation_identity_norm(const ChannelGrid& neutrino);

// max_n sigma_n^-1 sum |sum_alpha a eta_sigma_n G^(alpha)|^2 / (w3 |p2|) with the formula generator
double measure_C_G(const Model& model);

struct ConvergencePoint {
  std::size_t shells = 0;
  double dilation_residual = 0.0;  // strong form on the smooth test vector
  double dilation_norm = 0.0;      // operator norm, informational
  double commutator_distance = 0.0;  // ||i[H_I, A] - H_I(formula)|| / ||H_I(formula)||
};

// Resamples the model's kernel family with the neutrino channel at each shell count; caps forced to 1.
std::vector<ConvergencePoint> discretization_convergence(const ModelSpec& spec, const std::vector<std::size_t>& shells);
nlohmann::json to_json(const ConvergencePoint& p);

enum class CommutatorMode { Algebraic, Formula };
std::string to_string(CommutatorMode mode);
CommutatorMode commutator_mode_from_string(const std::string& name);

struct MourreOptions {
  CommutatorMode mode = CommutatorMode::Algebraic;
  std::optional<double> C_delta_user;
  std::size_t dense_limit = kDenseLimit;
};

struct MourreReport {
  int n = 0;
  double sigma = 0.0;
  double g = 0.0;
  CommutatorMode mode = CommutatorMode::Algebraic;
  double virial = 0.0;
  double virial_scale = 0.0;  // ||H^n|| ||A^n||
  bool virial_ok = false;
  double formula_distance = 0.0;  // ||[H, iA_n] - formula|| / ||H||
  double c_target = 0.0;          // C~_delta gamma^2 N^-2 sigma_n
  double tolerance = 0.0;
  std::size_t f_range = 0;
  double m1_min = 0.0;
  bool m1_ok = false;
  double C_tilde_measured = 0.0;
  double C_delta = 0.0;
  std::size_t window_range = 0;
  double m2_min = 0.0;
  bool m2_ok = false;
  std::optional<double> m2_min_user;
  std::optional<bool> m2_ok_user;
};

// Full-grid Hamiltonian and spectrum shared by every stage.
struct MourreWorkspace {
  double g = 0.0;
  FockBasis full;
  SparseMatrix h;
  DenseSpectrum spec;
};
MourreWorkspace mourre_workspace(const Model& model, double g, std::size_t dense_limit = kDenseLimit);

MourreReport mourre_positivity(const Model& model, int n, double g, const MourreOptions& opts = {});
MourreReport mourre_positivity(const Model& model, int n, const MourreWorkspace& ws, const MourreOptions& opts = {});

struct ProbeRow {
  double lambda;
  double epsilon;
  double norm;
};
struct ProbeTable {
  double s = 1.0;
  std::vector<ProbeRow> rows;
  std::vector<bool> monotone;  // per lambda: norm nondecreasing as epsilon decreases
};

// ||<A>^-s (H - lambda - i eps)^-1 <A>^-s|| on the dense path.
ProbeTable resolvent_probe(const SparseMatrix& h, const SparseMatrix& a, const std::vector<double>& lambdas,
                           std::vector<double> epsilons, double s, std::size_t limit = 2000);

nlohmann::json to_json(const MourreReport& r);
nlohmann::json to_json(const ProbeTable& t);
void write_probe_csv(std::ostream& os, const ProbeTable& t);

}  // namespace wdecay
