#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wdecay/fock.hpp"
#include "wdecay/grid.hpp"
#include "wdecay/smooth.hpp"
#include "wdecay/sparse.hpp"

namespace wdecay {

enum class KernelFamily { Gaussian, Singular, Zero };
std::string to_string(KernelFamily family);
KernelFamily family_from_string(const std::string& name);

struct KernelParams {
  double amplitude = 1.0;
  double width = 1.0;
  bool uv_cutoff = true;
  double lambda = 2.0;  // UV support bound; smooth cutoff chi_{lambda/2} on |p2|
  bool physical_helicity = false;
  std::array<double, 2> alpha_weights{1.0, 1.0};
};

// G^{(alpha)}_{l, eps, -eps}: massive lepton block b_{l,eps}, neutrino block c_{l,-eps}, boson a_eps
struct KernelBlock {
  int alpha = 1;
  int species = 0;
  Charge charge = Charge::Plus;
  std::vector<cplx> value;
  std::vector<cplx> r_d1;   // r d/dr along |p2|
  std::vector<cplx> r2_d2;  // r^2 d^2/dr^2 along |p2|
};

struct KernelOrigin {
  KernelFamily family;
  KernelParams params;
  ModeGrid grid;
  int species;
};

class KernelSet {
 public:
  std::size_t n1 = 0, n2 = 0, n3 = 0;
  std::vector<double> r1, r2, r3;
  std::vector<double> w1, w2, w3;
  std::vector<double> s2;  // neutrino label value per mode
  std::size_t shells2 = 0;  // neutrino shells per label
  std::vector<KernelBlock> blocks;
  bool has_derivatives = false;
  bool physical_helicity = false;
  std::optional<double> uv_lambda;
  std::optional<KernelOrigin> origin;

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n2 + j) * n3 + k; }
  std::size_t size() const { return n1 * n2 * n3; }
  int species() const;
  const KernelBlock& block(int alpha, int species, Charge charge) const;
  KernelBlock& block(int alpha, int species, Charge charge);
  double scale(std::size_t i, std::size_t j, std::size_t k) const;
  cplx normalized(const KernelBlock& b, std::size_t i, std::size_t j, std::size_t k) const {
    return b.value[index(i, j, k)] * scale(i, j, k);
  }
  bool is_zero() const;
};

KernelSet empty_kernel_set(const ModeGrid& grid, int species);
KernelSet sample_kernel(KernelFamily family, const KernelParams& params, const ModeGrid& grid, int species);

KernelSet apply_cutoff(const KernelSet& k, double sigma, Cutoff which);
// Multiplies by the indicator lo <= |p2| <= hi.
KernelSet apply_window(const KernelSet& k, double lo, double hi);
// Keeps the listed neutrino modes (as produced by restrict_neutrinos on the grid).
KernelSet restrict_kernel(const KernelSet& k, const ModeGrid& restricted, const std::vector<std::size_t>& kept);

// Weighted discrete norm (sum |G|^2 w1 w2 w3 f(r1, r2, r3))^{1/2} over all blocks.
double weighted_norm(const KernelSet& k, const std::function<double(double, double, double)>& f);
double kernel_norm(const KernelSet& k);        // K(G)
double kernel_norm_tilde(const KernelSet& k);  // with |G|^2 / |p2|^2
double block_norm(const KernelSet& k, const KernelBlock& b);
// (sum_{i,k} |normalized G_{ijk}|^2)^{1/2} at fixed neutrino mode j
double slice_norm_neutrino(const KernelSet& k, const KernelBlock& b, std::size_t j);
// (sum_{i,j} |normalized G_{ijk}|^2)^{1/2} at fixed boson mode k
double slice_norm_boson(const KernelSet& k, const KernelBlock& b, std::size_t kk);

struct HypothesisOptions {
  double divergence_factor = 1.5;
  int refinement_levels = 3;
};

struct HypothesisReport {
  double K = 0.0;
  double K_tilde = 0.0;
  double ir_integral = 0.0;  // (i): sum |G|^2 / |p2|^2
  std::vector<double> ir_refinement;
  double C_ir = 0.0;  // (ii)
  std::vector<double> C_refinement;
  double d1_norm = 0.0;  // (iii.a)
  double d2_norm = 0.0;  // (iii.b)
  double uv_max = 0.0;   // (iv): max |G| over |p2| >= Lambda
  double lambda = 0.0;
  bool ir_ok = true;
  bool ir2_ok = true;
  bool derivatives_ok = true;
  bool uv_ok = true;

  bool all_ok() const { return ir_ok && ir2_ok && derivatives_ok && uv_ok; }
};

HypothesisReport check_hypotheses(const KernelSet& k, double lambda, const HypothesisOptions& opts = {});
nlohmann::json to_json(const HypothesisReport& r);

// Applies a one-particle matrix over neutrino modes to the normalized kernel along the p2 slot.
KernelSet apply_generator_to_kernel(const KernelSet& k, const Eigen::MatrixXcd& generator);

enum class GeneratorPart { Full, Upper, Lower };
// -i a_v G = v (r dG/dr) + (3/2 v + r v'/2) G for the vector field v(p) p, analytic in r.
KernelSet apply_formula_generator(const KernelSet& k, GeneratorPart part, double sigma);
// v(r) for the split: 1, (eta^sigma)^2 or (eta_sigma)^2
Jet2 generator_profile(GeneratorPart part, double sigma, double r);

void write_kernel_table(std::ostream& os, const KernelSet& k);
KernelSet read_kernel_table(std::istream& is, const ModeGrid& grid, int species);

}  // namespace wdecay
