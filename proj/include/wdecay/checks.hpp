#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wdecay/fock.hpp"
#include "wdecay/kernels.hpp"
#include "wdecay/model.hpp"

namespace wdecay {

// Seeded normal components, then normalized.
Eigen::VectorXcd random_unit_vector(std::size_t n, std::mt19937_64& rng);

struct AlgebraReport {
  std::size_t dimension = 0;
  double car_defect = 0.0;        // {c_i, c_j*} - delta_ij on columns below every cap
  double car_zero_defect = 0.0;   // {c_i, c_j}
  double cross_species_defect = 0.0;
  double ccr_defect = 0.0;        // [a_k, a_l*] - delta_kl below the boson cap, [a_k, a_l]
  double mixed_defect = 0.0;      // bosons commute with fermions
  double hermiticity = 0.0;       // max over H0, H_I, H
  double smeared_norm_defect = 0.0;  // max | ||b*(phi)|| - ||phi|| |
  std::size_t smeared_samples = 0;

  bool ok() const;
};

AlgebraReport check_algebra(const FockBasis& basis, const KernelSet& kernels, const Masses& masses, double g,
                            unsigned seed, int smeared_samples = 20);

struct RatioStats {
  std::size_t samples = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;

  bool ok() const { return max <= 1.0 + 1e-12; }
};
RatioStats ratio_stats(std::vector<double> ratios);

struct BoundsReport {
  RatioStats annihilation_pair;  // ||B(k) Phi|| <= ||G(., ., k)|| ||N^1/2 Phi||
  RatioStats creation_pair;      // ||B(k)* Phi|| <= ||G(., ., k)|| ||(N + 1)^1/2 Phi||
  RatioStats boson_annihilation;  // sum_k B*(k) a(k)
  RatioStats boson_creation;      // sum_k B(k) a*(k), eta in {0.5, 1, 2}
  RatioStats relative_bound;      // ||H_I Psi||^2 <= K^2 (C^2 ||H0 Psi||^2 + B^2 ||Psi||^2)
  double number_defect = 0.0;     // max(m_l N_l - H_{0,l}) over states, should be <= 0

  bool ok() const;
};

BoundsReport verify_bounds(const Model& model, unsigned seed, int samples = 100);

nlohmann::json to_json(const AlgebraReport& r);
nlohmann::json to_json(const RatioStats& r);
nlohmann::json to_json(const BoundsReport& r);

}  // namespace wdecay
