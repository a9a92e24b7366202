#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wdecay/fock.hpp"
#include "wdecay/kernels.hpp"
#include "wdecay/sparse.hpp"

namespace wdecay {

struct Masses {
  double m1 = 1.0;
  double m2 = 2.0;
  double m3 = 3.0;
  double mW = 80.0;

  double lepton(int species) const { return species == 0 ? m1 : species == 1 ? m2 : m3; }
};

// Emits (target state, coefficient) for the image of one basis state.
using Emit = std::function<void(const FockState&, cplx)>;
using ColumnAction = std::function<void(const FockState&, const Emit&)>;

// Builds the matrix whose column j is the action applied to basis state j; targets outside the basis are dropped.
SparseMatrix assemble_operator(const FockBasis& basis, const ColumnAction& action, bool hermitian,
                               Execution exec = Execution::Parallel);

enum class NeutrinoRange { All, Above, AtOrBelow };

struct ChannelMask {
  bool massive = true;
  bool neutrino = true;
  bool boson = true;
  NeutrinoRange range = NeutrinoRange::All;
  double sigma = 0.0;  // neutrino modes with radius > sigma (Above) or <= sigma (AtOrBelow)
  std::optional<int> species;
  std::optional<Charge> boson_charge;

  static ChannelMask all() { return {}; }
  static ChannelMask only_massive() { return {true, false, false, NeutrinoRange::All, 0.0, std::nullopt, std::nullopt}; }
  static ChannelMask only_neutrino() { return {false, true, false, NeutrinoRange::All, 0.0, std::nullopt, std::nullopt}; }
  static ChannelMask only_boson() { return {false, false, true, NeutrinoRange::All, 0.0, std::nullopt, std::nullopt}; }
};

// Diagonal of H0 restricted by the mask.
std::vector<double> h0_diagonal(const FockBasis& basis, const Masses& masses, const ChannelMask& mask = {});
SparseMatrix assemble_h0(const FockBasis& basis, const Masses& masses, const ChannelMask& mask = {},
                         Execution exec = Execution::Parallel);
SparseMatrix assemble_number(const FockBasis& basis, const std::vector<std::size_t>& block_indices);
SparseMatrix massive_number(const FockBasis& basis, int species);

// Creation-type triple term T = sum G b*_{l,eps} c*_{l,-eps} a_eps (alpha=1) or a*_eps (alpha=2), without adjoint.
SparseMatrix assemble_triple_term(const FockBasis& basis, const KernelSet& kernels, int alpha, int species,
                                  Charge charge, Execution exec = Execution::Parallel);
// H_I = sum over terms of T + T^dagger.
SparseMatrix assemble_interaction(const FockBasis& basis, const KernelSet& kernels,
                                  Execution exec = Execution::Parallel);
// Lepton pair creator P(k) = sum_{ij} G_{ijk} b*_i c*_j at fixed boson mode k.
SparseMatrix assemble_pair_creator(const FockBasis& basis, const KernelSet& kernels, int alpha, int species,
                                   Charge charge, std::size_t boson_mode);
// sum_{ij} X_ij c*_i c_j over one block; X indexed by the block's local modes.
SparseMatrix assemble_dgamma(const FockBasis& basis, const Eigen::MatrixXcd& one_particle, std::size_t block_index,
                             Execution exec = Execution::Parallel);
// Same one-particle matrix on every neutrino and antineutrino block.
SparseMatrix assemble_neutrino_dgamma(const FockBasis& basis, const Eigen::MatrixXcd& one_particle,
                                      Execution exec = Execution::Parallel);

SparseMatrix total_hamiltonian(const SparseMatrix& h0, const SparseMatrix& hI, double g);

SparseMatrix creation_matrix(const FockBasis& basis, std::size_t mode);
SparseMatrix annihilation_matrix(const FockBasis& basis, std::size_t mode);
// b*(phi) = sum_i phi_i b*_i over one block
SparseMatrix smeared_creation(const FockBasis& basis, std::size_t block_index, const Eigen::VectorXcd& phi);

// V_j = [H_I, c_j] for a neutrino-channel mode (global mode id), without the coupling factor.
SparseMatrix assemble_pull_through_vertex(const FockBasis& basis, const KernelSet& kernels, std::size_t mode);

std::vector<double> thresholds(const Masses& masses, int max_total);

}  // namespace wdecay
