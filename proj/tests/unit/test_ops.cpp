#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "wdecay/checks.hpp"
#include "wdecay/ops.hpp"

using namespace wdecay;

namespace {

FockBasis basis_of(const Model& m) { return FockBasis::enumerate(m.grid, m.spec.physics.species, m.spec.caps); }

// sum_ijk G_ijk b*_i c*_j a_k (or a*_k) from single-mode ladder matrices
Eigen::MatrixXcd brute_triple(const FockBasis& b, const KernelSet& k, int alpha, int species, Charge eps) {
  const KernelBlock& kb = k.block(alpha, species, eps);
  const std::size_t n = b.dimension();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < k.n1; ++i) {
    const Eigen::MatrixXcd bi = creation_matrix(b, b.mode(massive_block(eps), species, i)).to_dense();
    for (std::size_t j = 0; j < k.n2; ++j) {
      const Eigen::MatrixXcd cj = creation_matrix(b, b.mode(neutrino_block(opposite(eps)), species, j)).to_dense();
      for (std::size_t kk = 0; kk < k.n3; ++kk) {
        const std::size_t bm = b.mode(boson_block(eps), -1, kk);
        const Eigen::MatrixXcd ak =
            (alpha == 1 ? annihilation_matrix(b, bm) : creation_matrix(b, bm)).to_dense();
        out += k.normalized(kb, i, j, kk) * (bi * cj * ak);
      }
    }
  }
  return out;
}

}  // namespace

TEST(Ops, H0DiagonalMatchesDispersionOracle) {
  const Model& m = fixture::small_model();
  const FockBasis b = basis_of(m);
  const Masses& ms = m.spec.physics.masses;
  const std::vector<double> d = h0_diagonal(b, ms);
  for (std::size_t s = 0; s < b.dimension(); ++s) {
    double e = 0.0;
    for (std::size_t mode = 0; mode < b.total_modes(); ++mode) {
      const unsigned occ = b.occupation(b.state(s), mode);
      if (!occ) continue;
      const Block& blk = b.block_of_mode(mode);
      const ChannelGrid& ch = m.grid.channel(blk.channel);
      const double r = ch.radius(mode - blk.first);
      const double mass = blk.channel == ChannelKind::MassiveLepton ? ms.lepton(blk.species)
                          : blk.channel == ChannelKind::Boson      ? ms.mW
                                                                    : 0.0;
      e += occ * std::sqrt(r * r + mass * mass);
    }
    EXPECT_NEAR(d[s], e, 1e-12);
  }
}

TEST(Ops, TripleTermMatchesLadderProducts) {
  const Model& m = fixture::small_model();
  const FockBasis b = basis_of(m);
  for (int alpha : {1, 2}) {
    for (Charge eps : {Charge::Plus, Charge::Minus}) {
      const Eigen::MatrixXcd t = assemble_triple_term(b, m.kernels, alpha, 0, eps).to_dense();
      EXPECT_LT((t - brute_triple(b, m.kernels, alpha, 0, eps)).cwiseAbs().maxCoeff(), 1e-14)
          << "alpha " << alpha << " eps " << sign_of(eps);
    }
  }
}

TEST(Ops, InteractionIsSumOfTermsPlusAdjoints) {
  const Model& m = fixture::small_model();
  const FockBasis b = basis_of(m);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(b.dimension()), static_cast<Eigen::Index>(b.dimension()));
  for (int alpha : {1, 2}) {
    for (Charge eps : {Charge::Plus, Charge::Minus}) {
      const Eigen::MatrixXcd t = assemble_triple_term(b, m.kernels, alpha, 0, eps).to_dense();
      sum += t + t.adjoint();
    }
  }
  const SparseMatrix hi = assemble_interaction(b, m.kernels);
  EXPECT_LT((hi.to_dense() - sum).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(hi.hermiticity_defect(), 0.0);
}

TEST(Ops, SerialAndParallelAssemblyAgree) {
  const Model& m = fixture::small_model();
  const FockBasis b = basis_of(m);
  const SparseMatrix s = assemble_interaction(b, m.kernels, Execution::Serial);
  const SparseMatrix p = assemble_interaction(b, m.kernels, Execution::Parallel);
  EXPECT_EQ(s.nnz(), p.nnz());
  EXPECT_EQ(linear_combination(1.0, s, -1.0, p).max_abs(), 0.0);
}

TEST(Ops, InteractionChangesChargeConsistently) {
  // lepton number N(b+) - N(b-) + N(c+) - N(c-) is conserved
  const Model& m = fixture::small_model();
  const FockBasis b = basis_of(m);
  const SparseMatrix hi = assemble_interaction(b, m.kernels);
  auto charge = [&](const FockState& s) {
    const int p = static_cast<int>(b.block_occupation(s, b.block(BlockKind::MassiveParticle, 0)));
    const int a = static_cast<int>(b.block_occupation(s, b.block(BlockKind::MassiveAntiparticle, 0)));
    const int nu = static_cast<int>(b.block_occupation(s, b.block(BlockKind::Neutrino, 0)));
    const int anu = static_cast<int>(b.block_occupation(s, b.block(BlockKind::Antineutrino, 0)));
    return p - a + nu - anu;
  };
  for (std::size_t r = 0; r < hi.rows(); ++r) {
    for (std::size_t p = hi.row_ptr()[r]; p < hi.row_ptr()[r + 1]; ++p) {
      const std::size_t c = hi.col_index()[p];
      EXPECT_EQ(charge(b.state(r)) - charge(b.state(c)), 0) << r << " " << c;
    }
  }
}

TEST(Ops, SmearedCreationNormEqualsVectorNorm) {
  const Model& m = fixture::small_model();
  const FockBasis b = basis_of(m);
  std::mt19937_64 rng(5);
  const std::size_t blk = b.block_index(BlockKind::Neutrino, 0);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXcd phi = 2.0 * random_unit_vector(b.blocks()[blk].count, rng);
    EXPECT_NEAR(spectral_norm(smeared_creation(b, blk, phi)), 2.0, 1e-10);
  }
}

TEST(Ops, DGammaOfIdentityIsNumberOperator) {
  const Model& m = fixture::small_model();
  const FockBasis b = basis_of(m);
  const std::size_t blk = b.block_index(BlockKind::Neutrino, 0);
  const auto n = static_cast<Eigen::Index>(b.blocks()[blk].count);
  const SparseMatrix d = assemble_dgamma(b, Eigen::MatrixXcd::Identity(n, n), blk);
  for (std::size_t s = 0; s < b.dimension(); ++s) {
    EXPECT_EQ(d.coeff(s, s).real(), b.block_occupation(b.state(s), b.blocks()[blk]));
  }
}
