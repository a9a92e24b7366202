#include "wdecay/ops.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "wdecay/errors.hpp"

namespace wdecay {

SparseMatrix assemble_operator(const FockBasis& basis, const ColumnAction& action, bool hermitian, Execution exec) {
  const std::size_t n = basis.dimension();
  if (exec == Execution::Serial) {
    std::vector<Triplet> t;
    for (std::size_t col = 0; col < n; ++col) {
      action(basis.state(col), [&](const FockState& target, cplx v) {
        if (auto row = basis.index(target)) t.push_back({*row, col, v});
      });
    }
    return SparseMatrix::from_triplets(n, n, std::move(t), hermitian);
  }
  std::vector<std::vector<Triplet>> local(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
  {
    std::vector<Triplet>& t = local[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n); ++c) {
      const std::size_t col = static_cast<std::size_t>(c);
      action(basis.state(col), [&](const FockState& target, cplx v) {
        if (auto row = basis.index(target)) t.push_back({*row, col, v});
      });
    }
  }
  std::vector<Triplet> all;
  for (auto& t : local) all.insert(all.end(), t.begin(), t.end());
  return SparseMatrix::from_triplets(n, n, std::move(all), hermitian);
}

namespace {

std::vector<double> mode_energies(const FockBasis& basis, const Masses& masses, const ChannelMask& mask) {
  const ModeGrid& g = basis.grid();
  std::vector<double> e(basis.total_modes(), 0.0);
  for (const Block& b : basis.blocks()) {
    for (std::size_t m = 0; m < b.count; ++m) {
      double v = 0.0;
      if (b.channel == ChannelKind::MassiveLepton) {
        if (!mask.massive || (mask.species && *mask.species != b.species)) continue;
        v = ChannelSpec::massive_lepton(masses.lepton(b.species)).dispersion(g.massive.radius(m));
      } else if (b.channel == ChannelKind::Neutrino) {
        if (!mask.neutrino || (mask.species && *mask.species != b.species)) continue;
        const double r = g.neutrino.radius(m);
        if (mask.range == NeutrinoRange::Above && !(r > mask.sigma)) continue;
        if (mask.range == NeutrinoRange::AtOrBelow && !(r <= mask.sigma)) continue;
        v = r;
      } else {
        if (!mask.boson) continue;
        if (mask.boson_charge && boson_block(*mask.boson_charge) != b.kind) continue;
        v = ChannelSpec::boson(masses.mW).dispersion(g.boson.radius(m));
      }
      e[b.first + m] = v;
    }
  }
  return e;
}

}  // namespace

std::vector<double> h0_diagonal(const FockBasis& basis, const Masses& masses, const ChannelMask& mask) {
  const std::vector<double> e = mode_energies(basis, masses, mask);
  std::vector<double> d(basis.dimension(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const FockState& s = basis.state(i);
    double acc = 0.0;
    for (std::size_t m = 0; m < basis.total_modes(); ++m) {
      const unsigned n = basis.occupation(s, m);
      if (n) acc += n * e[m];
    }
    d[i] = acc;
  }
  return d;
}

SparseMatrix assemble_h0(const FockBasis& basis, const Masses& masses, const ChannelMask& mask, Execution exec) {
  const std::vector<double> e = mode_energies(basis, masses, mask);
  return assemble_operator(
      basis,
      [&](const FockState& s, const Emit& emit) {
        double acc = 0.0;
        for (std::size_t m = 0; m < basis.total_modes(); ++m) {
          const unsigned n = basis.occupation(s, m);
          if (n) acc += n * e[m];
        }
        emit(s, acc);
      },
      true, exec);
}

SparseMatrix assemble_number(const FockBasis& basis, const std::vector<std::size_t>& block_indices) {
  for (std::size_t b : block_indices) {
    if (b >= basis.blocks().size()) throw Error(ErrorCode::UnknownBlock, "ops", "assemble_number", "block index out of range");
  }
  std::vector<double> d(basis.dimension(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t b : block_indices) d[i] += basis.block_occupation(basis.state(i), basis.blocks()[b]);
  }
  return SparseMatrix::diagonal(d);
}

SparseMatrix massive_number(const FockBasis& basis, int species) {
  return assemble_number(basis, {basis.block_index(BlockKind::MassiveParticle, species),
                                 basis.block_index(BlockKind::MassiveAntiparticle, species)});
}

namespace {

void check_shapes(const FockBasis& basis, const KernelSet& k, const char* op) {
  const ModeGrid& g = basis.grid();
  if (k.n1 != g.massive.size() || k.n2 != g.neutrino.size() || k.n3 != g.boson.size()) {
    throw Error(ErrorCode::ShapeMismatch, "ops", op, "kernel array shape does not match the basis grid");
  }
  if (k.species() < basis.species()) {
    throw Error(ErrorCode::ShapeMismatch, "ops", op, "kernel set has fewer species than the basis");
  }
}

void triple_action(const FockBasis& basis, const KernelSet& k, const KernelBlock& kb, const FockState& s,
                   const Emit& emit) {
  const Block& bm = basis.block(massive_block(kb.charge), kb.species);
  const Block& bn = basis.block(neutrino_block(opposite(kb.charge)), kb.species);
  const Block& bw = basis.block(boson_block(kb.charge), kb.species);
  for (std::size_t kk = 0; kk < k.n3; ++kk) {
    const auto t1 = kb.alpha == 1 ? basis.apply_annihilation(s, bw.first + kk) : basis.apply_creation(s, bw.first + kk);
    if (!t1) continue;
    for (std::size_t j = 0; j < k.n2; ++j) {
      const auto t2 = basis.apply_creation(t1->state, bn.first + j);
      if (!t2) continue;
      for (std::size_t i = 0; i < k.n1; ++i) {
        const cplx g = kb.value[k.index(i, j, kk)];
        if (g == cplx(0.0)) continue;
        const auto t3 = basis.apply_creation(t2->state, bm.first + i);
        if (!t3) continue;
        emit(t3->state, g * k.scale(i, j, kk) * (t1->amplitude * t2->amplitude * t3->amplitude));
      }
    }
  }
}

SparseMatrix with_adjoint(const SparseMatrix& t) {
  std::vector<Triplet> all = t.triplets();
  const std::size_t n = all.size();
  for (std::size_t i = 0; i < n; ++i) all.push_back({all[i].col, all[i].row, std::conj(all[i].value)});
  return SparseMatrix::from_triplets(t.rows(), t.cols(), std::move(all), true);
}

}  // namespace

SparseMatrix assemble_triple_term(const FockBasis& basis, const KernelSet& kernels, int alpha, int species,
                                  Charge charge, Execution exec) {
  check_shapes(basis, kernels, "assemble_triple_term");
  const KernelBlock& kb = kernels.block(alpha, species, charge);
  return assemble_operator(
      basis, [&](const FockState& s, const Emit& emit) { triple_action(basis, kernels, kb, s, emit); }, false, exec);
}

SparseMatrix assemble_interaction(const FockBasis& basis, const KernelSet& kernels, Execution exec) {
  check_shapes(basis, kernels, "assemble_interaction");
  std::vector<const KernelBlock*> active;
  for (const KernelBlock& b : kernels.blocks) {
    if (b.species < basis.species()) active.push_back(&b);
  }
  const SparseMatrix t = assemble_operator(
      basis,
      [&](const FockState& s, const Emit& emit) {
        for (const KernelBlock* b : active) triple_action(basis, kernels, *b, s, emit);
      },
      false, exec);
  return with_adjoint(t);
}

SparseMatrix assemble_pair_creator(const FockBasis& basis, const KernelSet& kernels, int alpha, int species,
                                   Charge charge, std::size_t boson_mode) {
  check_shapes(basis, kernels, "assemble_pair_creator");
  const KernelBlock& kb = kernels.block(alpha, species, charge);
  const Block& bm = basis.block(massive_block(charge), species);
  const Block& bn = basis.block(neutrino_block(opposite(charge)), species);
  return assemble_operator(
      basis,
      [&](const FockState& s, const Emit& emit) {
        for (std::size_t j = 0; j < kernels.n2; ++j) {
          const auto t2 = basis.apply_creation(s, bn.first + j);
          if (!t2) continue;
          for (std::size_t i = 0; i < kernels.n1; ++i) {
            const cplx g = kb.value[kernels.index(i, j, boson_mode)];
            if (g == cplx(0.0)) continue;
            const auto t3 = basis.apply_creation(t2->state, bm.first + i);
            if (!t3) continue;
            emit(t3->state, g * kernels.scale(i, j, boson_mode) * (t2->amplitude * t3->amplitude));
          }
        }
      },
      false, Execution::Serial);
}

SparseMatrix assemble_dgamma(const FockBasis& basis, const Eigen::MatrixXcd& x, std::size_t block_index, Execution exec) {
  if (block_index >= basis.blocks().size()) throw Error(ErrorCode::UnknownBlock, "ops", "assemble_dgamma", "block index out of range");
  const Block& b = basis.blocks()[block_index];
  if (static_cast<std::size_t>(x.rows()) != b.count || static_cast<std::size_t>(x.cols()) != b.count) {
    throw Error(ErrorCode::ShapeMismatch, "ops", "assemble_dgamma", "one-particle matrix does not match block size");
  }
  const bool herm = (x - x.adjoint()).cwiseAbs().maxCoeff() == 0.0;
  return assemble_operator(
      basis,
      [&](const FockState& s, const Emit& emit) {
        for (std::size_t j = 0; j < b.count; ++j) {
          const auto t1 = basis.apply_annihilation(s, b.first + j);
          if (!t1) continue;
          for (std::size_t i = 0; i < b.count; ++i) {
            const cplx v = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (v == cplx(0.0)) continue;
            const auto t2 = basis.apply_creation(t1->state, b.first + i);
            if (!t2) continue;
            emit(t2->state, v * (t1->amplitude * t2->amplitude));
          }
        }
      },
      herm, exec);
}

SparseMatrix assemble_neutrino_dgamma(const FockBasis& basis, const Eigen::MatrixXcd& x, Execution exec) {
  SparseMatrix total(basis.dimension(), basis.dimension());
  bool first = true;
  for (std::size_t bi = 0; bi < basis.blocks().size(); ++bi) {
    if (basis.blocks()[bi].channel != ChannelKind::Neutrino) continue;
    SparseMatrix part = assemble_dgamma(basis, x, bi, exec);
    total = first ? part : linear_combination(1.0, total, 1.0, part);
    first = false;
  }
  total.set_hermitian((x - x.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  return total;
}

SparseMatrix total_hamiltonian(const SparseMatrix& h0, const SparseMatrix& hI, double g) {
  if (h0.rows() != hI.rows() || h0.cols() != hI.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "ops", "total_hamiltonian", "H0 and H_I shapes differ");
  }
  if (g < 0.0) throw Error(ErrorCode::BadParameters, "ops", "total_hamiltonian", "coupling must be nonnegative");
  SparseMatrix h = linear_combination(1.0, h0, g, hI);
  h.set_hermitian(h0.hermitian() && hI.hermitian());
  return h;
}

SparseMatrix creation_matrix(const FockBasis& basis, std::size_t mode) {
  if (mode >= basis.total_modes()) throw Error(ErrorCode::UnknownMode, "ops", "creation_matrix", "mode out of range");
  return assemble_operator(
      basis,
      [&](const FockState& s, const Emit& emit) {
        if (auto t = basis.apply_creation(s, mode)) emit(t->state, t->amplitude);
      },
      false, Execution::Serial);
}

SparseMatrix annihilation_matrix(const FockBasis& basis, std::size_t mode) {
  if (mode >= basis.total_modes()) throw Error(ErrorCode::UnknownMode, "ops", "annihilation_matrix", "mode out of range");
  return assemble_operator(
      basis,
      [&](const FockState& s, const Emit& emit) {
        if (auto t = basis.apply_annihilation(s, mode)) emit(t->state, t->amplitude);
      },
      false, Execution::Serial);
}

SparseMatrix smeared_creation(const FockBasis& basis, std::size_t block_index, const Eigen::VectorXcd& phi) {
  const Block& b = basis.blocks().at(block_index);
  if (static_cast<std::size_t>(phi.size()) != b.count) {
    throw Error(ErrorCode::ShapeMismatch, "ops", "smeared_creation", "mode function size differs from block");
  }
  return assemble_operator(
      basis,
      [&](const FockState& s, const Emit& emit) {
        for (std::size_t i = 0; i < b.count; ++i) {
          if (auto t = basis.apply_creation(s, b.first + i)) emit(t->state, phi[static_cast<Eigen::Index>(i)] * t->amplitude);
        }
      },
      false, Execution::Serial);
}

SparseMatrix assemble_pull_through_vertex(const FockBasis& basis, const KernelSet& kernels, std::size_t mode) {
  check_shapes(basis, kernels, "assemble_pull_through_vertex");
  const Block& bn = basis.block_of_mode(mode);
  if (bn.channel != ChannelKind::Neutrino) {
    throw Error(ErrorCode::UnknownMode, "ops", "assemble_pull_through_vertex", "mode is not a neutrino mode");
  }
  const std::size_t j = mode - bn.first;
  const Charge neutrino_charge = bn.kind == BlockKind::Neutrino ? Charge::Plus : Charge::Minus;
  const Charge eps = opposite(neutrino_charge);
  const Block& bm = basis.block(massive_block(eps), bn.species);
  const Block& bw = basis.block(boson_block(eps), bn.species);
  return assemble_operator(
      basis,
      [&](const FockState& s, const Emit& emit) {
        for (int alpha : {1, 2}) {
          const KernelBlock& kb = kernels.block(alpha, bn.species, eps);
          for (std::size_t kk = 0; kk < kernels.n3; ++kk) {
            const auto t1 = alpha == 1 ? basis.apply_annihilation(s, bw.first + kk) : basis.apply_creation(s, bw.first + kk);
            if (!t1) continue;
            for (std::size_t i = 0; i < kernels.n1; ++i) {
              const cplx g = kb.value[kernels.index(i, j, kk)];
              if (g == cplx(0.0)) continue;
              const auto t2 = basis.apply_creation(t1->state, bm.first + i);
              if (!t2) continue;
              emit(t2->state, g * kernels.scale(i, j, kk) * (t1->amplitude * t2->amplitude));
            }
          }
        }
      },
      false, Execution::Serial);
}

std::vector<double> thresholds(const Masses& m, int max_total) {
  std::vector<double> t;
  for (int p = 0; p <= max_total; ++p) {
    for (int q = 0; p + q <= max_total; ++q) {
      for (int r = 0; p + q + r <= max_total; ++r) {
        for (int s = 0; p + q + r + s <= max_total; ++s) {
          if (p + q + r + s == 0) continue;
          t.push_back(p * m.m1 + q * m.m2 + r * m.m3 + s * m.mW);
        }
      }
    }
  }
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  for (double v : t) {
    if (out.empty() || std::abs(v - out.back()) > 1e-12 * std::max(1.0, std::abs(v))) out.push_back(v);
  }
  return out;
}

}  // namespace wdecay
