#include "wdecay/checks.hpp"

#include <algorithm>
#include <cmath>

#include "wdecay/errors.hpp"
#include "wdecay/ops.hpp"

namespace wdecay {

Eigen::VectorXcd random_unit_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    v[static_cast<Eigen::Index>(i)] = cplx(re, im);
  }
  return v / norm(v);
}

bool AlgebraReport::ok() const {
  return car_defect <= 1e-12 && car_zero_defect <= 1e-12 && cross_species_defect <= 1e-12 && ccr_defect <= 1e-12 &&
         mixed_defect <= 1e-12 && hermiticity <= 1e-12 && smeared_norm_defect <= 1e-10;
}

namespace {

// Columns whose fermion blocks are below cap and bosons below cap; on them every single creation stays in the basis.
std::vector<char> interior_columns(const FockBasis& basis) {
  std::vector<char> ok(basis.dimension(), 1);
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const FockState& s = basis.state(i);
    for (const Block& b : basis.blocks()) {
      if (b.fermionic) {
        if (b.cap < b.count && basis.block_occupation(s, b) >= b.cap) ok[i] = 0;
      } else {
        for (std::size_t m = b.first; m < b.first + b.count; ++m) {
          if (basis.occupation(s, m) >= b.cap) ok[i] = 0;
        }
      }
    }
  }
  return ok;
}

double column_defect(const SparseMatrix& m, const std::vector<char>& cols, cplx diagonal) {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t p = m.row_ptr()[r]; p < m.row_ptr()[r + 1]; ++p) {
      const std::size_t c = m.col_index()[p];
      if (!cols[c]) continue;
      const cplx expected = r == c ? diagonal : cplx(0.0);
      worst = std::max(worst, std::abs(m.values()[p] - expected));
    }
  }
  if (diagonal != cplx(0.0)) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (cols[c] && m.coeff(c, c) == cplx(0.0)) worst = std::max(worst, std::abs(diagonal));
    }
  }
  return worst;
}

SparseMatrix anticommutator(const SparseMatrix& a, const SparseMatrix& b) {
  return linear_combination(1.0, product(a, b), 1.0, product(b, a));
}

SparseMatrix bracket(const SparseMatrix& a, const SparseMatrix& b) {
  return linear_combination(1.0, product(a, b), -1.0, product(b, a));
}

}  // namespace

AlgebraReport check_algebra(const FockBasis& basis, const KernelSet& kernels, const Masses& masses, double g,
                            unsigned seed, int smeared_samples) {
  AlgebraReport r;
  r.dimension = basis.dimension();
  const std::vector<char> interior = interior_columns(basis);
  std::vector<char> all(basis.dimension(), 1);
  std::vector<SparseMatrix> c, cd;
  for (std::size_t m = 0; m < basis.total_modes(); ++m) {
    c.push_back(annihilation_matrix(basis, m));
    cd.push_back(creation_matrix(basis, m));
  }
  const std::size_t nf = basis.fermion_modes();
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t j = 0; j < nf; ++j) {
      const double d = column_defect(anticommutator(c[i], cd[j]), interior, i == j ? 1.0 : 0.0);
      r.car_defect = std::max(r.car_defect, d);
      if (basis.block_of_mode(i).species != basis.block_of_mode(j).species) {
        r.cross_species_defect = std::max(r.cross_species_defect, d);
      }
      if (j >= i) r.car_zero_defect = std::max(r.car_zero_defect, anticommutator(c[i], c[j]).max_abs());
    }
  }
  for (std::size_t k = nf; k < basis.total_modes(); ++k) {
    for (std::size_t l = nf; l < basis.total_modes(); ++l) {
      r.ccr_defect = std::max(r.ccr_defect, column_defect(bracket(c[k], cd[l]), interior, k == l ? 1.0 : 0.0));
      r.ccr_defect = std::max(r.ccr_defect, bracket(c[k], c[l]).max_abs());
    }
    for (std::size_t i = 0; i < nf; ++i) {
      r.mixed_defect = std::max(r.mixed_defect, column_defect(bracket(c[k], cd[i]), interior, 0.0));
      r.mixed_defect = std::max(r.mixed_defect, bracket(c[k], c[i]).max_abs());
    }
  }
  const SparseMatrix h0 = assemble_h0(basis, masses);
  const SparseMatrix hI = assemble_interaction(basis, kernels);
  const SparseMatrix h = total_hamiltonian(h0, hI, g);
  r.hermiticity = std::max({h0.hermiticity_defect(), hI.hermiticity_defect(), h.hermiticity_defect()});

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fermion_blocks;
  for (std::size_t b = 0; b < basis.blocks().size(); ++b) {
    if (basis.blocks()[b].fermionic && basis.blocks()[b].count > 0) fermion_blocks.push_back(b);
  }
  for (int s = 0; s < smeared_samples && !fermion_blocks.empty(); ++s) {
    const std::size_t b = fermion_blocks[static_cast<std::size_t>(s) % fermion_blocks.size()];
    const Eigen::VectorXcd phi = random_unit_vector(basis.blocks()[b].count, rng) * (0.5 + 0.1 * s);
    const double n = spectral_norm(smeared_creation(basis, b, phi));
    r.smeared_norm_defect = std::max(r.smeared_norm_defect, std::abs(n - norm(phi)));
    ++r.smeared_samples;
  }
  return r;
}

RatioStats ratio_stats(std::vector<double> ratios) {
  RatioStats s;
  s.samples = ratios.size();
  if (ratios.empty()) return s;
  std::sort(ratios.begin(), ratios.end());
  s.min = ratios.front();
  s.max = ratios.back();
  const std::size_t n = ratios.size();
  s.median = n % 2 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  return s;
}

bool BoundsReport::ok() const {
  return annihilation_pair.ok() && creation_pair.ok() && boson_annihilation.ok() && boson_creation.ok() &&
         relative_bound.ok() && number_defect <= 1e-12;
}

namespace {

double diag_norm(const std::vector<double>& d, const Eigen::VectorXcd& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) acc += d[i] * std::norm(v[static_cast<Eigen::Index>(i)]);
  return std::sqrt(acc);
}

std::vector<double> diagonal_of(const SparseMatrix& m) {
  std::vector<double> d(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m.coeff(i, i).real();
  return d;
}

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

BoundsReport verify_bounds(const Model& model, unsigned seed, int samples) {
  BoundsReport rep;
  const int species = model.spec.physics.species;
  const Masses& masses = model.spec.physics.masses;
  const KernelSet& k = model.kernels;
  std::mt19937_64 rng(seed);

  // lepton sector: pair operators at fixed boson mode
  {
    TruncationCaps caps = model.spec.caps;
    caps.boson = 0;
    const FockBasis lep = FockBasis::enumerate(model.grid, species, caps);
    std::vector<double> ann, cre;
    for (int l = 0; l < species; ++l) {
      const std::vector<double> nl = diagonal_of(massive_number(lep, l));
      std::vector<double> nl1(nl);
      for (double& x : nl1) x += 1.0;
      for (int alpha : {1, 2}) {
        for (Charge eps : {Charge::Plus, Charge::Minus}) {
          const KernelBlock& kb = k.block(alpha, l, eps);
          for (std::size_t kk = 0; kk < k.n3; ++kk) {
            const SparseMatrix p = assemble_pair_creator(lep, k, alpha, l, eps, kk);
            const SparseMatrix pa = p.adjoint();
            const double s = slice_norm_boson(k, kb, kk);
            for (int t = 0; t < samples; ++t) {
              const Eigen::VectorXcd phi = random_unit_vector(lep.dimension(), rng);
              ann.push_back(safe_ratio(norm(multiply(pa, phi)), s * diag_norm(nl, phi)));
              cre.push_back(safe_ratio(norm(multiply(p, phi)), s * diag_norm(nl1, phi)));
            }
          }
        }
      }
    }
    rep.annihilation_pair = ratio_stats(ann);
    rep.creation_pair = ratio_stats(cre);
  }

  const FockBasis basis = FockBasis::enumerate(model.grid, species, model.spec.caps);
  const SparseMatrix h0 = assemble_h0(basis, masses);
  const std::vector<double> h0d = diagonal_of(h0);
  std::vector<double> bann, bcre;
  for (int l = 0; l < species; ++l) {
    const std::vector<double> nl = diagonal_of(massive_number(basis, l));
    ChannelMask lm;
    lm.boson = false;
    lm.species = l;
    const std::vector<double> h0l = h0_diagonal(basis, masses, lm);
    for (std::size_t i = 0; i < nl.size(); ++i) {
      rep.number_defect = std::max(rep.number_defect, masses.lepton(l) * nl[i] - h0l[i]);
    }
    for (Charge eps : {Charge::Plus, Charge::Minus}) {
      ChannelMask bm = ChannelMask::only_boson();
      bm.boson_charge = eps;
      const std::vector<double> h3 = h0_diagonal(basis, masses, bm);
      std::vector<double> mixed(nl.size()), nl1(nl.size());
      for (std::size_t i = 0; i < nl.size(); ++i) {
        mixed[i] = (nl[i] + 1.0) * h3[i];
        nl1[i] = nl[i] + 1.0;
      }
      for (int alpha : {1, 2}) {
        const KernelBlock& kb = k.block(alpha, l, eps);
        double gw = 0.0, gg = 0.0;
        for (std::size_t i = 0; i < k.n1; ++i) {
          for (std::size_t j = 0; j < k.n2; ++j) {
            for (std::size_t kk = 0; kk < k.n3; ++kk) {
              const double a2 = std::norm(k.normalized(kb, i, j, kk));
              gg += a2;
              gw += a2 / std::sqrt(k.r3[kk] * k.r3[kk] + masses.mW * masses.mW);
            }
          }
        }
        const SparseMatrix t = assemble_triple_term(basis, k, alpha, l, eps);
        // alpha = 1 term is B* x a, its adjoint B x a*; alpha = 2 the other way round
        const SparseMatrix x_ann = alpha == 1 ? t : t.adjoint();
        const SparseMatrix x_cre = alpha == 1 ? t.adjoint() : t;
        for (int s = 0; s < samples; ++s) {
          const Eigen::VectorXcd psi = random_unit_vector(basis.dimension(), rng);
          const double m2 = std::pow(diag_norm(mixed, psi), 2);
          const double n2 = std::pow(diag_norm(nl1, psi), 2);
          const double lhs_a = std::pow(norm(multiply(x_ann, psi)), 2);
          bann.push_back(safe_ratio(lhs_a, gw * m2));
          const double lhs_c = std::pow(norm(multiply(x_cre, psi)), 2);
          for (double eta : {0.5, 1.0, 2.0}) bcre.push_back(safe_ratio(lhs_c, gw * m2 + gg * (eta * n2 + 0.25 / eta)));
        }
      }
    }
  }
  rep.boson_annihilation = ratio_stats(bann);
  rep.boson_creation = ratio_stats(bcre);

  const SparseMatrix hI = assemble_interaction(basis, k);
  const ConstantLedger& l = model.ledger;
  std::vector<double> rel;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXcd psi = random_unit_vector(basis.dimension(), rng);
    const double lhs = std::pow(norm(multiply(hI, psi)), 2);
    double h0n = 0.0;
    for (std::size_t i = 0; i < h0d.size(); ++i) h0n += h0d[i] * h0d[i] * std::norm(psi[static_cast<Eigen::Index>(i)]);
    const double rhs = l.K * l.K * (l.C_be * l.C_be * h0n + l.B_be * l.B_be);
    rel.push_back(safe_ratio(lhs, rhs));
  }
  rep.relative_bound = ratio_stats(rel);
  return rep;
}

nlohmann::json to_json(const AlgebraReport& r) {
  return {{"dimension", r.dimension},
          {"car_defect", r.car_defect},
          {"car_zero_defect", r.car_zero_defect},
          {"cross_species_defect", r.cross_species_defect},
          {"ccr_defect", r.ccr_defect},
          {"mixed_defect", r.mixed_defect},
          {"hermiticity", r.hermiticity},
          {"smeared_norm_defect", r.smeared_norm_defect},
          {"smeared_samples", r.smeared_samples},
          {"ok", r.ok()}};
}

nlohmann::json to_json(const RatioStats& r) {
  return {{"samples", r.samples}, {"min", r.min}, {"median", r.median}, {"max", r.max}, {"ok", r.ok()}};
}

nlohmann::json to_json(const BoundsReport& r) {
  return {{"pair_annihilation", to_json(r.annihilation_pair)},
          {"pair_creation", to_json(r.creation_pair)},
          {"boson_annihilation_term", to_json(r.boson_annihilation)},
          {"boson_creation_term", to_json(r.boson_creation)},
          {"relative_bound", to_json(r.relative_bound)},
          {"number_defect", r.number_defect},
          {"ok", r.ok()}};
}

}  // namespace wdecay
