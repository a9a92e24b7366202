#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "wdecay/spectral.hpp"

using namespace wdecay;

namespace {

Eigen::MatrixXcd random_hermitian(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  }
  return 0.5 * (a + a.adjoint());
}

SparseMatrix banded_hermitian(std::size_t n) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, std::cos(0.37 * static_cast<double>(i)) + 0.01 * static_cast<double>(i)});
    if (i + 1 < n) {
      const cplx v(0.3, 0.1 * std::sin(static_cast<double>(i)));
      t.push_back({i, i + 1, v});
      t.push_back({i + 1, i, std::conj(v)});
    }
  }
  return SparseMatrix::from_triplets(n, n, t, true);
}

}  // namespace

TEST(Spectral, DenseSpectrumDiagonalizes) {
  const Eigen::MatrixXcd h = random_hermitian(30, 3);
  const DenseSpectrum s = dense_spectrum(h);
  const Eigen::MatrixXcd rec = s.vectors * s.values.asDiagonal() * s.vectors.adjoint();
  EXPECT_LT((rec - h).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index i = 1; i < s.values.size(); ++i) EXPECT_LE(s.values[i - 1], s.values[i]);
  EXPECT_NEAR(s.norm, s.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Spectral, LanczosMatchesDense) {
  const SparseMatrix h = banded_hermitian(400);
  const DenseSpectrum d = dense_spectrum(h);
  SolverOptions opts;
  opts.dense_limit = 10;
  const EigenResult it = ground_state(h, opts);
  EXPECT_EQ(it.method, "iterative");
  EXPECT_NEAR(it.energy, d.values[0], 1e-10);
  EXPECT_LT(it.residual, 1e-8);
  const EigenResult de = ground_state(h);
  EXPECT_EQ(de.method, "dense");
  EXPECT_NEAR(std::abs(dot(de.vector, it.vector)), 1.0, 1e-8);
}

TEST(Spectral, RayleighQuotientOfEigenvector) {
  const SparseMatrix h = banded_hermitian(50);
  const DenseSpectrum d = dense_spectrum(h);
  EXPECT_NEAR(rayleigh_quotient(h, d.vectors.col(3)), d.values[3], 1e-13);
  EXPECT_NEAR(rayleigh_quotient(h, 2.0 * d.vectors.col(3)), d.values[3], 1e-13);
}

TEST(Spectral, DegenerateGroundLevelHasZeroGap) {
  const SparseMatrix h = SparseMatrix::diagonal({-1.0, -1.0, 0.5, 2.0});
  const GapResult g = spectral_gap(dense_spectrum(h));
  EXPECT_EQ(g.multiplicity, 2);
  EXPECT_EQ(g.gap, 0.0);
  EXPECT_DOUBLE_EQ(g.next, 0.5);
  const EigenResult r = ground_state(h);
  EXPECT_EQ(r.multiplicity, 2);
}

TEST(Spectral, GapOfSimpleLevel) {
  const SparseMatrix h = SparseMatrix::diagonal({3.0, -2.0, 0.25, 1.0});
  const GapResult g = spectral_gap(dense_spectrum(h));
  EXPECT_EQ(g.multiplicity, 1);
  EXPECT_DOUBLE_EQ(g.gap, 2.25);
  const EigenResult r = ground_state(h);
  EXPECT_DOUBLE_EQ(r.energy, -2.0);
  EXPECT_NEAR(spectral_gap(h, r.energy).gap, 2.25, 1e-10);
}

TEST(Spectral, SmoothFunctionOfDiagonal) {
  const SparseMatrix h = SparseMatrix::diagonal({0.1, 0.7, 1.3});
  const Eigen::MatrixXcd f = smooth_function_of(h, [](double x) { return std::exp(-x); });
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(f(i, i).real(), std::exp(-h.coeff(i, i).real()), 1e-15);
  EXPECT_NEAR(f(0, 1).real(), 0.0, 1e-15);
}

TEST(Spectral, SmoothFunctionSquareIsProduct) {
  const DenseSpectrum s = dense_spectrum(random_hermitian(20, 5));
  const Eigen::MatrixXcd f = smooth_function_of(s, [](double x) { return std::tanh(x); });
  const Eigen::MatrixXcd f2 = smooth_function_of(s, [](double x) { return std::tanh(x) * std::tanh(x); });
  EXPECT_LT((f * f - f2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Spectral, ProjectionIsIdempotent) {
  const DenseSpectrum s = dense_spectrum(random_hermitian(25, 9));
  const Eigen::MatrixXcd p = spectral_projection(s, 0.0, -1.0, 1.0);
  EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXcd u = spectral_subspace(s, 0.0, -1.0, 1.0);
  EXPECT_LT((u * u.adjoint() - p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Spectral, FixPhaseMakesLargestComponentPositive) {
  Eigen::VectorXcd v(3);
  v << cplx(0.1, 0.2), cplx(0.0, -2.0), cplx(0.5, 0.0);
  fix_phase(v);
  EXPECT_NEAR(v[1].real(), 2.0, 1e-15);
  EXPECT_NEAR(v[1].imag(), 0.0, 1e-15);
  EXPECT_NEAR(v.norm(), std::sqrt(0.05 + 4.0 + 0.25), 1e-15);
}

TEST(Spectral, GroupLevels) {
  Eigen::VectorXd v(5);
  v << 0.0, 1e-13, 1.0, 1.0, 2.0;
  const std::vector<Level> l = group_levels(v, 1e-10);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0].multiplicity, 2);
  EXPECT_EQ(l[1].multiplicity, 2);
  EXPECT_EQ(l[2].multiplicity, 1);
}
