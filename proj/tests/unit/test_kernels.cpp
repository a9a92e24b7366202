#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "wdecay/errors.hpp"
#include "wdecay/kernels.hpp"
#include "wdecay/smooth.hpp"

using namespace wdecay;

namespace {

// raw Gaussian family value, written out independently
double gaussian_raw(double r1, double r2, double r3, double width, double lambda) {
  const double w2 = width * width;
  return std::exp(-(r1 * r1 + r3 * r3) / w2) * std::sqrt(r2) * std::exp(-r2 * r2 / w2) * chi0(r2 / (0.5 * lambda));
}

}  // namespace

TEST(Kernels, GaussianSamplesMatchClosedForm) {
  const Model& m = fixture::small_model();
  const KernelSet& k = m.kernels;
  const KernelBlock& b = k.block(2, 0, Charge::Minus);
  for (std::size_t i = 0; i < k.n1; ++i) {
    for (std::size_t j = 0; j < k.n2; ++j) {
      for (std::size_t kk = 0; kk < k.n3; ++kk) {
        const double raw = gaussian_raw(k.r1[i], k.r2[j], k.r3[kk], 1.0, 2.0);
        EXPECT_NEAR(b.value[k.index(i, j, kk)].real(), raw, 1e-15);
        EXPECT_NEAR(k.normalized(b, i, j, kk).real(), raw * std::sqrt(k.w1[i] * k.w2[j] * k.w3[kk]), 1e-15);
      }
    }
  }
}

TEST(Kernels, RadialDerivativesMatchFiniteDifferences) {
  GridSpec g;
  g.shells = 5;
  const ModeGrid grid = build_mode_grid(g);
  KernelParams p;
  const KernelSet k = sample_kernel(KernelFamily::Gaussian, p, grid, 1);
  const KernelBlock& b = k.block(1, 0, Charge::Plus);
  const double h = 1e-5;
  for (std::size_t j = 0; j < k.n2; ++j) {
    const double r = k.r2[j];
    const double f = [&](double x) { return gaussian_raw(k.r1[0], x, k.r3[0], 1.0, 2.0); }(r);
    auto fx = [&](double x) { return gaussian_raw(k.r1[0], x, k.r3[0], 1.0, 2.0); };
    const double d1 = (fx(r + h) - fx(r - h)) / (2 * h);
    const double d2 = (fx(r + h) - 2 * f + fx(r - h)) / (h * h);
    EXPECT_NEAR(b.r_d1[k.index(0, j, 0)].real(), r * d1, 1e-7);
    EXPECT_NEAR(b.r2_d2[k.index(0, j, 0)].real(), r * r * d2, 1e-3);
  }
}

TEST(Kernels, TildeCutoffRemovesInfraredShells) {
  const Model& m = fixture::small_model();
  const double sigma = 0.5;
  const KernelSet c = apply_cutoff(m.kernels, sigma, Cutoff::TildeUpper);
  for (const KernelBlock& b : c.blocks) {
    for (std::size_t j = 0; j < c.n2; ++j) {
      const cplx orig = m.kernels.block(b.alpha, b.species, b.charge).value[c.index(0, j, 0)];
      if (c.r2[j] <= sigma) EXPECT_EQ(b.value[c.index(0, j, 0)], cplx(0.0));
      if (c.r2[j] >= 2 * sigma) EXPECT_EQ(b.value[c.index(0, j, 0)], orig);
    }
  }
}

TEST(Kernels, WindowIsIndicator) {
  const Model& m = fixture::small_model();
  const KernelSet w = apply_window(m.kernels, 0.5, 1.0);
  for (std::size_t j = 0; j < w.n2; ++j) {
    const bool inside = w.r2[j] >= 0.5 && w.r2[j] <= 1.0;
    const cplx v = w.blocks[0].value[w.index(0, j, 0)];
    if (!inside) EXPECT_EQ(v, cplx(0.0));
    if (inside) EXPECT_EQ(v, m.kernels.blocks[0].value[w.index(0, j, 0)]);
  }
}

TEST(Kernels, NormIsEuclideanNormOfNormalizedSamples) {
  const KernelSet& k = fixture::small_model().kernels;
  double acc = 0.0, acc_t = 0.0;
  for (const KernelBlock& b : k.blocks) {
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t j = 0; j < k.n2; ++j) {
        for (std::size_t kk = 0; kk < k.n3; ++kk) {
          const double a = std::norm(k.normalized(b, i, j, kk));
          acc += a;
          acc_t += a / (k.r2[j] * k.r2[j]);
        }
      }
    }
  }
  EXPECT_NEAR(kernel_norm(k), std::sqrt(acc), 1e-14);
  EXPECT_NEAR(kernel_norm_tilde(k), std::sqrt(acc_t), 1e-13);
}

TEST(Kernels, GaussianSatisfiesHypotheses) {
  const HypothesisReport r = check_hypotheses(fixture::small_model().kernels, 2.0);
  EXPECT_TRUE(r.all_ok());
  EXPECT_EQ(r.uv_max, 0.0);
}

TEST(Kernels, SingularFamilyFailsInfraredHypothesis) {
  GridSpec g;
  g.shells = 8;
  const KernelSet k = sample_kernel(KernelFamily::Singular, {}, build_mode_grid(g), 1);
  EXPECT_FALSE(check_hypotheses(k, 2.0).ir_ok);
}

TEST(Kernels, ZeroFamilyIsZero) {
  const KernelSet k = sample_kernel(KernelFamily::Zero, {}, build_mode_grid({}), 1);
  EXPECT_TRUE(k.is_zero());
  EXPECT_EQ(kernel_norm(k), 0.0);
}

TEST(Kernels, BadWidthRejected) {
  KernelParams p;
  p.width = 0.0;
  EXPECT_THROW(sample_kernel(KernelFamily::Gaussian, p, build_mode_grid({}), 1), Error);
}

TEST(Kernels, TableRoundTripIsExact) {
  const Model& m = fixture::small_model();
  std::stringstream ss;
  write_kernel_table(ss, m.kernels);
  const KernelSet back = read_kernel_table(ss, m.grid, 1);
  for (std::size_t b = 0; b < back.blocks.size(); ++b) EXPECT_EQ(back.blocks[b].value, m.kernels.blocks[b].value);
}

TEST(Kernels, IdentityGeneratorLeavesKernel) {
  const KernelSet& k = fixture::small_model().kernels;
  const auto n = static_cast<Eigen::Index>(k.n2);
  const KernelSet same = apply_generator_to_kernel(k, Eigen::MatrixXcd::Identity(n, n));
  for (std::size_t b = 0; b < k.blocks.size(); ++b) {
    for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(std::abs(same.blocks[b].value[i] - k.blocks[b].value[i]), 0.0, 1e-14);
  }
}

TEST(Kernels, FormulaGeneratorOnPureProfile) {
  // -i a G = r G' + 3/2 G for the full generator
  const KernelSet& k = fixture::small_model().kernels;
  const KernelSet a = apply_formula_generator(k, GeneratorPart::Full, 1.0);
  const KernelBlock& b = k.blocks[0];
  for (std::size_t j = 0; j < k.n2; ++j) {
    const std::size_t idx = k.index(0, j, 0);
    EXPECT_NEAR(std::abs(a.blocks[0].value[idx] - (b.r_d1[idx] + 1.5 * b.value[idx])), 0.0, 1e-14);
  }
}
