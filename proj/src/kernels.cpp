#include "wdecay/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "wdecay/errors.hpp"

namespace wdecay {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Singular: return "singular";
    case KernelFamily::Zero: return "zero";
  }
  return "unknown";
}

KernelFamily family_from_string(const std::string& name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "singular") return KernelFamily::Singular;
  if (name == "zero") return KernelFamily::Zero;
  throw Error(ErrorCode::BadFamilyParams, "kernels", "family_from_string", "unknown kernel family '" + name + "'");
}

int KernelSet::species() const {
  int s = 0;
  for (const KernelBlock& b : blocks) s = std::max(s, b.species + 1);
  return s;
}

const KernelBlock& KernelSet::block(int alpha, int species, Charge charge) const {
  for (const KernelBlock& b : blocks) {
    if (b.alpha == alpha && b.species == species && b.charge == charge) return b;
  }
  throw Error(ErrorCode::ShapeMismatch, "kernels", "block", "no kernel block for the requested indices");
}

KernelBlock& KernelSet::block(int alpha, int species, Charge charge) {
  return const_cast<KernelBlock&>(static_cast<const KernelSet&>(*this).block(alpha, species, charge));
}

double KernelSet::scale(std::size_t i, std::size_t j, std::size_t k) const { return std::sqrt(w1[i] * w2[j] * w3[k]); }

bool KernelSet::is_zero() const {
  for (const KernelBlock& b : blocks) {
    for (const cplx& v : b.value) {
      if (v != cplx(0.0)) return false;
    }
  }
  return true;
}

KernelSet empty_kernel_set(const ModeGrid& grid, int species) {
  KernelSet k;
  k.n1 = grid.massive.size();
  k.n2 = grid.neutrino.size();
  k.n3 = grid.boson.size();
  k.r1 = grid.massive.radii();
  k.r2 = grid.neutrino.radii();
  k.r3 = grid.boson.radii();
  k.w1 = grid.massive.weights();
  k.w2 = grid.neutrino.weights();
  k.w3 = grid.boson.weights();
  k.shells2 = grid.neutrino.shells.size();
  k.s2.resize(k.n2);
  for (std::size_t j = 0; j < k.n2; ++j) k.s2[j] = grid.neutrino.label_value(j);
  for (int l = 0; l < species; ++l) {
    for (int alpha : {1, 2}) {
      for (Charge c : {Charge::Plus, Charge::Minus}) {
        KernelBlock b;
        b.alpha = alpha;
        b.species = l;
        b.charge = c;
        b.value.assign(k.size(), 0.0);
        b.r_d1.assign(k.size(), 0.0);
        b.r2_d2.assign(k.size(), 0.0);
        k.blocks.push_back(std::move(b));
      }
    }
  }
  k.has_derivatives = true;
  return k;
}

namespace {

Jet2 radial_profile(KernelFamily family, const KernelParams& p, double r) {
  const Jet2 x = Jet2::variable(r);
  const double w2 = p.width * p.width;
  Jet2 h;
  if (family == KernelFamily::Gaussian) {
    h = pow(x, 0.5) * exp(-1.0 * (x * x) / w2);
  } else if (family == KernelFamily::Singular) {
    h = inverse(x) * exp(-1.0 * (x * x) / w2);
  } else {
    return Jet2::constant(0.0);
  }
  if (p.uv_cutoff) h = h * chi0(x / (0.5 * p.lambda));
  return h;
}

}  // namespace

KernelSet sample_kernel(KernelFamily family, const KernelParams& params, const ModeGrid& grid, int species) {
  if (!(params.width > 0.0)) throw Error(ErrorCode::BadFamilyParams, "kernels", "sample_kernel", "width must be positive");
  if (params.uv_cutoff && !(params.lambda > 0.0)) {
    throw Error(ErrorCode::BadFamilyParams, "kernels", "sample_kernel", "UV bound must be positive");
  }
  if (params.physical_helicity && grid.neutrino.labels != 2) {
    throw Error(ErrorCode::BadFamilyParams, "kernels", "sample_kernel", "physical helicity needs two neutrino labels");
  }
  KernelSet k = empty_kernel_set(grid, species);
  k.physical_helicity = params.physical_helicity;
  if (params.uv_cutoff) k.uv_lambda = params.lambda;
  k.origin = KernelOrigin{family, params, grid, species};
  const double w2 = params.width * params.width;
  std::vector<Jet2> prof(k.n2);
  for (std::size_t j = 0; j < k.n2; ++j) prof[j] = radial_profile(family, params, k.r2[j]);
  for (KernelBlock& b : k.blocks) {
    const double amp = params.amplitude * params.alpha_weights[static_cast<std::size_t>(b.alpha - 1)];
    const double forbidden = 0.5 * sign_of(b.charge);
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t j = 0; j < k.n2; ++j) {
        if (params.physical_helicity && k.s2[j] == forbidden) continue;
        const double r = k.r2[j];
        for (std::size_t kk = 0; kk < k.n3; ++kk) {
          const double outer = amp * std::exp(-(k.r1[i] * k.r1[i] + k.r3[kk] * k.r3[kk]) / w2);
          const std::size_t idx = k.index(i, j, kk);
          b.value[idx] = outer * prof[j].v;
          b.r_d1[idx] = outer * r * prof[j].d;
          b.r2_d2[idx] = outer * r * r * prof[j].dd;
        }
      }
    }
  }
  return k;
}

KernelSet apply_cutoff(const KernelSet& k, double sigma, Cutoff which) {
  KernelSet out = k;
  out.origin.reset();
  for (std::size_t j = 0; j < k.n2; ++j) {
    const double r = k.r2[j];
    const Jet2 c = cutoff_value(which, sigma, Jet2::variable(r));
    for (KernelBlock& b : out.blocks) {
      for (std::size_t i = 0; i < k.n1; ++i) {
        for (std::size_t kk = 0; kk < k.n3; ++kk) {
          const std::size_t idx = k.index(i, j, kk);
          const cplx g = b.value[idx];
          const cplx g1 = b.r_d1[idx];
          const cplx g2 = b.r2_d2[idx];
          b.value[idx] = c.v * g;
          if (k.has_derivatives) {
            b.r_d1[idx] = c.v * g1 + r * c.d * g;
            b.r2_d2[idx] = c.v * g2 + 2.0 * r * c.d * g1 + r * r * c.dd * g;
          }
        }
      }
    }
  }
  return out;
}

KernelSet apply_window(const KernelSet& k, double lo, double hi) {
  KernelSet out = k;
  out.origin.reset();
  for (std::size_t j = 0; j < k.n2; ++j) {
    if (k.r2[j] >= lo && k.r2[j] <= hi) continue;
    for (KernelBlock& b : out.blocks) {
      for (std::size_t i = 0; i < k.n1; ++i) {
        for (std::size_t kk = 0; kk < k.n3; ++kk) {
          const std::size_t idx = k.index(i, j, kk);
          b.value[idx] = b.r_d1[idx] = b.r2_d2[idx] = 0.0;
        }
      }
    }
  }
  return out;
}

KernelSet restrict_kernel(const KernelSet& k, const ModeGrid& restricted, const std::vector<std::size_t>& kept) {
  KernelSet out = empty_kernel_set(restricted, k.species());
  if (out.n2 != kept.size() || out.n1 != k.n1 || out.n3 != k.n3) {
    throw Error(ErrorCode::ShapeMismatch, "kernels", "restrict_kernel", "restricted grid does not match kept modes");
  }
  out.has_derivatives = k.has_derivatives;
  out.physical_helicity = k.physical_helicity;
  out.uv_lambda = k.uv_lambda;
  for (std::size_t bi = 0; bi < k.blocks.size(); ++bi) {
    const KernelBlock& src = k.blocks[bi];
    KernelBlock& dst = out.block(src.alpha, src.species, src.charge);
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t j = 0; j < kept.size(); ++j) {
        for (std::size_t kk = 0; kk < k.n3; ++kk) {
          const std::size_t a = k.index(i, kept[j], kk);
          const std::size_t b = out.index(i, j, kk);
          dst.value[b] = src.value[a];
          dst.r_d1[b] = src.r_d1[a];
          dst.r2_d2[b] = src.r2_d2[a];
        }
      }
    }
  }
  return out;
}

double weighted_norm(const KernelSet& k, const std::function<double(double, double, double)>& f) {
  double s = 0.0;
  for (const KernelBlock& b : k.blocks) {
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t j = 0; j < k.n2; ++j) {
        for (std::size_t kk = 0; kk < k.n3; ++kk) {
          const double g2 = std::norm(b.value[k.index(i, j, kk)]);
          if (g2 == 0.0) continue;
          s += g2 * k.w1[i] * k.w2[j] * k.w3[kk] * f(k.r1[i], k.r2[j], k.r3[kk]);
        }
      }
    }
  }
  return std::sqrt(s);
}

double kernel_norm(const KernelSet& k) {
  return weighted_norm(k, [](double, double, double) { return 1.0; });
}

double kernel_norm_tilde(const KernelSet& k) {
  return weighted_norm(k, [](double, double r2, double) { return 1.0 / (r2 * r2); });
}

double block_norm(const KernelSet& k, const KernelBlock& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.n1; ++i) {
    for (std::size_t j = 0; j < k.n2; ++j) {
      for (std::size_t kk = 0; kk < k.n3; ++kk) s += std::norm(k.normalized(b, i, j, kk));
    }
  }
  return std::sqrt(s);
}

double slice_norm_neutrino(const KernelSet& k, const KernelBlock& b, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.n1; ++i) {
    for (std::size_t kk = 0; kk < k.n3; ++kk) s += std::norm(k.normalized(b, i, j, kk));
  }
  return std::sqrt(s);
}

double slice_norm_boson(const KernelSet& k, const KernelBlock& b, std::size_t kk) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.n1; ++i) {
    for (std::size_t j = 0; j < k.n2; ++j) s += std::norm(k.normalized(b, i, j, kk));
  }
  return std::sqrt(s);
}

namespace {

double infrared_constant(const KernelSet& k, double lambda) {
  std::vector<double> sigmas = k.r2;
  std::sort(sigmas.begin(), sigmas.end());
  sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());
  double c = 0.0;
  for (const KernelBlock& b : k.blocks) {
    for (double sigma : sigmas) {
      if (sigma > lambda) break;
      double s = 0.0;
      for (std::size_t i = 0; i < k.n1; ++i) {
        for (std::size_t j = 0; j < k.n2; ++j) {
          if (k.r2[j] > sigma) continue;
          for (std::size_t kk = 0; kk < k.n3; ++kk) s += std::norm(k.normalized(b, i, j, kk));
        }
      }
      c = std::max(c, std::sqrt(s) / (sigma * sigma));
    }
  }
  return c;
}

double derivative_norm(const KernelSet& k, bool second) {
  double s = 0.0;
  for (const KernelBlock& b : k.blocks) {
    const std::vector<cplx>& a = second ? b.r2_d2 : b.r_d1;
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t j = 0; j < k.n2; ++j) {
        for (std::size_t kk = 0; kk < k.n3; ++kk) s += std::norm(a[k.index(i, j, kk)]) * k.w1[i] * k.w2[j] * k.w3[kk];
      }
    }
  }
  return std::sqrt(s);
}

bool grows(const std::vector<double>& seq, double factor) {
  if (seq.size() < 2) return false;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (!(seq[i] > factor * seq[i - 1])) return false;
  }
  return true;
}

}  // namespace

HypothesisReport check_hypotheses(const KernelSet& k, double lambda, const HypothesisOptions& opts) {
  if (!k.has_derivatives) {
    throw Error(ErrorCode::MissingDerivatives, "kernels", "check_hypotheses", "derivative arrays are required");
  }
  HypothesisReport r;
  r.lambda = lambda;
  r.K = kernel_norm(k);
  r.K_tilde = kernel_norm_tilde(k);
  r.ir_integral = r.K_tilde * r.K_tilde;
  r.C_ir = infrared_constant(k, lambda);
  r.d1_norm = derivative_norm(k, false);
  r.d2_norm = derivative_norm(k, true);
  for (const KernelBlock& b : k.blocks) {
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t j = 0; j < k.n2; ++j) {
        if (k.r2[j] < lambda) continue;
        for (std::size_t kk = 0; kk < k.n3; ++kk) r.uv_max = std::max(r.uv_max, std::abs(b.value[k.index(i, j, kk)]));
      }
    }
  }
  r.ir_refinement.push_back(r.ir_integral);
  r.C_refinement.push_back(r.C_ir);
  if (k.origin) {
    ModeGrid g = k.origin->grid;
    for (int level = 1; level < opts.refinement_levels; ++level) {
      g.neutrino.shells = build_radial_grid(g.neutrino.shells.pmax, g.neutrino.shells.size() * 2, g.neutrino.shells.scheme);
      const KernelSet fine = sample_kernel(k.origin->family, k.origin->params, g, k.origin->species);
      const double kt = kernel_norm_tilde(fine);
      r.ir_refinement.push_back(kt * kt);
      r.C_refinement.push_back(infrared_constant(fine, lambda));
    }
  }
  r.ir_ok = std::isfinite(r.ir_integral) && !grows(r.ir_refinement, opts.divergence_factor);
  r.ir2_ok = std::isfinite(r.C_ir) && !grows(r.C_refinement, opts.divergence_factor);
  r.derivatives_ok = std::isfinite(r.d1_norm) && std::isfinite(r.d2_norm);
  r.uv_ok = r.uv_max == 0.0;
  return r;
}

nlohmann::json to_json(const HypothesisReport& r) {
  return {{"K", r.K},
          {"K_tilde", r.K_tilde},
          {"lambda", r.lambda},
          {"ir_integral", r.ir_integral},
          {"ir_refinement", r.ir_refinement},
          {"C_ir", r.C_ir},
          {"C_refinement", r.C_refinement},
          {"d1_norm", r.d1_norm},
          {"d2_norm", r.d2_norm},
          {"uv_max", r.uv_max},
          {"verdicts",
           {{"i", r.ir_ok}, {"ii", r.ir2_ok}, {"iii", r.derivatives_ok}, {"iv", r.uv_ok}, {"all", r.all_ok()}}}};
}

KernelSet apply_generator_to_kernel(const KernelSet& k, const Eigen::MatrixXcd& generator) {
  if (static_cast<std::size_t>(generator.rows()) != k.n2 || static_cast<std::size_t>(generator.cols()) != k.n2) {
    throw Error(ErrorCode::ShapeMismatch, "kernels", "apply_generator_to_kernel", "generator size differs from neutrino modes");
  }
  KernelSet out = k;
  out.origin.reset();
  out.has_derivatives = false;
  Eigen::VectorXcd u(static_cast<Eigen::Index>(k.n2));
  for (KernelBlock& b : out.blocks) {
    std::fill(b.r_d1.begin(), b.r_d1.end(), 0.0);
    std::fill(b.r2_d2.begin(), b.r2_d2.end(), 0.0);
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t kk = 0; kk < k.n3; ++kk) {
        for (std::size_t j = 0; j < k.n2; ++j) u[static_cast<Eigen::Index>(j)] = b.value[k.index(i, j, kk)] * std::sqrt(k.w2[j]);
        const Eigen::VectorXcd v = generator * u;
        for (std::size_t j = 0; j < k.n2; ++j) b.value[k.index(i, j, kk)] = v[static_cast<Eigen::Index>(j)] / std::sqrt(k.w2[j]);
      }
    }
  }
  return out;
}

Jet2 generator_profile(GeneratorPart part, double sigma, double r) {
  switch (part) {
    case GeneratorPart::Full: return Jet2::constant(1.0);
    case GeneratorPart::Upper: return chi_inf_squared(Jet2::variable(r) / (2.0 * sigma));
    case GeneratorPart::Lower: return chi0_squared(Jet2::variable(r) / (2.0 * sigma));
  }
  return Jet2::constant(0.0);
}

KernelSet apply_formula_generator(const KernelSet& k, GeneratorPart part, double sigma) {
  if (!k.has_derivatives) {
    throw Error(ErrorCode::MissingDerivatives, "kernels", "apply_formula_generator", "derivative arrays are required");
  }
  KernelSet out = k;
  out.origin.reset();
  out.has_derivatives = false;
  for (std::size_t j = 0; j < k.n2; ++j) {
    const double r = k.r2[j];
    const Jet2 v = generator_profile(part, sigma, r);
    const double c0 = 1.5 * v.v + 0.5 * r * v.d;
    for (KernelBlock& b : out.blocks) {
      for (std::size_t i = 0; i < k.n1; ++i) {
        for (std::size_t kk = 0; kk < k.n3; ++kk) {
          const std::size_t idx = k.index(i, j, kk);
          b.value[idx] = v.v * b.r_d1[idx] + c0 * b.value[idx];
        }
      }
    }
  }
  for (KernelBlock& b : out.blocks) {
    std::fill(b.r_d1.begin(), b.r_d1.end(), 0.0);
    std::fill(b.r2_d2.begin(), b.r2_d2.end(), 0.0);
  }
  return out;
}

void write_kernel_table(std::ostream& os, const KernelSet& k) {
  os << std::setprecision(17);
  for (const KernelBlock& b : k.blocks) {
    const char eps = b.charge == Charge::Plus ? '+' : '-';
    const char epsp = b.charge == Charge::Plus ? '-' : '+';
    os << "block " << b.alpha << " " << b.species + 1 << " " << eps << " " << epsp << " " << k.n1 << " " << k.n2 << " "
       << k.n3 << "\n";
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t j = 0; j < k.n2; ++j) {
        for (std::size_t kk = 0; kk < k.n3; ++kk) {
          const cplx v = b.value[k.index(i, j, kk)];
          if (v != cplx(0.0)) os << i << " " << j << " " << kk << " " << v.real() << " " << v.imag() << "\n";
        }
      }
    }
  }
}

namespace {

// r d/dr and r^2 d^2/dr^2 by centered differences per label, one-sided at boundary shells
void finite_difference_derivatives(KernelSet& k) {
  const std::size_t ns = k.shells2;
  const std::size_t labels = ns ? k.n2 / ns : 0;
  for (KernelBlock& b : k.blocks) {
    for (std::size_t i = 0; i < k.n1; ++i) {
      for (std::size_t kk = 0; kk < k.n3; ++kk) {
        for (std::size_t l = 0; l < labels; ++l) {
          auto at = [&](std::size_t s) { return b.value[k.index(i, l * ns + s, kk)]; };
          auto rad = [&](std::size_t s) { return k.r2[l * ns + s]; };
          for (std::size_t s = 0; s < ns; ++s) {
            cplx d1 = 0.0, d2 = 0.0;
            if (ns >= 2) {
              const std::size_t lo = s == 0 ? 0 : s - 1;
              const std::size_t hi = s + 1 == ns ? s : s + 1;
              d1 = (at(hi) - at(lo)) / (rad(hi) - rad(lo));
            }
            if (ns >= 3) {
              const std::size_t c = std::clamp<std::size_t>(s, 1, ns - 2);
              const double hm = rad(c) - rad(c - 1);
              const double hp = rad(c + 1) - rad(c);
              d2 = 2.0 * ((at(c + 1) - at(c)) / hp - (at(c) - at(c - 1)) / hm) / (hp + hm);
            }
            const std::size_t idx = k.index(i, l * ns + s, kk);
            b.r_d1[idx] = rad(s) * d1;
            b.r2_d2[idx] = rad(s) * rad(s) * d2;
          }
        }
      }
    }
  }
  k.has_derivatives = true;
}

}  // namespace

KernelSet read_kernel_table(std::istream& is, const ModeGrid& grid, int species) {
  KernelSet k = empty_kernel_set(grid, species);
  KernelBlock* current = nullptr;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, "kernels", "read_kernel_table", what + " at line " + std::to_string(lineno));
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (line.rfind("block", 0) == 0) {
      std::string tag, eps, epsp;
      int alpha = 0, l = 0;
      std::size_t a = 0, b = 0, c = 0;
      if (!(ls >> tag >> alpha >> l >> eps >> epsp >> a >> b >> c)) fail("malformed block header");
      if (alpha < 1 || alpha > 2 || l < 1 || l > species || (eps != "+" && eps != "-") || eps == epsp) {
        fail("invalid block indices");
      }
      if (a != k.n1 || b != k.n2 || c != k.n3) {
        throw Error(ErrorCode::ShapeMismatch, "kernels", "read_kernel_table",
                    "table shape does not match grid at line " + std::to_string(lineno));
      }
      current = &k.block(alpha, l - 1, eps == "+" ? Charge::Plus : Charge::Minus);
      continue;
    }
    if (!current) fail("entry before block header");
    std::size_t i = 0, j = 0, kk = 0;
    double re = 0.0, im = 0.0;
    if (!(ls >> i >> j >> kk >> re >> im)) fail("malformed entry");
    if (i >= k.n1 || j >= k.n2 || kk >= k.n3) fail("index out of range");
    current->value[k.index(i, j, kk)] = cplx(re, im);
  }
  finite_difference_derivatives(k);
  return k;
}

}  // namespace wdecay
