#include "wdecay/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "wdecay/errors.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace wdecay {

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  double mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > mag * (1.0 + 1e-9)) {
      mag = a;
      best = i;
    }
  }
  if (mag <= 0.0) return;
  const cplx phase = std::conj(v[best]) / mag;
  v *= phase;
  v[best] = cplx(v[best].real(), 0.0);
}

namespace {

// Eigenpairs of the Hermitian matrix a (lower triangle read); a is overwritten with the eigenvectors when wanted.
Eigen::VectorXd heevr(Eigen::MatrixXcd& a, bool vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(a.rows());
  if (n == 0) return w;
  Eigen::MatrixXcd z(vectors ? a.rows() : 1, vectors ? a.cols() : 1);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'A', 'L', n, a.data(), n, 0.0, 0.0, 0,
                                         0, 0.0, &found, w.data(), z.data(), vectors ? n : 1, support.data());
  if (info != 0 || found != n) {
    throw Error(ErrorCode::NoConvergence, "spectral", "dense_spectrum", "zheevr info " + std::to_string(info));
  }
  if (vectors) a = std::move(z);
  return w;
}

}  // namespace

double rayleigh_quotient(const SparseMatrix& h, const Eigen::VectorXcd& v) {
  return dot(v, multiply(h, v)).real() / v.squaredNorm();
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd a = 0.5 * (m + m.adjoint());
  return heevr(a, false);
}

DenseSpectrum dense_spectrum(const Eigen::MatrixXcd& h, std::size_t limit) {
  if (static_cast<std::size_t>(h.rows()) > limit) {
    std::ostringstream os;
    os << "dimension " << h.rows() << " exceeds dense limit " << limit;
    throw Error(ErrorCode::DimensionOverflow, "spectral", "dense_spectrum", os.str());
  }
  DenseSpectrum s;
  if (h.rows() == 0) return s;
  s.vectors = h;
  s.values = heevr(s.vectors, true);
  for (Eigen::Index c = 0; c < s.vectors.cols(); ++c) fix_phase(s.vectors.col(c));
  s.norm = std::max(std::abs(s.values[0]), std::abs(s.values[s.values.size() - 1]));
  return s;
}

DenseSpectrum dense_spectrum(const SparseMatrix& h, std::size_t limit) {
  if (h.rows() > limit) {
    std::ostringstream os;
    os << "dimension " << h.rows() << " exceeds dense limit " << limit;
    throw Error(ErrorCode::DimensionOverflow, "spectral", "dense_spectrum", os.str());
  }
  return dense_spectrum(h.to_dense(), limit);
}

EigenResult ground_state(const DenseSpectrum& spec) {
  EigenResult r;
  r.method = "dense";
  if (spec.values.size() == 0) return r;
  r.energy = spec.values[0];
  r.vector = spec.vectors.col(0);
  const GapResult g = spectral_gap(spec);
  r.gap = g.gap;
  r.multiplicity = g.multiplicity;
  return r;
}

namespace {

double residual_of(const SparseMatrix& h, const Eigen::VectorXcd& v, double e) {
  return norm(multiply(h, v) - e * v);
}

void orthogonalize(Eigen::VectorXcd& v, const std::vector<Eigen::VectorXcd>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) v -= dot(b, v) * b;
  }
}

}  // namespace

EigenResult lanczos_lowest(const SparseMatrix& h, const std::vector<Eigen::VectorXcd>& deflate,
                           const SolverOptions& opts) {
  const std::size_t n = h.rows();
  if (n == 0) throw Error(ErrorCode::BadParameters, "spectral", "lanczos_lowest", "empty matrix");
  const double scale = std::max(1.0, hermitian_norm(h));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = cplx(nd(rng), nd(rng));
  orthogonalize(start, deflate);
  start /= norm(start);
  const int m = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.krylov_size), n - deflate.size()));
  EigenResult best;
  best.method = "iterative";
  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    std::vector<Eigen::VectorXcd> v{start};
    std::vector<double> alpha, beta;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd w = multiply(h, v[j]);
      alpha.push_back(dot(v[j], w).real());
      orthogonalize(w, deflate);
      orthogonalize(w, v);
      const double b = norm(w);
      if (j + 1 == m || b < 1e-13 * scale) break;
      beta.push_back(b);
      v.push_back(w / b);
    }
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < k; ++i) y += es.eigenvectors()(i, 0) * v[i];
    orthogonalize(y, deflate);
    y /= norm(y);
    const double e = rayleigh_quotient(h, y);
    best.energy = e;
    best.vector = y;
    best.residual = residual_of(h, y, e);
    best.iterations = restart + 1;
    if (best.residual <= opts.tol * scale) {
      fix_phase(best.vector);
      return best;
    }
    start = y;
  }
  std::ostringstream os;
  os << "Lanczos did not converge after " << opts.max_restarts << " restarts (residual " << best.residual << ")";
  throw Error(ErrorCode::NoConvergence, "spectral", "lanczos_lowest", os.str());
}

EigenResult ground_state(const SparseMatrix& h, const SolverOptions& opts) {
  if (h.rows() <= opts.dense_limit) {
    const DenseSpectrum spec = dense_spectrum(h, opts.dense_limit);
    EigenResult r = ground_state(spec);
    r.energy = rayleigh_quotient(h, r.vector);
    r.residual = residual_of(h, r.vector, r.energy);
    return r;
  }
  EigenResult r = lanczos_lowest(h, {}, opts);
  const GapResult g = spectral_gap(h, r.energy, opts);
  r.gap = g.gap;
  r.multiplicity = g.multiplicity;
  return r;
}

GapResult spectral_gap(const DenseSpectrum& spec) {
  GapResult g;
  const Eigen::Index n = spec.values.size();
  if (n == 0) return g;
  const double tol = degeneracy_tolerance(spec.norm);
  Eigen::Index i = 1;
  while (i < n && spec.values[i] - spec.values[0] <= tol) ++i;
  g.multiplicity = static_cast<int>(i);
  if (i > 1) {
    g.gap = 0.0;
    g.next = i < n ? spec.values[i] : std::numeric_limits<double>::infinity();
    return g;
  }
  if (n == 1) {
    g.gap = std::numeric_limits<double>::infinity();
    g.next = g.gap;
    return g;
  }
  g.next = spec.values[1];
  g.gap = g.next - spec.values[0];
  return g;
}

GapResult spectral_gap(const SparseMatrix& h, double energy, const SolverOptions& opts) {
  if (h.rows() <= opts.dense_limit) return spectral_gap(dense_spectrum(h, opts.dense_limit));
  GapResult g;
  const double tol = degeneracy_tolerance(hermitian_norm(h));
  std::vector<Eigen::VectorXcd> deflate{lanczos_lowest(h, {}, opts).vector};
  for (;;) {
    if (deflate.size() >= h.rows()) {
      g.gap = std::numeric_limits<double>::infinity();
      return g;
    }
    const EigenResult next = lanczos_lowest(h, deflate, opts);
    if (next.energy - energy > tol) {
      g.next = next.energy;
      g.gap = g.multiplicity > 1 ? 0.0 : next.energy - energy;
      return g;
    }
    ++g.multiplicity;
    deflate.push_back(next.vector);
  }
}

Eigen::MatrixXcd smooth_function_of(const DenseSpectrum& spec, const std::function<double(double)>& f) {
  const Eigen::Index n = spec.values.size();
  Eigen::VectorXd fv(n);
  for (Eigen::Index i = 0; i < n; ++i) fv[i] = f(spec.values[i]);
  Eigen::MatrixXcd out = spec.vectors * fv.asDiagonal() * spec.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

Eigen::MatrixXcd smooth_function_of(const SparseMatrix& h, const std::function<double(double)>& f,
                                    std::size_t limit) {
  return smooth_function_of(dense_spectrum(h, limit), f);
}

Eigen::MatrixXcd spectral_subspace(const DenseSpectrum& spec, double shift, double lo, double hi) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    const double x = spec.values[i] - shift;
    if (x >= lo && x <= hi) cols.push_back(i);
  }
  Eigen::MatrixXcd out(spec.vectors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = spec.vectors.col(cols[c]);
  return out;
}

Eigen::MatrixXcd spectral_projection(const DenseSpectrum& spec, double shift, double lo, double hi) {
  const Eigen::MatrixXcd u = spectral_subspace(spec, shift, lo, hi);
  if (u.cols() == 0) return Eigen::MatrixXcd::Zero(spec.vectors.rows(), spec.vectors.rows());
  return u * u.adjoint();
}

std::vector<Level> group_levels(const Eigen::VectorXd& values, double tol) {
  std::vector<Level> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!out.empty() && values[i] - out.back().value <= tol) {
      ++out.back().multiplicity;
    } else {
      out.push_back({values[i], 1});
    }
  }
  return out;
}

void write_eigenvalue_csv(std::ostream& os, const Eigen::VectorXd& values, double tol) {
  os << "index,value,multiplicity\n";
  os << std::setprecision(17);
  const auto levels = group_levels(values, tol);
  for (std::size_t i = 0; i < levels.size(); ++i) os << i << ',' << levels[i].value << ',' << levels[i].multiplicity << '\n';
}

}  // namespace wdecay
