#pragma once

#include <cstddef>
#include <algorithm>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wdecay/sparse.hpp"

namespace wdecay {

inline constexpr std::size_t kDenseLimit = 6000;

struct DenseSpectrum {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns, phase-fixed
  double norm = 0.0;         // max |eigenvalue|
};

DenseSpectrum dense_spectrum(const SparseMatrix& h, std::size_t limit = kDenseLimit);
// Accurate to the square of the eigenvector error.
double rayleigh_quotient(const SparseMatrix& h, const Eigen::VectorXcd& v);
// Ascending eigenvalues of the Hermitian part (LAPACK divide and conquer).
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m);
DenseSpectrum dense_spectrum(const Eigen::MatrixXcd& h, std::size_t limit = kDenseLimit);

// Largest-magnitude component made real positive (first such index on ties).
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v);

struct EigenResult {
  double energy = 0.0;
  Eigen::VectorXcd vector;
  double residual = 0.0;  // ||H psi - E psi||
  std::string method;     // dense | iterative
  double gap = 0.0;       // next distinct eigenvalue minus E
  int multiplicity = 1;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-10;  // residual tolerance relative to max(1, ||H||)
  std::size_t dense_limit = kDenseLimit;
  int krylov_size = 120;
  int max_restarts = 200;
  unsigned seed = 11;
};

// Eigenvalues within degeneracy_tolerance(||H||) of each other count as one level.
inline double degeneracy_tolerance(double h_norm) { return 1e-10 * std::max(1.0, h_norm); }

EigenResult ground_state(const SparseMatrix& h, const SolverOptions& opts = {});
EigenResult ground_state(const DenseSpectrum& spec);

struct GapResult {
  double gap = 0.0;  // 0 when the lowest level is degenerate
  int multiplicity = 1;
  double next = 0.0;  // lowest eigenvalue above the ground level
};

GapResult spectral_gap(const DenseSpectrum& spec);
GapResult spectral_gap(const SparseMatrix& h, double energy, const SolverOptions& opts = {});

// Lowest k eigenpairs by restarted Lanczos with full reorthogonalization, deflating the given vectors.
EigenResult lanczos_lowest(const SparseMatrix& h, const std::vector<Eigen::VectorXcd>& deflate,
                           const SolverOptions& opts = {});

Eigen::MatrixXcd smooth_function_of(const DenseSpectrum& spec, const std::function<double(double)>& f);
Eigen::MatrixXcd smooth_function_of(const SparseMatrix& h, const std::function<double(double)>& f,
                                    std::size_t limit = kDenseLimit);
// Projection onto eigenvectors with eigenvalue - shift in [lo, hi].
Eigen::MatrixXcd spectral_projection(const DenseSpectrum& spec, double shift, double lo, double hi);
// Eigenvector columns spanning the same range, for compressions.
Eigen::MatrixXcd spectral_subspace(const DenseSpectrum& spec, double shift, double lo, double hi);

struct Level {
  double value;
  int multiplicity;
};
std::vector<Level> group_levels(const Eigen::VectorXd& values, double tol);
void write_eigenvalue_csv(std::ostream& os, const Eigen::VectorXd& values, double tol);

}  // namespace wdecay
