#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace wdecay {

using cplx = std::complex<double>;

enum class Execution { Serial, Parallel };

struct Triplet {
  std::size_t row;
  std::size_t col;
  cplx value;
};

// Compressed-row complex matrix. Entries are unique per (row, col) and sorted by column.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);
  // Sums duplicates and drops exact zeros.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets,
                                    bool hermitian = false);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(const std::vector<double>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t dimension() const { return rows_; }
  std::size_t nnz() const { return values_.size(); }
  bool hermitian() const { return hermitian_; }
  void set_hermitian(bool h) { hermitian_ = h; }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_index() const { return col_; }
  const std::vector<cplx>& values() const { return values_; }

  cplx coeff(std::size_t r, std::size_t c) const;
  std::vector<Triplet> triplets() const;
  SparseMatrix adjoint() const;
  SparseMatrix scaled(cplx s) const;
  Eigen::MatrixXcd to_dense() const;
  static SparseMatrix from_dense(const Eigen::MatrixXcd& m, double drop = 0.0, bool hermitian = false);

  double max_abs() const;
  double hermiticity_defect() const;  // max |M - M^dagger|
  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  bool hermitian_ = false;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<cplx> values_;
};

// y = M x
void multiply(const SparseMatrix& m, const cplx* x, cplx* y, Execution exec = Execution::Parallel);
Eigen::VectorXcd multiply(const SparseMatrix& m, const Eigen::VectorXcd& x, Execution exec = Execution::Parallel);
// M * D for a dense D
Eigen::MatrixXcd multiply(const SparseMatrix& m, const Eigen::MatrixXcd& d, Execution exec = Execution::Parallel);

SparseMatrix product(const SparseMatrix& a, const SparseMatrix& b, Execution exec = Execution::Parallel);
SparseMatrix linear_combination(cplx alpha, const SparseMatrix& a, cplx beta, const SparseMatrix& b);

// Deterministic reductions (fixed summation order).
cplx dot(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y);
double norm(const Eigen::VectorXcd& x);

// Largest |eigenvalue| of a Hermitian matrix by Lanczos; exact for small dimension.
double hermitian_norm(const SparseMatrix& m, unsigned seed = 7, int steps = 120);
// Largest singular value via Lanczos on M^dagger M.
double spectral_norm(const SparseMatrix& m, unsigned seed = 7, int steps = 120);

void write_matrix_dump(std::ostream& os, const SparseMatrix& m);
SparseMatrix read_matrix_dump(std::istream& is);

}  // namespace wdecay
