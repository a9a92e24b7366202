#include "wdecay/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "wdecay/errors.hpp"

namespace wdecay {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets,
                                         bool hermitian) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  m.hermitian_ = hermitian;
  m.col_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  while (i < triplets.size()) {
    const Triplet& t = triplets[i];
    if (t.row >= rows || t.col >= cols) {
      throw Error(ErrorCode::ShapeMismatch, "ops", "from_triplets", "triplet outside matrix shape");
    }
    cplx v = 0.0;
    std::size_t j = i;
    while (j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col) v += triplets[j++].value;
    if (v != cplx(0.0)) {
      m.col_.push_back(t.col);
      m.values_.push_back(v);
      ++m.row_ptr_[t.row + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t), true);
}

SparseMatrix SparseMatrix::diagonal(const std::vector<double>& d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
  return from_triplets(d.size(), d.size(), std::move(t), true);
}

cplx SparseMatrix::coeff(std::size_t r, std::size_t c) const {
  auto b = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  auto e = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  auto it = std::lower_bound(b, e, c);
  if (it == e || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_.begin())];
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({r, col_[k], values_[k]});
  }
  return t;
}

SparseMatrix SparseMatrix::adjoint() const {
  std::vector<Triplet> t = triplets();
  for (Triplet& x : t) {
    std::swap(x.row, x.col);
    x.value = std::conj(x.value);
  }
  return from_triplets(cols_, rows_, std::move(t), hermitian_);
}

SparseMatrix SparseMatrix::scaled(cplx s) const {
  SparseMatrix m = *this;
  for (cplx& v : m.values_) v *= s;
  if (s.imag() != 0.0) m.hermitian_ = false;
  return m;
}

Eigen::MatrixXcd SparseMatrix::to_dense() const {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_[k])) = values_[k];
    }
  }
  return d;
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXcd& m, double drop, bool hermitian) {
  std::vector<Triplet> t;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) > drop) t.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), m(r, c)});
    }
  }
  return from_triplets(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), std::move(t), hermitian);
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::hermiticity_defect() const {
  if (rows_ != cols_) return INFINITY;
  return linear_combination(1.0, *this, -1.0, adjoint()).max_abs();
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

void multiply(const SparseMatrix& m, const cplx* x, cplx* y, Execution exec) {
  const auto& rp = m.row_ptr();
  const auto& ci = m.col_index();
  const auto& va = m.values();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(m.rows());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      cplx acc = 0.0;
      for (std::size_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) acc += va[k] * x[ci[k]];
      y[r] = acc;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    cplx acc = 0.0;
    for (std::size_t k = rp[static_cast<std::size_t>(r)]; k < rp[static_cast<std::size_t>(r) + 1]; ++k) acc += va[k] * x[ci[k]];
    y[r] = acc;
  }
}

Eigen::VectorXcd multiply(const SparseMatrix& m, const Eigen::VectorXcd& x, Execution exec) {
  if (static_cast<std::size_t>(x.size()) != m.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "ops", "multiply", "vector length does not match matrix");
  }
  Eigen::VectorXcd y(static_cast<Eigen::Index>(m.rows()));
  multiply(m, x.data(), y.data(), exec);
  return y;
}

Eigen::MatrixXcd multiply(const SparseMatrix& m, const Eigen::MatrixXcd& d, Execution exec) {
  if (static_cast<std::size_t>(d.rows()) != m.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "ops", "multiply", "dense operand does not match matrix");
  }
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.rows()), d.cols());
  const std::ptrdiff_t nc = d.cols();
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t c = 0; c < nc; ++c) multiply(m, d.col(c).data(), out.col(c).data(), Execution::Serial);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nc; ++c) multiply(m, d.col(c).data(), out.col(c).data(), Execution::Serial);
  return out;
}

namespace {

void product_row(const SparseMatrix& a, const SparseMatrix& b, std::size_t r, std::vector<cplx>& acc,
                 std::vector<char>& used, std::vector<std::size_t>& touched, std::vector<std::size_t>& cols,
                 std::vector<cplx>& vals) {
  touched.clear();
  for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
    const std::size_t mid = a.col_index()[k];
    const cplx av = a.values()[k];
    for (std::size_t q = b.row_ptr()[mid]; q < b.row_ptr()[mid + 1]; ++q) {
      const std::size_t c = b.col_index()[q];
      if (!used[c]) {
        used[c] = 1;
        acc[c] = 0.0;
        touched.push_back(c);
      }
      acc[c] += av * b.values()[q];
    }
  }
  std::sort(touched.begin(), touched.end());
  cols.clear();
  vals.clear();
  for (std::size_t c : touched) {
    used[c] = 0;
    if (acc[c] != cplx(0.0)) {
      cols.push_back(c);
      vals.push_back(acc[c]);
    }
  }
}

}  // namespace

SparseMatrix product(const SparseMatrix& a, const SparseMatrix& b, Execution exec) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "ops", "product", "inner dimensions differ");
  const std::size_t n = a.rows();
  std::vector<std::vector<std::size_t>> rc(n);
  std::vector<std::vector<cplx>> rv(n);
  auto run = [&](std::size_t lo, std::size_t hi) {
    std::vector<cplx> acc(b.cols());
    std::vector<char> used(b.cols(), 0);
    std::vector<std::size_t> touched;
    for (std::size_t r = lo; r < hi; ++r) product_row(a, b, r, acc, used, touched, rc[r], rv[r]);
  };
  if (exec == Execution::Serial) {
    run(0, n);
  } else {
#pragma omp parallel
    {
      std::vector<cplx> acc(b.cols());
      std::vector<char> used(b.cols(), 0);
      std::vector<std::size_t> touched;
#pragma omp for schedule(dynamic, 16)
      for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(n); ++r) {
        product_row(a, b, static_cast<std::size_t>(r), acc, used, touched, rc[static_cast<std::size_t>(r)],
                    rv[static_cast<std::size_t>(r)]);
      }
    }
  }
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < rc[r].size(); ++k) t.push_back({r, rc[r][k], rv[r][k]});
  }
  return SparseMatrix::from_triplets(n, b.cols(), std::move(t), false);
}

SparseMatrix linear_combination(cplx alpha, const SparseMatrix& a, cplx beta, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "ops", "linear_combination", "operand shapes differ");
  }
  std::vector<Triplet> t = a.triplets();
  for (Triplet& x : t) x.value *= alpha;
  for (const Triplet& x : b.triplets()) t.push_back({x.row, x.col, beta * x.value});
  const bool herm = a.hermitian() && b.hermitian() && alpha.imag() == 0.0 && beta.imag() == 0.0;
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t), herm);
}

cplx dot(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double norm(const Eigen::VectorXcd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::norm(x[i]);
  return std::sqrt(s);
}

namespace {

constexpr std::size_t kDenseNormLimit = 400;

double lanczos_extreme(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op, std::size_t n,
                       unsigned seed, int steps) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
  v /= norm(v);
  const int m = std::min<int>(steps, static_cast<int>(n));
  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha, beta;
  basis.push_back(v);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXcd w = op(basis.back());
    const double a = dot(basis.back(), w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      for (const Eigen::VectorXcd& q : basis) w -= dot(q, w) * q;
    }
    const double b = norm(w);
    if (b < 1e-14 || j + 1 == m) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  const Eigen::Index k = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[k - 1]));
}

}  // namespace

double hermitian_norm(const SparseMatrix& m, unsigned seed, int steps) {
  if (m.rows() == 0 || m.nnz() == 0) return 0.0;
  if (m.rows() <= kDenseNormLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.to_dense(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return lanczos_extreme([&m](const Eigen::VectorXcd& x) { return multiply(m, x); }, m.rows(), seed, steps);
}

double spectral_norm(const SparseMatrix& m, unsigned seed, int steps) {
  if (m.rows() == 0 || m.cols() == 0 || m.nnz() == 0) return 0.0;
  if (std::max(m.rows(), m.cols()) <= kDenseNormLimit) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m.to_dense());
    return svd.singularValues()[0];
  }
  const SparseMatrix adj = m.adjoint();
  const double e = lanczos_extreme([&](const Eigen::VectorXcd& x) { return multiply(adj, multiply(m, x)); },
                                   m.cols(), seed, steps);
  return std::sqrt(e);
}

void write_matrix_dump(std::ostream& os, const SparseMatrix& m) {
  os << "# dimension " << m.rows() << " " << m.cols() << " hermitian " << (m.hermitian() ? 1 : 0) << "\n";
  os << std::setprecision(17);
  for (const Triplet& t : m.triplets()) os << t.row << " " << t.col << " " << t.value.real() << " " << t.value.imag() << "\n";
}

SparseMatrix read_matrix_dump(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "ops", "read_matrix_dump", "missing header");
  std::istringstream hs(line);
  std::string hash, dim, herm;
  std::size_t rows = 0, cols = 0;
  int h = 0;
  if (!(hs >> hash >> dim >> rows >> cols >> herm >> h) || hash != "#" || dim != "dimension" || herm != "hermitian") {
    throw Error(ErrorCode::ParseError, "ops", "read_matrix_dump", "malformed header line");
  }
  std::vector<Triplet> t;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Triplet x{};
    double re = 0.0, im = 0.0;
    if (!(ls >> x.row >> x.col >> re >> im)) {
      throw Error(ErrorCode::ParseError, "ops", "read_matrix_dump", "malformed triplet at line " + std::to_string(lineno));
    }
    x.value = cplx(re, im);
    t.push_back(x);
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t), h != 0);
}

}  // namespace wdecay
