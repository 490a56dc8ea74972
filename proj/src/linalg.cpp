#include "hgp/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hgp/errors.hpp"

namespace hgp::linalg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::col(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      double* crow = c.row_ptr(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix scaled_product(const Matrix& a, const Vector& w, const Matrix& b) {
  if (a.cols() != w.size() || b.cols() != w.size())
    throw std::invalid_argument("scaled_product: shape mismatch");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double s = a(i, k) * w[k];
      if (s == 0.0) continue;
      for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) += s * b(j, k);
    }
  }
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// ---- matvec ----

void matvec_serial(const Matrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    y[i] = dot({m.row_ptr(i), m.cols()}, x);
}

void matvec_parallel(const Matrix& m, std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    y[i] = dot({m.row_ptr(static_cast<std::size_t>(i)), m.cols()}, x);
}

void matvec(const Matrix& m, std::span<const double> x, std::span<double> y, Exec exec) {
  if (exec == Exec::Parallel)
    matvec_parallel(m, x, y);
  else
    matvec_serial(m, x, y);
}

void matvec_transposed(const Matrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t j = 0; j < m.cols(); ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = m.row_ptr(i);
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += row[j] * xi;
  }
}

// ---- weighted gram ----

namespace {

// One output row of C = Gt diag(w) Gt^T; shared by both exec variants.
inline void gram_row(const Matrix& gt, const Vector& w, Matrix& c, std::size_t i) {
  const std::size_t m = gt.cols();
  const double* gi = gt.row_ptr(i);
  for (std::size_t j = 0; j <= i; ++j) {
    const double* gj = gt.row_ptr(j);
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += w[r] * gi[r] * gj[r];
    c(i, j) = s;
    c(j, i) = s;
  }
}

}  // namespace

void weighted_gram_serial(const Matrix& gt, const Vector& w, Matrix& c) {
  for (std::size_t i = 0; i < gt.rows(); ++i) gram_row(gt, w, c, i);
}

void weighted_gram_parallel(const Matrix& gt, const Vector& w, Matrix& c) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(gt.rows());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) gram_row(gt, w, c, static_cast<std::size_t>(i));
}

void weighted_gram(const Matrix& gt, const Vector& w, Matrix& c, Exec exec) {
  if (c.rows() != gt.rows() || c.cols() != gt.rows())
    c = Matrix(gt.rows(), gt.rows());
  if (exec == Exec::Parallel)
    weighted_gram_parallel(gt, w, c);
  else
    weighted_gram_serial(gt, w, c);
}

// ---- LDL^T ----

namespace {

// Rank-1 update of row i of the trailing submatrix from pivot row k.
// Before scaling, A(k,i) holds L(i,k)*d_k, so
//   A(i,j) -= L(i,k) * L(j,k) * d_k = [A(k,i)/d_k] * A(k,j).
inline void ldlt_update_row(Matrix& a, std::size_t k, std::size_t i, double dk) {
  const double f = a(k, i) / dk;
  if (f == 0.0) return;
  const double* rowk = a.row_ptr(k);
  double* rowi = a.row_ptr(i);
  for (std::size_t j = i; j < a.cols(); ++j) rowi[j] -= f * rowk[j];
}

void ldlt_factor_impl(Matrix& a, double pivot_floor, bool parallel) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("ldlt_factor: matrix not square");
  for (std::size_t k = 0; k < n; ++k) {
    const double dk = a(k, k);
    if (std::abs(dk) < pivot_floor)
      throw NumericalError("ldlt_factor: pivot " + std::to_string(k) + " below floor");
    if (parallel) {
      const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(k) + 1;
      const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = lo; i < hi; ++i)
        ldlt_update_row(a, k, static_cast<std::size_t>(i), dk);
    } else {
      for (std::size_t i = k + 1; i < n; ++i) ldlt_update_row(a, k, i, dk);
    }
    // scale pivot row to L^T entries
    double* rowk = a.row_ptr(k);
    const double inv = 1.0 / dk;
    for (std::size_t j = k + 1; j < n; ++j) rowk[j] *= inv;
  }
}

}  // namespace

void ldlt_factor_serial(Matrix& a, double pivot_floor) {
  ldlt_factor_impl(a, pivot_floor, false);
}

void ldlt_factor_parallel(Matrix& a, double pivot_floor) {
  ldlt_factor_impl(a, pivot_floor, true);
}

void ldlt_factor(Matrix& a, Exec exec, double pivot_floor) {
  ldlt_factor_impl(a, pivot_floor, exec == Exec::Parallel);
}

void ldlt_solve(const Matrix& factor, std::span<double> b) {
  const std::size_t n = factor.rows();
  // forward: L y = b, L stored transposed in the upper triangle
  for (std::size_t k = 0; k < n; ++k) {
    const double yk = b[k];
    if (yk == 0.0) continue;
    const double* rowk = factor.row_ptr(k);
    for (std::size_t i = k + 1; i < n; ++i) b[i] -= rowk[i] * yk;
  }
  // diagonal
  for (std::size_t i = 0; i < n; ++i) b[i] /= factor(i, i);
  // backward: L^T x = y
  for (std::size_t i = n; i-- > 0;) {
    const double* rowi = factor.row_ptr(i);
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= rowi[j] * b[j];
    b[i] = s;
  }
}

namespace {
int g_max_threads = 0;
}

void set_max_threads(int n) {
  g_max_threads = n;
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#endif
}

int max_threads() {
#ifdef _OPENMP
  return g_max_threads > 0 ? g_max_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hgp::linalg
