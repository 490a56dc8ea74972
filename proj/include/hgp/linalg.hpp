// Dense linear algebra used by the dispatch solver.
//
// Every kernel that sits on the solver's hot path comes in two variants:
// a serial reference (`*_serial`) and an OpenMP one (`*_parallel`). Both run
// the same per-row inner routine in the same order, so at any thread count
// the parallel variant reproduces the serial result bit for bit. `Exec`
// selects the variant at call sites.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hgp::linalg {

using Vector = std::vector<double>;

enum class Exec { Serial, Parallel };

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Column j as a vector (copies).
  Vector col(std::size_t j) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---- small utilities (serial; used for model assembly, never hot) ----

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
/// a * diag(w) * b^T
Matrix scaled_product(const Matrix& a, const Vector& w, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double inf_norm(std::span<const double> v);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// ---- hot kernels: serial reference + OpenMP variant ----

/// y = M x  (rows of M dotted with x).
void matvec_serial(const Matrix& m, std::span<const double> x, std::span<double> y);
void matvec_parallel(const Matrix& m, std::span<const double> x, std::span<double> y);
void matvec(const Matrix& m, std::span<const double> x, std::span<double> y, Exec exec);

/// y = M^T x.
void matvec_transposed(const Matrix& m, std::span<const double> x, std::span<double> y);

/// C = Gt * diag(w) * Gt^T for a pre-transposed Gt (n x m, rows are the
/// original columns). Fills the full symmetric result.
void weighted_gram_serial(const Matrix& gt, const Vector& w, Matrix& c);
void weighted_gram_parallel(const Matrix& gt, const Vector& w, Matrix& c);
void weighted_gram(const Matrix& gt, const Vector& w, Matrix& c, Exec exec);

/// In-place LDL^T factorization of a symmetric matrix, no pivoting.
/// Only the upper triangle is referenced; on exit the upper triangle holds
/// L^T (unit diagonal implied) and the diagonal holds D. Intended for
/// quasi-definite matrices, where this is stable without pivoting.
/// Throws NumericalError when a pivot falls below `pivot_floor`.
void ldlt_factor_serial(Matrix& a, double pivot_floor = 1e-300);
void ldlt_factor_parallel(Matrix& a, double pivot_floor = 1e-300);
void ldlt_factor(Matrix& a, Exec exec, double pivot_floor = 1e-300);

/// Solves A x = b given the factorization produced by ldlt_factor.
/// b is overwritten with the solution.
void ldlt_solve(const Matrix& factor, std::span<double> b);

/// Process-wide cap on OpenMP worker threads (also applied by tools from
/// the HGP_THREADS environment variable). 0 keeps the OpenMP default.
void set_max_threads(int n);
int max_threads();

}  // namespace hgp::linalg
