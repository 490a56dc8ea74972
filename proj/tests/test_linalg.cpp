#include <doctest.h>

#include <random>

#include "hgp/errors.hpp"
#include "hgp/linalg.hpp"

using namespace hgp::linalg;

namespace {

Matrix random_symmetric(std::size_t n, std::size_t neg_tail, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = 0.2 * dist(rng);
      m(i, j) = v;
      m(j, i) = v;
    }
  // quasi-definite: strong positive diagonal head, negative tail
  for (std::size_t i = 0; i < n - neg_tail; ++i) m(i, i) = 5.0 + std::abs(dist(rng));
  for (std::size_t i = n - neg_tail; i < n; ++i) m(i, i) = -5.0 - std::abs(dist(rng));
  return m;
}

}  // namespace

TEST_CASE("ldlt solves a known symmetric system") {
  Matrix a(3, 3);
  a(0, 0) = 4;  a(0, 1) = 1;  a(0, 2) = 0;
  a(1, 0) = 1;  a(1, 1) = 3;  a(1, 2) = 1;
  a(2, 0) = 0;  a(2, 1) = 1;  a(2, 2) = 2;
  Vector x_true = {1.0, -2.0, 3.0};
  Vector b(3, 0.0);
  matvec_serial(a, x_true, b);
  ldlt_factor_serial(a);
  ldlt_solve(a, b);
  for (int i = 0; i < 3; ++i) CHECK(b[i] == doctest::Approx(x_true[i]).epsilon(1e-12));
}

TEST_CASE("ldlt parallel kernel reproduces the serial reference bit for bit") {
  std::mt19937 rng(7);
  for (std::size_t n : {5u, 33u, 120u}) {
    const Matrix base = random_symmetric(n, n / 3, rng);
    Matrix serial = base, parallel = base;
    ldlt_factor_serial(serial);
    ldlt_factor_parallel(parallel);
    CHECK(serial == parallel);
  }
}

TEST_CASE("ldlt quasi-definite solve accuracy on random systems") {
  std::mt19937 rng(11);
  std::normal_distribution<double> dist;
  const std::size_t n = 60;
  Matrix a = random_symmetric(n, 20, rng);
  Vector x_true(n);
  for (double& v : x_true) v = dist(rng);
  Vector b(n, 0.0);
  matvec_serial(a, x_true, b);
  Matrix f = a;
  ldlt_factor_parallel(f);
  ldlt_solve(f, b);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(b[i] == doctest::Approx(x_true[i]).epsilon(1e-8));
}

TEST_CASE("ldlt rejects a matrix with a vanishing pivot") {
  Matrix a(2, 2);
  a(0, 0) = 1.0; a(0, 1) = 1.0;
  a(1, 0) = 1.0; a(1, 1) = 1.0;  // second pivot becomes exactly zero
  CHECK_THROWS_AS(ldlt_factor_serial(a, 1e-12), hgp::NumericalError);
}

TEST_CASE("weighted gram matches the naive triple product and its parallel twin") {
  std::mt19937 rng(3);
  std::normal_distribution<double> dist;
  const std::size_t n = 17, m = 29;
  Matrix gt(n, m);
  for (double& v : gt.data()) v = dist(rng);
  Vector w(m);
  for (double& v : w) v = std::abs(dist(rng)) + 0.1;

  Matrix c_serial(n, n), c_parallel(n, n);
  weighted_gram_serial(gt, w, c_serial);
  weighted_gram_parallel(gt, w, c_parallel);
  CHECK(c_serial == c_parallel);

  // naive reference
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double expect = 0.0;
      for (std::size_t r = 0; r < m; ++r) expect += w[r] * gt(i, r) * gt(j, r);
      CHECK(c_serial(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("matvec variants agree") {
  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  Matrix m(23, 41);
  for (double& v : m.data()) v = dist(rng);
  Vector x(41);
  for (double& v : x) v = dist(rng);
  Vector y1(23), y2(23);
  matvec_serial(m, x, y1);
  matvec_parallel(m, x, y2);
  CHECK(y1 == y2);
}

TEST_CASE("matmul and scaled_product basics") {
  Matrix a(2, 3);
  a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
  a(1, 0) = 0; a(1, 1) = 1; a(1, 2) = -1;
  const Matrix at = transpose(a);
  const Matrix aat = matmul(a, at);
  CHECK(aat(0, 0) == doctest::Approx(14.0));
  CHECK(aat(0, 1) == doctest::Approx(-1.0));
  CHECK(aat(1, 1) == doctest::Approx(2.0));

  Vector w = {2.0, 1.0, 1.0};
  const Matrix awat = scaled_product(a, w, a);
  // a * diag(w) * a^T at (0,0): 1*1*2 + 2*2*1 + 3*3*1 = 15
  CHECK(awat(0, 0) == doctest::Approx(15.0));
}
