// Convex QP solver returning the primal optimum and all KKT multipliers:
//   min 1/2 x^T P x + q^T x
//   s.t. A x = b          (multipliers y, free sign)
//        G x <= h         (multipliers z >= 0)
// Primal-dual interior point with Mehrotra predictor-corrector steps; the
// Newton systems are solved through a dense LDL^T of the regularized
// augmented matrix [P + G^T W G, A^T; A, -eps I].
#pragma once

#include <cstdint>

#include "hgp/linalg.hpp"

namespace hgp::qp {

using linalg::Exec;
using linalg::Matrix;
using linalg::Vector;

struct Problem {
  Matrix p;  // n x n, symmetric PSD
  Vector q;  // n
  Matrix a;  // meq x n
  Vector b;  // meq
  Matrix g;  // mineq x n
  Vector h;  // mineq

  std::size_t num_vars() const { return q.size(); }
  std::size_t num_eq() const { return b.size(); }
  std::size_t num_ineq() const { return h.size(); }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations };

const char* status_name(SolveStatus s);

/// Max-norm KKT residuals at the returned point (absolute).
struct KktResiduals {
  double stationarity = 0.0;    // || P x + q + A^T y + G^T z ||_inf
  double primal = 0.0;          // max(||A x - b||_inf, ||G x + s - h||_inf)
  double dual = 0.0;            // max(0, -min z)
  double complementarity = 0.0; // max_i s_i z_i

  double worst() const;
};

struct Solution {
  SolveStatus status = SolveStatus::MaxIterations;
  Vector x;
  Vector duals_eq;    // y
  Vector duals_ineq;  // z, nonnegative
  Vector slacks;      // s = h - G x at the returned point
  double objective = 0.0;
  KktResiduals kkt;
  int iterations = 0;
};

struct SolverOptions {
  double tolerance = 1e-8;  // gate on all four absolute KKT residuals
  int max_iterations = 200;
  Exec exec = Exec::Parallel;
};

/// Status is Optimal only when every KKT residual is within tolerance.
/// Non-optimal exits always carry the best iterate and its true residuals.
Solution solve(const Problem& problem, const SolverOptions& options = {});

/// Objective value 1/2 x^T P x + q^T x.
double objective_value(const Problem& problem, const Vector& x);

/// Recomputes the four residuals from scratch for a given primal/dual point.
KktResiduals kkt_residuals(const Problem& problem, const Vector& x, const Vector& y,
                           const Vector& z);

}  // namespace hgp::qp
