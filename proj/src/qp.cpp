#include "hgp/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hgp/errors.hpp"

namespace hgp::qp {

namespace {

constexpr double kPrimalReg = 1e-9;  // static regularization, primal block
constexpr double kDualReg = 1e-9;    // static regularization, dual block

struct Workspace {
  std::size_t n, p, m;
  Matrix k_base;    // [P, A^T; A, 0]
  Matrix k_work;    // regularized + factored copy
  Matrix gt_general;            // n x m_general, general (non-box) rows of G
  std::vector<int> general_rows;
  std::vector<int> box_var;     // per ineq row: variable index if the row has a
                                // single nonzero, else -1
  std::vector<double> box_coeff;
  Matrix gram_general;
};

bool is_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Workspace make_workspace(const Problem& pr) {
  Workspace w;
  w.n = pr.num_vars();
  w.p = pr.num_eq();
  w.m = pr.num_ineq();
  const std::size_t N = w.n + w.p;
  w.k_base = Matrix(N, N);
  for (std::size_t i = 0; i < w.n; ++i)
    for (std::size_t j = 0; j < w.n; ++j) w.k_base(i, j) = pr.p(i, j);
  for (std::size_t r = 0; r < w.p; ++r)
    for (std::size_t j = 0; j < w.n; ++j) {
      w.k_base(w.n + r, j) = pr.a(r, j);
      w.k_base(j, w.n + r) = pr.a(r, j);
    }

  // box rows (single nonzero) feed the gram diagonal directly; everything
  // else goes through the dense weighted-gram kernel
  w.box_var.assign(w.m, -1);
  w.box_coeff.assign(w.m, 0.0);
  for (std::size_t r = 0; r < w.m; ++r) {
    int nz = -1;
    int count = 0;
    for (std::size_t j = 0; j < w.n; ++j) {
      if (pr.g(r, j) != 0.0) {
        ++count;
        nz = static_cast<int>(j);
        if (count > 1) break;
      }
    }
    if (count == 1) {
      w.box_var[r] = nz;
      w.box_coeff[r] = pr.g(r, nz);
    } else {
      w.general_rows.push_back(static_cast<int>(r));
    }
  }
  if (!w.general_rows.empty()) {
    w.gt_general = Matrix(w.n, w.general_rows.size());
    for (std::size_t c = 0; c < w.general_rows.size(); ++c)
      for (std::size_t j = 0; j < w.n; ++j)
        w.gt_general(j, c) = pr.g(w.general_rows[c], j);
    w.gram_general = Matrix(w.n, w.n);
  }
  return w;
}

// K_true * (vx, vy) with the current weights but without regularization.
void apply_kkt(const Problem& pr, const Vector& weights, const Vector& vx,
               const Vector& vy, Vector& rx, Vector& ry, Vector& scratch_m) {
  const std::size_t n = pr.num_vars();
  linalg::matvec_serial(pr.p, vx, rx);
  if (pr.num_ineq() > 0) {
    linalg::matvec_serial(pr.g, vx, scratch_m);
    for (std::size_t r = 0; r < pr.num_ineq(); ++r) scratch_m[r] *= weights[r];
    Vector gtwgv(n, 0.0);
    linalg::matvec_transposed(pr.g, scratch_m, gtwgv);
    for (std::size_t j = 0; j < n; ++j) rx[j] += gtwgv[j];
  }
  if (pr.num_eq() > 0) {
    Vector atv(n, 0.0);
    linalg::matvec_transposed(pr.a, vy, atv);
    for (std::size_t j = 0; j < n; ++j) rx[j] += atv[j];
    linalg::matvec_serial(pr.a, vx, ry);
  }
}

// Factors the regularized augmented matrix for the given weights.
void assemble_and_factor(Workspace& w, const Vector& weights, Exec exec) {
  w.k_work = w.k_base;
  if (!w.general_rows.empty()) {
    Vector wg(w.general_rows.size());
    for (std::size_t c = 0; c < w.general_rows.size(); ++c)
      wg[c] = weights[w.general_rows[c]];
    linalg::weighted_gram(w.gt_general, wg, w.gram_general, exec);
    for (std::size_t i = 0; i < w.n; ++i) {
      double* dst = w.k_work.row_ptr(i);
      const double* src = w.gram_general.row_ptr(i);
      for (std::size_t j = 0; j < w.n; ++j) dst[j] += src[j];
    }
  }
  for (std::size_t r = 0; r < w.m; ++r) {
    const int j = w.box_var[r];
    if (j >= 0) w.k_work(j, j) += weights[r] * w.box_coeff[r] * w.box_coeff[r];
  }
  for (std::size_t i = 0; i < w.n; ++i) w.k_work(i, i) += kPrimalReg;
  for (std::size_t r = 0; r < w.p; ++r) w.k_work(w.n + r, w.n + r) -= kDualReg;
  linalg::ldlt_factor(w.k_work, exec);
}

// Solves the (unregularized) augmented system with one refinement pass.
void solve_augmented(const Problem& pr, const Workspace& w, const Vector& weights,
                     Vector& rhs_x, Vector& rhs_y) {
  const std::size_t n = w.n, p = w.p;
  Vector sol(n + p);
  for (std::size_t j = 0; j < n; ++j) sol[j] = rhs_x[j];
  for (std::size_t r = 0; r < p; ++r) sol[n + r] = rhs_y[r];
  linalg::ldlt_solve(w.k_work, sol);

  Vector vx(sol.begin(), sol.begin() + n);
  Vector vy(sol.begin() + n, sol.end());
  Vector rx(n), ry(p), scratch(w.m);
  for (int pass = 0; pass < 2; ++pass) {
    apply_kkt(pr, weights, vx, vy, rx, ry, scratch);
    Vector resid(n + p);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      resid[j] = rhs_x[j] - rx[j];
      worst = std::max(worst, std::abs(resid[j]));
    }
    for (std::size_t r = 0; r < p; ++r) {
      resid[n + r] = rhs_y[r] - ry[r];
      worst = std::max(worst, std::abs(resid[n + r]));
    }
    if (worst < 1e-14) break;
    linalg::ldlt_solve(w.k_work, resid);
    for (std::size_t j = 0; j < n; ++j) vx[j] += resid[j];
    for (std::size_t r = 0; r < p; ++r) vy[r] += resid[n + r];
  }
  rhs_x = std::move(vx);
  rhs_y = std::move(vy);
}

double step_to_boundary(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  return alpha;
}

}  // namespace

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIterations: return "max_iter";
  }
  return "?";
}

double KktResiduals::worst() const {
  return std::max(std::max(stationarity, primal), std::max(dual, complementarity));
}

double objective_value(const Problem& pr, const Vector& x) {
  Vector px(x.size(), 0.0);
  linalg::matvec_serial(pr.p, x, px);
  return 0.5 * linalg::dot(px, x) + linalg::dot(pr.q, x);
}

KktResiduals kkt_residuals(const Problem& pr, const Vector& x, const Vector& y,
                           const Vector& z) {
  const std::size_t n = pr.num_vars();
  KktResiduals res;

  Vector rd(n, 0.0);
  linalg::matvec_serial(pr.p, x, rd);
  for (std::size_t j = 0; j < n; ++j) rd[j] += pr.q[j];
  if (pr.num_eq() > 0) {
    Vector aty(n, 0.0);
    linalg::matvec_transposed(pr.a, y, aty);
    for (std::size_t j = 0; j < n; ++j) rd[j] += aty[j];
  }
  if (pr.num_ineq() > 0) {
    Vector gtz(n, 0.0);
    linalg::matvec_transposed(pr.g, z, gtz);
    for (std::size_t j = 0; j < n; ++j) rd[j] += gtz[j];
  }
  res.stationarity = linalg::inf_norm(rd);

  if (pr.num_eq() > 0) {
    Vector rp(pr.num_eq(), 0.0);
    linalg::matvec_serial(pr.a, x, rp);
    for (std::size_t r = 0; r < pr.num_eq(); ++r)
      res.primal = std::max(res.primal, std::abs(rp[r] - pr.b[r]));
  }
  if (pr.num_ineq() > 0) {
    Vector gx(pr.num_ineq(), 0.0);
    linalg::matvec_serial(pr.g, x, gx);
    for (std::size_t r = 0; r < pr.num_ineq(); ++r) {
      res.primal = std::max(res.primal, gx[r] - pr.h[r]);  // violation only
      res.dual = std::max(res.dual, -z[r]);
      res.complementarity =
          std::max(res.complementarity, std::abs(z[r] * (pr.h[r] - gx[r])));
    }
  }
  return res;
}

Solution solve(const Problem& pr, const SolverOptions& opt) {
  const std::size_t n = pr.num_vars();
  const std::size_t p = pr.num_eq();
  const std::size_t m = pr.num_ineq();

  Solution out;
  out.x.assign(n, 0.0);
  out.duals_eq.assign(p, 0.0);
  out.duals_ineq.assign(m, 0.0);
  out.slacks.assign(m, 0.0);

  Workspace w = make_workspace(pr);

  Vector x(n, 0.0), y(p, 0.0), z(m, 1.0), s(m, 1.0);

  // starting point: equality-weighted least squares with unit slack weights,
  // then Mehrotra-style shifts to the interior
  {
    Vector w1(m, 1.0);
    assemble_and_factor(w, w1, opt.exec);
    Vector rhs_x(n, 0.0), rhs_y = pr.b;
    if (m > 0) {
      Vector gth(n, 0.0);
      linalg::matvec_transposed(pr.g, pr.h, gth);
      for (std::size_t j = 0; j < n; ++j) rhs_x[j] = -pr.q[j] + gth[j];
    } else {
      for (std::size_t j = 0; j < n; ++j) rhs_x[j] = -pr.q[j];
    }
    solve_augmented(pr, w, w1, rhs_x, rhs_y);
    x = rhs_x;
    y = rhs_y;
    if (m > 0) {
      Vector gx(m, 0.0);
      linalg::matvec_serial(pr.g, x, gx);
      double min_s = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m; ++r) {
        s[r] = pr.h[r] - gx[r];
        min_s = std::min(min_s, s[r]);
      }
      const double shift = std::max(0.0, -1.5 * min_s);
      for (double& v : s) v += shift + 1e-2;
      double sum_s = 0.0, sum_z = 0.0, gap = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        sum_s += s[r];
        sum_z += z[r];
        gap += s[r] * z[r];
      }
      const double ds = 0.5 * gap / sum_z;
      const double dz = 0.5 * gap / sum_s;
      for (double& v : s) v += ds;
      for (double& v : z) v += dz;
    }
  }

  const double scale0 = 1.0 + std::max(linalg::inf_norm(pr.q),
                                       std::max(linalg::inf_norm(pr.b),
                                                linalg::inf_norm(pr.h)));

  Vector rd(n), rp(p), rg(m), weights(m), gx(m), gdx(m);
  Vector dx_a(n), dy_a(p), ds_a(m), dz_a(m);

  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    // true residuals
    linalg::matvec_serial(pr.p, x, rd);
    for (std::size_t j = 0; j < n; ++j) rd[j] += pr.q[j];
    if (p > 0) {
      Vector aty(n, 0.0);
      linalg::matvec_transposed(pr.a, y, aty);
      for (std::size_t j = 0; j < n; ++j) rd[j] += aty[j];
      linalg::matvec_serial(pr.a, x, rp);
      for (std::size_t r = 0; r < p; ++r) rp[r] -= pr.b[r];
    }
    if (m > 0) {
      Vector gtz(n, 0.0);
      linalg::matvec_transposed(pr.g, z, gtz);
      for (std::size_t j = 0; j < n; ++j) rd[j] += gtz[j];
      linalg::matvec_serial(pr.g, x, gx);
      for (std::size_t r = 0; r < m; ++r) rg[r] = gx[r] + s[r] - pr.h[r];
    }
    double gap = 0.0, max_prod = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      gap += s[r] * z[r];
      max_prod = std::max(max_prod, s[r] * z[r]);
    }
    const double mu = m > 0 ? gap / static_cast<double>(m) : 0.0;

    out.iterations = iter;
    out.x = x;
    out.duals_eq = y;
    out.duals_ineq = z;
    out.slacks = s;
    out.kkt.stationarity = linalg::inf_norm(rd);
    out.kkt.primal = std::max(linalg::inf_norm(rp), linalg::inf_norm(rg));
    out.kkt.dual = 0.0;
    for (double v : z) out.kkt.dual = std::max(out.kkt.dual, -v);
    out.kkt.complementarity = max_prod;

    if (!is_finite(x) || !is_finite(y) || !is_finite(z) || !is_finite(s)) {
      out.status = SolveStatus::MaxIterations;
      break;
    }

    if (out.kkt.stationarity <= opt.tolerance && out.kkt.primal <= opt.tolerance &&
        gap <= opt.tolerance) {
      out.status = SolveStatus::Optimal;
      break;
    }

    // divergence heuristics: dual blow-up with stubborn primal residual means
    // primal infeasible; primal blow-up with sinking objective means unbounded
    const double dual_norm = std::max(linalg::inf_norm(y), linalg::inf_norm(z));
    if (dual_norm > 1e10 * scale0 && out.kkt.primal > 1e3 * opt.tolerance) {
      out.status = SolveStatus::Infeasible;
      break;
    }
    if (linalg::inf_norm(x) > 1e10 * scale0 &&
        objective_value(pr, x) < -1e12 * scale0) {
      out.status = SolveStatus::Unbounded;
      break;
    }
    if (iter == opt.max_iterations) {
      out.status = SolveStatus::MaxIterations;
      break;
    }

    for (std::size_t r = 0; r < m; ++r) weights[r] = z[r] / s[r];
    try {
      assemble_and_factor(w, weights, opt.exec);
    } catch (const NumericalError&) {
      out.status = SolveStatus::MaxIterations;
      break;
    }

    // affine (predictor) direction, rc = s.z
    Vector rhs_x(n), rhs_y(p);
    for (std::size_t r = 0; r < m; ++r) gdx[r] = (-s[r] * z[r] + z[r] * rg[r]) / s[r];
    {
      Vector gt_term(n, 0.0);
      if (m > 0) linalg::matvec_transposed(pr.g, gdx, gt_term);
      for (std::size_t j = 0; j < n; ++j) rhs_x[j] = -rd[j] - gt_term[j];
      for (std::size_t r = 0; r < p; ++r) rhs_y[r] = -rp[r];
    }
    solve_augmented(pr, w, weights, rhs_x, rhs_y);
    dx_a = rhs_x;
    dy_a = rhs_y;
    if (m > 0) {
      linalg::matvec_serial(pr.g, dx_a, gdx);
      for (std::size_t r = 0; r < m; ++r) {
        ds_a[r] = -rg[r] - gdx[r];
        dz_a[r] = (-s[r] * z[r] - z[r] * ds_a[r]) / s[r];
      }
    }

    const double alpha_p_aff = step_to_boundary(s, ds_a);
    const double alpha_d_aff = step_to_boundary(z, dz_a);
    double mu_aff = 0.0;
    for (std::size_t r = 0; r < m; ++r)
      mu_aff += (s[r] + alpha_p_aff * ds_a[r]) * (z[r] + alpha_d_aff * dz_a[r]);
    if (m > 0) mu_aff /= static_cast<double>(m);
    const double sigma =
        (m > 0 && mu > 0.0) ? std::pow(mu_aff / mu, 3.0) : 0.0;

    // corrector direction, rc = s.z + ds_a.dz_a - sigma mu
    for (std::size_t r = 0; r < m; ++r) {
      const double rc = s[r] * z[r] + ds_a[r] * dz_a[r] - sigma * mu;
      gdx[r] = (-rc + z[r] * rg[r]) / s[r];
    }
    {
      Vector gt_term(n, 0.0);
      if (m > 0) linalg::matvec_transposed(pr.g, gdx, gt_term);
      for (std::size_t j = 0; j < n; ++j) rhs_x[j] = -rd[j] - gt_term[j];
      for (std::size_t r = 0; r < p; ++r) rhs_y[r] = -rp[r];
    }
    solve_augmented(pr, w, weights, rhs_x, rhs_y);
    Vector& dx = rhs_x;
    Vector& dy = rhs_y;
    Vector ds(m), dz(m);
    if (m > 0) {
      linalg::matvec_serial(pr.g, dx, gdx);
      for (std::size_t r = 0; r < m; ++r) {
        const double rc = s[r] * z[r] + ds_a[r] * dz_a[r] - sigma * mu;
        ds[r] = -rg[r] - gdx[r];
        dz[r] = (-rc - z[r] * ds[r]) / s[r];
      }
    }

    const double tau = std::min(0.9995, std::max(0.99, 1.0 - mu));
    const double alpha_p = std::min(1.0, tau * step_to_boundary(s, ds));
    const double alpha_d = std::min(1.0, tau * step_to_boundary(z, dz));

    for (std::size_t j = 0; j < n; ++j) x[j] += alpha_p * dx[j];
    for (std::size_t r = 0; r < p; ++r) y[r] += alpha_d * dy[r];
    for (std::size_t r = 0; r < m; ++r) {
      s[r] += alpha_p * ds[r];
      z[r] += alpha_d * dz[r];
    }
  }

  out.objective = objective_value(pr, out.x);
  return out;
}

}  // namespace hgp::qp
