#include "hgp/surplus.hpp"

#include <cmath>

namespace hgp {

namespace {

// lambda_a^T C2 (T_b - T_ambient(t)) with T_b the primal temperatures at
// period `temp_period` (or T_0 when temp_period < 0). lambda_period == T
// selects the all-zero multiplier beyond the horizon.
double lambda_c2_span(const DispatchProblem& pr, const qp::Solution& sol,
                      int lambda_period, int temp_period, int ambient_period) {
  if (lambda_period >= pr.periods) return 0.0;
  const int nloc = pr.num_locations;
  double acc = 0.0;
  for (int k = 0; k < nloc; ++k) {
    const double lk = pr.lambda(sol, k, lambda_period);
    if (lk == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < nloc; ++j) {
      const double temp = temp_period < 0 ? pr.t0_u[j]
                                          : pr.temperature(sol, j, temp_period);
      row += pr.c2(k, j) * (temp - pr.ambient_u(j, ambient_period));
    }
    acc += lk * row;
  }
  return acc;
}

bool ambient_is_time_constant(const DispatchProblem& pr) {
  for (int l = 0; l < pr.num_locations; ++l)
    for (int t = 1; t < pr.periods; ++t)
      if (pr.ambient_u(l, t) != pr.ambient_u(l, 0)) return false;
  return true;
}

}  // namespace

Decomposition decompose_period(const DispatchProblem& pr, const qp::Solution& sol,
                               int t) {
  Decomposition d;
  for (int l = 0; l < pr.num_locations; ++l)
    d.cr += pr.mu(sol, l, t) * (pr.tsa_u(l, t) - pr.ambient_u(l, t));
  d.il = -lambda_c2_span(pr, sol, t, t - 1, t);
  d.iu = lambda_c2_span(pr, sol, t + 1, t, t);
  return d;
}

double verify_period_identity(const DispatchProblem& pr, const qp::Solution& sol,
                              const Settlement& double_rule, int t) {
  const Decomposition d = decompose_period(pr, sol, t);
  return std::abs(double_rule.surplus_per_period[t] - d.sum());
}

TotalIdentity verify_total_identity(const DispatchProblem& pr, const qp::Solution& sol,
                                    const Settlement& double_rule) {
  TotalIdentity out;
  out.upsilon_total = double_rule.surplus_total;
  // T_{a,0} is read as the period-1 ambient
  out.initial_state_term = -lambda_c2_span(pr, sol, 0, -1, 0);
  for (int t = 0; t < pr.periods; ++t) {
    const Decomposition d = decompose_period(pr, sol, t);
    out.cr_total += d.cr;
  }
  out.residual =
      std::abs(out.upsilon_total - (out.initial_state_term + out.cr_total));
  out.asserted = ambient_is_time_constant(pr);
  return out;
}

StationarityResiduals verify_kkt_stationarity(const DispatchProblem& pr,
                                              const qp::Solution& sol, int t) {
  StationarityResiduals res;
  const int nloc = pr.num_locations;

  for (int j = 0; j < nloc; ++j) {
    double v = pr.mu(sol, j, t) - pr.beta(sol, j, t);
    for (int k = 0; k < nloc; ++k) {
      v += pr.lambda(sol, k, t) * pr.c1(k, j);
      if (t + 1 < pr.periods) v += pr.lambda(sol, k, t + 1) * pr.c2(k, j);
    }
    res.temperature_block = std::max(res.temperature_block, std::abs(v));
  }

  // lambda_t^T H_t, with H_t evaluated from the thermal matrices at the primal
  double lhs = 0.0;
  for (int k = 0; k < nloc; ++k) {
    double h = 0.0;
    for (int j = 0; j < nloc; ++j) {
      h += pr.c1(k, j) * pr.temperature(sol, j, t);
      const double prev = t > 0 ? pr.temperature(sol, j, t - 1) : pr.t0_u[j];
      h += pr.c2(k, j) * prev;
      h += pr.r_map(k, j) * pr.ambient_u(j, t);
    }
    lhs += pr.lambda(sol, k, t) * h;
  }
  double rhs = 0.0;
  for (int i = 0; i < pr.num_nodes; ++i) {
    const int src = pr.source_of_node[i];
    const double g = src >= 0 ? pr.generation(sol, src, t) : 0.0;
    rhs += pr.lambda_node(sol, i, t) * (g - pr.loads_mw(i, t));
  }
  res.balance_identity = std::abs(lhs - rhs);
  return res;
}

SurplusReport build_surplus_report(const DispatchProblem& pr, const qp::Solution& sol,
                                   const Settlement& double_rule) {
  SurplusReport rep;
  double inertia_sum = 0.0;
  for (int t = 0; t < pr.periods; ++t) {
    const Decomposition d = decompose_period(pr, sol, t);
    PeriodSurplus p;
    p.cr = d.cr;
    p.il = d.il;
    p.iu = d.iu;
    p.upsilon = double_rule.surplus_per_period[t];
    p.residual = std::abs(p.upsilon - d.sum());
    rep.periods.push_back(p);
    rep.cr_total += d.cr;
    inertia_sum += d.il + d.iu;
    rep.max_period_residual = std::max(rep.max_period_residual, p.residual);
  }
  rep.upsilon_total = double_rule.surplus_total;
  rep.initial_state_term = -lambda_c2_span(pr, sol, 0, -1, 0);
  rep.telescoping_residual = std::abs(inertia_sum - rep.initial_state_term);
  const TotalIdentity total = verify_total_identity(pr, sol, double_rule);
  rep.total_identity_residual = total.residual;
  rep.total_identity_asserted = total.asserted;
  return rep;
}

UnitInvarianceReport verify_unit_invariance(const CaseDefinition& c,
                                            const qp::SolverOptions& options) {
  UnitInvarianceReport rep;
  const TempUnit units[] = {TempUnit::Celsius, TempUnit::Fahrenheit, TempUnit::Kelvin};

  struct Solved {
    DispatchRun run;
    Settlement settlement;
    std::vector<Decomposition> decomp;
  };
  std::vector<Solved> solved;
  for (TempUnit u : units) {
    Solved s;
    s.run = solve_case(c, u, options);
    const PriceSchedule prices = extract_prices(c, s.run.problem, s.run.solution);
    s.settlement = settle_double_rule(c, s.run.problem, s.run.solution, prices);
    for (int t = 0; t < c.periods; ++t)
      s.decomp.push_back(decompose_period(s.run.problem, s.run.solution, t));
    UnitInvarianceRow row;
    row.unit = u;
    for (const Decomposition& d : s.decomp) {
      row.cr += d.cr;
      row.il += d.il;
      row.iu += d.iu;
    }
    row.upsilon = s.settlement.surplus_total;
    rep.rows.push_back(row);
    solved.push_back(std::move(s));
  }

  const Solved& base = solved[0];
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (std::size_t u = 1; u < solved.size(); ++u) {
    const Solved& other = solved[u];
    const double kscale = unit_scale(units[u]);
    for (int t = 0; t < c.periods; ++t) {
      rep.max_component_deviation = std::max(
          {rep.max_component_deviation, rel(base.decomp[t].cr, other.decomp[t].cr),
           rel(base.decomp[t].il, other.decomp[t].il),
           rel(base.decomp[t].iu, other.decomp[t].iu),
           rel(base.settlement.surplus_per_period[t],
               other.settlement.surplus_per_period[t])});
      for (int k = 0; k < base.run.problem.num_locations; ++k) {
        const double l0 = base.run.problem.lambda(base.run.solution, k, t);
        const double l1 = other.run.problem.lambda(other.run.solution, k, t);
        rep.max_lambda_deviation = std::max(rep.max_lambda_deviation, rel(l0, l1));
      }
      for (int l = 0; l < base.run.problem.num_locations; ++l) {
        const double mu0 = base.run.problem.mu(base.run.solution, l, t);
        if (mu0 < 1e-6) continue;  // scale ratio only meaningful on binding rows
        const double mu1 = other.run.problem.mu(other.run.solution, l, t);
        rep.max_mu_scale_deviation =
            std::max(rep.max_mu_scale_deviation, std::abs(mu1 * kscale - mu0) / mu0);
        ++rep.binding_mu_rows_checked;
      }
    }
  }
  return rep;
}

}  // namespace hgp
