#include "hgp/oracle.hpp"

#include <cmath>

#include "hgp/errors.hpp"

namespace hgp {

namespace {

double optimal_cost(const CaseDefinition& c, const Perturbation& d,
                    const qp::SolverOptions& options, bool& feasible) {
  const DispatchRun run = solve_case(c, TempUnit::Celsius, options, d);
  feasible = run.solution.status == qp::SolveStatus::Optimal;
  if (!feasible) return 0.0;
  return evaluate_cost(c, generation_table(run.problem, run.solution));
}

FdResult differenced(const CaseDefinition& c, Perturbation plus, Perturbation minus,
                     double base_cost, double eps, const qp::SolverOptions& options) {
  FdResult r;
  bool ok_plus = false, ok_minus = false;
  const double cost_plus = optimal_cost(c, plus, options, ok_plus);
  const double cost_minus = optimal_cost(c, minus, options, ok_minus);
  if (!ok_plus && !ok_minus)
    throw NumericalError("both perturbed problems failed to solve");
  if (ok_plus && ok_minus) {
    r.fd = (cost_plus - cost_minus) / (2.0 * eps);
    r.left = (base_cost - cost_minus) / eps;
    r.right = (cost_plus - base_cost) / eps;
    // one-sided derivatives that disagree indicate a binding-set switch;
    // the dual is then only a subgradient
    const double scale = std::max(std::abs(r.fd), 0.01);
    r.degenerate = std::abs(r.right - r.left) / scale > 0.01;
  } else if (ok_plus) {
    r.fd = (cost_plus - base_cost) / eps;
    r.left = r.right = r.fd;
    r.one_sided = true;
  } else {
    r.fd = (base_cost - cost_minus) / eps;
    r.left = r.right = r.fd;
    r.one_sided = true;
  }
  return r;
}

}  // namespace

double FdResult::relative_error() const {
  return std::abs(dual - fd) / std::max(std::abs(dual), 0.01);
}

FdResult fd_energy_price(const CaseDefinition& c, int node, int period,
                         double base_cost, double eps_mw,
                         const qp::SolverOptions& options) {
  Perturbation plus, minus;
  plus.load_node = minus.load_node = node;
  plus.load_period = minus.load_period = period;
  plus.load_delta_mw = eps_mw;
  minus.load_delta_mw = -eps_mw;
  FdResult r = differenced(c, plus, minus, base_cost, eps_mw, options);
  // d C*/dD is $ per MW-period; report $/MWh like the LMP
  const double dt_h = c.dt_hours();
  r.fd /= dt_h;
  r.left /= dt_h;
  r.right /= dt_h;
  return r;
}

FdResult fd_grade_price(const CaseDefinition& c, int location, int period,
                        double base_cost, double eps_deg,
                        const qp::SolverOptions& options) {
  Perturbation plus, minus;
  plus.tq_location = minus.tq_location = location;
  plus.tq_period = minus.tq_period = period;
  plus.tq_delta = eps_deg;
  minus.tq_delta = -eps_deg;
  return differenced(c, plus, minus, base_cost, eps_deg, options);
}

FdResult fd_security_price(const CaseDefinition& c, int location, int period,
                           double base_cost, double eps_deg,
                           const qp::SolverOptions& options) {
  Perturbation plus, minus;
  plus.tsa_location = minus.tsa_location = location;
  plus.tsa_period = minus.tsa_period = period;
  plus.tsa_delta = eps_deg;
  minus.tsa_delta = -eps_deg;
  return differenced(c, plus, minus, base_cost, eps_deg, options);
}

std::vector<OracleSample> run_oracle_suite(const CaseDefinition& c,
                                           const std::vector<OracleSample>& samples,
                                           double eps_mw, double eps_deg,
                                           const qp::SolverOptions& options) {
  const DispatchRun base = solve_case(c, TempUnit::Celsius, options);
  if (base.solution.status != qp::SolveStatus::Optimal)
    throw NumericalError("oracle: base case did not solve to optimality");
  const double base_cost =
      evaluate_cost(c, generation_table(base.problem, base.solution));

  std::vector<OracleSample> out = samples;
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(out.size());
  // each FD evaluation runs two independent solves; fan them out
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    OracleSample& sample = out[i];
    if (sample.kind == SampleKind::Energy) {
      sample.result =
          fd_energy_price(c, sample.entity, sample.period, base_cost, eps_mw, options);
      sample.result.dual =
          base.problem.lambda_node(base.solution, sample.entity, sample.period) /
          base.problem.dt_h;
    } else {
      sample.result =
          fd_grade_price(c, sample.entity, sample.period, base_cost, eps_deg, options);
      sample.result.dual = base.problem.beta(base.solution, sample.entity, sample.period);
    }
  }
  return out;
}

}  // namespace hgp
