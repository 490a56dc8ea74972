#include "hgp/dispatch.hpp"

#include <cmath>

#include "hgp/errors.hpp"

namespace hgp {

namespace {
constexpr double kWattsPerMw = 1e6;
}

int DispatchProblem::ineq_row(IneqFamily family, int entity, int period) const {
  const int gen_block = num_sources * periods;
  const int temp_block = num_locations * periods;
  switch (family) {
    case IneqFamily::GenUpper: return entity * periods + period;
    case IneqFamily::GenLower: return gen_block + entity * periods + period;
    case IneqFamily::TempUpper:
      return 2 * gen_block + period * num_locations + entity;
    case IneqFamily::TempLower:
      return 2 * gen_block + temp_block + period * num_locations + entity;
  }
  return -1;
}

IneqRef DispatchProblem::ineq_ref(int row) const {
  const int gen_block = num_sources * periods;
  const int temp_block = num_locations * periods;
  if (row < gen_block) return {IneqFamily::GenUpper, row / periods, row % periods};
  row -= gen_block;
  if (row < gen_block) return {IneqFamily::GenLower, row / periods, row % periods};
  row -= gen_block;
  if (row < temp_block)
    return {IneqFamily::TempUpper, row % num_locations, row / num_locations};
  row -= temp_block;
  return {IneqFamily::TempLower, row % num_locations, row / num_locations};
}

DispatchProblem build_problem(const CaseDefinition& c, const SystemMatrices& sys,
                              TempUnit unit,
                              const std::optional<Perturbation>& perturb) {
  DispatchProblem pr;
  pr.unit = unit;
  pr.dt_h = c.dt_hours();
  pr.periods = c.periods;
  pr.num_nodes = c.network.node_count();
  pr.num_locations = c.network.location_count();
  pr.num_sources = static_cast<int>(c.sources.size());
  pr.rows = sys.rows;
  pr.row_of_location = sys.row_of_location;

  const int nloc = pr.num_locations;
  const int T = pr.periods;
  const double kscale = unit_scale(unit);

  // thermal system in MW per build-unit degree
  const double coeff = 1.0 / (kWattsPerMw * kscale);
  pr.c1 = sys.c1;
  pr.c2 = sys.c2;
  pr.r_map = sys.r_map;
  for (double& v : pr.c1.data()) v *= coeff;
  for (double& v : pr.c2.data()) v *= coeff;
  for (double& v : pr.r_map.data()) v *= coeff;

  // temperature data in the build unit
  auto to_u = [&](double celsius) {
    return convert_temperature(celsius, TempUnit::Celsius, unit);
  };
  pr.ambient_u = Matrix(nloc, T);
  for (int l = 0; l < nloc; ++l)
    for (int t = 0; t < T; ++t) pr.ambient_u(l, t) = to_u(c.ambient_c(l, t));
  pr.tq_u = Matrix(nloc, T);
  pr.tsa_u = Matrix(nloc, T);
  for (const TemperatureRequirement& r : c.requirements)
    for (int t = 0; t < T; ++t) {
      pr.tq_u(r.location, t) = to_u(r.min_c);
      pr.tsa_u(r.location, t) = to_u(r.max_c);
    }
  pr.t0_u.resize(nloc);
  for (int l = 0; l < nloc; ++l) pr.t0_u[l] = to_u(c.initial_temperatures_c[l]);
  pr.loads_mw = c.loads_mw;

  if (perturb) {
    const Perturbation& d = *perturb;
    if (d.load_node >= 0) pr.loads_mw(d.load_node, d.load_period) += d.load_delta_mw;
    if (d.tq_location >= 0) pr.tq_u(d.tq_location, d.tq_period) += d.tq_delta;
    if (d.tsa_location >= 0) pr.tsa_u(d.tsa_location, d.tsa_period) += d.tsa_delta;
  }

  pr.source_of_node.assign(pr.num_nodes, -1);
  for (int s = 0; s < pr.num_sources; ++s) pr.source_of_node[c.sources[s].node] = s;

  // ---- QP blocks ----
  const int nv = pr.num_sources * T + nloc * T;
  const int neq = nloc * T;
  const int nineq = 2 * pr.num_sources * T + 2 * nloc * T;

  pr.qp.p = Matrix(nv, nv);
  pr.qp.q.assign(nv, 0.0);
  for (int s = 0; s < pr.num_sources; ++s) {
    const SourceSpec& src = c.sources[s];
    for (int t = 0; t < T; ++t) {
      const int v = pr.gen_var(s, t);
      pr.qp.p(v, v) = 2.0 * src.quadratic_usd_per_mw2h * pr.dt_h;
      pr.qp.q[v] = src.linear_usd_per_mwh * pr.dt_h;
    }
  }

  pr.qp.a = Matrix(neq, nv);
  pr.qp.b.assign(neq, 0.0);
  for (int t = 0; t < T; ++t) {
    // R_t = r_map * ambient(t)
    Vector ambient_t(nloc), r_t(nloc, 0.0);
    for (int l = 0; l < nloc; ++l) ambient_t[l] = pr.ambient_u(l, t);
    linalg::matvec_serial(pr.r_map, ambient_t, r_t);

    for (int k = 0; k < nloc; ++k) {
      const int row = pr.eq_row(k, t);
      for (int j = 0; j < nloc; ++j) {
        pr.qp.a(row, pr.temp_var(j, t)) = pr.c1(k, j);
        if (t > 0)
          pr.qp.a(row, pr.temp_var(j, t - 1)) = pr.c2(k, j);
      }
      double rhs = -r_t[k];
      if (t == 0)
        for (int j = 0; j < nloc; ++j) rhs -= pr.c2(k, j) * pr.t0_u[j];
      const SystemRow& sr = pr.rows[k];
      if (sr.balance) {
        const int s = pr.source_of_node[sr.node];
        if (s >= 0) pr.qp.a(row, pr.gen_var(s, t)) = -1.0;
        rhs -= pr.loads_mw(sr.node, t);
      }
      pr.qp.b[row] = rhs;
    }
  }

  pr.qp.g = Matrix(nineq, nv);
  pr.qp.h.assign(nineq, 0.0);
  for (int s = 0; s < pr.num_sources; ++s)
    for (int t = 0; t < T; ++t) {
      const int up = pr.ineq_row(IneqFamily::GenUpper, s, t);
      const int lo = pr.ineq_row(IneqFamily::GenLower, s, t);
      pr.qp.g(up, pr.gen_var(s, t)) = 1.0;
      pr.qp.h[up] = c.sources[s].g_max_mw;
      pr.qp.g(lo, pr.gen_var(s, t)) = -1.0;
      pr.qp.h[lo] = -c.sources[s].g_min_mw;
    }
  for (int l = 0; l < nloc; ++l)
    for (int t = 0; t < T; ++t) {
      const int up = pr.ineq_row(IneqFamily::TempUpper, l, t);
      const int lo = pr.ineq_row(IneqFamily::TempLower, l, t);
      pr.qp.g(up, pr.temp_var(l, t)) = 1.0;
      pr.qp.h[up] = pr.tsa_u(l, t);
      pr.qp.g(lo, pr.temp_var(l, t)) = -1.0;
      pr.qp.h[lo] = -pr.tq_u(l, t);
    }

  return pr;
}

double evaluate_cost(const CaseDefinition& c, const Matrix& generation_mw) {
  double total = 0.0;
  for (std::size_t s = 0; s < c.sources.size(); ++s) {
    const SourceSpec& src = c.sources[s];
    for (int t = 0; t < c.periods; ++t) {
      const double g = generation_mw(s, t);
      total += (src.linear_usd_per_mwh * g + src.quadratic_usd_per_mw2h * g * g) *
               c.dt_hours();
    }
  }
  return total;
}

Matrix generation_table(const DispatchProblem& pr, const qp::Solution& s) {
  Matrix g(pr.num_sources, pr.periods);
  for (int src = 0; src < pr.num_sources; ++src)
    for (int t = 0; t < pr.periods; ++t) g(src, t) = pr.generation(s, src, t);
  return g;
}

DispatchRun solve_case(const CaseDefinition& c, TempUnit unit,
                       const qp::SolverOptions& options,
                       const std::optional<Perturbation>& perturb) {
  DispatchRun run;
  run.system = assemble_system(c.network, c.dt_s);
  run.problem = build_problem(c, run.system, unit, perturb);
  run.solution = qp::solve(run.problem.qp, options);
  return run;
}

}  // namespace hgp
