#include "hgp/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hgp/errors.hpp"

namespace hgp {

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError(path + ": cannot open for writing");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

PipelineResult run_pipeline(const CaseDefinition& c, const PipelineOptions& options) {
  PipelineResult r;
  qp::SolverOptions solver;
  solver.tolerance = options.tolerance;
  solver.exec = options.exec;
  r.run = solve_case(c, options.unit, solver);

  if (r.run.solution.status != qp::SolveStatus::Optimal) {
    r.exit_code = kExitSolverFailure;
    std::ostringstream msg;
    msg << "solver finished with status '" << qp::status_name(r.run.solution.status)
        << "' after " << r.run.solution.iterations
        << " iterations (KKT residuals: stationarity "
        << fmt(r.run.solution.kkt.stationarity) << ", primal "
        << fmt(r.run.solution.kkt.primal) << ", complementarity "
        << fmt(r.run.solution.kkt.complementarity) << ")";
    r.message = msg.str();
    return r;
  }

  r.prices = extract_prices(c, r.run.problem, r.run.solution);
  r.energy = settle_energy_rule(c, r.run.problem, r.run.solution, r.prices);
  r.double_rule = settle_double_rule(c, r.run.problem, r.run.solution, r.prices);
  r.surplus = build_surplus_report(r.run.problem, r.run.solution, r.double_rule);
  for (int t = 0; t < c.periods; ++t) {
    const StationarityResiduals st =
        verify_kkt_stationarity(r.run.problem, r.run.solution, t);
    r.worst_stationarity.temperature_block =
        std::max(r.worst_stationarity.temperature_block, st.temperature_block);
    r.worst_stationarity.balance_identity =
        std::max(r.worst_stationarity.balance_identity, st.balance_identity);
  }

  if (r.surplus.max_period_residual > options.identity_threshold ||
      (r.surplus.total_identity_asserted &&
       r.surplus.total_identity_residual > options.identity_threshold)) {
    r.exit_code = kExitIdentityFailure;
    r.message = "surplus decomposition identity violated (worst period residual " +
                fmt(r.surplus.max_period_residual) + " $, total residual " +
                fmt(r.surplus.total_identity_residual) + " $)";
  }

  if (options.out_dir) write_reports(c, r, *options.out_dir);
  return r;
}

void write_reports(const CaseDefinition& c, const PipelineResult& r,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const DispatchProblem& pr = r.run.problem;
  const qp::Solution& sol = r.run.solution;

  {
    std::ostringstream csv;
    csv << "node,period,lmp,grade_supply,grade_return\n";
    for (int i = 0; i < pr.num_nodes; ++i)
      for (int t = 0; t < pr.periods; ++t)
        csv << c.node_name(i) << ',' << t + 1 << ','
            << fmt(r.prices.lmp_usd_per_mwh(i, t), 10) << ','
            << fmt(r.prices.grade_supply(i, t), 10) << ','
            << fmt(r.prices.grade_return(i, t), 10) << '\n';
    write_atomic(out_dir + "/prices.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "period,CR,IL,IU,MS_energy,MS_double,residual\n";
    for (int t = 0; t < pr.periods; ++t) {
      const PeriodSurplus& p = r.surplus.periods[t];
      csv << t + 1 << ',' << fmt(p.cr, 10) << ',' << fmt(p.il, 10) << ','
          << fmt(p.iu, 10) << ',' << fmt(r.energy.surplus_per_period[t], 10) << ','
          << fmt(p.upsilon, 10) << ',' << fmt(p.residual, 4) << '\n';
    }
    write_atomic(out_dir + "/surplus.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "rule,node,period,direction,energy_usd,grade_usd,total_usd\n";
    for (const Settlement* s : {&r.energy, &r.double_rule})
      for (const SettlementLine& line : s->lines)
        csv << (s->rule == Rule::Energy ? "energy" : "double") << ','
            << c.node_name(line.node) << ',' << line.period + 1 << ','
            << (line.pays ? "pays" : "receives") << ',' << fmt(line.energy_usd, 10)
            << ',' << fmt(line.grade_usd, 10) << ','
            << fmt(line.energy_usd + (line.pays ? line.grade_usd : -line.grade_usd), 10)
            << '\n';
    write_atomic(out_dir + "/settlements.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "kind,entity,period,value\n";
    for (int s = 0; s < pr.num_sources; ++s)
      for (int t = 0; t < pr.periods; ++t)
        csv << "generation_mw," << c.node_name(c.sources[s].node) << ',' << t + 1
            << ',' << fmt(pr.generation(sol, s, t), 10) << '\n';
    for (int l = 0; l < pr.num_locations; ++l)
      for (int t = 0; t < pr.periods; ++t)
        csv << "temperature_" << unit_name(pr.unit) << ',' << c.location_name(l) << ','
            << t + 1 << ',' << fmt(pr.temperature(sol, l, t), 10) << '\n';
    write_atomic(out_dir + "/solution.csv", csv.str());
  }
  write_atomic(out_dir + "/summary.txt", summary_text(c, r));
}

std::string summary_text(const CaseDefinition& c, const PipelineResult& r) {
  const DispatchProblem& pr = r.run.problem;
  const qp::Solution& sol = r.run.solution;
  std::ostringstream out;
  out << "case: " << c.name << "  (" << pr.num_nodes << " nodes, " << pr.periods
      << " periods, unit " << unit_name(pr.unit) << ")\n";
  out << "solver: " << qp::status_name(sol.status) << " in " << sol.iterations
      << " iterations; KKT max residual " << fmt(sol.kkt.worst()) << "\n\n";

  out << "prices (period 1)\n";
  for (int i = 0; i < pr.num_nodes; ++i) {
    out << "  " << c.node_name(i) << ": LMP " << fmt(r.prices.lmp_usd_per_mwh(i, 0), 6)
        << " $/MWh";
    if (r.prices.grade_supply(i, 0) > 1e-9 || r.prices.grade_return(i, 0) > 1e-9)
      out << ", grade (S/R) " << fmt(r.prices.grade_supply(i, 0), 6) << " / "
          << fmt(r.prices.grade_return(i, 0), 6) << " $/deg";
    out << '\n';
  }

  out << "\nsettlement totals over " << pr.periods << " periods ($)\n";
  auto total_of = [&](const Settlement& s, bool pays) {
    double acc = 0.0;
    for (const SettlementLine& l : s.lines) {
      if (l.pays != pays) continue;
      acc += l.energy_usd + (l.pays ? l.grade_usd : -l.grade_usd);
    }
    return acc;
  };
  out << "  energy rule: loads pay " << fmt(total_of(r.energy, true), 8)
      << ", sources receive " << fmt(total_of(r.energy, false), 8)
      << ", merchandise surplus " << fmt(r.energy.surplus_total, 8) << '\n';
  out << "  double rule: loads pay " << fmt(total_of(r.double_rule, true), 8)
      << ", sources receive " << fmt(total_of(r.double_rule, false), 8)
      << ", merchandise surplus " << fmt(r.double_rule.surplus_total, 8) << '\n';

  out << "\nsurplus decomposition per period ($)\n";
  out << "  t    CR          IL          IU          MS_double   residual\n";
  for (int t = 0; t < pr.periods; ++t) {
    const PeriodSurplus& p = r.surplus.periods[t];
    char line[160];
    std::snprintf(line, sizeof line, "  %-4d %-11.4g %-11.4g %-11.4g %-11.4g %.2e\n",
                  t + 1, p.cr, p.il, p.iu, p.upsilon, p.residual);
    out << line;
  }
  out << "\nhorizon totals: MS_double " << fmt(r.surplus.upsilon_total, 8)
      << " = initial-state term " << fmt(r.surplus.initial_state_term, 8)
      << " + congestion rent " << fmt(r.surplus.cr_total, 8) << "  (residual "
      << fmt(r.surplus.total_identity_residual, 4)
      << (r.surplus.total_identity_asserted ? ", asserted" : ", reported only")
      << ")\n";
  out << "stationarity residuals: temperature block "
      << fmt(r.worst_stationarity.temperature_block, 4) << ", balance identity "
      << fmt(r.worst_stationarity.balance_identity, 4) << '\n';
  return out.str();
}

}  // namespace hgp
