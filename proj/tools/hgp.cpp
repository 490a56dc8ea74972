// hgp: district-heating dispatch, dual pricing and settlement studies.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hgp/case_io.hpp"
#include "hgp/errors.hpp"
#include "hgp/pipeline.hpp"

namespace {

using namespace hgp;

void apply_thread_env() {
  if (const char* env = std::getenv("HGP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) linalg::set_max_threads(n);
  }
}

int run_solve(const std::string& path, const std::string& rule,
              const std::string& unit, const std::string& out_dir, double tol,
              double identity_tol, bool serial) {
  const CaseDefinition c = load_case(path);
  PipelineOptions opt;
  opt.unit = parse_unit(unit);
  opt.tolerance = tol;
  opt.identity_threshold = identity_tol;
  opt.exec = serial ? linalg::Exec::Serial : linalg::Exec::Parallel;
  if (!out_dir.empty()) opt.out_dir = out_dir;
  const PipelineResult r = run_pipeline(c, opt);
  if (r.exit_code == kExitSolverFailure) {
    std::cerr << "error: " << r.message << '\n';
    return r.exit_code;
  }
  std::cout << summary_text(c, r);
  if (rule == "energy" || rule == "both") {
    std::cout << "\nenergy-rule surplus per period ($): ";
    for (double v : r.energy.surplus_per_period) std::printf("%.6g ", v);
    std::cout << '\n';
  }
  if (rule == "double" || rule == "both") {
    std::cout << "double-rule surplus per period ($): ";
    for (double v : r.double_rule.surplus_per_period) std::printf("%.6g ", v);
    std::cout << '\n';
  }
  if (r.exit_code != kExitOk) std::cerr << "error: " << r.message << '\n';
  return r.exit_code;
}

int run_decompose(const std::string& path, const std::string& unit, double tol,
                  bool serial) {
  const CaseDefinition c = load_case(path);
  PipelineOptions opt;
  opt.unit = parse_unit(unit);
  opt.tolerance = tol;
  opt.exec = serial ? linalg::Exec::Serial : linalg::Exec::Parallel;
  const PipelineResult r = run_pipeline(c, opt);
  if (r.exit_code == kExitSolverFailure) {
    std::cerr << "error: " << r.message << '\n';
    return r.exit_code;
  }
  std::printf("period, CR, IL, IU, CR+IL+IU, MS_double, residual\n");
  for (int t = 0; t < c.periods; ++t) {
    const PeriodSurplus& p = r.surplus.periods[t];
    std::printf("%d, %.6g, %.6g, %.6g, %.6g, %.6g, %.3e\n", t + 1, p.cr, p.il, p.iu,
                p.cr + p.il + p.iu, p.upsilon, p.residual);
  }
  std::printf("total MS_double %.8g = initial-state %.8g + congestion %.8g (residual %.3e%s)\n",
              r.surplus.upsilon_total, r.surplus.initial_state_term,
              r.surplus.cr_total, r.surplus.total_identity_residual,
              r.surplus.total_identity_asserted ? "" : ", not asserted: ambient varies");
  if (r.exit_code != kExitOk) std::cerr << "error: " << r.message << '\n';
  return r.exit_code;
}

int run_verify(const std::string& path, double eps_mw, double eps_deg, double tol,
               int per_entity) {
  const CaseDefinition c = load_case(path);
  qp::SolverOptions solver;
  solver.tolerance = tol;

  // sample energy prices at load nodes and grade prices at their supply
  // locations, spread over the horizon
  std::vector<OracleSample> samples;
  auto spread_periods = [&](int want) {
    std::vector<int> ts;
    const int step = std::max(1, c.periods / std::max(1, want));
    for (int t = 0; t < c.periods; t += step) ts.push_back(t);
    return ts;
  };
  for (int i = 0; i < c.network.node_count(); ++i) {
    if (c.network.node_kind(i) != NodeKind::Load) continue;
    for (int t : spread_periods(per_entity)) {
      samples.push_back({SampleKind::Energy, i, t, {}});
      samples.push_back(
          {SampleKind::Grade, c.network.location_of(i, Side::Supply), t, {}});
    }
  }

  const auto results = run_oracle_suite(c, samples, eps_mw, eps_deg, solver);
  int failures = 0, degenerate = 0;
  std::printf("kind, entity, period, dual, fd, rel_error, note\n");
  for (const OracleSample& s : results) {
    const FdResult& f = s.result;
    const bool ok = f.relative_error() <= 0.01;
    const char* note = f.degenerate ? "degenerate" : (f.one_sided ? "one-sided" : "");
    if (f.degenerate)
      ++degenerate;
    else if (!ok)
      ++failures;
    std::printf("%s, %s, %d, %.8g, %.8g, %.2e, %s\n",
                s.kind == SampleKind::Energy ? "energy" : "grade",
                s.kind == SampleKind::Energy
                    ? c.node_name(s.entity).c_str()
                    : c.location_name(s.entity).c_str(),
                s.period + 1, f.dual, f.fd, f.relative_error(), note);
  }
  std::printf("%zu samples: %d disagreement(s), %d degenerate (reported, not failed)\n",
              results.size(), failures, degenerate);
  return failures == 0 ? kExitOk : kExitIdentityFailure;
}

int run_convert(const std::string& path, const std::string& unit,
                const std::string& out_path) {
  const CaseDefinition c = load_case(path);
  const TempUnit target = parse_unit(unit);
  if (out_path.empty()) {
    std::cout << case_to_json(c, target);
  } else {
    save_case(c, out_path, target);
    std::cout << "wrote " << out_path << " in unit " << unit_name(target) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();

  CLI::App app{"district-heating dispatch and dual-pricing engine"};
  app.require_subcommand(1);

  std::string case_path, rule = "both", unit = "C", out_dir, out_file, oracle = "fd";
  double tol = 1e-8, identity_tol = 1e-4, eps_mw = 1e-4, eps_deg = 1e-3;
  int per_entity = 3;
  bool serial = false;

  CLI::App* solve = app.add_subcommand("solve", "solve a case and settle under both rules");
  solve->add_option("case", case_path, "case file")->required();
  solve->add_option("--rule", rule, "energy|double|both")
      ->check(CLI::IsMember({"energy", "double", "both"}));
  solve->add_option("--unit", unit, "C|F|K presentation unit");
  solve->add_option("--out", out_dir, "report directory");
  solve->add_option("--tol", tol, "solver KKT tolerance");
  solve->add_option("--identity-tol", identity_tol, "surplus identity gate ($)");
  solve->add_flag("--serial", serial, "disable the OpenMP kernels");

  CLI::App* decomp = app.add_subcommand("decompose", "per-period surplus decomposition");
  decomp->add_option("case", case_path, "case file")->required();
  decomp->add_option("--unit", unit, "C|F|K presentation unit");
  decomp->add_option("--tol", tol, "solver KKT tolerance");
  decomp->add_flag("--serial", serial, "disable the OpenMP kernels");

  CLI::App* verify = app.add_subcommand("verify", "finite-difference check of dual prices");
  verify->add_option("case", case_path, "case file")->required();
  verify->add_option("--oracle", oracle, "oracle kind (fd)")
      ->check(CLI::IsMember({"fd"}));
  verify->add_option("--eps", eps_mw, "load perturbation (MW)");
  verify->add_option("--eps-grade", eps_deg, "bound perturbation (deg)");
  verify->add_option("--tol", tol, "solver KKT tolerance");
  verify->add_option("--samples-per-node", per_entity, "periods sampled per load node");

  CLI::App* convert = app.add_subcommand("convert", "rewrite a case in another unit");
  convert->add_option("case", case_path, "case file")->required();
  convert->add_option("--unit", unit, "C|F|K target unit")->required();
  convert->add_option("--out", out_file, "output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return run_solve(case_path, rule, unit, out_dir, tol, identity_tol, serial);
    if (decomp->parsed()) return run_decompose(case_path, unit, tol, serial);
    if (verify->parsed()) return run_verify(case_path, eps_mw, eps_deg, tol, per_entity);
    if (convert->parsed()) return run_convert(case_path, unit, out_file);
  } catch (const hgp::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return hgp::kExitInputError;
  } catch (const hgp::TopologyError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return hgp::kExitInputError;
  } catch (const hgp::ModelValidityError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return hgp::kExitInputError;
  } catch (const hgp::NumericalError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return hgp::kExitSolverFailure;
  }
  return hgp::kExitOk;
}
