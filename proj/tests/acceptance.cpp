// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run via ctest or directly; takes an optional cases directory.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hgp/case_io.hpp"
#include "hgp/oracle.hpp"
#include "hgp/pipeline.hpp"
#include "hgp/surplus.hpp"

using namespace hgp;

namespace {

std::string g_cases_dir =
#ifdef HGP_CASES_DIR
    HGP_CASES_DIR;
#else
    "cases";
#endif

int g_failures = 0;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

void report(int criterion, const std::string& label, const Check& check,
            double seconds) {
  std::printf("%s  criterion %d: %-58s (%.2f s)%s%s\n", check.ok ? "PASS" : "FAIL",
              criterion, label.c_str(), seconds,
              check.ok ? "" : " -- ", check.ok ? "" : check.detail.c_str());
  if (!check.ok) ++g_failures;
}

double run_timed(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

struct SolvedCase {
  CaseDefinition c;
  DispatchRun run;
  PriceSchedule prices;
  Settlement energy;
  Settlement double_rule;
};

SolvedCase solve_bundled(const std::string& name, double tol = 1e-8) {
  SolvedCase s{load_case(g_cases_dir + "/" + name + ".case"), {}, {}, {}, {}};
  qp::SolverOptions opt;
  opt.tolerance = tol;
  s.run = solve_case(s.c, TempUnit::Celsius, opt);
  if (s.run.solution.status == qp::SolveStatus::Optimal) {
    s.prices = extract_prices(s.c, s.run.problem, s.run.solution);
    s.energy = settle_energy_rule(s.c, s.run.problem, s.run.solution, s.prices);
    s.double_rule = settle_double_rule(s.c, s.run.problem, s.run.solution, s.prices);
  }
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- criterion 1: toy steady-state relationships ----
void criterion_1() {
  Check check;
  SolvedCase s;
  const double secs = run_timed([&] {
    s = solve_bundled("toy");
    check.require(s.run.solution.status == qp::SolveStatus::Optimal,
                  "toy did not solve to optimality");
    if (!check.ok) return;

    const double loss_factor = s.run.system.loss_factors[1];  // return pipe b2
    for (int t = 0; t < s.c.periods; ++t) {
      const double p_gen = s.prices.lmp_usd_per_mwh(0, t);
      const double p_load = s.prices.lmp_usd_per_mwh(1, t);
      check.require(p_load < p_gen, "load LMP not below generator LMP");
      check.require(std::abs(p_load / p_gen - loss_factor) <= 1e-3,
                    "LMP ratio differs from the loss factor: " +
                        fmt(p_load / p_gen) + " vs " + fmt(loss_factor));
    }

    // (b) NH2^S binds at 60 and is the only binding lower bound
    const int nh2s = s.c.network.location_of(1, Side::Supply);
    for (int t = 0; t < s.c.periods; ++t) {
      check.require(std::abs(s.run.problem.temperature(s.run.solution, nh2s, t) -
                             60.0) <= 1e-5,
                    "NH2^S does not sit at its 60 C floor");
      check.require(s.run.problem.beta(s.run.solution, nh2s, t) > 1e-3,
                    "NH2^S grade price is not strictly positive");
      for (int l = 0; l < s.run.problem.num_locations; ++l) {
        if (l == nh2s) continue;
        const double slack = s.run.problem.temperature(s.run.solution, l, t) -
                             s.run.problem.tq_u(l, t);
        check.require(slack > 1e-4, "another lower bound is binding at location " +
                                        s.c.location_name(l));
        check.require(s.run.problem.beta(s.run.solution, l, t) <= 1e-6,
                      "nonzero grade price on a slack bound");
      }
    }

    // (c) energy-rule surplus negative, double-rule surplus zero
    for (int t = 0; t < s.c.periods; ++t) {
      check.require(s.energy.surplus_per_period[t] < 0.0,
                    "energy-rule surplus not negative");
      check.require(std::abs(s.double_rule.surplus_per_period[t]) <= 1e-4,
                    "double-rule surplus not zero: " +
                        fmt(s.double_rule.surplus_per_period[t]));
    }

    // (d) the grade payment is exactly price x 76 degrees
    const double span = 60.0 - (-16.0);
    for (const SettlementLine& line : s.double_rule.lines) {
      if (!line.pays) continue;
      const double expect = s.prices.grade_supply(1, line.period) * span;
      check.require(line.grade_usd == expect,
                    "grade payment is not exactly grade price x 76");
    }
  });
  check.require(secs < 1.0, "runtime exceeded 1 s");
  report(1, "toy steady-state reproduction (LMP ratio, binding bound, surpluses)",
         check, secs);
}

// ---- criterion 2: per-period decomposition identity ----
void criterion_2() {
  Check check;
  const double secs = run_timed([&] {
    for (const char* name : {"toy", "fournode", "island"}) {
      const SolvedCase s = solve_bundled(name);
      check.require(s.run.solution.status == qp::SolveStatus::Optimal,
                    std::string(name) + " did not solve");
      if (!check.ok) return;
      for (int t = 0; t < s.c.periods; ++t) {
        const double residual =
            verify_period_identity(s.run.problem, s.run.solution, s.double_rule, t);
        check.require(residual < 1e-5,
                      std::string(name) + " period " + std::to_string(t + 1) +
                          " residual " + fmt(residual));
      }
    }
  });
  check.require(secs < 10.0, "runtime exceeded 10 s");
  report(2, "per-period surplus identity on all scenarios (< 1e-5 $)", check, secs);
}

// ---- criterion 3: component signs ----
void criterion_3() {
  Check check;
  const double secs = run_timed([&] {
    for (const char* name : {"toy", "fournode", "island"}) {
      const SolvedCase s = solve_bundled(name);
      check.require(s.run.solution.status == qp::SolveStatus::Optimal,
                    std::string(name) + " did not solve");
      if (!check.ok) return;
      for (int t = 0; t < s.c.periods; ++t) {
        const Decomposition d = decompose_period(s.run.problem, s.run.solution, t);
        check.require(d.cr >= -1e-6, std::string(name) + ": CR negative at period " +
                                         std::to_string(t + 1));
        check.require(d.il >= -1e-6, std::string(name) + ": IL negative at period " +
                                         std::to_string(t + 1));
        check.require(d.iu <= 1e-6, std::string(name) + ": IU positive at period " +
                                        std::to_string(t + 1));
        if (std::string(name) == "fournode")
          check.require(std::abs(s.double_rule.surplus_per_period[t] - d.sum()) < 1e-5,
                        "fournode: CR + IL + IU does not equal Upsilon_t");
      }
    }
  });
  report(3, "component signs (CR >= 0, IL >= 0, IU <= 0) and column identity", check,
         secs);
}

// ---- criterion 4: revenue adequacy ----
void criterion_4() {
  Check check;
  const double secs = run_timed([&] {
    for (const char* name : {"toy", "fournode", "island"}) {
      const SolvedCase s = solve_bundled(name);
      check.require(s.run.solution.status == qp::SolveStatus::Optimal,
                    std::string(name) + " did not solve");
      if (!check.ok) return;
      const TotalIdentity total =
          verify_total_identity(s.run.problem, s.run.solution, s.double_rule);
      check.require(total.asserted, std::string(name) + ": ambient not constant");
      check.require(total.residual < 1e-5, std::string(name) + ": total residual " +
                                               fmt(total.residual));
      check.require(total.upsilon_total >= -1e-6,
                    std::string(name) + ": operator surplus negative: " +
                        fmt(total.upsilon_total));
      if (std::string(name) == "island") {
        check.require(total.upsilon_total >= 0.0, "island double-rule surplus < 0");
        check.require(s.energy.surplus_total < 0.0,
                      "island energy-rule surplus not negative: " +
                          fmt(s.energy.surplus_total));
      }
    }
  });
  report(4, "revenue adequacy: totals match the dual formula and stay nonnegative",
         check, secs);
}

// ---- criterion 5: unit invariance ----
void criterion_5() {
  Check check;
  const double secs = run_timed([&] {
    for (const char* name : {"toy", "fournode"}) {
      const CaseDefinition c = load_case(g_cases_dir + "/" + std::string(name) +
                                         ".case");
      const UnitInvarianceReport rep = verify_unit_invariance(c);
      check.require(rep.max_component_deviation < 1e-6,
                    std::string(name) + ": component deviation " +
                        fmt(rep.max_component_deviation));
      check.require(rep.max_lambda_deviation < 1e-4,
                    std::string(name) + ": lambda moved across units by " +
                        fmt(rep.max_lambda_deviation));
      if (std::string(name) == "fournode") {
        check.require(rep.binding_mu_rows_checked > 0,
                      "no binding mu rows to check the 1/K scaling on");
        check.require(rep.max_mu_scale_deviation < 1e-4,
                      "mu duals do not scale by 1/K: deviation " +
                          fmt(rep.max_mu_scale_deviation));
      }
    }
  });
  report(5, "unit invariance across C/F/K (components, lambda, mu scaling)", check,
         secs);
}

// ---- criterion 6: duals vs finite-difference oracle ----
void criterion_6() {
  Check check;
  int usable = 0;
  const double secs = run_timed([&] {
    struct Plan {
      const char* name;
      int max_loads;    // how many load nodes to sample
      int periods_per;  // periods sampled per load node
    };
    for (const Plan plan :
         {Plan{"toy", 1, 4}, Plan{"fournode", 2, 3}, Plan{"island", 1, 1}}) {
      const CaseDefinition c =
          load_case(g_cases_dir + "/" + std::string(plan.name) + ".case");
      std::vector<OracleSample> samples;
      int loads_taken = 0;
      for (int i = 0; i < c.network.node_count() && loads_taken < plan.max_loads;
           ++i) {
        if (c.network.node_kind(i) != NodeKind::Load) continue;
        ++loads_taken;
        const int step = std::max(1, c.periods / plan.periods_per);
        int taken = 0;
        for (int t = 0; t < c.periods && taken < plan.periods_per; t += step, ++taken) {
          samples.push_back({SampleKind::Energy, i, t, {}});
          samples.push_back(
              {SampleKind::Grade, c.network.location_of(i, Side::Supply), t, {}});
        }
      }
      const auto results = run_oracle_suite(c, samples, 1e-4, 1e-3);
      for (const OracleSample& s : results) {
        if (s.result.degenerate) continue;  // subgradient rows are reported only
        ++usable;
        check.require(s.result.relative_error() <= 0.01,
                      std::string(plan.name) + ": dual/oracle mismatch " +
                          fmt(s.result.dual) + " vs " + fmt(s.result.fd));
      }
    }
    check.require(usable >= 20, "fewer than 20 non-degenerate samples: " +
                                    std::to_string(usable));
  });
  check.require(secs < 60.0, "runtime exceeded 60 s");
  report(6,
         "finite-difference oracle agreement on " + std::to_string(usable) +
             " non-degenerate samples",
         check, secs);
}

// ---- criterion 7: solver unit suite ----
void criterion_7() {
  Check check;
  const double secs = run_timed([&] {
    // min x^2 s.t. x >= 1
    {
      qp::Problem pr;
      pr.p = linalg::Matrix(1, 1);
      pr.p(0, 0) = 2.0;
      pr.q = {0.0};
      pr.a = linalg::Matrix(0, 1);
      pr.g = linalg::Matrix(1, 1);
      pr.g(0, 0) = -1.0;
      pr.h = {-1.0};
      const qp::Solution sol = qp::solve(pr);
      check.require(sol.status == qp::SolveStatus::Optimal, "micro-QP 1 not optimal");
      check.require(std::abs(sol.x[0] - 1.0) <= 1e-8, "micro-QP 1: x* off");
      check.require(std::abs(sol.duals_ineq[0] - 2.0) <= 1e-6,
                    "micro-QP 1: dual off: " + fmt(sol.duals_ineq[0]));
    }
    // min (x-3)^2 s.t. x + y = 4, y >= 2
    {
      qp::Problem pr;
      pr.p = linalg::Matrix(2, 2);
      pr.p(0, 0) = 2.0;
      pr.q = {-6.0, 0.0};
      pr.a = linalg::Matrix(1, 2);
      pr.a(0, 0) = 1.0;
      pr.a(0, 1) = 1.0;
      pr.b = {4.0};
      pr.g = linalg::Matrix(1, 2);
      pr.g(0, 1) = -1.0;
      pr.h = {-2.0};
      const qp::Solution sol = qp::solve(pr);
      check.require(sol.status == qp::SolveStatus::Optimal, "micro-QP 2 not optimal");
      check.require(std::abs(sol.x[0] - 2.0) <= 1e-8 &&
                        std::abs(sol.x[1] - 2.0) <= 1e-8,
                    "micro-QP 2: primal off");
      check.require(std::abs(sol.duals_eq[0] - 2.0) <= 1e-6,
                    "micro-QP 2: equality dual off");
      check.require(std::abs(sol.duals_ineq[0] - 2.0) <= 1e-6,
                    "micro-QP 2: inequality dual off");
    }
    // KKT residuals and complementary slackness on every bundled solve
    for (const char* name : {"toy", "fournode", "island"}) {
      const SolvedCase s = solve_bundled(name);
      check.require(s.run.solution.status == qp::SolveStatus::Optimal,
                    std::string(name) + " did not solve");
      if (!check.ok) return;
      const double tol = 1e-8;
      check.require(s.run.solution.kkt.stationarity <= tol,
                    std::string(name) + ": stationarity residual above tolerance");
      check.require(s.run.solution.kkt.primal <= tol,
                    std::string(name) + ": primal residual above tolerance");
      check.require(s.run.solution.kkt.dual <= tol,
                    std::string(name) + ": negative inequality dual");
      check.require(s.run.solution.kkt.complementarity <= 10.0 * tol,
                    std::string(name) + ": complementarity above 10x tolerance");
      // per-row dual x slack
      const qp::Problem& pr = s.run.problem.qp;
      linalg::Vector gx(pr.num_ineq(), 0.0);
      linalg::matvec_serial(pr.g, s.run.solution.x, gx);
      for (std::size_t r = 0; r < pr.num_ineq(); ++r)
        check.require(s.run.solution.duals_ineq[r] * (pr.h[r] - gx[r]) <= 10.0 * tol,
                      std::string(name) + ": complementary slackness violated");
    }
  });
  report(7, "solver unit suite (analytic micro-QPs, residual gates, slackness)",
         check, secs);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cases_dir = argv[1];
  std::printf("acceptance suite (cases: %s)\n", g_cases_dir.c_str());
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
