#include <doctest.h>

#include <cmath>

#include "hgp/errors.hpp"
#include "hgp/pricing.hpp"
#include "test_helpers.hpp"

using namespace hgp;

namespace {

struct SolvedToy {
  CaseDefinition c;
  DispatchRun run;
  PriceSchedule prices;
};

SolvedToy solved_toy() {
  SolvedToy s{test::toy_case(), {}, {}};
  s.run = solve_case(s.c, TempUnit::Celsius);
  REQUIRE(s.run.solution.status == qp::SolveStatus::Optimal);
  s.prices = extract_prices(s.c, s.run.problem, s.run.solution);
  return s;
}

}  // namespace

TEST_CASE("toy LMPs: load price under generator price by the return loss factor") {
  const SolvedToy s = solved_toy();
  const test::ToySteadyState ss = test::toy_steady_state();
  for (int t = 0; t < s.c.periods; ++t) {
    const double p_gen = s.prices.lmp_usd_per_mwh(0, t);
    const double p_load = s.prices.lmp_usd_per_mwh(1, t);
    CHECK(p_load < p_gen);
    CHECK(p_load / p_gen == doctest::Approx(ss.loss).epsilon(1e-3));
    // against the hand-built KKT solution
    CHECK(p_gen == doctest::Approx(ss.lmp_source).epsilon(1e-6));
    CHECK(p_load == doctest::Approx(ss.lmp_load).epsilon(1e-6));
  }
}

TEST_CASE("toy grade prices: positive only at the load's supply location") {
  const SolvedToy s = solved_toy();
  const test::ToySteadyState ss = test::toy_steady_state();
  for (int t = 0; t < s.c.periods; ++t) {
    CHECK(s.prices.grade_supply(1, t) ==
          doctest::Approx(ss.beta_load_supply).epsilon(1e-4));
    CHECK(s.prices.grade_supply(1, t) > 0.01);
    CHECK(s.prices.grade_supply(0, t) < 1e-7);
    CHECK(s.prices.grade_return(0, t) < 1e-7);
    CHECK(s.prices.grade_return(1, t) < 1e-7);
  }
}

TEST_CASE("pricing refuses non-optimal solutions") {
  const CaseDefinition c = test::toy_case(2, 12.0);  // infeasible
  const DispatchRun run = solve_case(c, TempUnit::Celsius);
  REQUIRE(run.solution.status != qp::SolveStatus::Optimal);
  CHECK_THROWS_AS(extract_prices(c, run.problem, run.solution), NumericalError);
}

TEST_CASE("energy settlement: flows are price times quantity, surplus negative") {
  const SolvedToy s = solved_toy();
  const Settlement e = settle_energy_rule(s.c, s.run.problem, s.run.solution, s.prices);
  const test::ToySteadyState ss = test::toy_steady_state();
  for (const SettlementLine& line : e.lines) {
    CHECK(line.grade_usd == 0.0);
    const double expect =
        line.pays ? s.prices.lmp_usd_per_mwh(line.node, line.period) * 2.0
                  : s.prices.lmp_usd_per_mwh(line.node, line.period) *
                        s.run.problem.generation(s.run.solution, 0, line.period);
    CHECK(line.energy_usd == doctest::Approx(expect).epsilon(1e-12));
  }
  const double m_expected = ss.lmp_load * 2.0 - ss.lmp_source * ss.generation;
  for (int t = 0; t < s.c.periods; ++t) {
    CHECK(e.surplus_per_period[t] < 0.0);
    CHECK(e.surplus_per_period[t] == doctest::Approx(m_expected).epsilon(1e-6));
    CHECK(e.surplus_per_period[t] == doctest::Approx(-2.02).epsilon(0.05));
  }
}

TEST_CASE("double settlement: grade payment appears and surplus vanishes") {
  const SolvedToy s = solved_toy();
  const Settlement d = settle_double_rule(s.c, s.run.problem, s.run.solution, s.prices);
  const test::ToySteadyState ss = test::toy_steady_state();
  for (const SettlementLine& line : d.lines) {
    if (line.pays) {
      // load's grade payment = grade price x (60 - (-16)) = beta x 76
      CHECK(line.grade_usd ==
            doctest::Approx(s.prices.grade_supply(1, line.period) * 76.0)
                .epsilon(1e-12));
      CHECK(line.grade_usd == doctest::Approx(ss.beta_load_supply * 76.0).epsilon(1e-4));
    } else {
      CHECK(line.grade_usd == doctest::Approx(0.0).scale(1.0));
    }
  }
  for (int t = 0; t < s.c.periods; ++t)
    CHECK(d.surplus_per_period[t] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("lossless single-pair case: uniform price and zero surplus") {
  CaseDefinition c = test::toy_case();
  c.network = test::two_node_network(9000.0, 0.0, 0.0, 1000.0 * 1000.0 / 3600.0);
  const DispatchRun run = solve_case(c, TempUnit::Celsius);
  REQUIRE(run.solution.status == qp::SolveStatus::Optimal);
  const PriceSchedule prices = extract_prices(c, run.problem, run.solution);
  const Settlement e = settle_energy_rule(c, run.problem, run.solution, prices);
  for (int t = 0; t < c.periods; ++t) {
    CHECK(prices.lmp_usd_per_mwh(0, t) ==
          doctest::Approx(prices.lmp_usd_per_mwh(1, t)).epsilon(1e-9));
    CHECK(std::abs(e.surplus_per_period[t]) < 1e-6);
  }
}

TEST_CASE("with all grade prices zero the two rules settle identically") {
  CaseDefinition c = test::toy_case();
  for (auto& r : c.requirements) {
    r.min_c = -16.0;
    r.max_c = 150.0;
  }
  const DispatchRun run = solve_case(c, TempUnit::Celsius);
  REQUIRE(run.solution.status == qp::SolveStatus::Optimal);
  const PriceSchedule prices = extract_prices(c, run.problem, run.solution);
  const Settlement e = settle_energy_rule(c, run.problem, run.solution, prices);
  const Settlement d = settle_double_rule(c, run.problem, run.solution, prices);
  REQUIRE(e.lines.size() == d.lines.size());
  for (std::size_t i = 0; i < e.lines.size(); ++i) {
    CHECK(e.lines[i].energy_usd == doctest::Approx(d.lines[i].energy_usd).epsilon(1e-12));
    CHECK(std::abs(d.lines[i].grade_usd) < 1e-7);
  }
}

TEST_CASE("settlement arithmetic identity between the two rules") {
  // Upsilon_t = M_t + sum(load grade payments) - sum(source grade deductions),
  // exactly, since both rules share prices and quantities
  for (const char* name : {"toy", "fournode"}) {
    const CaseDefinition c = test::load_bundled(name);
    const DispatchRun run = solve_case(c, TempUnit::Celsius);
    REQUIRE(run.solution.status == qp::SolveStatus::Optimal);
    const PriceSchedule prices = extract_prices(c, run.problem, run.solution);
    const Settlement e = settle_energy_rule(c, run.problem, run.solution, prices);
    const Settlement d = settle_double_rule(c, run.problem, run.solution, prices);
    for (int t = 0; t < c.periods; ++t) {
      double grade_net = 0.0;
      for (const SettlementLine& line : d.lines)
        if (line.period == t) grade_net += line.grade_usd;  // loads add, sources deduct
      CHECK(d.surplus_per_period[t] ==
            doctest::Approx(e.surplus_per_period[t] + grade_net).epsilon(1e-12));
    }
  }
}

TEST_CASE("interior sources are paid exactly their marginal cost") {
  for (const char* name : {"toy", "fournode"}) {
    const CaseDefinition c = test::load_bundled(name);
    const DispatchRun run = solve_case(c, TempUnit::Celsius);
    REQUIRE(run.solution.status == qp::SolveStatus::Optimal);
    const PriceSchedule prices = extract_prices(c, run.problem, run.solution);
    for (std::size_t s = 0; s < c.sources.size(); ++s) {
      const SourceSpec& src = c.sources[s];
      for (int t = 0; t < c.periods; ++t) {
        const double g = run.problem.generation(run.solution, s, t);
        const double margin = std::min(g - src.g_min_mw, src.g_max_mw - g);
        if (margin < 1e-3) continue;  // at a bound, price may detach
        const double mc = src.linear_usd_per_mwh + 2.0 * src.quadratic_usd_per_mw2h * g;
        CHECK(prices.lmp_usd_per_mwh(src.node, t) ==
              doctest::Approx(mc).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("grade prices vanish on every non-binding requirement row") {
  const CaseDefinition c = test::load_bundled("fournode");
  const DispatchRun run = solve_case(c, TempUnit::Celsius);
  REQUIRE(run.solution.status == qp::SolveStatus::Optimal);
  for (int l = 0; l < run.problem.num_locations; ++l)
    for (int t = 0; t < c.periods; ++t) {
      const double temp = run.problem.temperature(run.solution, l, t);
      const double slack = temp - run.problem.tq_u(l, t);
      if (slack > 1e-3)
        CHECK(run.problem.beta(run.solution, l, t) * slack <= 1e-7);
    }
}
