#include "hgp/pricing.hpp"

#include "hgp/errors.hpp"

namespace hgp {

PriceSchedule extract_prices(const CaseDefinition& c, const DispatchProblem& pr,
                             const qp::Solution& sol) {
  if (sol.status != qp::SolveStatus::Optimal)
    throw NumericalError(std::string("cannot price a non-optimal solution (status: ") +
                         qp::status_name(sol.status) + ")");
  PriceSchedule prices;
  prices.unit = pr.unit;
  const int n = pr.num_nodes;
  const int T = pr.periods;
  prices.lmp_usd_per_mwh = Matrix(n, T);
  prices.grade_supply = Matrix(n, T);
  prices.grade_return = Matrix(n, T);
  for (int i = 0; i < n; ++i) {
    const int loc_s = c.network.location_of(i, Side::Supply);
    const int loc_r = c.network.location_of(i, Side::Return);
    for (int t = 0; t < T; ++t) {
      prices.lmp_usd_per_mwh(i, t) = pr.lambda_node(sol, i, t) / pr.dt_h;
      prices.grade_supply(i, t) = pr.beta(sol, loc_s, t);
      prices.grade_return(i, t) = pr.beta(sol, loc_r, t);
    }
  }
  return prices;
}

namespace {

Settlement settle(const CaseDefinition& c, const DispatchProblem& pr,
                  const qp::Solution& sol, const PriceSchedule& prices, Rule rule) {
  Settlement out;
  out.rule = rule;
  out.surplus_per_period.assign(pr.periods, 0.0);

  for (int i = 0; i < pr.num_nodes; ++i) {
    const bool is_source = c.network.node_kind(i) == NodeKind::Source;
    const int loc_s = c.network.location_of(i, Side::Supply);
    const int loc_r = c.network.location_of(i, Side::Return);
    const int src = pr.source_of_node[i];
    for (int t = 0; t < pr.periods; ++t) {
      SettlementLine line;
      line.node = i;
      line.period = t;
      line.rule = rule;
      line.pays = !is_source;
      const double quantity_mwh =
          (is_source ? pr.generation(sol, src, t) : pr.loads_mw(i, t)) * pr.dt_h;
      line.energy_usd = prices.lmp_usd_per_mwh(i, t) * quantity_mwh;
      if (rule == Rule::Double) {
        // grade settled on degrees above ambient at the node's own locations
        line.grade_usd =
            prices.grade_supply(i, t) * (pr.tq_u(loc_s, t) - pr.ambient_u(loc_s, t)) +
            prices.grade_return(i, t) * (pr.tq_u(loc_r, t) - pr.ambient_u(loc_r, t));
      }
      // loads pay energy + grade; sources receive energy - grade
      const double operator_take =
          line.pays ? line.energy_usd + line.grade_usd
                    : -(line.energy_usd - line.grade_usd);
      out.surplus_per_period[t] += operator_take;
      out.lines.push_back(line);
    }
  }
  for (double v : out.surplus_per_period) out.surplus_total += v;
  return out;
}

}  // namespace

Settlement settle_energy_rule(const CaseDefinition& c, const DispatchProblem& pr,
                              const qp::Solution& sol, const PriceSchedule& prices) {
  return settle(c, pr, sol, prices, Rule::Energy);
}

Settlement settle_double_rule(const CaseDefinition& c, const DispatchProblem& pr,
                              const qp::Solution& sol, const PriceSchedule& prices) {
  return settle(c, pr, sol, prices, Rule::Double);
}

}  // namespace hgp
