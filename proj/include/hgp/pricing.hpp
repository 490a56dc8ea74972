// Maps solver duals to prices and settles participants under the
// energy-based and the energy-grade double pricing rules.
#pragma once

#include <vector>

#include "hgp/dispatch.hpp"

namespace hgp {

/// Nodal prices extracted from an optimal solution. Energy prices come from
/// balance-row duals ($/MWh); grade prices are the duals of the temperature
/// lower-bound rows at the node's two locations ($ per build-unit degree).
struct PriceSchedule {
  Matrix lmp_usd_per_mwh;   // node x period
  Matrix grade_supply;      // node x period
  Matrix grade_return;      // node x period
  TempUnit unit = TempUnit::Celsius;
};

/// Throws NumericalError unless solution.status is Optimal.
PriceSchedule extract_prices(const CaseDefinition& c, const DispatchProblem& pr,
                             const qp::Solution& sol);

enum class Rule { Energy, Double };

struct SettlementLine {
  int node = -1;
  int period = 0;
  Rule rule = Rule::Energy;
  double energy_usd = 0.0;  // price x energy
  double grade_usd = 0.0;   // grade price x degrees above ambient; 0 under energy rule
  bool pays = false;        // loads pay, sources receive
};

struct Settlement {
  Rule rule = Rule::Energy;
  std::vector<SettlementLine> lines;
  Vector surplus_per_period;  // operator take: loads' payments - sources' receipts
  double surplus_total = 0.0;
};

/// Loads pay p*D, sources receive p*G; the per-period surplus is the
/// energy-rule merchandise surplus.
Settlement settle_energy_rule(const CaseDefinition& c, const DispatchProblem& pr,
                              const qp::Solution& sol, const PriceSchedule& prices);

/// Adds grade payments p_g * (T_Q - T_ambient) at each node's own two
/// locations: loads pay them on top, sources have them deducted.
Settlement settle_double_rule(const CaseDefinition& c, const DispatchProblem& pr,
                              const qp::Solution& sol, const PriceSchedule& prices);

}  // namespace hgp
