// Brute-force verification of marginal prices: perturb one data coordinate,
// re-solve the whole program twice, and difference the optimal costs.
#pragma once

#include <vector>

#include "hgp/dispatch.hpp"

namespace hgp {

struct FdResult {
  double fd = 0.0;          // central difference (or one-sided, see flag)
  double dual = 0.0;        // the price the solver reported
  double left = 0.0;        // backward one-sided difference
  double right = 0.0;       // forward one-sided difference
  bool one_sided = false;   // a perturbed problem was infeasible
  bool degenerate = false;  // left/right differences disagree (binding switch)

  /// |dual - fd| / max(|dual|, 0.01)
  double relative_error() const;
};

/// d C*/d D at (node, period) via +/- eps MW re-solves; the base optimal
/// cost is passed in so sweeps can share it.
FdResult fd_energy_price(const CaseDefinition& c, int node, int period,
                         double base_cost, double eps_mw = 1e-4,
                         const qp::SolverOptions& options = {});

/// d C*/d T_Q at (location, period) via +/- eps degree re-solves.
FdResult fd_grade_price(const CaseDefinition& c, int location, int period,
                        double base_cost, double eps_deg = 1e-3,
                        const qp::SolverOptions& options = {});

/// d C*/d T_sa (upper bound); equals -mu at the optimum.
FdResult fd_security_price(const CaseDefinition& c, int location, int period,
                           double base_cost, double eps_deg = 1e-3,
                           const qp::SolverOptions& options = {});

enum class SampleKind { Energy, Grade };

struct OracleSample {
  SampleKind kind = SampleKind::Energy;
  int entity = -1;  // node for Energy, location for Grade
  int period = 0;
  FdResult result;
};

/// Runs FD checks for every load node-period and every temperature
/// lower bound in `grade_locations`, fanned out across OpenMP workers.
/// Results are ordered deterministically regardless of thread count.
std::vector<OracleSample> run_oracle_suite(const CaseDefinition& c,
                                           const std::vector<OracleSample>& samples,
                                           double eps_mw, double eps_deg,
                                           const qp::SolverOptions& options = {});

}  // namespace hgp
