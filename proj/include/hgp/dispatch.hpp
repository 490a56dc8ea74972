// Builds the horizon-coupled dispatch QP: generation costs minimized subject
// to per-period thermal balance/mixing equalities, generation capacity
// bounds and temperature bounds. Keeps the total, invertible map between QP
// rows/columns and (family, entity, period) triples.
#pragma once

#include <optional>

#include "hgp/case.hpp"
#include "hgp/qp.hpp"

namespace hgp {

enum class IneqFamily { GenUpper, GenLower, TempUpper, TempLower };

struct IneqRef {
  IneqFamily family;
  int entity;  // source index for Gen*, location id for Temp*
  int period;
};

struct EqRef {
  int system_row;  // row of the assembled 2n-system
  int period;
};

/// One-coordinate data tweak applied while building (used by the
/// finite-difference oracle; deltas are in MW / build-unit degrees).
struct Perturbation {
  int load_node = -1;
  int load_period = -1;
  double load_delta_mw = 0.0;
  int tq_location = -1;
  int tq_period = -1;
  double tq_delta = 0.0;
  int tsa_location = -1;
  int tsa_period = -1;
  double tsa_delta = 0.0;
};

class DispatchProblem {
 public:
  qp::Problem qp;

  // thermal system scaled to MW per build-unit degree; these are the
  // matrices the equality duals pair with
  Matrix c1, c2, r_map;
  Matrix ambient_u;  // location x period, build unit
  Matrix tq_u;       // location x period lower bounds, build unit
  Matrix tsa_u;      // location x period upper bounds
  Vector t0_u;       // initial temperatures
  Matrix loads_mw;   // node x period (after perturbation)

  std::vector<SystemRow> rows;
  std::vector<int> row_of_location;
  std::vector<int> source_of_node;  // -1 where none

  TempUnit unit = TempUnit::Celsius;
  double dt_h = 1.0;
  int periods = 0;
  int num_nodes = 0;
  int num_locations = 0;
  int num_sources = 0;

  // ---- variable / row maps ----
  int gen_var(int source, int period) const { return source * periods + period; }
  int temp_var(int location, int period) const {
    return num_sources * periods + period * num_locations + location;
  }
  int eq_row(int system_row, int period) const {
    return period * num_locations + system_row;
  }
  EqRef eq_ref(int row) const {
    return EqRef{row % num_locations, row / num_locations};
  }
  int ineq_row(IneqFamily family, int entity, int period) const;
  IneqRef ineq_ref(int row) const;

  // ---- named views into a solution ----
  double generation(const qp::Solution& s, int source, int period) const {
    return s.x[gen_var(source, period)];
  }
  double temperature(const qp::Solution& s, int location, int period) const {
    return s.x[temp_var(location, period)];
  }
  /// Equality dual of a system row (lambda), in $ per MW-period.
  double lambda(const qp::Solution& s, int system_row, int period) const {
    return s.duals_eq[eq_row(system_row, period)];
  }
  double lambda_node(const qp::Solution& s, int node, int period) const {
    return lambda(s, node, period);  // balance rows lead, in node order
  }
  double mu(const qp::Solution& s, int location, int period) const {
    return s.duals_ineq[ineq_row(IneqFamily::TempUpper, location, period)];
  }
  double beta(const qp::Solution& s, int location, int period) const {
    return s.duals_ineq[ineq_row(IneqFamily::TempLower, location, period)];
  }
  double gamma_upper(const qp::Solution& s, int source, int period) const {
    return s.duals_ineq[ineq_row(IneqFamily::GenUpper, source, period)];
  }
  double gamma_lower(const qp::Solution& s, int source, int period) const {
    return s.duals_ineq[ineq_row(IneqFamily::GenLower, source, period)];
  }
};

/// Assembles the QP for a validated case in the given presentation unit.
/// Temperature-block coefficients are C1/K (so lambda keeps its meaning
/// across units while temperature duals scale with the unit).
DispatchProblem build_problem(const CaseDefinition& c, const SystemMatrices& sys,
                              TempUnit unit,
                              const std::optional<Perturbation>& perturb = std::nullopt);

/// Total generation cost in $ over the horizon for a source x period table.
double evaluate_cost(const CaseDefinition& c, const Matrix& generation_mw);

/// Generation table of a solved problem.
Matrix generation_table(const DispatchProblem& pr, const qp::Solution& s);

struct DispatchRun {
  SystemMatrices system;
  DispatchProblem problem;
  qp::Solution solution;
};

/// assemble + build + solve in one go.
DispatchRun solve_case(const CaseDefinition& c, TempUnit unit,
                       const qp::SolverOptions& options = {},
                       const std::optional<Perturbation>& perturb = std::nullopt);

}  // namespace hgp
