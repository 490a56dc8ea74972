// A complete solvable scenario: network + horizon data + participant data.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hgp/network.hpp"
#include "hgp/units.hpp"

namespace hgp {

enum class SourceKind { Chp, Boiler };

/// Cost curve and capacity of one heat source (at most one per node).
struct SourceSpec {
  int node = -1;
  SourceKind kind = SourceKind::Chp;
  double linear_usd_per_mwh = 0.0;
  double quadratic_usd_per_mw2h = 0.0;
  double g_min_mw = 0.0;
  double g_max_mw = 0.0;
};

/// Lower/upper temperature bounds submitted for one location, internal Celsius.
struct TemperatureRequirement {
  int location = -1;
  double min_c = 0.0;  // T_Q, the grade requirement
  double max_c = 0.0;  // T_sa, the security limit
};

struct Diagnostic {
  std::string code;
  std::string message;
};

/// Everything the dispatch program needs, normalized to internal units
/// (kg/s, seconds, Celsius, MW for powers). `display_unit` only affects
/// presentation and the unit the optimization is expressed in.
struct CaseDefinition {
  std::string name;
  std::string comment;
  HeatNetwork network;
  std::vector<std::string> node_names;

  int periods = 0;
  double dt_s = 3600.0;

  Matrix loads_mw;                   // node x period, zero at source nodes
  std::vector<SourceSpec> sources;   // ordered by node id
  std::vector<TemperatureRequirement> requirements;  // exactly one per location
  Matrix ambient_c;                  // location x period
  Vector initial_temperatures_c;     // per location
  TempUnit display_unit = TempUnit::Celsius;

  double dt_hours() const { return dt_s / 3600.0; }
  const std::string& node_name(int node) const { return node_names[node]; }
  std::string location_name(int location) const;
  /// Source index at a node, or nullopt.
  std::optional<int> source_at(int node) const;
};

/// Fills missing per-location requirements with non-binding defaults:
/// min = the coldest ambient seen by that location, max = 150 C.
void apply_default_requirements(CaseDefinition& c);

/// Returns an empty list iff the case satisfies all structural invariants,
/// psi <= 1 on every pipe, and all horizon data lengths match.
std::vector<Diagnostic> validate_case(const CaseDefinition& c);

/// Reinterprets the case in another presentation unit. Internal storage
/// stays Celsius; only `display_unit` changes.
CaseDefinition convert_units(const CaseDefinition& c, TempUnit target);

}  // namespace hgp
