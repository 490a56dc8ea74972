#include "hgp/case.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hgp {

std::string CaseDefinition::location_name(int location) const {
  const Location& loc = network.locations()[location];
  return node_name(loc.node_id) + (loc.side == Side::Supply ? "^S" : "^R");
}

std::optional<int> CaseDefinition::source_at(int node) const {
  for (std::size_t s = 0; s < sources.size(); ++s)
    if (sources[s].node == node) return static_cast<int>(s);
  return std::nullopt;
}

void apply_default_requirements(CaseDefinition& c) {
  const int nloc = c.network.location_count();
  std::vector<char> covered(nloc, 0);
  for (const auto& r : c.requirements)
    if (r.location >= 0 && r.location < nloc) covered[r.location] = 1;
  for (int l = 0; l < nloc; ++l) {
    if (covered[l]) continue;
    double coldest = 1e300;
    for (int t = 0; t < c.periods; ++t) coldest = std::min(coldest, c.ambient_c(l, t));
    c.requirements.push_back(TemperatureRequirement{l, coldest, 150.0});
  }
  std::sort(c.requirements.begin(), c.requirements.end(),
            [](const auto& a, const auto& b) { return a.location < b.location; });
}

namespace {

void add(std::vector<Diagnostic>& out, const std::string& code, const std::string& msg) {
  out.push_back(Diagnostic{code, msg});
}

}  // namespace

std::vector<Diagnostic> validate_case(const CaseDefinition& c) {
  std::vector<Diagnostic> diags;
  const int n = c.network.node_count();
  const int nloc = c.network.location_count();

  if (c.periods <= 0) add(diags, "horizon", "period count must be positive");
  if (c.dt_s <= 0.0) add(diags, "horizon", "dispatch interval must be positive");

  if (static_cast<int>(c.node_names.size()) != n)
    add(diags, "shape", "node name list does not match node count");

  // sources: one per source node, none elsewhere, convex costs, sane bounds
  std::vector<int> sources_at(n, 0);
  for (const SourceSpec& s : c.sources) {
    if (s.node < 0 || s.node >= n) {
      add(diags, "source", "source references unknown node " + std::to_string(s.node));
      continue;
    }
    sources_at[s.node]++;
    const std::string who = c.node_names.empty() ? std::to_string(s.node) : c.node_name(s.node);
    if (c.network.node_kind(s.node) != NodeKind::Source)
      add(diags, "source", "node " + who + " has a source but its exchanger is load-oriented");
    if (s.quadratic_usd_per_mw2h < 0.0)
      add(diags, "source", "source at " + who + " has a concave cost curve");
    if (s.g_min_mw < 0.0 || s.g_min_mw > s.g_max_mw)
      add(diags, "source",
          "source at " + who + " violates 0 <= g_min <= g_max (" +
              std::to_string(s.g_min_mw) + ", " + std::to_string(s.g_max_mw) + ")");
  }
  for (int i = 0; i < n; ++i) {
    if (sources_at[i] > 1)
      add(diags, "source", "node " + std::to_string(i) + " has more than one source");
    if (c.network.node_kind(i) == NodeKind::Source && sources_at[i] == 0)
      add(diags, "source", "source-oriented node " + std::to_string(i) + " has no source spec");
  }

  // loads: right shape, nonnegative, only at load nodes
  if (static_cast<int>(c.loads_mw.rows()) != n ||
      static_cast<int>(c.loads_mw.cols()) != c.periods) {
    add(diags, "shape", "load table must be nodes x periods");
  } else {
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < c.periods; ++t) {
        const double d = c.loads_mw(i, t);
        if (d < 0.0)
          add(diags, "load", "negative load at node " + std::to_string(i) +
                                 ", period " + std::to_string(t));
        if (d != 0.0 && c.network.node_kind(i) == NodeKind::Source)
          add(diags, "load", "load attached to source node " + std::to_string(i));
      }
  }

  if (static_cast<int>(c.ambient_c.rows()) != nloc ||
      static_cast<int>(c.ambient_c.cols()) != c.periods)
    add(diags, "shape", "ambient table must be locations x periods (got " +
                            std::to_string(c.ambient_c.rows()) + " x " +
                            std::to_string(c.ambient_c.cols()) + ")");

  if (static_cast<int>(c.initial_temperatures_c.size()) != nloc)
    add(diags, "shape", "initial temperature vector must have one entry per location");

  // requirements: one per location, ordered bounds
  std::vector<int> reqs_at(nloc, 0);
  for (const TemperatureRequirement& r : c.requirements) {
    if (r.location < 0 || r.location >= nloc) {
      add(diags, "requirement", "requirement references unknown location");
      continue;
    }
    reqs_at[r.location]++;
    if (r.min_c > r.max_c)
      add(diags, "requirement",
          "requirement at location " + std::to_string(r.location) + " has min > max");
  }
  for (int l = 0; l < nloc; ++l)
    if (reqs_at[l] != 1)
      add(diags, "requirement", "location " + std::to_string(l) + " has " +
                                    std::to_string(reqs_at[l]) +
                                    " requirements (expected exactly 1)");

  // pipe delay must stay within the one-interval blend model
  if (c.dt_s > 0.0) {
    for (const Branch& br : c.network.branches()) {
      if (br.kind != BranchKind::Pipe) continue;
      const double psi = c.network.water_density() * br.cross_section_m2 * br.length_m /
                         (br.mass_flow_kg_s * c.dt_s);
      if (psi > 1.0)
        add(diags, "model",
            "pipe " + std::to_string(br.id) + " has psi = " + std::to_string(psi) +
                " > 1: residence time exceeds the dispatch interval");
    }
  }

  if (!c.network.branches().empty()) {
    const double imbalance = c.network.hydraulic_imbalance();
    if (imbalance > 1e-9 * (1.0 + c.network.branches().front().mass_flow_kg_s))
      add(diags, "hydraulics",
          "mass flows are inconsistent (worst nodal imbalance " +
              std::to_string(imbalance) +
              " kg/s); shadow-price identities assume balance");
  }

  return diags;
}

CaseDefinition convert_units(const CaseDefinition& c, TempUnit target) {
  CaseDefinition out = c;
  out.display_unit = target;
  return out;
}

}  // namespace hgp
