// Two-network (supply/return) heat system: locations, branches, incidence
// matrices and the linear thermal-balance system they induce.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hgp/linalg.hpp"

namespace hgp {

using linalg::Matrix;
using linalg::Vector;

enum class Side { Supply, Return };
enum class BranchKind { Pipe, Exchanger };
enum class NodeKind { Source, Load };

/// One of a heat node's two graph vertices. Every node owns exactly one
/// supply-side and one return-side location.
struct Location {
  int id = -1;       // dense index in [0, 2n)
  int node_id = -1;  // owning heat node, dense index in [0, n)
  Side side = Side::Supply;
};

/// Directed edge, oriented along the water flow. Pipes connect two locations
/// on the same side; an exchanger branch connects a node's two locations
/// (return -> supply for sources, supply -> return for loads).
struct Branch {
  int id = -1;
  std::string name;
  BranchKind kind = BranchKind::Pipe;
  int from_location = -1;
  int to_location = -1;
  double mass_flow_kg_s = 0.0;
  // pipe-only physical data
  double length_m = 0.0;
  double cross_section_m2 = 0.0;
  double heat_transfer_w_per_m_c = 0.0;  // per-unit-length loss coefficient v
};

/// Outset/extremity incidence matrices (2n x (n+k)): column b carries a 1 at
/// the branch's from-location row in A_out and at its to-location row in A_in.
/// Throws TopologyError on dangling references or isolated locations.
std::pair<Matrix, Matrix> build_incidence(const std::vector<Location>& locations,
                                          const std::vector<Branch>& branches);

class HeatNetwork {
 public:
  HeatNetwork() = default;  // empty placeholder; real networks use the ctor below

  /// Validates the topology (location pairing, branch endpoints, one
  /// exchanger per node, positive mass flows) and builds the incidence
  /// matrices. Node kinds are derived from exchanger orientation.
  HeatNetwork(std::vector<Location> locations, std::vector<Branch> branches,
              double water_heat_capacity_j_per_kg_c = 4182.0,
              double water_density_kg_per_m3 = 1000.0);

  int node_count() const { return node_count_; }
  int location_count() const { return static_cast<int>(locations_.size()); }
  int branch_count() const { return static_cast<int>(branches_.size()); }
  int pipe_count() const { return branch_count() - node_count_; }

  const std::vector<Location>& locations() const { return locations_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const Matrix& a_out() const { return a_out_; }
  const Matrix& a_in() const { return a_in_; }

  double water_heat_capacity() const { return water_heat_capacity_; }
  double water_density() const { return water_density_; }

  NodeKind node_kind(int node) const { return node_kinds_[node]; }
  int location_of(int node, Side side) const;
  /// The location whose row carries the node's heat balance (the exchanger
  /// outlet: supply side for sources, return side for loads).
  int balance_location(int node) const;
  int exchanger_branch(int node) const { return exchanger_of_node_[node]; }

  /// Max |sum of inflow - sum of outflow| in kg/s over all locations.
  double hydraulic_imbalance() const;

 private:
  std::vector<Location> locations_;
  std::vector<Branch> branches_;
  std::vector<NodeKind> node_kinds_;
  std::vector<int> exchanger_of_node_;
  std::vector<int> location_index_;  // node*2 + (side==Return)
  Matrix a_out_, a_in_;
  int node_count_ = 0;
  double water_heat_capacity_ = 4182.0;
  double water_density_ = 1000.0;
};

/// Outlet temperature of a pipe after one dispatch interval:
///   [(1-psi) T_now + psi T_prev - T_a] * exp(-vL/(cm)) + T_a
/// with psi = rho S L / (m dt). Throws ModelValidityError when psi > 1
/// (residence time longer than the interval) and InputError for non-pipes.
double pipe_outlet_temperature(const Branch& pipe, double t_inlet_now_c,
                               double t_inlet_prev_c, double t_ambient_c,
                               double dt_s, double water_heat_capacity,
                               double water_density);

/// Which equation a row of the assembled system carries.
struct SystemRow {
  bool balance = false;  // heat balance (H = G - D) vs temperature mixing (H = 0)
  int node = -1;         // owning node
  int location = -1;     // location whose equation this is
};

/// The linear thermal system H_t = C1 T_t + C2 T_{t-1} + R_t in SI units
/// (W per degree Celsius). Rows are ordered balance-first (node order),
/// then mixing rows (location order); columns follow location ids.
struct SystemMatrices {
  Matrix c1;     // 2n x 2n
  Matrix c2;     // 2n x 2n
  Matrix r_map;  // 2n x 2n, R_t = r_map * T_ambient(t)
  std::vector<double> loss_factors;  // per branch, exp(-vL/(cm)); 1 for exchangers
  std::vector<double> psi;           // per branch, rho S L/(m dt); 0 for exchangers
  std::vector<SystemRow> rows;       // size 2n
  std::vector<int> row_of_location;  // location id -> row index
  double dt_s = 0.0;

  Vector r_of(const Vector& ambient_c) const;
};

/// Assembles C1, C2 and the ambient map from the incidence matrices
/// (C1 = A_out Gc A_out^T - A_in Gc D a A_out^T and friends). Throws
/// ModelValidityError when any pipe has psi > 1 and TopologyError when a
/// location has zero total inflow or outflow.
SystemMatrices assemble_system(const HeatNetwork& network, double dt_s);

}  // namespace hgp
