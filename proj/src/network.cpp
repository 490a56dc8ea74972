#include "hgp/network.hpp"

#include <cmath>

#include "hgp/errors.hpp"

namespace hgp {

std::pair<Matrix, Matrix> build_incidence(const std::vector<Location>& locations,
                                          const std::vector<Branch>& branches) {
  const std::size_t nloc = locations.size();
  Matrix a_out(nloc, branches.size());
  Matrix a_in(nloc, branches.size());
  std::vector<int> touched(nloc, 0);
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const Branch& br = branches[b];
    if (br.from_location < 0 || br.from_location >= static_cast<int>(nloc) ||
        br.to_location < 0 || br.to_location >= static_cast<int>(nloc))
      throw TopologyError("branch " + std::to_string(br.id) +
                          " references a location that does not exist");
    a_out(br.from_location, b) = 1.0;
    a_in(br.to_location, b) = 1.0;
    touched[br.from_location] = 1;
    touched[br.to_location] = 1;
  }
  for (std::size_t l = 0; l < nloc; ++l)
    if (!touched[l])
      throw TopologyError("location " + std::to_string(l) + " has no incident branch");
  return {std::move(a_out), std::move(a_in)};
}

HeatNetwork::HeatNetwork(std::vector<Location> locations, std::vector<Branch> branches,
                         double water_heat_capacity_j_per_kg_c,
                         double water_density_kg_per_m3)
    : locations_(std::move(locations)),
      branches_(std::move(branches)),
      water_heat_capacity_(water_heat_capacity_j_per_kg_c),
      water_density_(water_density_kg_per_m3) {
  if (locations_.size() % 2 != 0)
    throw TopologyError("location count must be 2n (one supply + one return per node)");
  node_count_ = static_cast<int>(locations_.size()) / 2;

  for (std::size_t i = 0; i < locations_.size(); ++i)
    if (locations_[i].id != static_cast<int>(i))
      throw TopologyError("location ids must be dense and ordered");

  // each node owns exactly one location per side
  location_index_.assign(static_cast<std::size_t>(node_count_) * 2, -1);
  for (const Location& loc : locations_) {
    if (loc.node_id < 0 || loc.node_id >= node_count_)
      throw TopologyError("location " + std::to_string(loc.id) + " has an invalid node id");
    int& slot = location_index_[loc.node_id * 2 + (loc.side == Side::Return ? 1 : 0)];
    if (slot != -1)
      throw TopologyError("node " + std::to_string(loc.node_id) +
                          " has two locations on the same side");
    slot = loc.id;
  }
  for (int v : location_index_)
    if (v == -1) throw TopologyError("a node is missing one of its two locations");

  exchanger_of_node_.assign(node_count_, -1);
  node_kinds_.assign(node_count_, NodeKind::Load);
  for (const Branch& br : branches_) {
    if (br.mass_flow_kg_s <= 0.0)
      throw TopologyError("branch " + std::to_string(br.id) + " has non-positive mass flow");
    const Location& from = locations_.at(br.from_location);
    const Location& to = locations_.at(br.to_location);
    if (br.kind == BranchKind::Pipe) {
      if (from.side != to.side)
        throw TopologyError("pipe " + std::to_string(br.id) +
                            " connects locations on different sides");
      if (br.length_m <= 0.0)
        throw TopologyError("pipe " + std::to_string(br.id) + " has non-positive length");
      if (br.cross_section_m2 < 0.0 || br.heat_transfer_w_per_m_c < 0.0)
        throw TopologyError("pipe " + std::to_string(br.id) + " has negative physical data");
    } else {
      if (from.node_id != to.node_id || from.side == to.side)
        throw TopologyError("exchanger branch " + std::to_string(br.id) +
                            " must connect one node's supply and return locations");
      if (exchanger_of_node_[from.node_id] != -1)
        throw TopologyError("node " + std::to_string(from.node_id) +
                            " has more than one exchanger branch");
      exchanger_of_node_[from.node_id] = br.id;
      // return -> supply means heat is injected there: a source node
      node_kinds_[from.node_id] =
          (to.side == Side::Supply) ? NodeKind::Source : NodeKind::Load;
    }
  }
  for (int n = 0; n < node_count_; ++n)
    if (exchanger_of_node_[n] == -1)
      throw TopologyError("node " + std::to_string(n) + " has no exchanger branch");

  for (std::size_t i = 0; i < branches_.size(); ++i)
    if (branches_[i].id != static_cast<int>(i))
      throw TopologyError("branch ids must be dense and ordered");

  auto [a_out, a_in] = build_incidence(locations_, branches_);
  a_out_ = std::move(a_out);
  a_in_ = std::move(a_in);
}

int HeatNetwork::location_of(int node, Side side) const {
  return location_index_.at(node * 2 + (side == Side::Return ? 1 : 0));
}

int HeatNetwork::balance_location(int node) const {
  return location_of(node, node_kinds_[node] == NodeKind::Source ? Side::Supply
                                                                 : Side::Return);
}

double HeatNetwork::hydraulic_imbalance() const {
  double worst = 0.0;
  for (const Location& loc : locations_) {
    double net = 0.0;
    for (const Branch& br : branches_) {
      if (br.to_location == loc.id) net += br.mass_flow_kg_s;
      if (br.from_location == loc.id) net -= br.mass_flow_kg_s;
    }
    worst = std::max(worst, std::abs(net));
  }
  return worst;
}

double pipe_outlet_temperature(const Branch& pipe, double t_inlet_now_c,
                               double t_inlet_prev_c, double t_ambient_c,
                               double dt_s, double water_heat_capacity,
                               double water_density) {
  if (pipe.kind != BranchKind::Pipe)
    throw InputError("pipe_outlet_temperature called on a non-pipe branch");
  if (dt_s <= 0.0) throw InputError("dispatch interval must be positive");
  const double psi = water_density * pipe.cross_section_m2 * pipe.length_m /
                     (pipe.mass_flow_kg_s * dt_s);
  if (psi > 1.0)
    throw ModelValidityError(
        "pipe " + std::to_string(pipe.id) +
        ": water residence time exceeds the dispatch interval (psi = " +
        std::to_string(psi) + ")");
  const double loss = std::exp(-pipe.heat_transfer_w_per_m_c * pipe.length_m /
                               (water_heat_capacity * pipe.mass_flow_kg_s));
  return ((1.0 - psi) * t_inlet_now_c + psi * t_inlet_prev_c - t_ambient_c) * loss +
         t_ambient_c;
}

Vector SystemMatrices::r_of(const Vector& ambient_c) const {
  Vector r(r_map.rows(), 0.0);
  linalg::matvec_serial(r_map, ambient_c, r);
  return r;
}

SystemMatrices assemble_system(const HeatNetwork& network, double dt_s) {
  if (dt_s <= 0.0) throw InputError("dispatch interval must be positive");
  const int nloc = network.location_count();
  const int nb = network.branch_count();
  const double c = network.water_heat_capacity();
  const double rho = network.water_density();

  SystemMatrices sys;
  sys.dt_s = dt_s;
  sys.loss_factors.resize(nb);
  sys.psi.resize(nb);

  // per-branch diagonals of Eq.-style parameters: Gc = c m, D = loss factor,
  // a = 1 - psi, b = psi (exchangers: lossless, no delay)
  Vector gc(nb), da(nb), db(nb), d_minus_i(nb);
  for (int b = 0; b < nb; ++b) {
    const Branch& br = network.branches()[b];
    double loss = 1.0;
    double psi = 0.0;
    if (br.kind == BranchKind::Pipe) {
      loss = std::exp(-br.heat_transfer_w_per_m_c * br.length_m /
                      (c * br.mass_flow_kg_s));
      psi = rho * br.cross_section_m2 * br.length_m / (br.mass_flow_kg_s * dt_s);
      if (psi > 1.0)
        throw ModelValidityError("pipe " + std::to_string(br.id) +
                                 ": psi > 1, outside the two-period blend model");
    }
    sys.loss_factors[b] = loss;
    sys.psi[b] = psi;
    gc[b] = c * br.mass_flow_kg_s;
    da[b] = gc[b] * loss * (1.0 - psi);
    db[b] = gc[b] * loss * psi;
    d_minus_i[b] = gc[b] * (loss - 1.0);
  }

  // every location needs inflow and outflow for its row to make sense
  const Matrix& a_out = network.a_out();
  const Matrix& a_in = network.a_in();
  for (int l = 0; l < nloc; ++l) {
    double in = 0.0, out = 0.0;
    for (int b = 0; b < nb; ++b) {
      in += a_in(l, b) * gc[b];
      out += a_out(l, b) * gc[b];
    }
    if (in <= 0.0)
      throw TopologyError("location " + std::to_string(l) +
                          " has zero total inflow; its mixing equation is singular");
    if (out <= 0.0)
      throw TopologyError("location " + std::to_string(l) + " has zero total outflow");
  }

  // location-row form of Eq.-style matrices, then permute to canonical order
  Matrix c1_loc = linalg::scaled_product(a_out, gc, a_out);
  {
    Matrix mix = linalg::scaled_product(a_in, da, a_out);
    for (std::size_t i = 0; i < c1_loc.data().size(); ++i)
      c1_loc.data()[i] -= mix.data()[i];
  }
  Matrix c2_loc = linalg::scaled_product(a_in, db, a_out);
  for (double& x : c2_loc.data()) x = -x;
  Matrix r_loc = linalg::scaled_product(a_in, d_minus_i, a_out);

  // canonical row order: balance rows in node order, then mixing rows in
  // location order
  sys.rows.resize(nloc);
  sys.row_of_location.assign(nloc, -1);
  const int n = network.node_count();
  for (int node = 0; node < n; ++node) {
    const int loc = network.balance_location(node);
    sys.rows[node] = SystemRow{true, node, loc};
    sys.row_of_location[loc] = node;
  }
  int next = n;
  for (int l = 0; l < nloc; ++l) {
    if (sys.row_of_location[l] != -1) continue;
    sys.rows[next] = SystemRow{false, network.locations()[l].node_id, l};
    sys.row_of_location[l] = next;
    ++next;
  }

  sys.c1 = Matrix(nloc, nloc);
  sys.c2 = Matrix(nloc, nloc);
  sys.r_map = Matrix(nloc, nloc);
  for (int l = 0; l < nloc; ++l) {
    const int row = sys.row_of_location[l];
    for (int j = 0; j < nloc; ++j) {
      sys.c1(row, j) = c1_loc(l, j);
      sys.c2(row, j) = c2_loc(l, j);
      sys.r_map(row, j) = r_loc(l, j);
    }
  }
  return sys;
}

}  // namespace hgp
