#include <doctest.h>

#include <cmath>

#include "hgp/errors.hpp"
#include "hgp/network.hpp"
#include "test_helpers.hpp"

using namespace hgp;

namespace {
const double kFlow = 1000.0 * 1000.0 / 3600.0;  // 1000 t/h in kg/s
const double kCm = 4182.0 * kFlow;              // W/degC
}  // namespace

TEST_CASE("toy incidence matrices are 4x4 with one entry per column") {
  const HeatNetwork net = test::two_node_network(9000.0, 0.0, 0.099, kFlow);
  const Matrix& a_out = net.a_out();
  const Matrix& a_in = net.a_in();
  REQUIRE(a_out.rows() == 4);
  REQUIRE(a_out.cols() == 4);  // n + k = 2 + 2
  for (std::size_t b = 0; b < 4; ++b) {
    double sum_out = 0.0, sum_in = 0.0;
    for (std::size_t l = 0; l < 4; ++l) {
      sum_out += a_out(l, b);
      sum_in += a_in(l, b);
    }
    CHECK(sum_out == 1.0);
    CHECK(sum_in == 1.0);
  }
  // b1: supply pipe from location 0 to location 2
  CHECK(a_out(0, 0) == 1.0);
  CHECK(a_in(2, 0) == 1.0);
}

TEST_CASE("single self-loop node yields 2x1 incidence columns") {
  std::vector<Location> locs = {{0, 0, Side::Supply}, {1, 0, Side::Return}};
  Branch x;
  x.id = 0;
  x.kind = BranchKind::Exchanger;
  x.from_location = 1;  // source: return -> supply
  x.to_location = 0;
  x.mass_flow_kg_s = 10.0;
  auto [a_out, a_in] = build_incidence(locs, {x});
  REQUIRE(a_out.rows() == 2);
  REQUIRE(a_out.cols() == 1);
  CHECK(a_out(1, 0) == 1.0);
  CHECK(a_out(0, 0) == 0.0);
  CHECK(a_in(0, 0) == 1.0);
  CHECK(a_in(1, 0) == 0.0);
}

TEST_CASE("fournode case: incidence dimensions follow the size contract") {
  const CaseDefinition c = test::load_bundled("fournode");
  const HeatNetwork& net = c.network;
  CHECK(net.node_count() == 4);
  CHECK(net.branch_count() == 10);  // n + k = 4 + 6
  CHECK(net.a_out().rows() == 8);
  CHECK(net.a_out().cols() == 10);
  for (std::size_t b = 0; b < 10; ++b) {
    double sum_out = 0.0, sum_in = 0.0;
    for (std::size_t l = 0; l < 8; ++l) {
      sum_out += net.a_out()(l, b);
      sum_in += net.a_in()(l, b);
    }
    CHECK(sum_out == 1.0);
    CHECK(sum_in == 1.0);
  }
}

TEST_CASE("dangling and isolated topologies are rejected") {
  std::vector<Location> locs = {{0, 0, Side::Supply}, {1, 0, Side::Return}};
  Branch x;
  x.id = 0;
  x.kind = BranchKind::Exchanger;
  x.from_location = 1;
  x.to_location = 5;  // nonexistent
  x.mass_flow_kg_s = 1.0;
  CHECK_THROWS_AS(build_incidence(locs, {x}), TopologyError);

  // second node's locations never touched
  std::vector<Location> locs4 = {
      {0, 0, Side::Supply}, {1, 0, Side::Return},
      {2, 1, Side::Supply}, {3, 1, Side::Return}};
  x.to_location = 0;
  CHECK_THROWS_AS(build_incidence(locs4, {x}), TopologyError);
}

TEST_CASE("pipe outlet temperature, lossless zero-delay pipe is the identity") {
  Branch pipe;
  pipe.id = 0;
  pipe.kind = BranchKind::Pipe;
  pipe.length_m = 1000.0;
  pipe.cross_section_m2 = 0.0;
  pipe.heat_transfer_w_per_m_c = 0.0;
  pipe.mass_flow_kg_s = 50.0;
  const double out =
      pipe_outlet_temperature(pipe, 73.25, 12.0, -16.0, 3600.0, 4182.0, 1000.0);
  CHECK(out == doctest::Approx(73.25).epsilon(1e-14));
}

TEST_CASE("pipe outlet temperature matches hand evaluation for the toy pipe") {
  Branch pipe;
  pipe.id = 0;
  pipe.kind = BranchKind::Pipe;
  pipe.length_m = 9000.0;
  pipe.cross_section_m2 = 0.0;
  pipe.heat_transfer_w_per_m_c = 0.099;
  pipe.mass_flow_kg_s = kFlow;

  // loss factor exp(-891 / 1161666.67) ~ 0.9992333
  const double loss = std::exp(-0.099 * 9000.0 / kCm);
  CHECK(loss == doctest::Approx(0.9992333).epsilon(1e-6));

  // steady supply pipe: 60.06 C in, ambient -16 C -> ~60.00 C out
  const double out_supply =
      pipe_outlet_temperature(pipe, 60.06, 60.06, -16.0, 3600.0, 4182.0, 1000.0);
  CHECK(out_supply == doctest::Approx(60.0016842).epsilon(1e-7));

  // steady return pipe: 58.29 C in -> ~58.23 C out
  const double out_return =
      pipe_outlet_temperature(pipe, 58.29, 58.29, -16.0, 3600.0, 4182.0, 1000.0);
  CHECK(out_return == doctest::Approx(58.2330413).epsilon(1e-7));
}

TEST_CASE("pipe with residence time above one interval is rejected") {
  Branch pipe;
  pipe.id = 0;
  pipe.kind = BranchKind::Pipe;
  pipe.length_m = 9000.0;
  pipe.cross_section_m2 = 0.214;  // realistic bore: psi ~ 1.9 at 1000 t/h, 1 h
  pipe.heat_transfer_w_per_m_c = 0.099;
  pipe.mass_flow_kg_s = kFlow;
  CHECK_THROWS_AS(
      pipe_outlet_temperature(pipe, 60.0, 60.0, -16.0, 3600.0, 4182.0, 1000.0),
      ModelValidityError);

  const HeatNetwork net = test::two_node_network(9000.0, 0.214, 0.099, kFlow);
  CHECK_THROWS_AS(assemble_system(net, 3600.0), ModelValidityError);
}

TEST_CASE("non-pipe branches cannot run the pipe equation") {
  Branch x;
  x.id = 0;
  x.kind = BranchKind::Exchanger;
  x.mass_flow_kg_s = 1.0;
  CHECK_THROWS_AS(pipe_outlet_temperature(x, 60.0, 60.0, -16.0, 3600.0, 4182.0, 1000.0),
                  InputError);
}

TEST_CASE("lossless network assembles to instantaneous mixing: C2 = 0, R = 0") {
  const HeatNetwork net = test::two_node_network(9000.0, 0.0, 0.0, kFlow);
  const SystemMatrices sys = assemble_system(net, 3600.0);
  for (double v : sys.c2.data()) CHECK(v == 0.0);
  for (double v : sys.r_map.data()) CHECK(v == 0.0);
  for (double lf : sys.loss_factors) CHECK(lf == 1.0);
  const Vector r = sys.r_of({-16.0, -16.0, -16.0, -16.0});
  for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("loss factor is 1 exactly iff v = 0, and psi tracks pipe volume") {
  const HeatNetwork lossy = test::two_node_network(9000.0, 0.05, 0.099, kFlow);
  const SystemMatrices sys = assemble_system(lossy, 3600.0);
  for (int b = 0; b < 2; ++b) {  // pipes
    CHECK(sys.loss_factors[b] > 0.0);
    CHECK(sys.loss_factors[b] < 1.0);
    CHECK(sys.psi[b] == doctest::Approx(1000.0 * 0.05 * 9000.0 / (kFlow * 3600.0)));
  }
  for (int b = 2; b < 4; ++b) {  // exchangers
    CHECK(sys.loss_factors[b] == 1.0);
    CHECK(sys.psi[b] == 0.0);
  }
}

TEST_CASE("toy balance rows evaluated at the steady temperatures give G and D") {
  const HeatNetwork net = test::two_node_network(9000.0, 0.0, 0.099, kFlow);
  const SystemMatrices sys = assemble_system(net, 3600.0);
  const test::ToySteadyState ss = test::toy_steady_state();

  Vector temps(4);
  temps[0] = ss.t1s;
  temps[1] = ss.t1r;
  temps[2] = ss.t2s;
  temps[3] = ss.t2r;
  Vector h(4, 0.0);
  linalg::matvec_serial(sys.c1, temps, h);
  const Vector r = sys.r_of(Vector(4, -16.0));
  for (int k = 0; k < 4; ++k) h[k] += r[k];  // steady state: C2 = 0 here

  // balance row of node 1 (source): H = G in watts
  CHECK(sys.rows[0].balance);
  CHECK(sys.rows[0].node == 0);
  CHECK(h[0] * 1e-6 == doctest::Approx(ss.generation).epsilon(1e-9));
  CHECK(ss.generation > 2.13);
  CHECK(ss.generation < 2.14);
  // balance row of node 2 (load): H = -D
  CHECK(sys.rows[1].balance);
  CHECK(h[1] * 1e-6 == doctest::Approx(-2.0).epsilon(1e-9));
  // mixing rows evaluate to zero
  CHECK(h[2] == doctest::Approx(0.0).scale(kCm));
  CHECK(h[3] == doctest::Approx(0.0).scale(kCm));
}

TEST_CASE("hydraulic balance lemma: (A_in - A_out) Gc applied to ones is zero") {
  for (const char* name : {"toy", "fournode", "island"}) {
    const CaseDefinition c = test::load_bundled(name);
    const HeatNetwork& net = c.network;
    CHECK(net.hydraulic_imbalance() <= 1e-9);
    // row-wise: sum_in c m - sum_out c m == 0 exactly for every location
    for (int l = 0; l < net.location_count(); ++l) {
      double net_flow = 0.0;
      for (int b = 0; b < net.branch_count(); ++b) {
        const double gc = net.water_heat_capacity() * net.branches()[b].mass_flow_kg_s;
        net_flow += (net.a_in()(l, b) - net.a_out()(l, b)) * gc;
      }
      CHECK(net_flow == doctest::Approx(0.0).scale(1e6));
    }
  }
}

TEST_CASE("steady mixing matrix rows sum to zero when loss factors are 1") {
  // with unit loss factors, temperatures mix convexly: (C1 + C2) 1 = 0 row-wise
  const HeatNetwork net = test::two_node_network(9000.0, 0.05, 0.0, kFlow);
  const SystemMatrices sys = assemble_system(net, 3600.0);
  for (int k = 0; k < 4; ++k) {
    double row_sum = 0.0;
    for (int j = 0; j < 4; ++j) row_sum += sys.c1(k, j) + sys.c2(k, j);
    CHECK(row_sum == doctest::Approx(0.0).scale(kCm));
  }
}

TEST_CASE("assembly is deterministic: identical inputs, bit-identical matrices") {
  const CaseDefinition c = test::load_bundled("fournode");
  const SystemMatrices a = assemble_system(c.network, c.dt_s);
  const SystemMatrices b = assemble_system(c.network, c.dt_s);
  CHECK(a.c1 == b.c1);
  CHECK(a.c2 == b.c2);
  CHECK(a.r_map == b.r_map);
}

TEST_CASE("row ordering: balance rows first in node order, then mixing rows") {
  const CaseDefinition c = test::load_bundled("fournode");
  const SystemMatrices sys = assemble_system(c.network, c.dt_s);
  const int n = c.network.node_count();
  for (int k = 0; k < n; ++k) {
    CHECK(sys.rows[k].balance);
    CHECK(sys.rows[k].node == k);
    CHECK(sys.rows[k].location == c.network.balance_location(k));
  }
  int prev_location = -1;
  for (int k = n; k < 2 * n; ++k) {
    CHECK_FALSE(sys.rows[k].balance);
    CHECK(sys.rows[k].location > prev_location);
    prev_location = sys.rows[k].location;
  }
}
