#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles/hamiltonian.hpp"
#include "tdvp/errors.hpp"
#include "tdvp/husimi.hpp"

using namespace tdvp::husimi;
using tdvp::trap::DriveMode;

namespace {

// Static Penning trap in oscillator units: K_a = 1, K_r = 1.75.
TrapConfig penning() {
  TrapConfig c = tdvp::trap::dimensionless_defaults();
  c.r0 = std::sqrt(0.5);
  c.z0 = 0.5;
  c.u0 = -0.25;
  c.b0 = 3.0;
  c.omega_a_ref = 1.0;
  c.omega_r_ref = std::sqrt(1.75);
  c.drive_mode = DriveMode::static_field;
  return c;
}

cplx random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  cplx z(u(rng), u(rng));
  while (std::abs(z) > 1.0) z = cplx(u(rng), u(rng));
  return radius * z;
}

}  // namespace

TEST_CASE("H4 moments in oscillator units") {
  // k = 1/2 on both modes, m = 0, origin: Q1 = 1, Q2 = 2.
  const ModeMoments q{1.0, 2.0, 0.0};
  CHECK(h4_from_moments(q, q, {1.0, 1.0}) == doctest::Approx(-2.0));
}

TEST_CASE("H4 and H6 expectations match boson operators") {
  std::mt19937_64 rng(11);
  TrapConfig c = penning();
  c.omega_a_ref = 1.3;
  c.omega_r_ref = 0.7;
  for (int i = 0; i < 6; ++i) {
    c.l = i % 3;
    c.m_a = i % 2;
    c.m_r = (i + 1) % 3;
    c.axial_sector = i % 2 ? 0.75 : 0.25;
    const cplx za = random_point(rng, 0.6), zr = random_point(rng, 0.6);
    const auto s = make_state(c, za, zr);
    const auto a = oracle::axial_expectations(c, za);
    const auto r = oracle::radial_expectations(c, zr);
    CHECK(expectation_h4(s, c) == doctest::Approx(oracle::h4(a, r)).epsilon(1e-9));
    CHECK(expectation_h6(s, c) == doctest::Approx(oracle::h6(a, r)).epsilon(1e-9));
  }
}

TEST_CASE("quadrupole-only energy reduces to the linear form") {
  const TrapConfig c = penning();
  const auto h = assemble(c, 0.0);
  CHECK(h.terms.c20 == 0.0);
  CHECK(h.terms.c11 == 0.0);
  CHECK(h.terms.c02 == 0.0);
  CHECK(h.terms.d30 == 0.0);
  CHECK(h.terms.d03 == 0.0);
  // Matched reference frequencies: A = B on both modes.
  CHECK(h.terms.a_a == doctest::Approx(h.terms.b_a));
  CHECK(h.terms.a_r == doctest::Approx(h.terms.b_r));
}

TEST_CASE("energy equals the boson-space Hamiltonian expectation") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 8; ++i) {
    TrapConfig c = penning();
    c.omega_a_ref = 0.6 + 0.2 * i;
    c.omega_r_ref = 1.5 - 0.1 * i;
    c.l = i % 3;
    c.m_a = (i / 2) % 2;
    c.m_r = i % 2;
    c.axial_sector = i % 2 ? 0.25 : 0.75;
    c.c_oct = i % 2 ? 0.01 : 0.0;
    c.c_hex = i % 4 == 3 ? 0.002 : 0.0;
    if (i >= 4) {
      c.drive_mode = DriveMode::time_dependent;
      c.v0 = 0.03;
    }
    const double t = 0.37 * i;
    const cplx za = random_point(rng, 0.5), zr = random_point(rng, 0.5);
    const double e = evaluate(assemble(c, t), make_state(c, za, zr));
    CHECK(e == doctest::Approx(oracle::trap_energy(c, za, zr, t)).epsilon(1e-9));
  }
}

TEST_CASE("time profile of the coefficients") {
  TrapConfig c = penning();
  c.drive_mode = DriveMode::time_dependent;
  c.v0 = 0.05;
  c.c_oct = 0.02;
  const auto h0 = assemble(c, 0.0);
  for (double t : {0.3, 1.9}) {
    const auto h = assemble(c, t);
    CHECK(h0.at(t).terms.b_a == doctest::Approx(h.terms.b_a));
    CHECK(h0.at(t).terms.c11 == doctest::Approx(h.terms.c11));
  }
}

TEST_CASE("analytic gradient against central differences") {
  std::mt19937_64 rng(17);
  TrapConfig c = penning();
  c.omega_a_ref = 0.8;
  c.c_oct = 0.05;
  c.c_hex = 0.01;
  c.l = 1;
  const auto h = assemble(c, 0.0);
  for (int i = 0; i < 20; ++i) {
    const cplx za = random_point(rng, 0.7), zr = random_point(rng, 0.7);
    const auto s = make_state(c, za, zr);
    const auto g = gradient(h, s);
    const double d = 1e-6;
    auto f = [&](cplx a, cplx r) { return evaluate(h, s.moved_to(a, r)); };
    const cplx ga = 0.5 * ((f(za + d, zr) - f(za - d, zr)) / (2 * d) +
                           cplx(0, 1) * (f(za + cplx(0, d), zr) - f(za - cplx(0, d), zr)) / (2 * d));
    const cplx gr = 0.5 * ((f(za, zr + d) - f(za, zr - d)) / (2 * d) +
                           cplx(0, 1) * (f(za, zr + cplx(0, d)) - f(za, zr - cplx(0, d))) / (2 * d));
    CHECK(std::abs(g.axial - ga) <= 1e-6 * std::max(1.0, std::abs(ga)));
    CHECK(std::abs(g.radial - gr) <= 1e-6 * std::max(1.0, std::abs(gr)));
  }
}

TEST_CASE("matched harmonic trap: zero gradient and a single minimum at the origin") {
  const TrapConfig c = penning();
  const auto g = gradient(assemble(c, 0.0), make_state(c, 0.0, 0.0));
  CHECK(std::abs(g.axial) < 1e-15);
  CHECK(std::abs(g.radial) < 1e-15);

  const auto eq = find_equilibria(c);
  REQUIRE(eq.points.size() == 1);
  const Equilibrium& p = eq.points.front();
  CHECK(p.classification == Classification::minimum);
  CHECK(std::abs(p.state.axial().point.z()) <= 1e-10);
  CHECK(std::abs(p.state.radial().point.z()) <= 1e-10);
  for (double e : p.hessian_eigenvalues) CHECK(e > 0.0);
}

TEST_CASE("equilibria need a frozen drive") {
  TrapConfig c = penning();
  c.drive_mode = DriveMode::time_dependent;
  CHECK_THROWS_AS(find_equilibria(c), tdvp::Error);
}

TEST_CASE("octopole moves the minimum off the origin") {
  TrapConfig c = penning();
  c.omega_a_ref = 1.3;
  c.omega_r_ref = 1.0;
  c.c_oct = 0.01;
  const auto eq = find_equilibria(c);
  REQUIRE(!eq.points.empty());
  const Equilibrium& lowest = eq.points.front();
  CHECK(lowest.classification == Classification::minimum);
  CHECK(lowest.scaled_gradient_norm <= 1e-10);
  // Sorted by energy.
  for (std::size_t i = 1; i < eq.points.size(); ++i) {
    CHECK(eq.points[i - 1].energy <= eq.points[i].energy);
  }
}
