#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tdvp/errors.hpp"
#include "tdvp/su11.hpp"
#include "tdvp/trap.hpp"

using namespace tdvp::trap;

namespace {

TrapConfig paul() {
  TrapConfig c = dimensionless_defaults();
  c.r0 = std::sqrt(0.5);
  c.z0 = 0.5;
  c.u0 = 0.01;
  c.v0 = 0.03;
  c.drive_mode = DriveMode::time_dependent;
  return c;
}

}  // namespace

TEST_CASE("drive profile") {
  TrapConfig c = paul();
  CHECK(drive(c, 0.0) == doctest::Approx(0.04));
  CHECK(drive(c, std::numbers::pi / c.omega_rf) == doctest::Approx(-0.02));
  c.v0 = 0.0;
  for (double t : {0.0, 0.3, 7.0}) CHECK(drive(c, t) == 0.01);
  c.v0 = 0.03;
  c.drive_mode = DriveMode::static_field;
  CHECK(drive(c, 1.0) == 0.01);
}

TEST_CASE("spring constants") {
  TrapConfig c = paul();
  c.v0 = 0.0;
  c.u0 = 0.2;
  const auto s = spring_constants(c, 0.0);
  CHECK(c.c_quad() == doctest::Approx(-1.0));
  CHECK(s.k_a == doctest::Approx(4.0 * c.c_quad() * 0.2));
  CHECK(s.k_a < 0.0);

  c.u0 = 0.0;
  c.b0 = 2.0;
  const auto m = spring_constants(c, 0.0);
  CHECK(m.k_r == doctest::Approx(c.mass * c.omega_c() * c.omega_c() / 4.0));
  CHECK(m.k_a == 0.0);
}

TEST_CASE("spring profile splits static and cosine parts") {
  TrapConfig c = paul();
  const auto p = spring_profile(c);
  for (double t : {0.0, 0.4, 2.5}) {
    const auto s = spring_constants(c, t);
    CHECK(s.k_a == doctest::Approx(p.k_a_static + p.k_a_cosine * std::cos(t)));
    CHECK(s.k_r == doctest::Approx(p.k_r_static + p.k_r_cosine * std::cos(t)));
  }
  c.drive_mode = DriveMode::static_field;
  CHECK(spring_profile(c).k_a_cosine == 0.0);

  // Pseudopotential: the static part gains K_ac^2 / (2 M Omega^2).
  c.drive_mode = DriveMode::pseudopotential;
  const auto q = spring_profile(c);
  CHECK(q.k_a_cosine == 0.0);
  CHECK(q.k_a_static == doctest::Approx(p.k_a_static + p.k_a_cosine * p.k_a_cosine / 2.0));
  CHECK(q.k_r_static == doctest::Approx(p.k_r_static + p.k_r_cosine * p.k_r_cosine / 2.0));
}

TEST_CASE("harmonic polynomials satisfy Laplace's equation") {
  // Laplacian in cylindrical coordinates for axially symmetric f(rho, z).
  const double h = 1e-3;
  for (int order : {2, 4, 6}) {
    for (double rho : {0.3, 0.9}) {
      for (double z : {-0.4, 0.7}) {
        auto f = [&](double r, double zz) { return harmonic_polynomial(order, r, zz); };
        const double frr = (f(rho + h, z) - 2 * f(rho, z) + f(rho - h, z)) / (h * h);
        const double fr = (f(rho + h, z) - f(rho - h, z)) / (2 * h);
        const double fzz = (f(rho, z + h) - 2 * f(rho, z) + f(rho, z - h)) / (h * h);
        // O(h^2) stencil error only; a wrong coefficient gives O(|fzz|).
        CHECK(std::abs(frr + fr / rho + fzz) < 1e-3 * (1.0 + std::abs(fzz)));
      }
    }
  }
  CHECK(harmonic_polynomial(2, 1.0, 1.0) == 1.0);
  CHECK(harmonic_polynomial(4, 1.0, 1.0) == -13.0);
  CHECK(harmonic_polynomial(6, 1.0, 1.0) == -19.0);
  CHECK_THROWS_AS(harmonic_polynomial(3, 1.0, 1.0), tdvp::Error);
  CHECK_THROWS_AS(harmonic_polynomial(2, -1.0, 1.0), tdvp::Error);
}

TEST_CASE("Bargmann indices") {
  TrapConfig c = paul();
  CHECK(bargmann_indices(c).k_r == 0.5);
  CHECK(bargmann_indices(c).k_a == 0.25);
  c.l = 3;
  c.axial_sector = 0.75;
  const auto b = bargmann_indices(c);
  CHECK(b.k_r == 2.0);
  CHECK(b.k_a == 0.75);
  CHECK(tdvp::su11::casimir_eigenvalue(tdvp::su11::BargmannWeight(b.k_r, 0)) ==
        doctest::Approx((3.0 * 3.0 - 1.0) / 4.0));
  c.axial_sector = 0.5;
  CHECK_THROWS_AS(c.validate(), tdvp::Error);
}

TEST_CASE("Mathieu parameters") {
  TrapConfig c = paul();
  c.v0 = 0.0;
  CHECK(mathieu_parameters(c).q_z == 0.0);

  c.u0 = 0.0;
  const TrapConfig d = with_axial_mathieu_point(c, 0.0, 0.4);
  CHECK(mathieu_parameters(d).q_z == doctest::Approx(0.4));
  CHECK(mathieu_parameters(d).a_z == 0.0);

  // Radial parameters are -1/2 of the axial ones without a magnetic field.
  const TrapConfig e = with_axial_mathieu_point(c, 0.1, 0.3);
  const auto m = mathieu_parameters(e);
  CHECK(m.a_r == doctest::Approx(-0.05));
  CHECK(m.q_r == doctest::Approx(-0.15));

  // Spring constants reproduce x'' + (Omega^2/4)(a - 2q cos Omega t) x = 0.
  for (double t : {0.0, 1.1}) {
    const auto s = spring_constants(e, t);
    CHECK(s.k_a / e.mass == doctest::Approx(0.25 * (0.1 - 0.6 * std::cos(t))));
    CHECK(s.k_r / e.mass == doctest::Approx(0.25 * (m.a_r - 2 * m.q_r * std::cos(t))));
  }
}

TEST_CASE("mode and drive names round-trip") {
  for (auto m : {DriveMode::time_dependent, DriveMode::static_field, DriveMode::pseudopotential}) {
    CHECK(parse_drive_mode(to_string(m)) == m);
  }
  CHECK(to_string(DriveMode::static_field) == "static");
  CHECK(parse_mode("radial") == Mode::radial);
  CHECK_THROWS_AS(parse_drive_mode("rf"), tdvp::Error);
}
