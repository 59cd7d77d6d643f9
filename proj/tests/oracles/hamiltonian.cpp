#include "oracles/hamiltonian.hpp"

#include <cmath>

namespace oracle {

namespace {

double re(cplx c) { return c.real(); }

}  // namespace

ModeExpectations axial_expectations(const tdvp::trap::TrapConfig& cfg, cplx z, int dim) {
  const int quarters = cfg.axial_sector < 0.5 ? 1 : 3;
  const LineOperators ops = line_operators(quarters, dim);
  const Vec v = coherent_vector(boson_axial(quarters, dim), z, cfg.m_a);
  const double len2 = cfg.hbar / (cfg.mass * cfg.omega_a_ref);
  return {len2 * re(expect(v, ops.x2)), len2 * len2 * re(expect(v, ops.x4)),
          len2 * len2 * len2 * re(expect(v, ops.x6)),
          cfg.hbar * cfg.mass * cfg.omega_a_ref * re(expect(v, ops.p2))};
}

ModeExpectations radial_expectations(const tdvp::trap::TrapConfig& cfg, cplx z, int dim) {
  // In the L = l sector x^2 + y^2 = 2(K0 + K1) and p_x^2 + p_y^2 = 2(K0 - K1)
  // in oscillator units; plane_operators() checks both from Cartesian bosons.
  const Rep rep = boson_radial(cfg.l, dim);
  const Vec v = coherent_vector(rep, z, cfg.m_r);
  const Mat rho2 = 2.0 * (rep.k0 + rep.k1());
  const Mat p2 = 2.0 * (rep.k0 - rep.k1());
  const Vec r1 = rho2 * v;
  const Vec r2 = rho2 * r1;
  const double len2 = cfg.hbar / (cfg.mass * cfg.omega_r_ref);
  return {len2 * re(v.dot(r1)), len2 * len2 * r1.squaredNorm(),
          len2 * len2 * len2 * re(r1.dot(r2)),
          cfg.hbar * cfg.mass * cfg.omega_r_ref * re(expect(v, p2))};
}

double h4(const ModeExpectations& a, const ModeExpectations& r) {
  return 8.0 * a.q4 - 24.0 * a.q2 * r.q2 + 3.0 * r.q4;
}

double h6(const ModeExpectations& a, const ModeExpectations& r) {
  return 16.0 * a.q6 - 120.0 * a.q4 * r.q2 + 90.0 * a.q2 * r.q4 - 5.0 * r.q6;
}

double trap_energy(const tdvp::trap::TrapConfig& cfg, cplx z_a, cplx z_r, double t, int dim) {
  using tdvp::trap::DriveMode;
  const ModeExpectations a = axial_expectations(cfg, z_a, dim);
  const ModeExpectations r = radial_expectations(cfg, z_r, dim);
  const tdvp::trap::SpringProfile sp = tdvp::trap::spring_profile(cfg);
  const bool periodic = cfg.drive_mode == DriveMode::time_dependent;
  const double c = periodic ? std::cos(cfg.omega_rf * t) : 0.0;
  const double k_a = sp.k_a_static + c * sp.k_a_cosine;
  const double k_r = sp.k_r_static + c * sp.k_r_cosine;
  const double drive = cfg.u0 + (periodic ? cfg.v0 * c : 0.0);
  return a.p2 / (2.0 * cfg.mass) + 0.5 * k_a * a.q2 + r.p2 / (2.0 * cfg.mass) +
         0.5 * k_r * r.q2 - 0.5 * cfg.omega_c() * cfg.hbar * cfg.l +
         cfg.charge * drive * (cfg.c_oct * h4(a, r) + cfg.c_hex * h6(a, r));
}

}  // namespace oracle
