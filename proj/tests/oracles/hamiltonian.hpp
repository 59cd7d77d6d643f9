#pragma once

// Trap Hamiltonian expectation computed from boson-space operators, without
// any of the library's moment formulas. Only the trap parameters (spring
// constants, drive) are taken from the library's TrapConfig.

#include <complex>

#include "oracles/fock.hpp"
#include "tdvp/trap.hpp"

namespace oracle {

struct ModeExpectations {
  double q2, q4, q6;  // <x^2>, <x^4>, <x^6> in m^j
  double p2;          // <p^2>
};

// Axial expectations in the parity sector of `cfg`, state U(z)|m_a>.
ModeExpectations axial_expectations(const tdvp::trap::TrapConfig& cfg, cplx z, int dim = 150);
// Radial expectations in the L = l sector, state U(z)|m_r>.
ModeExpectations radial_expectations(const tdvp::trap::TrapConfig& cfg, cplx z, int dim = 150);

// <H(t)> = <p_z^2>/2M + K_a <z^2>/2 + <p_r^2>/2M + K_r <rho^2>/2 - omega_c hbar l / 2
//        + Q A(t) (c_oct <H4> + c_hex <H6>).
double trap_energy(const tdvp::trap::TrapConfig& cfg, cplx z_a, cplx z_r, double t,
                   int dim = 150);

double h4(const ModeExpectations& a, const ModeExpectations& r);
double h6(const ModeExpectations& a, const ModeExpectations& r);

}  // namespace oracle
