#pragma once

// Husimi (energy) function of the trap Hamiltonian on coherent product states:
//
//   H_cl = A_r eta_r + A_a eta_a + B_r xi_r + B_a xi_a
//        + C20 xi_r^2 + C11 xi_r xi_a + C02 xi_a^2
//        + D30 xi_r^3 + D21 xi_r^2 xi_a + D12 xi_r xi_a^2 + D03 xi_a^3 + const
//
// Position moments use z^2 = (2 hbar / M w_a)(K0a + K1a) and
// rho^2 = (2 hbar / M w_r)(K0r + K1r), so <z^(2j)> = lambda_a^j S_j with
// lambda = hbar / (M w_ref).

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "tdvp/disk.hpp"
#include "tdvp/trap.hpp"

namespace tdvp::husimi {

using cplx = std::complex<double>;
using disk::CoherentProductState;
using trap::TrapConfig;

struct PolynomialTerms {
  double a_a = 0.0;
  double a_r = 0.0;
  double b_a = 0.0;
  double b_r = 0.0;
  double c20 = 0.0;
  double c11 = 0.0;
  double c02 = 0.0;
  double d30 = 0.0;
  double d21 = 0.0;
  double d12 = 0.0;
  double d03 = 0.0;
  double const_term = 0.0;
};

// Coefficients at time t together with their affine time profile
// coefficient(t) = static_part + cos(Omega t) * cosine_part.
struct HusimiCoefficients {
  PolynomialTerms terms;
  PolynomialTerms static_part;
  PolynomialTerms cosine_part;
  double t = 0.0;
  double omega_rf = 0.0;

  HusimiCoefficients at(double time) const;
};

struct MomentScales {
  double lambda_a;
  double lambda_r;
};

MomentScales moment_scales(const TrapConfig& cfg);

// Coherent state with the weights implied by `cfg`.
CoherentProductState make_state(const TrapConfig& cfg, cplx z_a, cplx z_r);

struct ModeMoments {
  double s1;
  double s2;
  double s3;
};

ModeMoments mode_moments(const disk::ModeState& mode);

double h4_from_moments(const ModeMoments& axial, const ModeMoments& radial,
                       const MomentScales& scales);
double h6_from_moments(const ModeMoments& axial, const ModeMoments& radial,
                       const MomentScales& scales);

// <H4(rho, z)> in m^4 and <H6(rho, z)> in m^6 on the product state.
double expectation_h4(const CoherentProductState& s, const TrapConfig& cfg);
double expectation_h6(const CoherentProductState& s, const TrapConfig& cfg);

HusimiCoefficients assemble(const TrapConfig& cfg, double t);

double evaluate(const HusimiCoefficients& h, const CoherentProductState& s);

disk::XiEtaPartials xi_eta_partials(const HusimiCoefficients& h, const disk::XiEta& axial,
                                    const disk::XiEta& radial);

// Analytic Wirtinger derivatives dH/dzbar_a, dH/dzbar_r.
disk::ProductGradient gradient(const HusimiCoefficients& h, const CoherentProductState& s);

enum class Classification { minimum, saddle, maximum, degenerate };

std::string_view to_string(Classification c) noexcept;

struct Equilibrium {
  CoherentProductState state;
  Classification classification;
  double energy;
  // Eigenvalues of the real Hessian in (Re z_a, Im z_a, Re z_r, Im z_r), ascending.
  std::array<double, 4> hessian_eigenvalues;
  double scaled_gradient_norm;
};

struct EquilibriumSearch {
  std::vector<Equilibrium> points;
  std::string diagnostic;
};

// Critical points of H_cl over the product disk by damped Newton iteration from
// the seed grid {0, +-0.2, +-0.5, +-0.8}^2 on the real axes. Requires a static or
// pseudopotential drive; throws Error(invalid_argument) otherwise.
EquilibriumSearch find_equilibria(const TrapConfig& cfg);

}  // namespace tdvp::husimi
