#pragma once

// Time evolution on the product disk, Floquet analysis of the quadrupole
// flow, stability maps and quasienergy ladders.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tdvp/detail/rk853.hpp"
#include "tdvp/disk.hpp"
#include "tdvp/husimi.hpp"
#include "tdvp/trap.hpp"

namespace tdvp::dynamics {

using cplx = std::complex<double>;
using disk::CoherentProductState;
using detail::StepStats;
using trap::Mode;
using trap::TrapConfig;

struct Trajectory {
  std::vector<double> times;
  std::vector<CoherentProductState> states;
  std::vector<double> energy;
  StepStats step_stats;
};

struct IntegrateOptions {
  double tol = 1e-10;
  // Times at which to record the state. Empty records every accepted step.
  // t0 is always recorded first.
  std::vector<double> sample_times;
  // For frozen drives H_cl is conserved. Each step's energy change is then
  // limited to its share h/(t1-t0) of conservation_factor * tol * |H(t0)|, so
  // the relative drift over the span stays below conservation_factor * tol.
  // Zero disables the guard.
  double conservation_factor = 10.0;
};

// Throws IntegrationError(boundary_proximity | stiffness) with the failure time.
Trajectory integrate(const TrapConfig& cfg, const CoherentProductState& s0, double t0,
                     double t1, double tol);
Trajectory integrate(const TrapConfig& cfg, const CoherentProductState& s0, double t0,
                     double t1, const IntegrateOptions& opt);

// <z^2> = lambda_a S1(z_a) and <rho^2> = lambda_r S1(z_r).
double axial_second_moment(const TrapConfig& cfg, const CoherentProductState& s);
double radial_second_moment(const TrapConfig& cfg, const CoherentProductState& s);

// Quadrupole part of the single-mode flow. In disk coordinates it is the
// Riccati equation dz/dt = (1/2i)[b(1+z)^2 - a(1-z)^2] with a = A/(hbar(k+m)),
// b(t) = B(t)/(hbar(k+m)); its linear lift is the su(1,1) matrix
// G = (1/2i) [[b+a, b-a], [a-b, -(b+a)]].
struct QuadrupoleFlow {
  double a;
  double b_static;
  double b_cosine;
  double omega_rf;  // 0 when the drive is frozen

  double b(double t) const;
};

QuadrupoleFlow quadrupole_flow(const TrapConfig& cfg, Mode mode);

struct Monodromy {
  // Fundamental matrix of the real linear flow in (x, p/(M w_ref)) over one
  // RF period; equal to the classical monodromy of M x'' = -K(t) x.
  Eigen::Matrix2d real;
  // The same map as an SU(1,1) matrix acting on the disk by Moebius maps.
  Eigen::Matrix2cd su11;
  double trace;
  double determinant;
  double period;
};

// Integrates the linear lift over T = 2 pi / Omega_rf at tolerance `tol`.
Monodromy linearized_monodromy(const TrapConfig& cfg, Mode mode, double tol = 1e-12);

// Cayley map between the two forms: real = C su11 C^-1, C = [[1, 1], [-i, i]].
Eigen::Matrix2d real_form(const Eigen::Matrix2cd& su11);
Eigen::Matrix2cd su11_form(const Eigen::Matrix2d& real);

inline constexpr double kMarginalBand = 1e-9;

struct FloquetData {
  double trace;
  double determinant;
  bool stable;    // |trace| <= 2
  bool marginal;  // ||trace| - 2| <= 1e-9
  // Principal-branch characteristic exponent in [0, Omega/2] for stable
  // points, acos(trace/2)/T; NaN otherwise.
  double exponent;
  // acosh(|trace|/2)/T for unstable points, 0 otherwise.
  double growth_rate;
};

FloquetData floquet(const Monodromy& m);

enum class ScanAxes { mathieu, voltage };

std::string_view to_string(ScanAxes axes) noexcept;
ScanAxes parse_scan_axes(std::string_view text);

struct Axis {
  double lo;
  double hi;
  int count;

  double value(int i) const;
};

// Row-major: the first axis (a_z or U0) indexes rows, the second (q_z or V0)
// varies fastest.
struct Grid {
  ScanAxes axes;
  Axis first;
  Axis second;
};

struct StabilityRecord {
  double x;  // a_z or U0
  double y;  // q_z or V0
  FloquetData axial;
  FloquetData radial;
  std::string diagnostic;  // empty on success
  bool ok() const { return diagnostic.empty(); }
};

// Axial Mathieu point (a_z, q_z) or voltages (U0, V0) applied to a copy of `cfg`.
TrapConfig at_scan_point(const TrapConfig& cfg, ScanAxes axes, double x, double y);

// Evaluates every point independently on `threads` workers (0 picks the
// hardware concurrency). Per-point failures land in the diagnostic.
std::vector<StabilityRecord> stability_scan(const TrapConfig& cfg, const Grid& grid,
                                            unsigned threads = 0);

struct EdgeBracket {
  double stable_side;
  double unstable_side;
  double estimate() const { return 0.5 * (stable_side + unstable_side); }
};

// Refines a stable/unstable bracket of the second scan coordinate at fixed
// first coordinate by bisection on |trace| - 2 for `mode`.
EdgeBracket refine_stability_edge(const TrapConfig& cfg, ScanAxes axes, Mode mode, double x,
                                  double y_stable, double y_unstable, double width = 1e-10);

struct QuasienergySpectrum {
  double nu;         // rad/s
  double theta;      // rotation angle of the monodromy about its fixed point, 2 nu T
  double period;     // T, or 2 pi / Omega_rf in frozen modes
  double trace;
  cplx fixed_point;  // Floquet states are U(z*)|m>
  double k;
  std::vector<double> levels;  // J
};

// Ladder 2(k+m) hbar nu for m = 0..n_levels-1. In the time-dependent mode the
// levels are reduced modulo hbar Omega_rf into [0, hbar Omega_rf). Throws
// NoSpectrumError with the trace when the mode is not strictly stable.
QuasienergySpectrum quasienergy_spectrum(const TrapConfig& cfg, Mode mode, int n_levels);

}  // namespace tdvp::dynamics
