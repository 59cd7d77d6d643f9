#pragma once

// Combined Paul-Penning trap with axial symmetry.
//
//   Phi(rho, z, t) = A(t) (c_quad H2 + c_oct H4 + c_hex H6),  A(t) = U0 + V0 cos(Omega t)
//   c_quad = -1/(r0^2 + 2 z0^2),  omega_c = Q B0 / M
//   K_r = M omega_c^2/4 - 2 Q c_quad A(t),  K_a = 4 Q c_quad A(t)

#include <string>
#include <string_view>

namespace tdvp::trap {

enum class DriveMode { time_dependent, static_field, pseudopotential };

std::string_view to_string(DriveMode mode) noexcept;
// Accepts "time_dependent", "static", "pseudopotential".
DriveMode parse_drive_mode(std::string_view text);

enum class Mode { axial, radial };

std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view text);

struct TrapConfig {
  double charge = 1.0;        // Q [C]
  double mass = 1.0;          // M [kg]
  double b0 = 0.0;            // axial magnetic field [T]
  double u0 = 0.0;            // DC voltage [V]
  double v0 = 0.0;            // RF amplitude [V]
  double omega_rf = 1.0;      // RF angular frequency [rad/s]
  double r0 = 1.0;            // radial semiaxis [m]
  double z0 = 1.0;            // axial semiaxis [m]
  double c_oct = 0.0;         // octopole coefficient [1/m^4]
  double c_hex = 0.0;         // H6 coefficient [1/m^6]; zero disables the cubic row
  double omega_a_ref = 1.0;   // axial disk reference frequency [rad/s]
  double omega_r_ref = 1.0;   // radial disk reference frequency [rad/s]
  int l = 0;                  // orbital quantum number
  int m_a = 0;
  int m_r = 0;
  double axial_sector = 0.25;  // axial Bargmann index, 1/4 or 3/4
  DriveMode drive_mode = DriveMode::static_field;
  double hbar = 1.054571817e-34;

  // Derived quantities are computed on demand and never cached.
  double omega_c() const noexcept { return charge * b0 / mass; }
  double c_quad() const noexcept { return -1.0 / (r0 * r0 + 2.0 * z0 * z0); }

  // Throws Error(invalid_argument) naming the first violated invariant.
  void validate() const;
};

// hbar = M = Omega_rf = 1.
TrapConfig dimensionless_defaults();

// A(t) in volts. Static and pseudopotential modes return U0.
double drive(const TrapConfig& cfg, double t);

struct SpringConstants {
  double k_r;
  double k_a;
  double t;
};

SpringConstants spring_constants(const TrapConfig& cfg, double t);

// Spring constants split as K(t) = static + cosine * cos(Omega t). In the
// pseudopotential mode the secular term K_ac^2/(2 M Omega^2) is folded into
// the static part and the cosine part vanishes; in the static mode V0 is
// ignored.
struct SpringProfile {
  double k_r_static;
  double k_r_cosine;
  double k_a_static;
  double k_a_cosine;
};

SpringProfile spring_profile(const TrapConfig& cfg);

// H2 = 2z^2 - rho^2, H4 = 8z^4 - 24z^2rho^2 + 3rho^4,
// H6 = 16z^6 - 120z^4rho^2 + 90z^2rho^4 - 5rho^6.
// Throws Error(unsupported_order) for other orders, invalid_argument for rho < 0.
double harmonic_polynomial(int order, double rho, double z);

struct BargmannIndices {
  double k_a;
  double k_r;
};

BargmannIndices bargmann_indices(const TrapConfig& cfg);

struct MathieuParameters {
  double a_z;
  double q_z;
  double a_r;
  double q_r;
};

// Reduction of M x'' = -K(t) x to x'' + (a - 2q cos 2tau) x = 0 with
// tau = Omega t / 2. Radial a_r includes the magnetic term.
MathieuParameters mathieu_parameters(const TrapConfig& cfg);

// Copy of `cfg` with U0, V0 chosen so the axial Mathieu point is (a_z, q_z).
TrapConfig with_axial_mathieu_point(const TrapConfig& cfg, double a_z, double q_z);

}  // namespace tdvp::trap
