#include "tdvp/trap.hpp"

#include <cmath>
#include <string>

#include "tdvp/errors.hpp"

namespace tdvp::trap {

std::string_view to_string(DriveMode mode) noexcept {
  switch (mode) {
    case DriveMode::time_dependent: return "time_dependent";
    case DriveMode::static_field: return "static";
    case DriveMode::pseudopotential: return "pseudopotential";
  }
  return "unknown";
}

DriveMode parse_drive_mode(std::string_view text) {
  if (text == "time_dependent") return DriveMode::time_dependent;
  if (text == "static") return DriveMode::static_field;
  if (text == "pseudopotential") return DriveMode::pseudopotential;
  throw Error(ErrorKind::invalid_argument, "unknown drive mode '" + std::string(text) + "'");
}

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::axial ? "axial" : "radial";
}

Mode parse_mode(std::string_view text) {
  if (text == "axial") return Mode::axial;
  if (text == "radial") return Mode::radial;
  throw Error(ErrorKind::invalid_argument, "unknown mode '" + std::string(text) + "'");
}

void TrapConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::invalid_argument, "invalid trap config: " + what);
  };
  if (!(mass > 0.0)) fail("M must be positive");
  if (!(r0 > 0.0)) fail("r0 must be positive");
  if (!(z0 > 0.0)) fail("z0 must be positive");
  if (!(omega_a_ref > 0.0)) fail("omega_a_ref must be positive");
  if (!(omega_r_ref > 0.0)) fail("omega_r_ref must be positive");
  if (!(hbar > 0.0)) fail("hbar must be positive");
  if (drive_mode != DriveMode::static_field && !(omega_rf > 0.0)) {
    fail("Omega_rf must be positive for drive mode " + std::string(to_string(drive_mode)));
  }
  if (l < 0) fail("l must be non-negative");
  if (m_a < 0 || m_r < 0) fail("excitation numbers must be non-negative");
  if (axial_sector != 0.25 && axial_sector != 0.75) fail("axial_sector must be 0.25 or 0.75");
}

TrapConfig dimensionless_defaults() {
  TrapConfig cfg;
  cfg.hbar = 1.0;
  cfg.mass = 1.0;
  cfg.omega_rf = 1.0;
  return cfg;
}

double drive(const TrapConfig& cfg, double t) {
  if (cfg.drive_mode == DriveMode::time_dependent) {
    return cfg.u0 + cfg.v0 * std::cos(cfg.omega_rf * t);
  }
  return cfg.u0;
}

SpringProfile spring_profile(const TrapConfig& cfg) {
  const double qc = cfg.charge * cfg.c_quad();
  const double wc = cfg.omega_c();
  SpringProfile p{cfg.mass * wc * wc / 4.0 - 2.0 * qc * cfg.u0, -2.0 * qc * cfg.v0,
                  4.0 * qc * cfg.u0, 4.0 * qc * cfg.v0};
  switch (cfg.drive_mode) {
    case DriveMode::time_dependent:
      break;
    case DriveMode::static_field:
      p.k_r_cosine = 0.0;
      p.k_a_cosine = 0.0;
      break;
    case DriveMode::pseudopotential: {
      const double denom = 2.0 * cfg.mass * cfg.omega_rf * cfg.omega_rf;
      p.k_r_static += p.k_r_cosine * p.k_r_cosine / denom;
      p.k_a_static += p.k_a_cosine * p.k_a_cosine / denom;
      p.k_r_cosine = 0.0;
      p.k_a_cosine = 0.0;
      break;
    }
  }
  return p;
}

SpringConstants spring_constants(const TrapConfig& cfg, double t) {
  const SpringProfile p = spring_profile(cfg);
  const double c = cfg.drive_mode == DriveMode::time_dependent ? std::cos(cfg.omega_rf * t) : 0.0;
  return {p.k_r_static + c * p.k_r_cosine, p.k_a_static + c * p.k_a_cosine, t};
}

double harmonic_polynomial(int order, double rho, double z) {
  if (rho < 0.0) throw Error(ErrorKind::invalid_argument, "rho must be non-negative");
  const double r2 = rho * rho;
  const double z2 = z * z;
  switch (order) {
    case 2:
      return 2.0 * z2 - r2;
    case 4:
      return 8.0 * z2 * z2 - 24.0 * z2 * r2 + 3.0 * r2 * r2;
    case 6:
      return 16.0 * z2 * z2 * z2 - 120.0 * z2 * z2 * r2 + 90.0 * z2 * r2 * r2 -
             5.0 * r2 * r2 * r2;
    default:
      throw Error(ErrorKind::unsupported_order,
                  "harmonic polynomial of order " + std::to_string(order) + " not available");
  }
}

BargmannIndices bargmann_indices(const TrapConfig& cfg) {
  if (cfg.axial_sector != 0.25 && cfg.axial_sector != 0.75) {
    throw Error(ErrorKind::invalid_argument, "axial_sector must be 0.25 or 0.75");
  }
  if (cfg.l < 0) throw Error(ErrorKind::invalid_argument, "l must be non-negative");
  return {cfg.axial_sector, 0.5 * (cfg.l + 1)};
}

MathieuParameters mathieu_parameters(const TrapConfig& cfg) {
  if (!(cfg.omega_rf > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "Mathieu parameters need Omega_rf > 0");
  }
  const double scale = cfg.charge * cfg.c_quad() / (cfg.mass * cfg.omega_rf * cfg.omega_rf);
  const double wc = cfg.omega_c() / cfg.omega_rf;
  return {16.0 * scale * cfg.u0, -8.0 * scale * cfg.v0, wc * wc - 8.0 * scale * cfg.u0,
          4.0 * scale * cfg.v0};
}

TrapConfig with_axial_mathieu_point(const TrapConfig& cfg, double a_z, double q_z) {
  const double scale = cfg.charge * cfg.c_quad() / (cfg.mass * cfg.omega_rf * cfg.omega_rf);
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw Error(ErrorKind::invalid_argument, "cannot invert Mathieu map with zero charge");
  }
  TrapConfig out = cfg;
  out.u0 = a_z / (16.0 * scale);
  out.v0 = -q_z / (8.0 * scale);
  return out;
}

}  // namespace tdvp::trap
