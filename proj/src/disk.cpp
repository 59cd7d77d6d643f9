#include "tdvp/disk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdvp/errors.hpp"

namespace tdvp::disk {

namespace {

constexpr cplx kI{0.0, 1.0};

bool near_quarter(double k, double target) { return std::abs(k - target) < 1e-12; }

}  // namespace

DiskPoint::DiskPoint(cplx z) : z_(z) {
  if (!(std::abs(z) < 1.0 - kBoundaryGuard)) {
    throw Error(ErrorKind::out_of_domain,
                "disk point at |z| = " + std::to_string(std::abs(z)) +
                    " violates |z| < 1 - 1e-12");
  }
}

CoherentProductState::CoherentProductState(ModeState axial, ModeState radial, int l)
    : axial_(axial), radial_(radial), l_(l) {
  if (l < 0) {
    throw Error(ErrorKind::invalid_argument, "orbital quantum number must be >= 0");
  }
  if (std::abs(radial.weight.k() - 0.5 * (l + 1)) > 1e-12) {
    throw Error(ErrorKind::invalid_argument,
                "radial Bargmann index must equal (l+1)/2 = " + std::to_string(0.5 * (l + 1)));
  }
  if (!near_quarter(axial.weight.k(), 0.25) && !near_quarter(axial.weight.k(), 0.75)) {
    throw Error(ErrorKind::invalid_argument,
                "axial Bargmann index must be 1/4 or 3/4, got " +
                    std::to_string(axial.weight.k()));
  }
}

CoherentProductState CoherentProductState::moved_to(cplx z_axial, cplx z_radial) const {
  return CoherentProductState({DiskPoint(z_axial), axial_.weight},
                              {DiskPoint(z_radial), radial_.weight}, l_);
}

XiEta xi_eta(const DiskPoint& p) {
  const cplx z = p.z();
  const double d = 1.0 - std::norm(z);
  return {std::norm(1.0 + z) / d, std::norm(1.0 - z) / d};
}

cplx dxi_dzbar(cplx z) {
  const double d = 1.0 - std::norm(z);
  return (1.0 + z) * (1.0 + z) / (d * d);
}

cplx deta_dzbar(cplx z) {
  const double d = 1.0 - std::norm(z);
  return -(1.0 - z) * (1.0 - z) / (d * d);
}

double log_overlap_form(const DiskPoint& p, const BargmannWeight& w) {
  if (w.m() != 0) {
    throw Error(ErrorKind::unsupported,
                "closed-form overlap is only available for the m = 0 family");
  }
  const double d = 1.0 - std::norm(p.z());
  return 2.0 * w.k() / (d * d);
}

cplx poisson_bracket_complex(const FieldGradient& f, const FieldGradient& g,
                             const DiskPoint& p, const BargmannWeight& w) {
  const cplx z = p.z();
  const double d = 1.0 - std::norm(z);
  const cplx coeff = d * d / (2.0 * kI * w.k_plus_m());
  const WirtingerGradient fg = f(z);
  const WirtingerGradient gg = g(z);
  return coeff * (fg.d_dz * gg.d_dzbar - fg.d_dzbar * gg.d_dz);
}

double poisson_bracket(const FieldGradient& f, const FieldGradient& g, const DiskPoint& p,
                       const BargmannWeight& w) {
  const cplx z = p.z();
  const double d = 1.0 - std::norm(z);
  const WirtingerGradient fg = f(z);
  const WirtingerGradient gg = g(z);
  const cplx a = fg.d_dz * gg.d_dzbar;
  const cplx b = fg.d_dzbar * gg.d_dz;
  const cplx value = d * d / (2.0 * kI * w.k_plus_m()) * (a - b);
  const double scale = d * d / (2.0 * w.k_plus_m()) * (std::abs(a) + std::abs(b));
  if (std::abs(value.imag()) > 1e-12 * scale + 1e-300) {
    throw Error(ErrorKind::internal_consistency,
                "Poisson bracket of real fields has imaginary residue " +
                    std::to_string(value.imag()));
  }
  return value.real();
}

cplx mode_velocity(cplx z, cplx dH_dzbar, double k_plus_m, double hbar) {
  if (!(std::abs(z) < 1.0 - kBoundaryGuard)) {
    throw Error(ErrorKind::boundary_proximity,
                "trajectory reached the disk boundary guard at |z| = " +
                    std::to_string(std::abs(z)));
  }
  const double d = 1.0 - std::norm(z);
  return d * d / (2.0 * kI * hbar * k_plus_m) * dH_dzbar;
}

ProductVelocity hamiltonian_vector_field(const HamiltonianGradient& H,
                                         const CoherentProductState& s, double t,
                                         double hbar) {
  const ProductGradient g = H(s, t);
  return {mode_velocity(s.axial().point.z(), g.axial, s.axial().weight.k_plus_m(), hbar),
          mode_velocity(s.radial().point.z(), g.radial, s.radial().weight.k_plus_m(), hbar)};
}

namespace {

XiEtaRates mode_xi_eta_rates(const ModeState& mode, double dH_dxi, double dH_deta,
                             double hbar) {
  const cplx z = mode.point.z();
  const double kappa = mode.weight.k_plus_m();
  const double d = 1.0 - std::norm(z);

  // (2/(i k)) (z - zbar)/(1 - |z|^2) = 4 Im z / (k (1 - |z|^2))
  const double prefactor = 4.0 * z.imag() / (hbar * kappa * d);
  const XiEtaRates closed{prefactor * dH_deta, -prefactor * dH_dxi};

  const cplx gxi = dxi_dzbar(z);
  const cplx geta = deta_dzbar(z);
  const cplx zdot = mode_velocity(z, dH_dxi * gxi + dH_deta * geta, kappa, hbar);
  const XiEtaRates chained{2.0 * (std::conj(gxi) * zdot).real(),
                           2.0 * (std::conj(geta) * zdot).real()};

  const double term_scale = d * d / (hbar * kappa) *
                            (std::abs(dH_dxi) * std::abs(gxi) + std::abs(dH_deta) * std::abs(geta)) *
                            (std::abs(gxi) + std::abs(geta));
  auto agree = [&](double x, double y) {
    return std::abs(x - y) <= 1e-9 * std::max(std::abs(x), std::abs(y)) + 1e-12 * term_scale;
  };
  if (!agree(closed.dxi, chained.dxi) || !agree(closed.deta, chained.deta)) {
    throw Error(ErrorKind::internal_consistency,
                "xi/eta equations of motion disagree with the chain rule through dz/dt");
  }
  return closed;
}

}  // namespace

XiEtaFlow xi_eta_flow_check(const XiEtaHamiltonian& H, const CoherentProductState& s,
                            double t, double hbar) {
  const XiEta a = xi_eta(s.axial().point);
  const XiEta r = xi_eta(s.radial().point);
  const XiEtaPartials p = H(a, r, t);
  return {mode_xi_eta_rates(s.axial(), p.dxi_a, p.deta_a, hbar),
          mode_xi_eta_rates(s.radial(), p.dxi_r, p.deta_r, hbar)};
}

DiskPoint rescale_reference_frequency(const DiskPoint& p, double ratio) {
  if (!(ratio > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "frequency ratio must be positive");
  }
  const cplx z = p.z();
  const double d = 1.0 - std::norm(z);
  const XiEta old = xi_eta(p);
  const double xi = old.xi * ratio;
  const double eta = old.eta / ratio;
  // (1 + |z|^2)/(1 - |z|^2) = (xi + eta)/2
  const double c = 0.5 * (xi + eta);
  const double d_new = 2.0 / (c + 1.0);
  const double re = 0.25 * (xi - eta) * d_new;
  const double im = z.imag() / d * d_new;
  return DiskPoint(cplx(re, im));
}

}  // namespace tdvp::disk
