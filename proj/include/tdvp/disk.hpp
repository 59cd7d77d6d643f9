#pragma once

// Phase-space geometry: one Poincare disk per mode, their product, and the
// Hamiltonian flow induced by the coherent-state symplectic form.

#include <complex>
#include <functional>

#include "tdvp/su11.hpp"

namespace tdvp::disk {

using cplx = std::complex<double>;
using su11::BargmannWeight;

// Points with |z| >= 1 - kBoundaryGuard are rejected.
inline constexpr double kBoundaryGuard = 1e-12;

class DiskPoint {
 public:
  // Throws Error(out_of_domain) at or beyond the boundary guard.
  explicit DiskPoint(cplx z);
  DiskPoint() : z_(0.0) {}

  cplx z() const noexcept { return z_; }

 private:
  cplx z_;
};

struct ModeState {
  DiskPoint point;
  BargmannWeight weight;
};

class CoherentProductState {
 public:
  // Validates radial k = (l+1)/2 and axial k in {1/4, 3/4}.
  CoherentProductState(ModeState axial, ModeState radial, int l);

  const ModeState& axial() const noexcept { return axial_; }
  const ModeState& radial() const noexcept { return radial_; }
  int l() const noexcept { return l_; }

  // Same weights, new disk points.
  CoherentProductState moved_to(cplx z_axial, cplx z_radial) const;

 private:
  ModeState axial_;
  ModeState radial_;
  int l_;
};

struct XiEta {
  double xi;
  double eta;
};

// xi = |1+z|^2/(1-|z|^2), eta = |1-z|^2/(1-|z|^2)
XiEta xi_eta(const DiskPoint& p);

// Wirtinger derivatives d/dzbar of xi and eta; d/dz is the conjugate.
cplx dxi_dzbar(cplx z);
cplx deta_dzbar(cplx z);

// d^2 ln N / dz dzbar for N = (1-|z|^2)^(-2k); m = 0 only.
double log_overlap_form(const DiskPoint& p, const BargmannWeight& w);

struct WirtingerGradient {
  cplx d_dz;
  cplx d_dzbar;
};

using FieldGradient = std::function<WirtingerGradient(cplx)>;

// ((1-|z|^2)^2 / (2i(k+m))) (f_z g_zbar - f_zbar g_z); complex fields allowed.
cplx poisson_bracket_complex(const FieldGradient& f, const FieldGradient& g,
                             const DiskPoint& p, const BargmannWeight& w);

// Real-field bracket. Throws Error(internal_consistency) if the imaginary
// residue exceeds 1e-12 relative to the bracket scale.
double poisson_bracket(const FieldGradient& f, const FieldGradient& g, const DiskPoint& p,
                       const BargmannWeight& w);

// dz/dt for one mode: (1-|z|^2)^2 / (2 i hbar (k+m)) dH/dzbar.
// Throws Error(boundary_proximity) at the boundary guard.
cplx mode_velocity(cplx z, cplx dH_dzbar, double k_plus_m, double hbar = 1.0);

struct ProductGradient {
  cplx axial;   // dH/dzbar_a
  cplx radial;  // dH/dzbar_r
};

using ProductVelocity = ProductGradient;

using HamiltonianGradient =
    std::function<ProductGradient(const CoherentProductState&, double t)>;

ProductVelocity hamiltonian_vector_field(const HamiltonianGradient& H,
                                         const CoherentProductState& s, double t,
                                         double hbar = 1.0);

// Hamiltonian given as a function of (xi_a, eta_a, xi_r, eta_r).
struct XiEtaPartials {
  double dxi_a;
  double deta_a;
  double dxi_r;
  double deta_r;
};

using XiEtaHamiltonian =
    std::function<XiEtaPartials(const XiEta& axial, const XiEta& radial, double t)>;

struct XiEtaRates {
  double dxi;
  double deta;
};

struct XiEtaFlow {
  XiEtaRates axial;
  XiEtaRates radial;
};

// Rates of xi and eta from the closed-form (xi, eta) equations of motion,
// cross-checked against the chain rule through dz/dt. Throws
// Error(internal_consistency) on a mismatch beyond 1e-9 relative.
XiEtaFlow xi_eta_flow_check(const XiEtaHamiltonian& H, const CoherentProductState& s,
                            double t, double hbar = 1.0);

// Maps a disk point for reference frequency w to the point describing the same
// physical second moments under w' = ratio * w: xi' = ratio xi, eta' = eta/ratio,
// Im z / (1-|z|^2) unchanged.
DiskPoint rescale_reference_frequency(const DiskPoint& p, double ratio);

}  // namespace tdvp::disk
