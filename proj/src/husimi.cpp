#include "tdvp/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "tdvp/errors.hpp"

namespace tdvp::husimi {

namespace {

PolynomialTerms combine(const PolynomialTerms& s, const PolynomialTerms& c, double f) {
  PolynomialTerms out;
  out.a_a = s.a_a + f * c.a_a;
  out.a_r = s.a_r + f * c.a_r;
  out.b_a = s.b_a + f * c.b_a;
  out.b_r = s.b_r + f * c.b_r;
  out.c20 = s.c20 + f * c.c20;
  out.c11 = s.c11 + f * c.c11;
  out.c02 = s.c02 + f * c.c02;
  out.d30 = s.d30 + f * c.d30;
  out.d21 = s.d21 + f * c.d21;
  out.d12 = s.d12 + f * c.d12;
  out.d03 = s.d03 + f * c.d03;
  out.const_term = s.const_term + f * c.const_term;
  return out;
}

struct ModeQ {
  double q1, q2, q3;
};

ModeQ q_moments(const su11::BargmannWeight& w) {
  return {su11::q_moment(1, w), su11::q_moment(2, w), su11::q_moment(3, w)};
}

// Terms proportional to one value of the spring constants and drive.
PolynomialTerms drive_terms(const TrapConfig& cfg, double k_a, double k_r, double drive_volts,
                            const ModeQ& qa, const ModeQ& qr, double kappa_a, double kappa_r,
                            const MomentScales& lam) {
  PolynomialTerms p;
  p.b_a = cfg.hbar * k_a * kappa_a / (cfg.mass * cfg.omega_a_ref);
  p.b_r = cfg.hbar * k_r * kappa_r / (cfg.mass * cfg.omega_r_ref);

  const double la = lam.lambda_a;
  const double lr = lam.lambda_r;
  const double g4 = cfg.charge * drive_volts * cfg.c_oct;
  p.c02 = g4 * 8.0 * la * la * qa.q2;
  p.c11 = g4 * -24.0 * la * lr * qa.q1 * qr.q1;
  p.c20 = g4 * 3.0 * lr * lr * qr.q2;

  const double g6 = cfg.charge * drive_volts * cfg.c_hex;
  p.d03 = g6 * 16.0 * la * la * la * qa.q3;
  p.d12 = g6 * -120.0 * la * la * lr * qa.q2 * qr.q1;
  p.d21 = g6 * 90.0 * la * lr * lr * qa.q1 * qr.q2;
  p.d30 = g6 * -5.0 * lr * lr * lr * qr.q3;
  return p;
}

}  // namespace

HusimiCoefficients HusimiCoefficients::at(double time) const {
  HusimiCoefficients out = *this;
  out.t = time;
  const double f = omega_rf > 0.0 ? std::cos(omega_rf * time) : 0.0;
  out.terms = combine(static_part, cosine_part, f);
  return out;
}

MomentScales moment_scales(const TrapConfig& cfg) {
  return {cfg.hbar / (cfg.mass * cfg.omega_a_ref), cfg.hbar / (cfg.mass * cfg.omega_r_ref)};
}

CoherentProductState make_state(const TrapConfig& cfg, cplx z_a, cplx z_r) {
  const trap::BargmannIndices k = trap::bargmann_indices(cfg);
  return CoherentProductState({disk::DiskPoint(z_a), su11::BargmannWeight(k.k_a, cfg.m_a)},
                              {disk::DiskPoint(z_r), su11::BargmannWeight(k.k_r, cfg.m_r)},
                              cfg.l);
}

ModeMoments mode_moments(const disk::ModeState& mode) {
  const cplx z = mode.point.z();
  return {su11::s_moment(1, z, mode.weight), su11::s_moment(2, z, mode.weight),
          su11::s_moment(3, z, mode.weight)};
}

double h4_from_moments(const ModeMoments& a, const ModeMoments& r, const MomentScales& l) {
  return 8.0 * l.lambda_a * l.lambda_a * a.s2 - 24.0 * l.lambda_a * l.lambda_r * a.s1 * r.s1 +
         3.0 * l.lambda_r * l.lambda_r * r.s2;
}

double h6_from_moments(const ModeMoments& a, const ModeMoments& r, const MomentScales& l) {
  const double la = l.lambda_a;
  const double lr = l.lambda_r;
  return 16.0 * la * la * la * a.s3 - 120.0 * la * la * lr * a.s2 * r.s1 +
         90.0 * la * lr * lr * a.s1 * r.s2 - 5.0 * lr * lr * lr * r.s3;
}

double expectation_h4(const CoherentProductState& s, const TrapConfig& cfg) {
  return h4_from_moments(mode_moments(s.axial()), mode_moments(s.radial()), moment_scales(cfg));
}

double expectation_h6(const CoherentProductState& s, const TrapConfig& cfg) {
  return h6_from_moments(mode_moments(s.axial()), mode_moments(s.radial()), moment_scales(cfg));
}

HusimiCoefficients assemble(const TrapConfig& cfg, double t) {
  cfg.validate();
  const trap::BargmannIndices k = trap::bargmann_indices(cfg);
  const su11::BargmannWeight wa(k.k_a, cfg.m_a);
  const su11::BargmannWeight wr(k.k_r, cfg.m_r);
  const double kappa_a = wa.k_plus_m();
  const double kappa_r = wr.k_plus_m();
  const ModeQ qa = q_moments(wa);
  const ModeQ qr = q_moments(wr);
  const MomentScales lam = moment_scales(cfg);
  const trap::SpringProfile sp = trap::spring_profile(cfg);
  const bool periodic = cfg.drive_mode == trap::DriveMode::time_dependent;

  HusimiCoefficients h;
  h.static_part =
      drive_terms(cfg, sp.k_a_static, sp.k_r_static, cfg.u0, qa, qr, kappa_a, kappa_r, lam);
  h.static_part.a_a = cfg.hbar * cfg.omega_a_ref * kappa_a;
  h.static_part.a_r = cfg.hbar * cfg.omega_r_ref * kappa_r;
  h.static_part.const_term = -0.5 * cfg.omega_c() * cfg.hbar * cfg.l;
  if (periodic) {
    h.cosine_part =
        drive_terms(cfg, sp.k_a_cosine, sp.k_r_cosine, cfg.v0, qa, qr, kappa_a, kappa_r, lam);
    h.omega_rf = cfg.omega_rf;
  }
  return h.at(t);
}

double evaluate(const HusimiCoefficients& h, const CoherentProductState& s) {
  const disk::XiEta a = disk::xi_eta(s.axial().point);
  const disk::XiEta r = disk::xi_eta(s.radial().point);
  const PolynomialTerms& p = h.terms;
  const double xa = a.xi;
  const double xr = r.xi;
  return p.a_r * r.eta + p.a_a * a.eta + p.b_r * xr + p.b_a * xa + p.c20 * xr * xr +
         p.c11 * xr * xa + p.c02 * xa * xa + p.d30 * xr * xr * xr + p.d21 * xr * xr * xa +
         p.d12 * xr * xa * xa + p.d03 * xa * xa * xa + p.const_term;
}

disk::XiEtaPartials xi_eta_partials(const HusimiCoefficients& h, const disk::XiEta& a,
                                    const disk::XiEta& r) {
  const PolynomialTerms& p = h.terms;
  const double xa = a.xi;
  const double xr = r.xi;
  disk::XiEtaPartials d;
  d.dxi_a = p.b_a + p.c11 * xr + 2.0 * p.c02 * xa + p.d21 * xr * xr + 2.0 * p.d12 * xr * xa +
            3.0 * p.d03 * xa * xa;
  d.deta_a = p.a_a;
  d.dxi_r = p.b_r + 2.0 * p.c20 * xr + p.c11 * xa + 3.0 * p.d30 * xr * xr +
            2.0 * p.d21 * xr * xa + p.d12 * xa * xa;
  d.deta_r = p.a_r;
  return d;
}

disk::ProductGradient gradient(const HusimiCoefficients& h, const CoherentProductState& s) {
  const cplx za = s.axial().point.z();
  const cplx zr = s.radial().point.z();
  const disk::XiEtaPartials d =
      xi_eta_partials(h, disk::xi_eta(s.axial().point), disk::xi_eta(s.radial().point));
  return {d.dxi_a * disk::dxi_dzbar(za) + d.deta_a * disk::deta_dzbar(za),
          d.dxi_r * disk::dxi_dzbar(zr) + d.deta_r * disk::deta_dzbar(zr)};
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::minimum: return "minimum";
    case Classification::saddle: return "saddle";
    case Classification::maximum: return "maximum";
    case Classification::degenerate: return "degenerate";
  }
  return "unknown";
}

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

constexpr double kInteriorLimit = 1.0 - 1e-9;

bool inside(const Vec4& x) {
  return std::hypot(x(0), x(1)) < kInteriorLimit && std::hypot(x(2), x(3)) < kInteriorLimit;
}

class CriticalPointProblem {
 public:
  CriticalPointProblem(const TrapConfig& cfg, HusimiCoefficients h)
      : cfg_(cfg), h_(std::move(h)), scale_(h_.terms.a_a + h_.terms.a_r) {}

  CoherentProductState state(const Vec4& x) const {
    return make_state(cfg_, cplx(x(0), x(1)), cplx(x(2), x(3)));
  }

  // Real gradient: dH/dx = 2 Re(dH/dzbar), dH/dy = 2 Im(dH/dzbar).
  Vec4 grad(const Vec4& x) const {
    const disk::ProductGradient g = gradient(h_, state(x));
    return Vec4(2.0 * g.axial.real(), 2.0 * g.axial.imag(), 2.0 * g.radial.real(),
                2.0 * g.radial.imag());
  }

  Mat4 hessian(const Vec4& x) const {
    constexpr double step = 1e-6;
    Mat4 hm;
    for (int j = 0; j < 4; ++j) {
      Vec4 xp = x, xm = x;
      xp(j) += step;
      xm(j) -= step;
      hm.col(j) = (grad(xp) - grad(xm)) / (2.0 * step);
    }
    return 0.5 * (hm + hm.transpose());
  }

  double energy(const Vec4& x) const { return evaluate(h_, state(x)); }
  double scale() const { return scale_; }

 private:
  TrapConfig cfg_;
  HusimiCoefficients h_;
  double scale_;
};

std::optional<Vec4> newton(const CriticalPointProblem& prob, Vec4 x) {
  constexpr int kMaxIterations = 200;
  constexpr double kGradTol = 1e-10;
  Vec4 g = prob.grad(x);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double gnorm = g.norm() / prob.scale();
    if (gnorm <= kGradTol) return x;
    const Mat4 hm = prob.hessian(x);
    if (!hm.allFinite()) return std::nullopt;
    const Vec4 step = hm.fullPivLu().solve(-g);
    if (!step.allFinite()) return std::nullopt;
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const Vec4 trial = x + t * step;
      if (!inside(trial)) continue;
      const Vec4 gt = prob.grad(trial);
      if (gt.norm() < g.norm()) {
        x = trial;
        g = gt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
    if ((t * step).norm() <= 1e-12) break;
  }
  if (g.norm() / prob.scale() <= kGradTol) return x;
  return std::nullopt;
}

Classification classify(const Eigen::Vector4d& ev) {
  if (!ev.allFinite()) return Classification::degenerate;
  const double largest = ev.cwiseAbs().maxCoeff();
  if (ev.cwiseAbs().minCoeff() <= 1e-9 * largest) return Classification::degenerate;
  if ((ev.array() > 0.0).all()) return Classification::minimum;
  if ((ev.array() < 0.0).all()) return Classification::maximum;
  return Classification::saddle;
}

}  // namespace

EquilibriumSearch find_equilibria(const TrapConfig& cfg) {
  if (cfg.drive_mode == trap::DriveMode::time_dependent) {
    throw Error(ErrorKind::invalid_argument,
                "equilibria need time-frozen coefficients (static or pseudopotential drive)");
  }
  const CriticalPointProblem prob(cfg, assemble(cfg, 0.0));
  const std::array<double, 7> seeds{0.0, 0.2, -0.2, 0.5, -0.5, 0.8, -0.8};

  std::vector<Vec4> found;
  int converged = 0;
  for (double sa : seeds) {
    for (double sr : seeds) {
      const auto x = newton(prob, Vec4(sa, 0.0, sr, 0.0));
      if (!x) continue;
      ++converged;
      const bool duplicate = std::any_of(found.begin(), found.end(),
                                         [&](const Vec4& y) { return (y - *x).norm() <= 1e-7; });
      if (!duplicate) found.push_back(*x);
    }
  }

  EquilibriumSearch out;
  for (const Vec4& x : found) {
    const Mat4 hm = prob.hessian(x);
    Eigen::Vector4d ev = Eigen::Vector4d::Constant(std::nan(""));
    if (hm.allFinite()) ev = Eigen::SelfAdjointEigenSolver<Mat4>(hm).eigenvalues();
    out.points.push_back({prob.state(x), classify(ev), prob.energy(x),
                          {ev(0), ev(1), ev(2), ev(3)}, prob.grad(x).norm() / prob.scale()});
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const Equilibrium& a, const Equilibrium& b) { return a.energy < b.energy; });

  std::ostringstream diag;
  if (out.points.empty()) {
    diag << "no critical point found: none of " << seeds.size() * seeds.size()
         << " seeds converged";
  } else {
    diag << converged << " of " << seeds.size() * seeds.size() << " seeds converged to "
         << out.points.size() << " distinct critical point(s)";
  }
  out.diagnostic = diag.str();
  return out;
}

}  // namespace tdvp::husimi
