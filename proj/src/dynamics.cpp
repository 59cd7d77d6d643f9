#include "tdvp/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "tdvp/errors.hpp"

namespace tdvp::dynamics {

namespace {

constexpr cplx kI{0.0, 1.0};

void check_weights(const TrapConfig& cfg, const CoherentProductState& s) {
  const trap::BargmannIndices k = trap::bargmann_indices(cfg);
  const auto& a = s.axial().weight;
  const auto& r = s.radial().weight;
  if (std::abs(a.k() - k.k_a) > 1e-12 || a.m() != cfg.m_a || std::abs(r.k() - k.k_r) > 1e-12 ||
      r.m() != cfg.m_r || s.l() != cfg.l) {
    throw Error(ErrorKind::invalid_argument,
                "initial state weights do not match the trap configuration (l, m_a, m_r, sector)");
  }
}

Eigen::VectorXd pack(const CoherentProductState& s) {
  Eigen::VectorXd y(4);
  const cplx za = s.axial().point.z();
  const cplx zr = s.radial().point.z();
  y << za.real(), za.imag(), zr.real(), zr.imag();
  return y;
}

CoherentProductState unpack(const CoherentProductState& like, const Eigen::VectorXd& y) {
  return like.moved_to(cplx(y(0), y(1)), cplx(y(2), y(3)));
}

double period_of(const TrapConfig& cfg) {
  if (!(cfg.omega_rf > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "monodromy needs Omega_rf > 0");
  }
  return 2.0 * std::numbers::pi / cfg.omega_rf;
}

Eigen::Matrix2cd generator(const QuadrupoleFlow& f, double t) {
  const double a = f.a;
  const double b = f.b(t);
  Eigen::Matrix2cd g;
  g << b + a, b - a, a - b, -(b + a);
  return g / (2.0 * kI);
}

using Sample = std::pair<double, Eigen::Matrix2cd>;

Eigen::Matrix2cd unpack_matrix(const Eigen::VectorXd& y) {
  Eigen::Matrix2cd m;
  m << cplx(y(0), y(1)), cplx(y(2), y(3)), cplx(y(4), y(5)), cplx(y(6), y(7));
  return m;
}

// Fundamental matrix of dY/dt = G(t) Y over [0, T].
Eigen::Matrix2cd integrate_lift(const QuadrupoleFlow& flow, double period, double tol,
                                std::vector<Sample>* samples) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(8);
  y(0) = 1.0;
  y(6) = 1.0;
  auto rhs = [&](double t, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
    const Eigen::Matrix2cd d = generator(flow, t) * unpack_matrix(v);
    dv << d(0, 0).real(), d(0, 0).imag(), d(0, 1).real(), d(0, 1).imag(), d(1, 0).real(),
        d(1, 0).imag(), d(1, 1).real(), d(1, 1).imag();
  };
  if (samples) samples->emplace_back(0.0, Eigen::Matrix2cd::Identity());
  auto observe = [&](double t, const Eigen::VectorXd& v, bool) {
    if (samples) samples->emplace_back(t, unpack_matrix(v));
  };
  detail::RkOptions opt;
  opt.tol = tol;
  detail::dop853(rhs, 0.0, period, y, {}, observe, opt);
  return unpack_matrix(y);
}

Monodromy monodromy_from(const Eigen::Matrix2cd& mg, double period) {
  Monodromy m;
  m.su11 = mg;
  m.real = real_form(mg);
  m.trace = m.real.trace();
  m.determinant = m.real.determinant();
  m.period = period;
  return m;
}

// Fixed point inside the disk of z -> (M11 z + M12)/(M21 z + M22).
cplx disk_fixed_point(const Eigen::Matrix2cd& m) {
  const cplx qa = m(1, 0);
  const cplx qb = m(1, 1) - m(0, 0);
  const cplx qc = -m(0, 1);
  const double scale = m.cwiseAbs().maxCoeff();
  if (std::abs(qa) <= 1e-14 * scale) {
    if (std::abs(qb) <= 1e-14 * scale) return 0.0;
    return -qc / qb;
  }
  const cplx disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  const cplx r1 = (-qb + disc) / (2.0 * qa);
  const cplx r2 = (-qb - disc) / (2.0 * qa);
  return std::abs(r1) < std::abs(r2) ? r1 : r2;
}

double mode_k(const TrapConfig& cfg, Mode mode) {
  const trap::BargmannIndices k = trap::bargmann_indices(cfg);
  return mode == Mode::axial ? k.k_a : k.k_r;
}

}  // namespace

Trajectory integrate(const TrapConfig& cfg, const CoherentProductState& s0, double t0,
                     double t1, double tol) {
  IntegrateOptions opt;
  opt.tol = tol;
  return integrate(cfg, s0, t0, t1, opt);
}

Trajectory integrate(const TrapConfig& cfg, const CoherentProductState& s0, double t0,
                     double t1, const IntegrateOptions& opt) {
  if (!(t1 > t0)) throw Error(ErrorKind::invalid_argument, "integration needs t1 > t0");
  if (!(opt.tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
  check_weights(cfg, s0);

  const husimi::HusimiCoefficients base = husimi::assemble(cfg, t0);
  const double hbar = cfg.hbar;
  const double kappa_a = s0.axial().weight.k_plus_m();
  const double kappa_r = s0.radial().weight.k_plus_m();

  auto rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const CoherentProductState s = unpack(s0, y);
    const disk::ProductGradient g = husimi::gradient(base.at(t), s);
    const cplx va = disk::mode_velocity(s.axial().point.z(), g.axial, kappa_a, hbar);
    const cplx vr = disk::mode_velocity(s.radial().point.z(), g.radial, kappa_r, hbar);
    dy << va.real(), va.imag(), vr.real(), vr.imag();
  };

  Trajectory out;
  out.times.push_back(t0);
  out.states.push_back(s0);
  out.energy.push_back(husimi::evaluate(base.at(t0), s0));

  const bool every_step = opt.sample_times.empty();
  auto observe = [&](double t, const Eigen::VectorXd& y, bool at_stop) {
    if (!every_step && !at_stop) return;
    if (!every_step && t == t1 &&
        std::find(opt.sample_times.begin(), opt.sample_times.end(), t1) ==
            opt.sample_times.end()) {
      return;
    }
    const CoherentProductState s = unpack(s0, y);
    out.times.push_back(t);
    out.states.push_back(s);
    out.energy.push_back(husimi::evaluate(base.at(t), s));
  };

  Eigen::VectorXd y = pack(s0);
  detail::RkOptions dopt;
  dopt.tol = opt.tol;
  // Quadrupole rate (|A| + |B|)/(hbar (k+m)) per mode, drive amplitude included;
  // one step may cover at most the inverse of the faster one.
  {
    const husimi::PolynomialTerms& ps = base.static_part;
    const husimi::PolynomialTerms& pc = base.cosine_part;
    const double ra = (std::abs(ps.a_a) + std::abs(ps.b_a) + std::abs(pc.b_a)) / (hbar * kappa_a);
    const double rr = (std::abs(ps.a_r) + std::abs(ps.b_r) + std::abs(pc.b_r)) / (hbar * kappa_r);
    const double rate = std::max(ra, rr);
    if (rate > 0.0) dopt.max_step = 1.0 / rate;
  }
  const bool frozen = cfg.drive_mode != trap::DriveMode::time_dependent;
  if (frozen && opt.conservation_factor > 0.0) {
    const double e0 = std::abs(out.energy.front());
    const double scale = e0 > 0.0 ? e0 : base.terms.a_a + base.terms.a_r;
    // Per unit time; floored a little above rounding in the energy itself.
    const double rate = opt.conservation_factor * opt.tol * scale / (t1 - t0);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    dopt.extra_error = [&, rate, floor](double t, const Eigen::VectorXd& y0,
                                        const Eigen::VectorXd& y1, double h) {
      const double dh = husimi::evaluate(base.at(t + h), unpack(s0, y1)) -
                        husimi::evaluate(base.at(t), unpack(s0, y0));
      return std::abs(dh) / std::max(rate * h, floor);
    };
  }
  try {
    out.step_stats = detail::dop853(rhs, t0, t1, y, opt.sample_times, observe, dopt);
  } catch (const IntegrationError&) {
    throw;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::boundary_proximity || e.kind() == ErrorKind::out_of_domain) {
      throw IntegrationError(ErrorKind::boundary_proximity, t0, e.what());
    }
    throw;
  }
  return out;
}

double axial_second_moment(const TrapConfig& cfg, const CoherentProductState& s) {
  return husimi::moment_scales(cfg).lambda_a * husimi::mode_moments(s.axial()).s1;
}

double radial_second_moment(const TrapConfig& cfg, const CoherentProductState& s) {
  return husimi::moment_scales(cfg).lambda_r * husimi::mode_moments(s.radial()).s1;
}

double QuadrupoleFlow::b(double t) const {
  return omega_rf > 0.0 ? b_static + b_cosine * std::cos(omega_rf * t) : b_static;
}

QuadrupoleFlow quadrupole_flow(const TrapConfig& cfg, Mode mode) {
  const husimi::HusimiCoefficients h = husimi::assemble(cfg, 0.0);
  const trap::BargmannIndices k = trap::bargmann_indices(cfg);
  const double kappa = mode == Mode::axial ? k.k_a + cfg.m_a : k.k_r + cfg.m_r;
  const double unit = cfg.hbar * kappa;
  const husimi::PolynomialTerms& s = h.static_part;
  const husimi::PolynomialTerms& c = h.cosine_part;
  if (mode == Mode::axial) return {s.a_a / unit, s.b_a / unit, c.b_a / unit, h.omega_rf};
  return {s.a_r / unit, s.b_r / unit, c.b_r / unit, h.omega_rf};
}

Eigen::Matrix2d real_form(const Eigen::Matrix2cd& su11) {
  Eigen::Matrix2cd c;
  c << 1.0, 1.0, -kI, kI;
  const Eigen::Matrix2cd r = c * su11 * c.inverse();
  return r.real();
}

Eigen::Matrix2cd su11_form(const Eigen::Matrix2d& real) {
  Eigen::Matrix2cd c;
  c << 1.0, 1.0, -kI, kI;
  return c.inverse() * real.cast<cplx>() * c;
}

Monodromy linearized_monodromy(const TrapConfig& cfg, Mode mode, double tol) {
  const double period = period_of(cfg);
  return monodromy_from(integrate_lift(quadrupole_flow(cfg, mode), period, tol, nullptr), period);
}

FloquetData floquet(const Monodromy& m) {
  FloquetData f;
  f.trace = m.trace;
  f.determinant = m.determinant;
  const double at = std::abs(m.trace);
  f.stable = at <= 2.0;
  f.marginal = std::abs(at - 2.0) <= kMarginalBand;
  if (f.stable) {
    f.exponent = std::acos(std::clamp(0.5 * m.trace, -1.0, 1.0)) / m.period;
    f.growth_rate = 0.0;
  } else {
    f.exponent = std::nan("");
    f.growth_rate = std::acosh(0.5 * at) / m.period;
  }
  return f;
}

std::string_view to_string(ScanAxes axes) noexcept {
  return axes == ScanAxes::mathieu ? "mathieu" : "voltage";
}

ScanAxes parse_scan_axes(std::string_view text) {
  if (text == "mathieu") return ScanAxes::mathieu;
  if (text == "voltage") return ScanAxes::voltage;
  throw Error(ErrorKind::invalid_argument, "unknown scan axes '" + std::string(text) + "'");
}

double Axis::value(int i) const {
  if (count == 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

TrapConfig at_scan_point(const TrapConfig& cfg, ScanAxes axes, double x, double y) {
  if (axes == ScanAxes::mathieu) return trap::with_axial_mathieu_point(cfg, x, y);
  TrapConfig out = cfg;
  out.u0 = x;
  out.v0 = y;
  return out;
}

std::vector<StabilityRecord> stability_scan(const TrapConfig& cfg, const Grid& grid,
                                            unsigned threads) {
  if (grid.first.count < 1 || grid.second.count < 1) {
    throw Error(ErrorKind::invalid_argument, "stability grid must be non-empty");
  }
  const std::size_t total =
      static_cast<std::size_t>(grid.first.count) * static_cast<std::size_t>(grid.second.count);
  std::vector<StabilityRecord> records(total);

  auto work = [&](std::size_t idx) {
    const int i = static_cast<int>(idx / grid.second.count);
    const int j = static_cast<int>(idx % grid.second.count);
    StabilityRecord& r = records[idx];
    r.x = grid.first.value(i);
    r.y = grid.second.value(j);
    const double nan = std::nan("");
    r.axial = r.radial = {nan, nan, false, false, nan, nan};
    try {
      const TrapConfig point = at_scan_point(cfg, grid.axes, r.x, r.y);
      r.axial = floquet(linearized_monodromy(point, Mode::axial));
      r.radial = floquet(linearized_monodromy(point, Mode::radial));
    } catch (const std::exception& e) {
      r.diagnostic = e.what();
    }
  };

  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, total));
  if (n <= 1) {
    for (std::size_t idx = 0; idx < total; ++idx) work(idx);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (std::size_t idx = next++; idx < total; idx = next++) work(idx);
    });
  }
  for (auto& th : pool) th.join();
  return records;
}

EdgeBracket refine_stability_edge(const TrapConfig& cfg, ScanAxes axes, Mode mode, double x,
                                  double y_stable, double y_unstable, double width) {
  auto stable_at = [&](double y) {
    return floquet(linearized_monodromy(at_scan_point(cfg, axes, x, y), mode)).stable;
  };
  if (!stable_at(y_stable) || stable_at(y_unstable)) {
    throw Error(ErrorKind::invalid_argument,
                "edge refinement needs a stable and an unstable endpoint");
  }
  EdgeBracket b{y_stable, y_unstable};
  while (std::abs(b.unstable_side - b.stable_side) > width) {
    const double mid = b.estimate();
    if (mid == b.stable_side || mid == b.unstable_side) break;
    (stable_at(mid) ? b.stable_side : b.unstable_side) = mid;
  }
  return b;
}

QuasienergySpectrum quasienergy_spectrum(const TrapConfig& cfg, Mode mode, int n_levels) {
  if (n_levels < 1) throw Error(ErrorKind::invalid_argument, "n_levels must be at least 1");
  const QuadrupoleFlow flow = quadrupole_flow(cfg, mode);

  QuasienergySpectrum q;
  q.k = mode_k(cfg, mode);

  if (cfg.drive_mode != trap::DriveMode::time_dependent) {
    // Constant generator: an elliptic Moebius rotation at rate sqrt(a b).
    const double a = flow.a;
    const double b = flow.b_static;
    q.period = cfg.omega_rf > 0.0 ? 2.0 * std::numbers::pi / cfg.omega_rf : std::nan("");
    if (!(a * b > 0.0)) {
      const double tr = std::isfinite(q.period)
                            ? 2.0 * std::cosh(std::sqrt(std::max(0.0, -a * b)) * q.period)
                            : std::nan("");
      throw NoSpectrumError(tr, "mode " + std::string(trap::to_string(mode)) +
                                    " is not confined by the frozen drive (a b <= 0)");
    }
    q.nu = std::sqrt(a * b);
    q.theta = 2.0 * q.nu * q.period;
    q.trace = 2.0 * std::cos(q.nu * q.period);
    q.fixed_point = (std::sqrt(a) - std::sqrt(b)) / (std::sqrt(a) + std::sqrt(b));
  } else {
    const double period = period_of(cfg);
    std::vector<Sample> samples;
    const Eigen::Matrix2cd mg = integrate_lift(flow, period, 1e-12, &samples);
    const FloquetData f = floquet(monodromy_from(mg, period));
    if (!f.stable || f.marginal) {
      throw NoSpectrumError(f.trace, "mode " + std::string(trap::to_string(mode)) +
                                         " is not stable at this drive point (trace " +
                                         std::to_string(f.trace) + ")");
    }
    const cplx zs = disk_fixed_point(mg);
    const double norm = 1.0 / std::sqrt(1.0 - std::norm(zs));
    Eigen::Matrix2cd s, s_inv;
    s << 1.0, zs, std::conj(zs), 1.0;
    s_inv << 1.0, -zs, -std::conj(zs), 1.0;
    s *= norm;
    s_inv *= norm;
    // Continuous rotation angle about the fixed point.
    double phase = 0.0;
    double prev = 0.0;
    for (const auto& [t, m] : samples) {
      const double cur = std::arg((s_inv * m * s)(0, 0));
      double d = cur - prev;
      d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
      phase += d;
      prev = cur;
    }
    q.period = period;
    q.nu = -phase / period;
    q.theta = 2.0 * q.nu * period;
    q.trace = f.trace;
    q.fixed_point = zs;
  }

  const double quantum = cfg.hbar * cfg.omega_rf;
  const bool reduce = cfg.drive_mode == trap::DriveMode::time_dependent;
  for (int m = 0; m < n_levels; ++m) {
    double e = 2.0 * (q.k + m) * cfg.hbar * q.nu;
    if (reduce) {
      e = std::fmod(e, quantum);
      if (e < 0.0) e += quantum;
    }
    q.levels.push_back(e);
  }
  return q;
}

}  // namespace tdvp::dynamics
