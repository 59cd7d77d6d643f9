#pragma once

// Dormand-Prince 8(5,3) embedded Runge-Kutta pair with PI step-size control.
// Coefficients are the published DOP853 tableau; the error estimate combines
// the 5th- and 3rd-order embedded solutions as in the reference code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tdvp/errors.hpp"

namespace tdvp::detail {

namespace dop853_tableau {
inline constexpr double kC[] = {0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0};
inline constexpr double kB[] = {0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259};
inline constexpr double kE3[] = {-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082};
inline constexpr double kE5[] = {0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294};
inline constexpr double kA[12][12] = {
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0},
    {0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0},
    {-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0},
    {2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0},
};
}  // namespace dop853_tableau

struct StepStats {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t evaluations = 0;
};

struct RkOptions {
  double tol = 1e-10;         // used as both relative and absolute tolerance
  double initial_step = 0.0;  // 0 picks a step from the local scale of the problem
  std::int64_t max_steps = 50'000'000;
  // Upper bound on |h|. Keeps the step inside the method's stability region
  // near fixed points, where the error estimate alone would let it grow.
  double max_step = std::numeric_limits<double>::infinity();
  // Optional extra acceptance test for a trial step (t, y0) -> (t + h, y1).
  // Returns an error ratio on the same footing as the local error estimate:
  // the step is accepted only if both are <= 1, and the larger one drives
  // the step-size controller.
  std::function<double(double t, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                       double h)>
      extra_error;
};

// Integrates y' = f(t, y, dydt) from t0 to t1 > t0. Steps are clipped so every
// value of `stops` inside (t0, t1] is hit exactly; t1 is always a stop. After
// each accepted step `observe(t, y, at_stop)` is called.
//
// f may throw Error(out_of_domain | boundary_proximity) for trial stages that
// leave the domain; the step is rejected and retried with a quarter of the
// size. Step-size underflow raises IntegrationError with kind
// boundary_proximity if the last rejection came from the domain, stiffness
// otherwise.
template <class Rhs, class Observer>
StepStats dop853(Rhs&& f, double t0, double t1, Eigen::VectorXd& y,
                 const std::vector<double>& stops, Observer&& observe,
                 const RkOptions& opt = {}) {
  namespace tab = dop853_tableau;
  using Vec = Eigen::VectorXd;
  constexpr int kStages = 12;
  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
  constexpr double beta = 0.04;
  constexpr double alpha = 1.0 / 8.0 - 0.2 * beta;

  if (!(t1 > t0)) throw Error(ErrorKind::invalid_argument, "integration needs t1 > t0");
  if (!(opt.tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");

  const Eigen::Index n = y.size();
  StepStats stats;
  std::array<Vec, kStages> k;
  for (Vec& v : k) v.resize(n);
  Vec ynew(n), tmp(n), fnew(n), e3(n), e5(n), scale(n);

  auto eval = [&](double t, const Vec& yy, Vec& out) {
    ++stats.evaluations;
    f(t, yy, out);
  };

  double t = t0;
  eval(t, y, k[0]);

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    scale = (y.cwiseAbs() * opt.tol).array() + opt.tol;
    const double d0 = std::sqrt(y.cwiseQuotient(scale).squaredNorm() / n);
    const double d1 = std::sqrt(k[0].cwiseQuotient(scale).squaredNorm() / n);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * std::max(1.0, t1 - t0) : 0.01 * d0 / d1;
    h = std::min(h, t1 - t0);
  }
  h = std::min(h, opt.max_step);

  std::vector<double> pending;
  for (double s : stops) {
    if (s > t0 && s <= t1) pending.push_back(s);
  }
  std::sort(pending.begin(), pending.end());
  pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
  if (pending.empty() || pending.back() != t1) pending.push_back(t1);
  std::size_t next = 0;

  double err_old = 1e-4;
  bool last_was_domain = false;
  bool rejected_last = false;

  while (next < pending.size()) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw IntegrationError(ErrorKind::stiffness, t,
                             "step budget exhausted at t = " + std::to_string(t));
    }
    const double target = pending[next];
    bool clipped = false;
    double step = h;
    if (t + step >= target || target - (t + step) < 1e-12 * std::abs(target)) {
      step = target - t;
      clipped = true;
    }
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(t), std::abs(t1 - t0));
    if (step <= floor) {
      throw IntegrationError(
          last_was_domain ? ErrorKind::boundary_proximity : ErrorKind::stiffness, t,
          std::string(last_was_domain ? "trajectory reached the disk boundary guard"
                                      : "step size underflow") +
              " at t = " + std::to_string(t));
    }

    bool domain_failure = false;
    try {
      for (int s = 1; s < kStages; ++s) {
        tmp = y;
        for (int j = 0; j < s; ++j) {
          if (tab::kA[s][j] != 0.0) tmp += (step * tab::kA[s][j]) * k[j];
        }
        eval(t + tab::kC[s] * step, tmp, k[s]);
      }
      ynew = y;
      for (int j = 0; j < kStages; ++j) {
        if (tab::kB[j] != 0.0) ynew += (step * tab::kB[j]) * k[j];
      }
      eval(t + step, ynew, fnew);
    } catch (const IntegrationError&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::out_of_domain && e.kind() != ErrorKind::boundary_proximity) {
        throw;
      }
      domain_failure = true;
    }

    double en = std::numeric_limits<double>::infinity();
    if (!domain_failure) {
      scale = (y.cwiseAbs().cwiseMax(ynew.cwiseAbs()) * opt.tol).array() + opt.tol;
      e3.setZero();
      e5.setZero();
      for (int j = 0; j < kStages; ++j) {
        if (tab::kE3[j] != 0.0) e3 += tab::kE3[j] * k[j];
        if (tab::kE5[j] != 0.0) e5 += tab::kE5[j] * k[j];
      }
      const double n5 = e5.cwiseQuotient(scale).squaredNorm();
      const double n3 = e3.cwiseQuotient(scale).squaredNorm();
      en = (n5 == 0.0 && n3 == 0.0)
               ? 0.0
               : std::abs(step) * n5 / std::sqrt((n5 + 0.01 * n3) * static_cast<double>(n));
      if (opt.extra_error && std::isfinite(en)) {
        en = std::max(en, opt.extra_error(t, y, ynew, step));
      }
    }

    if (domain_failure || !std::isfinite(en)) {
      last_was_domain = domain_failure;
      ++stats.rejected;
      h = 0.25 * step;
      rejected_last = true;
      continue;
    }

    if (en <= 1.0) {
      double fac = en == 0.0 ? fac_max
                             : safety * std::pow(en, -alpha) * std::pow(err_old, beta);
      fac = std::clamp(fac, fac_min, fac_max);
      if (rejected_last) fac = std::min(fac, 1.0);
      err_old = std::max(en, 1e-4);
      t = clipped ? target : t + step;
      y = ynew;
      k[0] = fnew;
      ++stats.accepted;
      last_was_domain = false;
      rejected_last = false;
      if (clipped) ++next;
      observe(t, y, clipped);
      // A clipped step says nothing about the natural step size.
      if (!clipped) h = std::min(step * fac, opt.max_step);
    } else {
      h = step * std::max(fac_min, safety * std::pow(en, -alpha));
      ++stats.rejected;
      last_was_domain = false;
      rejected_last = true;
    }
  }
  return stats;
}

}  // namespace tdvp::detail
