#include "tdvp/su11.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdvp/errors.hpp"

namespace tdvp::su11 {

namespace {

constexpr double kTailTolerance = 1e-12;

double raise_amp(double k, int m) { return std::sqrt((m + 1.0) * (m + 2.0 * k)); }
double lower_amp(double k, int m) { return std::sqrt(m * (m + 2.0 * k - 1.0)); }

// |1 + eps z|^2 / (1 - |z|^2)
double xi_eps(int eps, cplx z) {
  const double r2 = std::norm(z);
  return std::norm(1.0 + double(eps) * z) / (1.0 - r2);
}

void require_disk(cplx z) {
  if (!(std::abs(z) < 1.0)) {
    throw Error(ErrorKind::out_of_domain,
                "coherent-state parameter outside the unit disk: |z| = " +
                    std::to_string(std::abs(z)));
  }
}

}  // namespace

BargmannWeight::BargmannWeight(double k, int m) : k_(k), m_(m) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(ErrorKind::invalid_argument,
                "Bargmann index must be positive, got " + std::to_string(k));
  }
  if (m < 0) {
    throw Error(ErrorKind::invalid_argument,
                "excitation number must be non-negative, got " + std::to_string(m));
  }
}

LadderElements ladder_elements(const BargmannWeight& w) {
  return {raise_amp(w.k(), w.m()), lower_amp(w.k(), w.m()), w.k_plus_m()};
}

Eigen::MatrixXcd TruncatedRep::casimir() const {
  const Eigen::MatrixXcd a = k1();
  const Eigen::MatrixXcd b = k2();
  return k0 * k0 - a * a - b * b;
}

TruncatedRep build_truncated_rep(const BargmannWeight& w, int cutoff) {
  if (cutoff < 2) {
    throw Error(ErrorKind::invalid_argument,
                "truncation cutoff must be at least 2, got " + std::to_string(cutoff));
  }
  TruncatedRep rep{w, cutoff, Eigen::MatrixXcd::Zero(cutoff, cutoff),
                   Eigen::MatrixXcd::Zero(cutoff, cutoff),
                   Eigen::MatrixXcd::Zero(cutoff, cutoff)};
  for (int m = 0; m < cutoff; ++m) {
    rep.k0(m, m) = w.k() + m;
    if (m + 1 < cutoff) rep.kplus(m + 1, m) = raise_amp(w.k(), m);
  }
  rep.kminus = rep.kplus.adjoint();
  return rep;
}

double casimir_eigenvalue(const BargmannWeight& w) { return w.k() * (w.k() - 1.0); }

DisplacedState displacement_numeric(cplx z, const BargmannWeight& w, int cutoff) {
  require_disk(z);
  if (cutoff < 2 || cutoff <= w.m()) {
    throw Error(ErrorKind::invalid_argument,
                "cutoff " + std::to_string(cutoff) + " cannot hold basis state m = " +
                    std::to_string(w.m()));
  }
  const double k = w.k();
  const int m = w.m();

  // exp(-conj(z) K-) |m>: terminates after m lowering steps.
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff);
  Eigen::VectorXcd term = Eigen::VectorXcd::Zero(cutoff);
  term(m) = 1.0;
  v(m) = 1.0;
  for (int n = 1; n <= m; ++n) {
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(cutoff);
    for (int j = 0; j + 1 < cutoff; ++j) {
      next(j) = -std::conj(z) / double(n) * lower_amp(k, j + 1) * term(j + 1);
    }
    term = next;
    v += term;
  }

  const double beta = std::log1p(-std::norm(z));
  for (int j = 0; j < cutoff; ++j) v(j) *= std::exp(beta * (k + j));

  // exp(z K+): the series is finite on the truncated space.
  Eigen::VectorXcd result = v;
  term = v;
  for (int n = 1; n < cutoff; ++n) {
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(cutoff);
    for (int j = 0; j + 1 < cutoff; ++j) {
      next(j + 1) = z / double(n) * raise_amp(k, j) * term(j);
    }
    term = next;
    if (term.squaredNorm() == 0.0) break;
    result += term;
  }

  DisplacedState out;
  out.raw_norm = result.norm();
  const int tail = std::min(5, cutoff);
  out.tail_norm = result.tail(tail).norm();
  if (out.tail_norm > kTailTolerance) {
    throw Error(ErrorKind::truncation_insufficient,
                "cutoff " + std::to_string(cutoff) + " too small at |z| = " +
                    std::to_string(std::abs(z)) + " (tail norm " +
                    std::to_string(out.tail_norm) + ")");
  }
  out.amplitudes = result / out.raw_norm;
  return out;
}

GeneratorExpectations coherent_expectation_K(cplx z, const BargmannWeight& w) {
  require_disk(z);
  const double km = w.k_plus_m();
  const double r2 = std::norm(z);
  const double k0 = km * (1.0 + r2) / (1.0 - r2);
  const cplx kplus = 2.0 * std::conj(z) * km / (1.0 - r2);
  return {k0, kplus, std::conj(kplus)};
}

double basis_moment(int eps, int n, const BargmannWeight& w) {
  if (eps != 1 && eps != -1) {
    throw Error(ErrorKind::invalid_argument, "eps must be +1 or -1");
  }
  if (n < 0) throw Error(ErrorKind::invalid_argument, "moment order must be non-negative");
  if (n == 0) return 1.0;
  // Paths of length n starting at m reach at most m + n; one extra level
  // keeps the truncation edge out of every closed path.
  const TruncatedRep rep = build_truncated_rep(w, w.m() + n + 2);
  const Eigen::MatrixXcd omega = rep.k0 + double(eps) * rep.k1();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(rep.cutoff);
  v(w.m()) = 1.0;
  Eigen::VectorXcd x = v;
  for (int i = 0; i < n; ++i) x = omega * x;
  return x(w.m()).real();
}

double omega_moment(int eps, int n, cplx z, const BargmannWeight& w) {
  require_disk(z);
  return std::pow(xi_eps(eps, z), n) * basis_moment(eps, n, w);
}

double q_moment(int j, const BargmannWeight& w) {
  const double k = w.k();
  const double m = w.m();
  switch (j) {
    case 1:
      return 2.0 * (k + m);
    case 2:
      return 2.0 * k * (2.0 * k + 1.0) + 12.0 * k * m + 6.0 * m * m;
    case 3:
      return 4.0 * (k + m) * (2.0 * k * k + 10.0 * k * m + 3.0 * k + 5.0 * m * m + 1.0);
    default:
      throw Error(ErrorKind::unsupported_order,
                  "closed-form Q_j available for j = 1..3 only, got " + std::to_string(j));
  }
}

boost::rational<std::int64_t> q_moment_exact(int j, int k_quarters, int m) {
  using R = boost::rational<std::int64_t>;
  if (k_quarters <= 0 || m < 0) {
    throw Error(ErrorKind::invalid_argument, "q_moment_exact needs k > 0 and m >= 0");
  }
  const R k(k_quarters, 4);
  const R mm(m);
  switch (j) {
    case 1:
      return R(2) * (k + mm);
    case 2:
      return R(2) * k * (R(2) * k + R(1)) + R(12) * k * mm + R(6) * mm * mm;
    case 3:
      return R(4) * (k + mm) *
             (R(2) * k * k + R(10) * k * mm + R(3) * k + R(5) * mm * mm + R(1));
    default:
      throw Error(ErrorKind::unsupported_order,
                  "closed-form Q_j available for j = 1..3 only, got " + std::to_string(j));
  }
}

double s_moment(int j, cplx z, const BargmannWeight& w) {
  require_disk(z);
  return std::pow(xi_eps(1, z), j) * q_moment(j, w);
}

}  // namespace tdvp::su11
