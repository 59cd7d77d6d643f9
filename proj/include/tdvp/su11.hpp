#pragma once

// Positive discrete series D+(k) of su(1,1) ~ sp(2,R).
//
// Basis |k,m>, m = 0,1,...:
//   K0 |k,m> = (k+m)               |k,m>
//   K+ |k,m> = sqrt((m+1)(m+2k))   |k,m+1>
//   K- |k,m> = sqrt(m(m+2k-1))     |k,m-1>
// Coherent states |z,k,m> = exp(z K+) exp(ln(1-|z|^2) K0) exp(-conj(z) K-) |k,m>
// on the open unit disk.

#include <complex>
#include <cstdint>

#include <Eigen/Dense>
#include <boost/rational.hpp>

namespace tdvp::su11 {

using cplx = std::complex<double>;

class BargmannWeight {
 public:
  // Throws Error(invalid_argument) unless k > 0 and m >= 0.
  BargmannWeight(double k, int m);

  double k() const noexcept { return k_; }
  int m() const noexcept { return m_; }
  double k_plus_m() const noexcept { return k_ + m_; }

  friend bool operator==(const BargmannWeight&, const BargmannWeight&) = default;

 private:
  double k_;
  int m_;
};

struct LadderElements {
  double raise;  // <m+1|K+|m>
  double lower;  // <m-1|K-|m>
  double diag;   // <m|K0|m>
};

LadderElements ladder_elements(const BargmannWeight& w);

// Dense truncation of the representation to span{|k,0>, ..., |k,cutoff-1>}.
// The weight's m is irrelevant here; only k labels the representation.
struct TruncatedRep {
  BargmannWeight weight;
  int cutoff;
  Eigen::MatrixXcd k0;
  Eigen::MatrixXcd kplus;
  Eigen::MatrixXcd kminus;

  Eigen::MatrixXcd k1() const { return 0.5 * (kplus + kminus); }
  Eigen::MatrixXcd k2() const { return cplx(0.0, -0.5) * (kplus - kminus); }
  Eigen::MatrixXcd casimir() const;
};

// Throws Error(invalid_argument) when cutoff < 2.
TruncatedRep build_truncated_rep(const BargmannWeight& w, int cutoff);

double casimir_eigenvalue(const BargmannWeight& w);

struct DisplacedState {
  Eigen::VectorXcd amplitudes;  // normalized
  double raw_norm;              // norm before normalization
  double tail_norm;             // norm of the last five components
};

// Fock-space evaluation of U(z)|k,m>. exp(z K+) is applied as its exact
// (finite) series since K+ is nilpotent on the truncated space, so components
// below the cutoff are exact up to rounding.
// Errors: |z| >= 1 -> out_of_domain; tail_norm > 1e-12 -> truncation_insufficient.
DisplacedState displacement_numeric(cplx z, const BargmannWeight& w, int cutoff);

struct GeneratorExpectations {
  double k0;
  cplx kplus;
  cplx kminus;
};

GeneratorExpectations coherent_expectation_K(cplx z, const BargmannWeight& w);

// <k,m| (K0 + eps K1)^n |k,m>; independent of eps by the parity K1 -> -K1.
double basis_moment(int eps, int n, const BargmannWeight& w);

// <z,k,m| (K0 + eps K1)^n |z,k,m> = [|1+eps z|^2/(1-|z|^2)]^n <k,m|(K0+eps K1)^n|k,m>
double omega_moment(int eps, int n, cplx z, const BargmannWeight& w);

// Q_j(k,m) = <k,m|(2(K0+K1))^j|k,m> for j = 1, 2, 3.
// Throws Error(unsupported_order) for other j.
double q_moment(int j, const BargmannWeight& w);

// Exact Q_j for k = k_quarters / 4.
boost::rational<std::int64_t> q_moment_exact(int j, int k_quarters, int m);

// S_j(z,k,m) = xi(z)^j Q_j(k,m) = <z,k,m|(2(K0+K1))^j|z,k,m>.
double s_moment(int j, cplx z, const BargmannWeight& w);

}  // namespace tdvp::su11
