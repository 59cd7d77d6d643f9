#pragma once

// Independent oracles built from boson Fock space, used only by tests.
//
// Axial sectors: the even (k = 1/4) or odd (k = 3/4) states of one boson with
//   K0 = (a^dag a + 1/2)/2,  K+ = (a^dag)^2 / 2,  K- = a^2 / 2.
// Radial sector k = (l+1)/2: two circular bosons restricted to n+ - n- = l with
//   K0 = (n+ + n- + 1)/2,  K+ = a+^dag a-^dag,  K- = a+ a-.

#include <complex>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>
#include <boost/rational.hpp>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Annihilation operator on span{|0>, ..., |n-1>}.
Mat boson_a(int n);

struct Rep {
  Mat k0;
  Mat kp;
  Mat km;
  Mat k1() const { return 0.5 * (kp + km); }
};

// `dim` basis states of the k = quarters/4 sector (quarters = 1 or 3).
Rep boson_axial(int quarters, int dim);

// `dim` basis states of the orbital sector l.
Rep boson_radial(int l, int dim);

// Radial-plane operators in units hbar = M = omega = 1, built from two
// Cartesian bosons on an n x n product space and projected onto the first
// `dim` states |n+ = l + j, n- = j> of the circular basis
// a+- = (a_x -+ i a_y)/sqrt(2).
struct PlaneOperators {
  Mat rho2;  // x^2 + y^2
  Mat p2;    // p_x^2 + p_y^2
  Mat lz;    // x p_y - y p_x
};

PlaneOperators plane_operators(int l, int dim, int n);

// x^2 and p^2 of one boson (hbar = M = omega = 1) restricted to a parity sector.
struct LineOperators {
  Mat x2;
  Mat p2;
  Mat x4;
  Mat x6;
};

LineOperators line_operators(int quarters, int dim);

// Rows of the parity-`parity` states of a one-boson operator.
Mat parity_block(const Mat& full, int parity, int dim);

// exp(z K+) exp(ln(1-|z|^2) K0) exp(-conj(z) K-) |m> by dense matrix exponentials.
Vec coherent_vector(const Rep& rep, cplx z, int m);

inline cplx expect(const Vec& v, const Mat& op) { return v.dot(op * v); }

// <k,m| (2K0 + K+ + K-)^j |k,m> for k = quarters/4, summed exactly over walks.
boost::rational<std::int64_t> walk_moment(int quarters, int m, int j);

// One-period propagator of i hbar dU/dt = H(t) U by the fourth-order Magnus
// integrator with two Gauss points per step.
Mat magnus4_propagator(const std::function<Mat(double)>& H, double t0, double t1, int steps,
                       double hbar = 1.0);

// Monodromy of x' = w P, P' = -(K(t)/(M w)) x over [0, T] (P = p/(M w)) by a
// Fehlberg 7(8) pair from Boost.Odeint.
Eigen::Matrix2d mathieu_monodromy(const std::function<double(double)>& k_over_m, double w,
                                  double period, double tol = 1e-13);

// Newtonian trajectory x(t) of x'' = -(K(t)/M) x sampled at `times`.
std::vector<double> newtonian_positions(const std::function<double(double)>& k_over_m, double x0,
                                        double v0, const std::vector<double>& times,
                                        double tol = 1e-12);

}  // namespace oracle
