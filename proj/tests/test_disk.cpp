#include "doctest.h"

#include <cmath>
#include <random>

#include "tdvp/disk.hpp"
#include "tdvp/errors.hpp"

using namespace tdvp::disk;
using tdvp::su11::BargmannWeight;

namespace {

constexpr cplx I(0.0, 1.0);

FieldGradient gradient_of_re() {
  return [](cplx) { return WirtingerGradient{0.5, 0.5}; };
}

FieldGradient gradient_of_im() {
  return [](cplx) { return WirtingerGradient{-0.5 * I, 0.5 * I}; };
}

// Central-difference Wirtinger derivative d/dzbar = (d/dx + i d/dy)/2.
template <class F>
cplx fd_dzbar(F&& f, cplx z, double h = 1e-6) {
  const double fx = (f(z + h) - f(z - h)) / (2 * h);
  const double fy = (f(z + I * h) - f(z - I * h)) / (2 * h);
  return 0.5 * (fx + I * fy);
}

CoherentProductState product(cplx za, cplx zr, int l = 0) {
  return CoherentProductState({DiskPoint(za), BargmannWeight(0.25, 0)},
                              {DiskPoint(zr), BargmannWeight(0.5 * (l + 1), 0)}, l);
}

}  // namespace

TEST_CASE("xi and eta") {
  auto p = xi_eta(DiskPoint(0.0));
  CHECK(p.xi == 1.0);
  CHECK(p.eta == 1.0);
  p = xi_eta(DiskPoint(0.5));
  CHECK(p.xi == doctest::Approx(3.0));
  CHECK(p.eta == doctest::Approx(1.0 / 3.0));
  p = xi_eta(DiskPoint(0.5 * I));
  CHECK(p.xi == doctest::Approx(5.0 / 3.0));
  CHECK(p.eta == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("xi and eta are invariant under conjugation") {
  const cplx z(0.31, -0.44);
  const auto a = xi_eta(DiskPoint(z));
  const auto b = xi_eta(DiskPoint(std::conj(z)));
  CHECK(a.xi == doctest::Approx(b.xi).epsilon(1e-15));
  CHECK(a.eta == doctest::Approx(b.eta).epsilon(1e-15));
}

TEST_CASE("Wirtinger derivatives of xi and eta") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 20; ++i) {
    const cplx z(u(rng), u(rng));
    auto xi = [](cplx w) { return xi_eta(DiskPoint(w)).xi; };
    auto eta = [](cplx w) { return xi_eta(DiskPoint(w)).eta; };
    CHECK(std::abs(dxi_dzbar(z) - fd_dzbar(xi, z)) < 1e-8);
    CHECK(std::abs(deta_dzbar(z) - fd_dzbar(eta, z)) < 1e-8);
  }
}

TEST_CASE("domain guard") {
  CHECK_THROWS_AS(DiskPoint(1.0), tdvp::Error);
  CHECK_THROWS_AS(DiskPoint(cplx(0.6, 0.8)), tdvp::Error);
  CHECK_NOTHROW(DiskPoint(0.999999));
}

TEST_CASE("product state weights are validated") {
  CHECK_THROWS_AS(CoherentProductState({DiskPoint(0.0), BargmannWeight(0.5, 0)},
                                       {DiskPoint(0.0), BargmannWeight(0.5, 0)}, 0),
                  tdvp::Error);
  CHECK_THROWS_AS(CoherentProductState({DiskPoint(0.0), BargmannWeight(0.25, 0)},
                                       {DiskPoint(0.0), BargmannWeight(1.5, 0)}, 0),
                  tdvp::Error);
  const auto s = product(0.1, 0.2, 2);
  CHECK(s.radial().weight.k() == 1.5);
  const auto t = s.moved_to(0.3, -0.1);
  CHECK(t.axial().point.z() == cplx(0.3));
  CHECK(t.radial().weight == s.radial().weight);
}

TEST_CASE("log overlap form") {
  CHECK(log_overlap_form(DiskPoint(0.0), BargmannWeight(0.25, 0)) == doctest::Approx(0.5));
  CHECK(log_overlap_form(DiskPoint(0.5), BargmannWeight(0.5, 0)) ==
        doctest::Approx(16.0 / 9.0));

  // d^2/dz dzbar = Laplacian / 4, on a 1e-4 stencil.
  const double k = 0.75;
  const cplx z(0.2, 0.35);
  const double h = 1e-4;
  auto ln_n = [&](cplx w) { return -2.0 * k * std::log(1.0 - std::norm(w)); };
  const double lap = (ln_n(z + h) + ln_n(z - h) + ln_n(z + I * h) + ln_n(z - I * h) -
                      4.0 * ln_n(z)) /
                     (h * h);
  CHECK(log_overlap_form(DiskPoint(z), BargmannWeight(k, 0)) ==
        doctest::Approx(lap / 4.0).epsilon(1e-6));
  CHECK_THROWS_AS(log_overlap_form(DiskPoint(z), BargmannWeight(k, 1)), tdvp::Error);
}

TEST_CASE("Poisson bracket") {
  const BargmannWeight w(0.5, 0);
  const DiskPoint o(0.0);
  const double fg = poisson_bracket(gradient_of_re(), gradient_of_im(), o, w);
  const double gf = poisson_bracket(gradient_of_im(), gradient_of_re(), o, w);
  CHECK(fg == -gf);

  FieldGradient zf = [](cplx) { return WirtingerGradient{1.0, 0.0}; };
  FieldGradient zbar = [](cplx) { return WirtingerGradient{0.0, 1.0}; };
  const cplx b = poisson_bracket_complex(zf, zbar, o, w);
  CHECK(std::abs(b - (-I)) < 1e-15);

  // For m = 0, {z, zbar} is the inverse of the overlap form up to the factor 1/i.
  const DiskPoint p(cplx(0.3, -0.2));
  const BargmannWeight w2(0.75, 0);
  const cplx c = poisson_bracket_complex(zf, zbar, p, w2);
  CHECK(std::abs(c - 1.0 / (I * log_overlap_form(p, w2))) < 1e-14);
}

TEST_CASE("mode velocity") {
  CHECK(mode_velocity(0.0, 0.0, 0.5) == cplx(0.0));
  const cplx z(0.1, 0.2);
  const cplx g(0.3, -0.4);
  const double d = 1.0 - std::norm(z);
  CHECK(std::abs(mode_velocity(z, g, 0.75, 2.0) - d * d / (2.0 * I * 2.0 * 0.75) * g) < 1e-15);
}

TEST_CASE("rotationally symmetric Hamiltonian has a fixed point at the origin") {
  // H = c (1 + |z|^2) / (1 - |z|^2), dH/dzbar = 2 c z / (1 - |z|^2)^2.
  const double c = 1.7;
  HamiltonianGradient H = [c](const CoherentProductState& s, double) {
    auto g = [c](cplx z) { return 2.0 * c * z / std::pow(1.0 - std::norm(z), 2); };
    return ProductGradient{g(s.axial().point.z()), g(s.radial().point.z())};
  };
  const auto v = hamiltonian_vector_field(H, product(0.0, 0.0), 0.0);
  CHECK(v.axial == cplx(0.0));
  CHECK(v.radial == cplx(0.0));

  // Away from the origin the flow is a rotation: d|z|^2/dt = 0.
  const auto s = product(cplx(0.3, 0.1), cplx(-0.2, 0.4));
  const auto w = hamiltonian_vector_field(H, s, 0.0);
  CHECK(std::abs(std::real(std::conj(s.axial().point.z()) * w.axial)) < 1e-15);
  CHECK(std::abs(std::real(std::conj(s.radial().point.z()) * w.radial)) < 1e-15);
}

TEST_CASE("xi-eta flow") {
  XiEtaHamiltonian H = [](const XiEta&, const XiEta&, double) {
    return XiEtaPartials{1.0, 0.0, 0.0, 0.0};
  };
  // Real axis: both rates vanish.
  const auto r = xi_eta_flow_check(H, product(0.4, 0.0), 0.0);
  CHECK(std::abs(r.axial.dxi) < 1e-15);
  CHECK(std::abs(r.axial.deta) < 1e-15);

  // H = xi for k = 1/2 at z = 0.3 + 0.2i: xi is conserved, eta follows the chain rule.
  const cplx z(0.3, 0.2);
  const auto s = CoherentProductState({DiskPoint(0.0), BargmannWeight(0.25, 0)},
                                      {DiskPoint(z), BargmannWeight(0.5, 0)}, 0);
  XiEtaHamiltonian Hr = [](const XiEta&, const XiEta&, double) {
    return XiEtaPartials{0.0, 0.0, 1.0, 0.0};
  };
  const auto f = xi_eta_flow_check(Hr, s, 0.0);
  CHECK(std::abs(f.radial.dxi) < 1e-12);
  const cplx zdot = mode_velocity(z, dxi_dzbar(z), 0.5);
  const double chain = 2.0 * std::real(std::conj(deta_dzbar(z)) * zdot);
  CHECK(f.radial.deta == doctest::Approx(chain).epsilon(1e-10));
}

TEST_CASE("reference-frequency rescaling") {
  const DiskPoint p(cplx(0.25, -0.3));
  const auto a = xi_eta(p);
  const DiskPoint q = rescale_reference_frequency(p, 2.0);
  const auto b = xi_eta(q);
  CHECK(b.xi == doctest::Approx(2.0 * a.xi).epsilon(1e-14));
  CHECK(b.eta == doctest::Approx(a.eta / 2.0).epsilon(1e-14));
  const auto back = rescale_reference_frequency(q, 0.5);
  CHECK(std::abs(back.z() - p.z()) < 1e-14);
}
