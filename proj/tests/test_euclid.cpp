#include <cmath>

#include "doctest.h"
#include "heatlands/errors.hpp"
#include "heatlands/euclid.hpp"

using namespace heatlands;

namespace {

double heat(double x, double t) { return std::exp(-x * x / (4 * t)) / std::sqrt(4 * M_PI * t); }

}  // namespace

TEST_CASE("heat kernel on the line matches the Gaussian") {
  auto spec = laplacian_spec(1);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 512, 32.0);
  for (double t : {0.25, 1.0}) {
    auto K = synthesize_kernel(spec, r, t, g);
    double err = 0;
    for (int j = 0; j < g.n; ++j) err = std::max(err, std::abs(K.values[j] - heat(g.coord(j), t)));
    CHECK(err / heat(0, t) < 1e-10);
  }
}

TEST_CASE("biharmonic kernel at the origin") {
  // K_t(0) = (2 pi)^-1 int exp(-t xi^4) dxi = Gamma(1/4) / (4 pi t^(1/4)).
  auto spec = power_spec(1, 4);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 1024, 64.0);
  for (double t : {0.5, 2.0}) {
    auto K = synthesize_kernel(spec, r, t, g);
    CHECK(K.values[g.n / 2].real() == doctest::Approx(std::tgamma(0.25) / (4 * M_PI * std::pow(t, 0.25))).epsilon(1e-10));
  }
}

TEST_CASE("two dimensional kernel factorizes") {
  auto spec = laplacian_spec(2);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(2, 64, 16.0);
  auto K = synthesize_kernel(spec, r, 0.5, g);
  double x[2], err = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    err = std::max(err, std::abs(K.values[i] - heat(x[0], 0.5) * heat(x[1], 0.5)));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("coarse lattice raises AliasingRisk with the required size") {
  auto spec = laplacian_spec(1);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 32, 32.0);
  try {
    synthesize_kernel(spec, r, 0.01, g);
    FAIL("expected AliasingRisk");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AliasingRisk);
    CHECK(e.detail()["required_n"].get<int>() > 32);
  }
}

TEST_CASE("derivative tags match analytic derivatives") {
  auto spec = laplacian_spec(1);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 512, 32.0);
  const double t = 0.5;
  auto f = synthesize_kernel(spec, r, t, g, {{0}, {0, 0}});
  double e1 = 0, e2 = 0;
  for (int j = 0; j < g.n; ++j) {
    double x = g.coord(j);
    e1 = std::max(e1, std::abs(f[0].values[j] - (-x / (2 * t)) * heat(x, t)));
    e2 = std::max(e2, std::abs(f[1].values[j] - (x * x / (4 * t * t) - 1 / (2 * t)) * heat(x, t)));
  }
  CHECK(e1 < 1e-10);
  CHECK(e2 < 1e-10);
}

TEST_CASE("Gaussian envelope constant for m = 2") {
  auto spec = laplacian_spec(1);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 1024, 64.0);
  auto fit = fit_gaussian_envelope(synthesize_kernel(spec, r, 1.0, g), 2, 1.0);
  CHECK(fit.b == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(envelope_violation(synthesize_kernel(spec, r, 1.0, g), 2, 1.0, fit) < 1e-6);
}

TEST_CASE("first order drift gives the omega of the symbol") {
  // H = -d^2 + i A (A = -d): symbol xi^2 - xi, so ||K_t||_1 = e^(t/4).
  OperatorSpec spec(1, 2, {{{0, 0}, -1.0}, {{0}, cplx(0, 1)}});
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 1024, 64.0);
  for (double t : {0.5, 1.0}) CHECK(l1_norm(g, synthesize_kernel(spec, r, t, g).values) == doctest::Approx(std::exp(t / 4)).epsilon(1e-9));
}

TEST_CASE("property: mass one and semigroup for several orders") {
  auto g = LatticeGrid::box(1, 1024, 64.0);
  for (int m : {2, 4, 6}) {
    auto spec = power_spec(1, m);
    auto r = certify_ellipticity(spec);
    for (double t : {0.3, 0.7}) {
      auto K = synthesize_kernel(spec, r, t, g);
      CHECK(std::abs(lattice_integral(g, K.values) - 1.0) < 1e-10);
      auto c = convolve(K, K);
      auto K2 = synthesize_kernel(spec, r, 2 * t, g);
      for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] -= K2.values[i];
      CHECK(l1_norm(g, c.values) < 1e-8);
    }
  }
}

TEST_CASE("property: spectral operator applied to the kernel equals minus its time derivative") {
  auto spec = power_spec(1, 4);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 1024, 64.0);
  const double t = 0.5, h = 1e-4;
  auto K = synthesize_kernel(spec, r, t, g);
  auto Kp = synthesize_kernel(spec, r, t + h, g), Km = synthesize_kernel(spec, r, t - h, g);
  auto HK = apply_operator_spectral(spec, g, K.values);
  double err = 0;
  for (std::size_t i = 0; i < HK.size(); ++i) err = std::max(err, std::abs((Kp.values[i] - Km.values[i]) / (2 * h) + HK[i]));
  CHECK(err < 1e-6);
}

TEST_CASE("smoothing seminorms and fractional powers") {
  auto spec = laplacian_spec(1);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 512, 32.0);
  CVec phi(g.size());
  for (int j = 0; j < g.n; ++j) phi[j] = std::exp(-g.coord(j) * g.coord(j));
  auto prof = smoothing_seminorms(spec, r, g, phi, 0.5, 6);
  REQUIRE(prof.levels.size() >= 4);
  for (const auto& [k, v] : prof.levels) CHECK((v > 0 && std::isfinite(v)));
  CHECK(prof.b > 0);
  // (I + H)^(1/2) applied twice equals I + H.
  auto half = fractional_power_apply(spec, r, 0.5, g, phi, 1.0);
  auto twice = fractional_power_apply(spec, r, 0.5, g, half, 1.0);
  auto direct = apply_operator_spectral(spec, g, phi);
  double err = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) err = std::max(err, std::abs(twice[i] - direct[i] - phi[i]));
  CHECK(err < 1e-10);
}
