#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "heatlands/errors.hpp"
#include "heatlands/euclid.hpp"
#include "heatlands/transfer.hpp"

using namespace heatlands;

namespace {

double heat(double x, double t) { return std::exp(-x * x / (4 * t)) / std::sqrt(4 * M_PI * t); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("trivial representation transfers the kernel mass") {
  auto model = GroupModel::builtin("euclid", 6.0, 1);
  auto grid = LatticeGrid::box(1, 256, 16.0);
  CVec K(grid.size());
  for (int j = 0; j < grid.n; ++j) K[j] = heat(grid.coord(j), 0.05);
  TrivialRep triv(1, 2);
  triv.continuity = Continuity{1.0, 0.0, 1.0, 1};
  CVec xi{1.0, cplx(0, 2)};
  auto r = transfer_semigroup(model, grid, K, triv, xi);
  CHECK(r.kernel_mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(r.value[0] - 1.0) < 1e-6);
  CHECK(std::abs(r.value[1] - cplx(0, 2)) < 1e-6);
}

TEST_CASE("transfer without measured continuity is refused") {
  auto model = GroupModel::builtin("euclid", 6.0, 1);
  auto grid = LatticeGrid::box(1, 64, 16.0);
  TrivialRep triv(1, 1);
  CVec K(grid.size(), 0.0);
  CHECK(kind_of([&] { transfer_semigroup(model, grid, K, triv, CVec{1.0}); }) == ErrorKind::ContinuityUnmeasured);
}

TEST_CASE("translation transfer evolves a Gaussian") {
  // Oracle: a Gaussian of variance v evolves to variance v + 2t.
  auto grid = LatticeGrid::box(1, 512, 40.0);
  auto model = GroupModel::builtin("euclid", 100.0, 1);
  model.disable_cutoff();
  TranslationRep T(grid);
  T.continuity = measure_continuity(T, 1.0, 8, 3);
  CVec xi(grid.size()), want(grid.size()), K(grid.size());
  const double t = 0.7;
  for (int j = 0; j < grid.n; ++j) {
    double x = grid.coord(j);
    xi[j] = heat(x, 0.5);
    want[j] = heat(x, 0.5 + t);
    K[j] = heat(x, t);
  }
  auto r = transfer_semigroup(model, grid, K, T, xi);
  CVec d = r.value;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= want[i];
  CHECK(T.norm(d) / T.norm(want) < 1e-4);
}

TEST_CASE("identity acts trivially and the translation generator is -d/dx") {
  auto grid = LatticeGrid::box(1, 256, 20.0);
  TranslationRep T(grid);
  CVec xi(grid.size());
  for (int j = 0; j < grid.n; ++j) xi[j] = heat(grid.coord(j), 0.5);
  CVec same = T.act(Vec(1, 0.0), xi);
  double err = 0;
  for (std::size_t i = 0; i < xi.size(); ++i) err = std::max(err, std::abs(same[i] - xi[i]));
  CHECK(err < 1e-12);
  CVec a = T.generator(0, xi);
  for (int j = 0; j < grid.n; ++j) {
    double x = grid.coord(j);
    CHECK(std::abs(a[j] - x / (2 * 0.5) * heat(x, 0.5)) < 1e-8);
  }
}

TEST_CASE("property: Schrodinger handle is a unitary homomorphism") {
  SchrodingerRep S(LatticeGrid::box(1, 512, 40.0));
  auto line = S.carrier_grid();
  auto model = GroupModel::builtin("heisenberg3", 3.0);
  CVec xi = random_field(line, 2.0, 11, 0, 8.0);
  Vec g{0.3, -0.2, 0.5}, h{-0.1, 0.4, 0.2};
  CVec lhs = S.act(g, S.act(h, xi));
  CVec rhs = S.act(model.product(g, h), xi);
  CVec d = lhs;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= rhs[i];
  CHECK(S.norm(d) / S.norm(xi) < 1e-8);
  CHECK(S.norm(S.act(g, xi)) == doctest::Approx(S.norm(xi)).epsilon(1e-10));
}

TEST_CASE("Garding scan is exact for -d^2 and d^4 on the translation handle") {
  TranslationRep T(LatticeGrid::box(1, 512, 32.0));
  TestVectorOptions tv;
  tv.trials = 40;
  tv.cap = 8.0;
  auto g2 = garding_check(laplacian_spec(1), T, tv);
  CHECK(g2.lambda_hat == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g2.nu_hat < 1e-9);
  auto g4 = garding_check(power_spec(1, 4), T, tv);
  CHECK(g4.lambda_hat == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(g4.nu_hat < 1e-6);
}

TEST_CASE("property: the wrong-sign operator needs more nu as the cap grows") {
  TranslationRep T(LatticeGrid::box(1, 512, 32.0));
  TestVectorOptions tv;
  tv.trials = 40;
  tv.cap = 4.0;
  double a = garding_check(laplacian_spec(1, -1.0), T, tv).nu_hat;
  tv.cap = 8.0;
  double b = garding_check(laplacian_spec(1, -1.0), T, tv).nu_hat;
  CHECK(b > 2 * a);
}

TEST_CASE("Garding from samples picks the binding constraint") {
  std::vector<GardingSample> s{{1.0, 1.0, 1.0, 1.0}, {-1.0, 1.0, 1.0, 1.0}};
  auto r = garding_from_samples(s);
  CHECK(r.nu_hat == doctest::Approx(1.0));
  CHECK(r.lambda_hat == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("property: regularity ratio is scale invariant") {
  TranslationRep T(LatticeGrid::box(1, 256, 32.0));
  CVec phi = random_field(T.carrier_grid(), 3.0, 5, 1, 10.0);
  double r1 = regularity_ratio(laplacian_spec(1), T, phi);
  for (auto& z : phi) z *= cplx(0, 7.5);
  CHECK(regularity_ratio(laplacian_spec(1), T, phi) == doctest::Approx(r1).epsilon(1e-10));
}

TEST_CASE("regularity ratio of a plane wave") {
  // For e^{i k x}: N_2 = k^2 and ||H phi|| + ||phi|| = (k^2 + 1) ||phi||.
  auto grid = LatticeGrid::box(1, 256, 2 * M_PI * 8);
  TranslationRep T(grid);
  const double k = 2.0;
  CVec phi(grid.size());
  for (int j = 0; j < grid.n; ++j) phi[j] = std::exp(cplx(0, k * grid.coord(j)));
  CHECK(regularity_ratio(laplacian_spec(1), T, phi) == doctest::Approx(k * k / (k * k + 1)).epsilon(1e-8));
}

TEST_CASE("analytic radius edge cases") {
  GrowthProfile p;
  p.max_frequency = 100;
  p.N = {1.0, 0.0, 0.0, 0.0};
  CHECK(std::isinf(analytic_radius(p)));
  p.N = {1.0, 0.0, 1.0, 0.0};
  CHECK(analytic_radius(p) == 0.0);
  p.N = {1.0, 2.0, 4.0, 8.0};
  CHECK(analytic_radius(p) == doctest::Approx(0.5));
  p.N = {1.0, 2.0};
  CHECK(kind_of([&] { analytic_radius(p); }) == ErrorKind::InsufficientLevels);
}

TEST_CASE("monomial enumeration") {
  CHECK(seminorm_monomials(3, 2, 64).size() == 9);
  auto big = seminorm_monomials(3, 6, 64);
  CHECK(big.size() == 64);
  for (int k = 0; k < 3; ++k) CHECK(std::find(big.begin(), big.end(), MultiIndex(6, k)) != big.end());
  CHECK(seminorm_monomials(3, 6, 64) == big);
}

TEST_CASE("stencil reach past the carrier is refused") {
  auto model = GroupModel::builtin("heisenberg3", 1.5);
  LeftRegularRep Lr(model, LatticeGrid::box(3, 8, 3.2));
  CVec v(Lr.size(), 1.0);
  CHECK(kind_of([&] { monomial_norms(Lr, v, 2, 8); }) == ErrorKind::StencilOverflow);
}

TEST_CASE("box growth: stable b and agreeing routes") {
  auto grid = LatticeGrid::box(1, 2048, 32.0);
  auto spec = laplacian_spec(1);
  auto rep = certify_ellipticity(spec);
  auto model = GroupModel::builtin("euclid", 100.0, 1);
  model.disable_cutoff();
  TranslationRep T(grid);
  T.continuity = measure_continuity(T, 1.0, 8, 7);
  CVec box(grid.size());
  for (int j = 0; j < grid.n; ++j) box[j] = std::abs(grid.coord(j)) < 0.25 ? 1.0 : 0.0;
  auto kern = [&](double t) { return synthesize_kernel(spec, rep, t, grid, 0.0).values; };
  GrowthOptions go;
  go.factorized_max = 2;
  go.dk = [&](int k, double tau) {
    CVec d = spectral_derivative(grid, kern(tau), MultiIndex{k});
    for (auto& z : d) z = -z;
    return d;
  };
  auto prof = growth_profile(model, grid, kern, T, box, {0.25, 1.0}, 2, go);
  REQUIRE(prof.size() == 2);
  CHECK(prof[0].b > 0);
  CHECK(prof[1].b / prof[0].b < 2.0);
  CHECK(prof[0].b / prof[1].b < 2.0);
  for (const auto& p : prof)
    for (std::size_t k = 1; k < p.factorized.size(); ++k) CHECK(std::abs(p.factorized[k] / p.N[k] - 1) < 0.05);
}
