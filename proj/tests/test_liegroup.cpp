#include <cmath>

#include "doctest.h"
#include "heatlands/errors.hpp"
#include "heatlands/group_convolution.hpp"
#include "heatlands/group_model.hpp"

using namespace heatlands;

namespace {

Vec random_point(std::mt19937_64& eng, int d, double r) {
  Vec x(d);
  for (double& v : x) v = r * (2 * uniform01(eng) - 1) / std::sqrt(static_cast<double>(d));
  return x;
}

double dist(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

CVec gaussian(const LatticeGrid& g, double s, const Vec& c) {
  CVec f(g.size());
  double x[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.point(i, x);
    double r2 = 0;
    for (int a = 0; a < g.d; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
    f[i] = std::exp(-r2 / (2 * s * s));
  }
  return f;
}

}  // namespace

TEST_CASE("Heisenberg product in exponential coordinates") {
  auto H = GroupModel::builtin("heisenberg3", 3.6);
  CHECK(H.law() == GroupLaw::StepTwo);
  Vec x{0.3, -0.4, 0.2}, y{-0.5, 0.25, 0.7};
  auto z = H.product(x, y);
  CHECK(z[0] == doctest::Approx(-0.2));
  CHECK(z[1] == doctest::Approx(-0.15));
  CHECK(z[2] == doctest::Approx(0.9 + 0.5 * (0.3 * 0.25 - (-0.4) * (-0.5))));
}

TEST_CASE("Heisenberg left-invariant fields") {
  auto H = GroupModel::builtin("heisenberg3", 3.6);
  auto f = H.left_vector_fields();
  CHECK(f.exact);
  double x[3] = {0.7, -1.3, 0.4};
  // X1 = -d1 - x2/2 d3, X2 = -d2 + x1/2 d3, X3 = -d3.
  CHECK(std::abs(f.fields[0].coefficient_at({1, 0, 0}, x) - cplx(-1)) < 1e-14);
  CHECK(std::abs(f.fields[0].coefficient_at({0, 0, 1}, x) - cplx(0.65)) < 1e-14);
  CHECK(std::abs(f.fields[1].coefficient_at({0, 0, 1}, x) - cplx(0.35)) < 1e-14);
  CHECK(std::abs(f.fields[2].coefficient_at({0, 0, 1}, x) - cplx(-1)) < 1e-14);
  CHECK(f.max_coefficient_at_origin() < 1e-14);
}

TEST_CASE("affine group modular function and Haar density") {
  auto A = GroupModel::builtin("affine2", 2.0);
  CHECK(A.law() == GroupLaw::Affine);
  CHECK_FALSE(A.is_unimodular());
  Vec x{0.6, -0.3};
  CHECK(A.modular_function(x) == doctest::Approx(std::exp(-0.6)));
  CHECK(A.haar_density(x) == doctest::Approx((1 - std::exp(-0.6)) / 0.6));
  CHECK_THROWS_AS(A.haar_density(Vec{3.0, 0.0}), Error);
}

TEST_CASE("affine right translation scales Haar integrals by the modular function") {
  auto A = GroupModel::builtin("affine2", 3.0);
  auto g = LatticeGrid::box(2, 128, 8.0);
  Vec c{0.0, 0.0};
  CVec f = gaussian(g, 0.4, c);
  Vec s = haar_weights(A, g);
  Vec shift{0.3, 0.2};
  CVec fr = right_translate(A, g, f, shift);
  cplx i0 = 0, i1 = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    i0 += f[i] * s[i];
    i1 += fr[i] * s[i];
  }
  CHECK(std::abs(i1 / i0) == doctest::Approx(1.0 / A.modular_function(shift)).epsilon(1e-4));
}

TEST_CASE("invalid structure constants are rejected") {
  nlohmann::json j = {{"d", 3},
                      {"structure", {{{"i", 1}, {"j", 2}, {"k", 3}, {"c", 1.0}},
                                     {{"i", 2}, {"j", 3}, {"k", 1}, {"c", 1.0}},
                                     {{"i", 1}, {"j", 3}, {"k", 1}, {"c", 1.0}}}},
                      {"chart_radius", 1.0},
                      {"bch_order", 4}};
  CHECK_THROWS_AS(GroupModel::from_json(j), Error);
  nlohmann::json so3 = {{"d", 3},
                        {"structure", {{{"i", 1}, {"j", 2}, {"k", 3}, {"c", 1.0}},
                                       {{"i", 2}, {"j", 3}, {"k", 1}, {"c", 1.0}},
                                       {{"i", 3}, {"j", 1}, {"k", 2}, {"c", 1.0}}}},
                        {"chart_radius", 3.0},
                        {"bch_order", 6}};
  try {
    GroupModel::from_json(so3);
    FAIL("expected a chart radius rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("property: associativity and inverses") {
  auto eng = keyed_engine(21, 0);
  for (const char* name : {"heisenberg3", "affine2"}) {
    auto G = GroupModel::builtin(name, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      int d = G.dim();
      Vec x = random_point(eng, d, 0.3), y = random_point(eng, d, 0.3), z = random_point(eng, d, 0.3);
      CHECK(dist(G.product(G.product(x, y), z), G.product(x, G.product(y, z))) < 1e-12);
      Vec e = G.product(x, G.inverse(x));
      CHECK(dist(e, Vec(d, 0.0)) < 1e-14);
    }
    CHECK(G.roundtrip_defect(200, 3) < 1e-12);
  }
}

TEST_CASE("property: Dynkin series group matches the nilpotent law") {
  // A step-two algebra declared with a higher BCH order gives the same law.
  nlohmann::json j = {{"d", 3},
                      {"structure", {{{"i", 1}, {"j", 2}, {"k", 3}, {"c", 1.0}}}},
                      {"chart_radius", 2.0},
                      {"bch_order", 2}};
  auto G = GroupModel::from_json(j);
  auto H = GroupModel::builtin("heisenberg3", 2.0);
  auto eng = keyed_engine(22, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec x = random_point(eng, 3, 1.0), y = random_point(eng, 3, 1.0);
    CHECK(dist(G.product(x, y), H.product(x, y)) < 1e-13);
  }
}

TEST_CASE("abelian convolution of Gaussians") {
  auto E = GroupModel::builtin("euclid", 10.0, 1);
  auto g = LatticeGrid::box(1, 256, 16.0);
  CVec a = gaussian(g, 0.5, {0.0}), b = gaussian(g, 0.7, {0.0});
  CVec c = group_convolve(E, g, a, b);
  const double s2 = 0.25 + 0.49;
  const double amp = 2 * M_PI * 0.5 * 0.7 / std::sqrt(2 * M_PI * s2);
  double err = 0;
  for (int j = 0; j < g.n; ++j) {
    double x = g.coord(j);
    err = std::max(err, std::abs(c[j] - amp * std::exp(-x * x / (2 * s2))));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("twisted and direct Heisenberg convolutions agree") {
  auto H = GroupModel::builtin("heisenberg3", 3.6);
  auto g = LatticeGrid::box(3, 16, 8.0);
  CVec a = gaussian(g, 0.6, {0.2, 0.0, 0.0}), b = gaussian(g, 0.7, {0.0, -0.3, 0.1});
  CVec t = group_convolve(H, g, a, b, ConvolutionEngine::StepTwoTwisted);
  CVec d = group_convolve(H, g, a, b, ConvolutionEngine::DirectQuadrature);
  double err = 0, mx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    err = std::max(err, std::abs(t[i] - d[i]));
    mx = std::max(mx, std::abs(t[i]));
  }
  CHECK(err / mx < 1e-3);
}

TEST_CASE("property: convolution mass is multiplicative on a unimodular group") {
  auto H = GroupModel::builtin("heisenberg3", 3.6);
  auto g = LatticeGrid::box(3, 32, 8.0);
  CVec a = gaussian(g, 0.5, {0.0, 0.0, 0.0}), b = gaussian(g, 0.6, {0.3, 0.1, 0.0});
  CVec c = group_convolve(H, g, a, b);
  cplx ma = lattice_integral(g, a), mb = lattice_integral(g, b), mc = lattice_integral(g, c);
  // Limited by the interpolated group action at this lattice spacing.
  CHECK(std::abs(mc / (ma * mb) - 1.0) < 1e-4);
}
