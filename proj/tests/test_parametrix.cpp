#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "heatlands/errors.hpp"
#include "heatlands/parametrix.hpp"

using namespace heatlands;

namespace {

double heat(double x, double t) { return std::exp(-x * x / (4 * t)) / std::sqrt(4 * M_PI * t); }

CVec exact_line(const LatticeGrid& g, double t) {
  CVec e(g.size());
  for (int j = 0; j < g.n; ++j) e[j] = heat(g.coord(j), t);
  return e;
}

double rel_l1(const LatticeGrid& g, const CVec& a, const CVec& b) {
  CVec d = a;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
  return l1_norm(g, d) / l1_norm(g, b);
}

}  // namespace

TEST_CASE("abelian parametrix reproduces the heat kernel") {
  auto E = GroupModel::builtin("euclid", 3.0, 1);
  auto g = LatticeGrid::box(1, 256, 16.0);
  Parametrix p(E, laplacian_spec(1), g, {});
  const double t = 0.1;
  CHECK(rel_l1(g, p.partial_sum(2, t), exact_line(g, t)) < 1e-4);
  double prev = p.l1(p.seed(t));
  for (int n = 1; n <= 3; ++n) {
    double cur = p.l1(p.term_direct(n, t));
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("series iteration fills the ledger and writes CSV") {
  auto E = GroupModel::builtin("euclid", 3.0, 1);
  auto g = LatticeGrid::box(1, 256, 16.0);
  Parametrix p(E, laplacian_spec(1), g, {});
  auto r = iterate_series(p, {0.05, 0.1}, 3, 1e-12);
  CHECK(r.terms_used >= 2);
  CHECK(r.ledger.size() == 2 * (r.terms_used + 1));
  for (const auto& row : r.ledger)
    if (row.n >= 1) CHECK(row.l1 <= row.envelope * (1 + 1e-9));
  const std::string path = "parametrix_ledger_test.csv";
  r.write_ledger_csv(path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header.find("l1") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("chart radius reaching the box edge is a support leak") {
  auto E = GroupModel::builtin("heisenberg3", 4.0);
  auto g = LatticeGrid::box(3, 16, 8.0);
  CHECK_THROWS_AS(Parametrix(E, laplacian_spec(3), g, {}), Error);
}

TEST_CASE("resolvent below the growth bound is rejected") {
  auto g = LatticeGrid::box(1, 64, 16.0);
  auto fam = [&](double) { return CVec(g.size(), 0.0); };
  try {
    resolvent_kernel(fam, g, 2, 0.5, 1.0);
    FAIL("expected LambdaTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LambdaTooSmall);
  }
}

TEST_CASE("property: exact kernels have zero residual and zero semigroup defect") {
  auto spec = laplacian_spec(1);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 512, 32.0);
  auto E = GroupModel::builtin("euclid", 10.0, 1);
  auto K = [&](double t) { return synthesize_kernel(spec, r, t, g).values; };
  auto H = [&](const CVec& f) { return apply_operator_spectral(spec, g, f); };
  Vec w(g.size(), 1.0);
  auto res = heat_residual(K, H, g, w, {0.25, 0.5, 1.0});
  for (double v : res.l1) CHECK(v < 1e-3);
  CHECK(semigroup_defect(E, g, K(0.25), K(0.25), K(0.5)) < 1e-10);
}

TEST_CASE("Gaussian bound check recovers b = 1/4") {
  auto spec = laplacian_spec(1);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 512, 32.0);
  std::vector<double> times{0.25, 0.5};
  std::vector<CVec> ks;
  for (double t : times) ks.push_back(synthesize_kernel(spec, r, t, g).values);
  auto rep = gaussian_bound_check(g, 2, 0.0, times, ks, 8.0, {0.5, 1.0});
  CHECK(rep.pointwise.b == doctest::Approx(0.25).epsilon(1e-3));
  for (auto& [rho, v] : rep.weighted) CHECK(std::isfinite(v));
}

TEST_CASE("resolvent kernel matches the closed form") {
  auto spec = laplacian_spec(1);
  auto r = certify_ellipticity(spec);
  auto g = LatticeGrid::box(1, 1024, 64.0);
  auto L = resolvent_kernel([&](double t) { return synthesize_kernel(spec, r, t, g, 0.0).values; }, g, 2, 5.0, 0.0);
  CVec e(g.size());
  for (int j = 0; j < g.n; ++j) e[j] = 0.5 / std::sqrt(5.0) * std::exp(-std::sqrt(5.0) * std::abs(g.coord(j)));
  CHECK(rel_l1(g, L.kernel, e) < 1e-2);
}

TEST_CASE("property: remainder scaling for a non-symmetric Heisenberg operator") {
  // H = -sum X_k^2 - X1 X2 keeps a first order part (1/2) X3 at the origin,
  // so ||M_t||_1 ~ t^(-1/2) and ||M_t||_inf ~ t^(-(d+1)/m) = t^(-2).
  auto H = GroupModel::builtin("heisenberg3", 1.5);
  OperatorSpec spec(3, 2, {{{0, 0}, -1.0}, {{1, 1}, -1.0}, {{2, 2}, -1.0}, {{0, 1}, -1.0}});
  ParametrixOptions o;
  o.rule = TimeRule::GaussLegendre;
  o.time_nodes = 10;
  o.t_max = 0.05;
  Parametrix p(H, spec, LatticeGrid::box(3, 64, 3.2), o);
  std::vector<double> ts{0.005, 0.01, 0.02}, l1, linf;
  for (double t : ts) {
    CVec M = p.remainder(t);
    l1.push_back(p.l1(M));
    linf.push_back(linf_norm(M));
  }
  CHECK(loglog_slope(ts, l1) == doctest::Approx(-0.5).epsilon(0.3));
  CHECK(loglog_slope(ts, linf) == doctest::Approx(-2.0).epsilon(0.075));
}

TEST_CASE("property: Heisenberg kernel has unit mass and positive seed") {
  auto H = GroupModel::builtin("heisenberg3", 3.6);
  ParametrixOptions o;
  o.rule = TimeRule::GaussLegendre;
  o.time_nodes = 10;
  o.t_max = 0.1;
  Parametrix p(H, laplacian_spec(3), LatticeGrid::box(3, 32, 8.0), o);
  for (double t : {0.05, 0.1}) {
    CVec K = p.partial_sum(1, t);
    cplx mass = lattice_integral(p.grid(), K);
    CHECK(std::abs(mass - 1.0) < 5e-3);
  }
}

TEST_CASE("property: abelian remainder stays under the t^(-1/2) envelope") {
  // On R the remainder is only the cutoff commutator, so it decays faster
  // than the envelope as t -> 0.
  auto E = GroupModel::builtin("euclid", 3.0, 1);
  Parametrix p(E, laplacian_spec(1), LatticeGrid::box(1, 256, 16.0), {});
  double prev = 0;
  for (double t : {0.02, 0.05, 0.1, 0.25}) {
    double scaled = p.l1(p.remainder(t)) * std::sqrt(t);
    CHECK(scaled >= prev);
    prev = scaled;
  }
  CHECK(prev < 1.0);
}
