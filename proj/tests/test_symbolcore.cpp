#include <cmath>

#include "doctest.h"
#include "heatlands/errors.hpp"
#include "heatlands/numerics.hpp"
#include "heatlands/symbolcore.hpp"

using namespace heatlands;

TEST_CASE("laplacian symbol and ellipticity") {
  auto spec = laplacian_spec(2);
  double xi[2] = {0.3, -1.2};
  CHECK(std::abs(eval_symbol(spec, xi) - cplx(0.09 + 1.44, 0)) < 1e-14);
  auto r = certify_ellipticity(spec);
  CHECK(r.strongly_elliptic);
  CHECK(r.mu == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("first order term gives an odd imaginary symbol") {
  OperatorSpec spec(1, 2, {{{0, 0}, -1.0}, {{0}, 2.0}});
  double xi[1] = {0.5};
  double mxi[1] = {-0.5};
  // h(xi) = xi^2 + 2 i xi and the multiplier is h(-xi).
  CHECK(std::abs(eval_symbol(spec, xi) - cplx(0.25, 1.0)) < 1e-14);
  CHECK(std::abs(multiplier(spec, xi) - eval_symbol(spec, mxi)) < 1e-14);
}

TEST_CASE("wrong sign is rejected with a witness direction") {
  try {
    certify_ellipticity(laplacian_spec(1, -1.0));
    FAIL("expected NotStronglyElliptic");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotStronglyElliptic);
    CHECK(e.detail().contains("witness_xi"));
  }
  auto r = analyze_ellipticity(laplacian_spec(1, -1.0));
  CHECK_FALSE(r.strongly_elliptic);
  CHECK(r.mu < 0);
}

TEST_CASE("biharmonic ellipticity constant") {
  auto r = certify_ellipticity(power_spec(2, 4));
  CHECK(r.mu == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("json round trip and parse errors") {
  OperatorSpec spec(2, 2, {{{0, 0}, -1.0}, {{1, 1}, -2.0}, {{0, 1}, cplx(0.1, 0.2)}});
  auto back = spec_from_json(to_json(spec));
  CHECK(back.d() == 2);
  CHECK(back.m() == 2);
  CHECK(std::abs(back.coefficient({0, 1}) - cplx(0.1, 0.2)) < 1e-15);
  nlohmann::json bad = {{"d", 1}};
  try {
    spec_from_json(bad);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
}

TEST_CASE("property: abelian composition multiplies symbols") {
  auto eng = keyed_engine(11, 0);
  OperatorSpec a(2, 2, {{{0, 0}, -1.0}, {{1}, cplx(0, 0.5)}, {{}, 0.3}});
  OperatorSpec b(2, 2, {{{1, 1}, -2.0}, {{0, 1}, 0.25}, {{0}, 1.0}});
  auto ab = compose_abelian(a, b);
  for (int trial = 0; trial < 50; ++trial) {
    double xi[2] = {standard_normal(eng), standard_normal(eng)};
    cplx lhs = eval_symbol(ab, xi), rhs = eval_symbol(a, xi) * eval_symbol(b, xi);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(rhs)));
  }
}

TEST_CASE("property: formal adjoint conjugates the symbol on real frequencies") {
  auto eng = keyed_engine(12, 0);
  OperatorSpec a(2, 2, {{{0, 0}, cplx(-1.0, 0.3)}, {{1}, cplx(0.2, 0.5)}, {{}, cplx(0.3, -1)}});
  auto adj = formal_adjoint(a);
  for (int trial = 0; trial < 50; ++trial) {
    double xi[2] = {standard_normal(eng), standard_normal(eng)};
    CHECK(std::abs(eval_symbol(adj, xi) - std::conj(eval_symbol(a, xi))) < 1e-12);
  }
}

TEST_CASE("property: ellipticity is invariant under orthogonal changes of basis") {
  OperatorSpec a(2, 2, {{{0, 0}, -1.0}, {{1, 1}, -3.0}, {{0, 1}, -0.5}});
  auto r0 = certify_ellipticity(a);
  for (double th : {0.3, 1.1, 2.0}) {
    Eigen::MatrixXd S(2, 2);
    S << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    auto r = certify_ellipticity(transform_basis(a, S));
    CHECK(r.mu == doctest::Approx(r0.mu).epsilon(1e-6));
  }
}
