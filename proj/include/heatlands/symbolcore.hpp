#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "heatlands/numerics.hpp"
#include "json.hpp"

namespace heatlands {

// Ordered tuple of coordinate indices, 0-based in the C++ API (the JSON
// format is 1-based). The empty index is the constant term.
using MultiIndex = std::vector<int>;

struct Term {
  MultiIndex alpha;
  cplx c;
};

// H = sum_alpha c_alpha A^alpha with A^alpha = A_{k1} ... A_{kn}; on R^d
// A_k = -d/dx_k. Terms are stored merged and sorted.
class OperatorSpec {
 public:
  OperatorSpec() = default;
  OperatorSpec(int d, int m, std::vector<Term> terms);

  int d() const { return d_; }
  int m() const { return m_; }
  const std::vector<Term>& terms() const { return terms_; }
  cplx constant_term() const;
  cplx coefficient(const MultiIndex& alpha) const;
  bool has_lower_order() const;

 private:
  int d_ = 0;
  int m_ = 0;
  std::vector<Term> terms_;
};

// Convenience builders; all return validated specs.
OperatorSpec laplacian_spec(int d, double scale = 1.0);   // -scale * sum d_k^2
OperatorSpec power_spec(int d, int m, double scale = 1.0); // scale * (-Laplacian)^(m/2), ordered expansion

struct EllipticityReport {
  int d = 0;
  int m = 0;
  bool strongly_elliptic = false;
  bool principal_nonvanishing = false;
  double mu = 0.0;
  double lambda = 0.0;
  double omega = 0.0;
  double omega_triangle = 0.0;  // the cruder triangle-inequality bound
  Vec witness;                  // unit direction minimizing the principal form
  int sphere_resolution = 0;
};

// h(xi) = sum c_alpha (i xi)^alpha.
cplx eval_symbol(const OperatorSpec& spec, std::span<const double> xi);
// Fourier multiplier of H for the synthesis K(x) = (2pi)^-d int e^{i x.xi} m(xi) dxi.
// With A_k = -d/dx_k this is h(-xi).
cplx multiplier(const OperatorSpec& spec, std::span<const double> xi);
// Re((-1)^{m/2} sum_{|alpha|=m} c_alpha xi^alpha).
double principal_form(const OperatorSpec& spec, std::span<const double> xi);

// Never throws on non-elliptic input; the flag says what happened.
EllipticityReport analyze_ellipticity(const OperatorSpec& spec, int sphere_resolution = 721,
                                      double refine_tol = 1e-9);
// Throws NotStronglyElliptic (detail carries the report) when mu <= refine_tol.
EllipticityReport certify_ellipticity(const OperatorSpec& spec, int sphere_resolution = 721,
                                      double refine_tol = 1e-9);

OperatorSpec formal_adjoint(const OperatorSpec& spec);
OperatorSpec real_part(const OperatorSpec& spec);
OperatorSpec compose_abelian(const OperatorSpec& a, const OperatorSpec& b);
OperatorSpec add_specs(const OperatorSpec& a, const OperatorSpec& b);
OperatorSpec scale_spec(const OperatorSpec& a, cplx s);
// Spec whose symbol is eta -> h(S eta).
OperatorSpec transform_basis(const OperatorSpec& spec, const Eigen::MatrixXd& S);

nlohmann::json to_json(const OperatorSpec& spec);
OperatorSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EllipticityReport& r);

}  // namespace heatlands
