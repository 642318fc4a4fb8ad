#pragma once

#include <string>
#include <vector>

#include "heatlands/lie_algebra.hpp"
#include "heatlands/symbolcore.hpp"
#include "heatlands/weyl.hpp"

namespace heatlands {

enum class GroupLaw { Abelian, StepTwo, Affine, Nilpotent, Dynkin };

// X_k = -d_k + Y_k in exponential coordinates, with polynomial coefficients
// (exact for nilpotent algebras, Taylor-truncated otherwise).
struct VectorFieldSet {
  int d = 0;
  std::vector<WeylOp> fields;
  int taylor_degree = 0;
  bool exact = false;
  // max |c_kl(0)| over the Y_k parts; zero by construction.
  double max_coefficient_at_origin() const;
};

class GroupModel {
 public:
  GroupModel() = default;
  GroupModel(std::string name, LieAlgebra alg, double chart_radius, int bch_order);

  // "euclid" (with dimension), "heisenberg3", "affine2".
  static GroupModel builtin(const std::string& name, double chart_radius, int euclid_dim = 1);
  static GroupModel from_json(const nlohmann::json& j);

  const std::string& name() const { return name_; }
  const LieAlgebra& algebra() const { return alg_; }
  int dim() const { return alg_.dim(); }
  double chart_radius() const { return radius_; }
  double inner_radius() const { return 0.5 * radius_; }
  int bch_order() const { return bch_order_; }
  GroupLaw law() const { return law_; }
  bool is_abelian() const { return law_ == GroupLaw::Abelian; }
  bool is_unimodular() const;
  // Replaces the cutoff by 1 everywhere (abelian reduction checks).
  void disable_cutoff() { cutoff_enabled_ = false; }
  bool cutoff_enabled() const { return cutoff_enabled_; }

  // Group law in exponential coordinates; no chart check.
  Vec product(const Vec& x, const Vec& y) const;
  void product(const double* x, const double* y, double* out) const;
  Vec inverse(const Vec& x) const;

  // Checked queries (OutsideChart beyond the chart radius).
  double haar_density(const Vec& x) const;
  double modular_function(const Vec& x) const;
  double chart_modulus(const Vec& x) const;

  double haar_density_unchecked(const double* x) const;
  double modular_function_unchecked(const double* x) const;
  double cutoff(const double* x) const;

  VectorFieldSet left_vector_fields() const;
  // max |x (x^-1 y) - y| over random chart samples.
  double roundtrip_defect(int samples, std::uint64_t seed) const;

  nlohmann::json to_json() const;

 private:
  void check_in_chart(const Vec& x) const;

  std::string name_;
  LieAlgebra alg_;
  double radius_ = 1.0;
  int bch_order_ = 1;
  GroupLaw law_ = GroupLaw::Abelian;
  int taylor_degree_ = 0;
  bool cutoff_enabled_ = true;
};

double smooth_cutoff(double r, double inner, double outer);

struct SplitOperator {
  OperatorSpec h0;  // constant-coefficient part, read on R^d
  WeylOp full;      // sum c_alpha X^alpha in chart coordinates
  WeylOp h1;        // full - h0
  int m = 0;
  nlohmann::json effective_order;  // per derivative monomial: vanishing order found vs required
};

WeylOp spec_as_weyl(const OperatorSpec& spec);  // sum c_alpha (-d)^alpha
WeylOp expand_in_fields(const OperatorSpec& spec, const VectorFieldSet& fields);
SplitOperator split_operator(const OperatorSpec& spec, const VectorFieldSet& fields, double tol = 1e-12);

}  // namespace heatlands
