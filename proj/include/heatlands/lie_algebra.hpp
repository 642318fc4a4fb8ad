#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "heatlands/numerics.hpp"
#include "json.hpp"

namespace heatlands {

// Real Lie algebra with basis a_1..a_d and [a_i, a_j] = sum_k c^k_ij a_k.
class LieAlgebra {
 public:
  LieAlgebra() = default;
  explicit LieAlgebra(int d);

  int dim() const { return d_; }
  double c(int i, int j, int k) const { return c_[(i * d_ + j) * d_ + k]; }
  // Sets c^k_ij and c^k_ji = -c^k_ij.
  void set(int i, int j, int k, double v);

  Vec bracket(const Vec& x, const Vec& y) const;
  Eigen::MatrixXd ad(const Vec& x) const;  // column j = [x, a_j]
  bool is_abelian() const;
  // Smallest s with g^(s+1) = 0 in the lower central series; nullopt if none.
  std::optional<int> nilpotency_step() const;
  double antisymmetry_defect() const;
  double jacobi_defect() const;
  // Indices of basis vectors spanning the derived algebra [g, g] when that
  // span is a coordinate subspace; empty otherwise.
  std::vector<int> derived_coordinate_axes() const;

 private:
  int d_ = 0;
  std::vector<double> c_;
};

LieAlgebra abelian_algebra(int d);
LieAlgebra heisenberg_algebra();  // [a1, a2] = a3
LieAlgebra affine_algebra();      // [a1, a2] = a2

constexpr int kMaxBchOrder = 6;

// log(exp(a) exp(b)) by the Dynkin series through total degree `order`.
Vec bch_product(const LieAlgebra& alg, const Vec& a, const Vec& b, int order);

nlohmann::json to_json(const LieAlgebra& alg);

}  // namespace heatlands
