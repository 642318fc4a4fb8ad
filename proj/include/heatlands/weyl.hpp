#pragma once

#include <array>
#include <map>
#include <string>

#include "heatlands/lattice.hpp"
#include "heatlands/numerics.hpp"
#include "json.hpp"

namespace heatlands {

using Mono = std::array<int, 3>;

int degree(const Mono& a);

// Polynomial-coefficient differential operator sum c * x^a d^b (derivative
// first, then multiplication).
class WeylOp {
 public:
  using Key = std::pair<Mono, Mono>;  // (x exponent, derivative exponent)

  WeylOp() = default;
  explicit WeylOp(int d, int max_x_degree = 64) : d_(d), max_deg_(max_x_degree) {}

  int dim() const { return d_; }
  int max_x_degree() const { return max_deg_; }
  const std::map<Key, cplx>& terms() const { return terms_; }

  void add(const Mono& xa, const Mono& db, cplx c);
  WeylOp operator+(const WeylOp& o) const;
  WeylOp operator-(const WeylOp& o) const;
  WeylOp operator*(cplx s) const;
  // Operator composition (*this)(o(f)).
  WeylOp compose(const WeylOp& o) const;
  WeylOp pruned(double tol) const;
  int order() const;  // max derivative degree

  static WeylOp identity(int d, int max_x_degree = 64);
  static WeylOp partial(int d, int k, cplx c = 1.0, int max_x_degree = 64);

  // Coefficient polynomial attached to d^b, evaluated at x.
  cplx coefficient_at(const Mono& db, const double* x) const;

  nlohmann::json to_json() const;

 private:
  int d_ = 0;
  int max_deg_ = 64;
  std::map<Key, cplx> terms_;
};

enum class DerivativeMode { Spectral, Stencil4 };

// Applies the operator to lattice samples. Spectral mode treats the lattice
// as periodic; Stencil4 uses 4th-order centered differences with zero
// extension outside the box.
CVec apply_weyl(const WeylOp& op, const LatticeGrid& grid, const CVec& f, DerivativeMode mode);

// d^b f by 4th-order centered differences (zero extension).
CVec stencil_derivative(const LatticeGrid& grid, const CVec& f, const Mono& db);

}  // namespace heatlands
