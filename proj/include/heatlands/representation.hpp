#pragma once

#include <memory>
#include <optional>
#include <string>

#include "heatlands/group_model.hpp"
#include "heatlands/lattice.hpp"
#include "heatlands/symbolcore.hpp"

namespace heatlands {

// ||U(g)|| <= M e^{rho |g|} on the sampled chart points.
struct Continuity {
  double M = 1.0;
  double rho = 0.0;
  double radius = 0.0;  // largest |g| sampled
  int samples = 0;
};

// Representation of the group on a finite sample space. A_k is
// d/ds U(exp(s a_k)) at s = 0.
class Representation {
 public:
  virtual ~Representation() = default;
  virtual std::string name() const = 0;
  virtual int group_dim() const = 0;
  virtual std::size_t size() const = 0;
  virtual CVec act(const Vec& g, const CVec& xi) const = 0;
  virtual CVec generator(int k, const CVec& xi) const = 0;
  virtual cplx inner(const CVec& a, const CVec& b) const;  // conjugate-linear in a
  virtual bool unitary() const { return true; }
  // Derivative scheme, recorded in reports.
  virtual std::string generator_scheme() const = 0;
  // Lattice the carrier lives on (for random fields); d = 0 if none.
  virtual LatticeGrid carrier_grid() const { return {}; }
  // U(K) xi = sum_i w_i K(g_i) sigma(g_i) U(g_i) xi over the group lattice.
  virtual CVec transfer(const GroupModel& model, const LatticeGrid& grid, const CVec& kernel, const CVec& xi) const;

  double norm(const CVec& xi) const;
  // H_U xi = sum_alpha c_alpha A_alpha1 ... A_alphan xi.
  CVec apply(const OperatorSpec& spec, const CVec& xi) const;
  CVec monomial(const MultiIndex& alpha, const CVec& xi) const;

  std::optional<Continuity> continuity;
};

// U(g) = identity on C^n.
class TrivialRep : public Representation {
 public:
  TrivialRep(int group_dim, std::size_t n) : d_(group_dim), n_(n) {}
  std::string name() const override { return "trivial"; }
  int group_dim() const override { return d_; }
  std::size_t size() const override { return n_; }
  CVec act(const Vec&, const CVec& xi) const override { return xi; }
  CVec generator(int, const CVec& xi) const override { return CVec(xi.size(), 0.0); }
  std::string generator_scheme() const override { return "zero"; }

 private:
  int d_;
  std::size_t n_;
};

// (U(x) xi)(y) = xi(y - x) on a periodic lattice over R^d; spectral shifts
// and derivatives.
class TranslationRep : public Representation {
 public:
  explicit TranslationRep(LatticeGrid grid) : grid_(grid) {}
  std::string name() const override { return "translation"; }
  int group_dim() const override { return grid_.d; }
  std::size_t size() const override { return grid_.size(); }
  CVec act(const Vec& g, const CVec& xi) const override;
  CVec generator(int k, const CVec& xi) const override;
  cplx inner(const CVec& a, const CVec& b) const override;
  std::string generator_scheme() const override { return "spectral"; }
  LatticeGrid carrier_grid() const override { return grid_; }
  // Exact lattice shifts make the transfer sum a circular convolution.
  CVec transfer(const GroupModel& model, const LatticeGrid& grid, const CVec& kernel, const CVec& xi) const override;
  // Applies the Fourier multiplier of H (spectral form of apply()).
  CVec apply_multiplier(const std::function<cplx(const double*)>& m, const CVec& xi) const;

 private:
  LatticeGrid grid_;
};

// (U(g) xi)(h) = xi(g^-1 h) on the chart lattice; 6-point interpolation for
// the action and the chart vector fields for generators.
class LeftRegularRep : public Representation {
 public:
  LeftRegularRep(GroupModel model, LatticeGrid grid, DerivativeMode mode = DerivativeMode::Stencil4);
  std::string name() const override { return "left_regular"; }
  int group_dim() const override { return model_.dim(); }
  std::size_t size() const override { return grid_.size(); }
  CVec act(const Vec& g, const CVec& xi) const override;
  CVec generator(int k, const CVec& xi) const override;
  cplx inner(const CVec& a, const CVec& b) const override;
  std::string generator_scheme() const override;
  LatticeGrid carrier_grid() const override { return grid_; }
  CVec transfer(const GroupModel& model, const LatticeGrid& grid, const CVec& kernel, const CVec& xi) const override;
  const GroupModel& model() const { return model_; }

 private:
  GroupModel model_;
  LatticeGrid grid_;
  DerivativeMode mode_;
  VectorFieldSet fields_;
  Vec sigma_;
};

// Heisenberg ([a1,a2] = a3) on L2(R) sampled on a periodic 1-d lattice:
// A1 = -d/dy, A2 = i y, A3 = -i, and
// (U(exp x) f)(y) = exp(-i (x3 - x1 x2 / 2)) exp(i x2 (y - x1)) f(y - x1).
class SchrodingerRep : public Representation {
 public:
  explicit SchrodingerRep(LatticeGrid line);
  std::string name() const override { return "schrodinger"; }
  int group_dim() const override { return 3; }
  std::size_t size() const override { return grid_.size(); }
  CVec act(const Vec& g, const CVec& xi) const override;
  CVec generator(int k, const CVec& xi) const override;
  cplx inner(const CVec& a, const CVec& b) const override;
  std::string generator_scheme() const override { return "spectral"; }
  LatticeGrid carrier_grid() const override { return grid_; }

 private:
  LatticeGrid grid_;
};

// Samples ||U(g) xi|| / ||xi|| for random chart points g (|g| <= radius) and
// random carrier vectors; M from |g| <= radius/4, rho from the rest.
Continuity measure_continuity(const Representation& rep, double radius, int samples, std::uint64_t seed);

// Band-limited Gaussian random field on the carrier lattice: complex normal
// spectral coefficients for |xi| <= cap, optionally windowed by a smooth bump
// of the given radius (0: no window). Keyed by (seed, trial).
CVec random_field(const LatticeGrid& grid, double cap, std::uint64_t seed, std::uint64_t trial, double window = 0.0);

}  // namespace heatlands
