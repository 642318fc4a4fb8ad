#pragma once

#include <array>

#include "heatlands/group_model.hpp"
#include "heatlands/lattice.hpp"

namespace heatlands {

// Half-open index box [lo, hi) per axis; unused axes are [0, 1).
struct IndexBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  bool empty() const;
  nlohmann::json to_json(const LatticeGrid& g) const;
};

// Smallest box holding every entry with |f| > threshold.
IndexBox support_box(const LatticeGrid& grid, const CVec& f, double threshold = 0.0);

enum class ConvolutionEngine { Auto, AbelianFft, StepTwoTwisted, DirectQuadrature };

// (F * G)(g) = int F(h) G(h^-1 g) sigma(h) dh on the chart lattice. Values
// outside the box are treated as zero (the step-two engine is periodic along
// the centre axis).
CVec group_convolve(const GroupModel& model, const LatticeGrid& grid, const CVec& F, const CVec& G,
                    ConvolutionEngine engine = ConvolutionEngine::Auto);

// Tensor 6-point Lagrange interpolation, zero outside the lattice box.
cplx sample_at(const LatticeGrid& grid, const CVec& f, const double* x);

// f(g^-1 h) and f(h g) sampled at every lattice point h.
CVec left_translate(const GroupModel& model, const LatticeGrid& grid, const CVec& f, const Vec& g);
CVec right_translate(const GroupModel& model, const LatticeGrid& grid, const CVec& f, const Vec& g);

// sigma sampled on the lattice.
Vec haar_weights(const GroupModel& model, const LatticeGrid& grid);

}  // namespace heatlands
