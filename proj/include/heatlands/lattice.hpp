#pragma once

#include <array>
#include <functional>

#include "heatlands/numerics.hpp"
#include "json.hpp"

namespace heatlands {

// Periodic cubic lattice with n points per axis, x_j = (j - n/2) * spacing,
// row-major with the last axis fastest.
struct LatticeGrid {
  int d = 1;
  int n = 0;
  double spacing = 0.0;

  LatticeGrid() = default;
  LatticeGrid(int d_, int n_, double spacing_);
  // Box [-L/2, L/2) with n points per axis.
  static LatticeGrid box(int d, int n, double length);

  std::size_t size() const;
  double length() const { return n * spacing; }
  double coord(int j) const { return (j - n / 2) * spacing; }
  double dual_step() const;
  double nyquist() const;
  // Angular frequency of DFT index k (k = n/2 is the Nyquist index).
  double freq(int k) const;
  double cell_volume() const;
  std::array<int, 3> unravel(std::size_t idx) const;
  std::size_t ravel(const std::array<int, 3>& j) const;
  void point(std::size_t idx, double* x) const;
  bool operator==(const LatticeGrid& o) const { return d == o.d && n == o.n && spacing == o.spacing; }
};

nlohmann::json to_json(const LatticeGrid& g);

// In-place unnormalized DFTs over the whole lattice (FFTW, estimate plans).
void fft_forward(const LatticeGrid& g, CVec& a);
void fft_backward(const LatticeGrid& g, CVec& a);
// 1-D transforms along the last axis only.
void fft_forward_last_axis(const LatticeGrid& g, CVec& a);
void fft_backward_last_axis(const LatticeGrid& g, CVec& a);

// f <- IDFT(mult(xi) * DFT(f)). Nyquist entries are averaged over the sign
// choices of the Nyquist axes so real multipliers keep real fields real.
using Multiplier = std::function<cplx(const double* xi)>;
void apply_multiplier(const LatticeGrid& g, CVec& f, const Multiplier& mult);
// Same but on data already in the DFT domain (no transforms).
void scale_spectrum(const LatticeGrid& g, CVec& spec, const Multiplier& mult);

// Discrete delta at the origin with unit mass (value 1/cell_volume).
CVec lattice_delta(const LatticeGrid& g);

// Lattice norms (pairwise sums, scaled by the cell volume where relevant).
double l1_norm(const LatticeGrid& g, const CVec& f, const Vec* weight = nullptr);
double l2_norm(const LatticeGrid& g, const CVec& f);
double linf_norm(const CVec& f);
cplx lattice_integral(const LatticeGrid& g, const CVec& f);
// Sup norm of the trigonometric interpolant sampled on a grid refined by `factor`.
double sup_norm_upsampled(const LatticeGrid& g, const CVec& f, int factor);

}  // namespace heatlands
