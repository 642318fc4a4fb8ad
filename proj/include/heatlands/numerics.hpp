#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace heatlands {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cplx>;

// Tree summation: the result depends only on the input order, never on
// how a caller chose to schedule the producers of the terms.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_dev = 0.0;  // max |y - (intercept + slope x)|
};

LineFit fit_line_ls(std::span<const double> x, std::span<const double> y);
// Chebyshev (minimax) line fit.
LineFit fit_line_minimax(std::span<const double> x, std::span<const double> y);

// Indices of the vertices of the upper concave hull of (x, y), x ascending.
std::vector<std::size_t> upper_hull(std::span<const double> x, std::span<const double> y);

// Golden-section minimization of a unimodal f on [a, b].
double golden_section_min(const std::function<double(double)>& f, double a, double b, double tol);

struct Quadrature {
  Vec nodes;
  Vec weights;
};

Quadrature gauss_legendre(int n, double a, double b);
// Composite Gauss-Legendre on panels [0, b r^-K], ..., [b r^-1, b]; resolves
// integrands that concentrate near 0 at every scale.
Quadrature graded_gauss_legendre(int per_panel, int panels, double ratio, double b);
Quadrature composite_midpoint(int n, double a, double b);

// Chebyshev-Lobatto nodes on [a, b] (ascending) with barycentric weights.
struct ChebyshevGrid {
  Vec nodes;
  Vec bary;
  static ChebyshevGrid lobatto(int n, double a, double b);
  // Interpolation weights l_j(x) so that p(x) = sum_j l_j(x) f_j.
  Vec weights_at(double x) const;
};

// Lagrange weights for equispaced nodes offset by `frac` in [0,1) from the
// left-center node; `width` is the stencil size (even).
void lagrange_weights(double frac, int width, double* w);

double log_factorial(int n);
double binomial(int n, int k);

// Deterministic per-trial engine keyed by (seed, stream).
std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream);
double standard_normal(std::mt19937_64& eng);
double uniform01(std::mt19937_64& eng);

// Worker count: hardware concurrency capped by HEATLANDS_THREADS.
int worker_count();
// Runs body(i) for i in [0, n). Each index writes its own slot, so the
// result is independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace heatlands
