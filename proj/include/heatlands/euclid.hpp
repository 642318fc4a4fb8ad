#pragma once

#include <string>
#include <vector>

#include "heatlands/lattice.hpp"
#include "heatlands/symbolcore.hpp"

namespace heatlands {

struct KernelField {
  LatticeGrid grid;
  double t = 0.0;
  MultiIndex tag;  // empty: the kernel itself
  CVec values;
};

struct GaussianFit {
  double a = 0.0;
  double b = 0.0;
  double omega = 0.0;
  double residual = 0.0;  // max relative excess over the regression envelope
  double a_regression = 0.0;
  int points_used = 0;
};

struct SeminormProfile {
  std::vector<std::pair<int, double>> levels;  // (k, N_k)
  double a = 0.0;
  double b = 0.0;
};

constexpr double kAliasEpsilon = 1e-13;

// Relative size of the multiplier on the dual boundary; throws AliasingRisk
// (with the required n in the detail) when it exceeds eps.
void check_alias(const OperatorSpec& spec, double t, const LatticeGrid& grid, int extra_order, double eps);

std::vector<KernelField> synthesize_kernel(const OperatorSpec& spec, const EllipticityReport& report, double t,
                                           const LatticeGrid& grid, const std::vector<MultiIndex>& derivs,
                                           double alias_eps = kAliasEpsilon);
// Plain kernel without derivative tags.
KernelField synthesize_kernel(const OperatorSpec& spec, const EllipticityReport& report, double t,
                              const LatticeGrid& grid, double alias_eps = kAliasEpsilon);

// Box wide enough that |K_t| < 1e-14 max|K_t| on the boundary; n a power
// of two satisfying the alias check.
LatticeGrid choose_grid(const OperatorSpec& spec, const EllipticityReport& report, double t, int max_n = 1 << 14);

KernelField convolve(const KernelField& f, const KernelField& g);

struct FitRegion {
  double r_min = 0.0;
  double r_max = 1e300;
};

GaussianFit fit_gaussian_envelope(const KernelField& field, int m, double t, const FitRegion& region = {},
                                  double omega = 0.0);
// Pointwise check of the fitted bound over the grid points above the roundoff
// floor (1e-13 max|K|); returns the max relative violation.
double envelope_violation(const KernelField& field, int m, double t, const GaussianFit& fit);

double weighted_l1(const KernelField& field, double rho);

SeminormProfile smoothing_seminorms(const OperatorSpec& spec, const EllipticityReport& report,
                                    const LatticeGrid& grid, const CVec& phi, double t, int k_max,
                                    double alias_eps = kAliasEpsilon);

CVec fractional_power_apply(const OperatorSpec& spec, const EllipticityReport& report, double gamma,
                            const LatticeGrid& grid, const CVec& phi, double shift);
double default_fractional_shift(const EllipticityReport& report);

// Plain partial derivative d^alpha, computed spectrally.
CVec spectral_derivative(const LatticeGrid& grid, const CVec& f, const MultiIndex& alpha);
// H applied spectrally on the periodic lattice.
CVec apply_operator_spectral(const OperatorSpec& spec, const LatticeGrid& grid, const CVec& f);

void write_csv(const KernelField& f, const std::string& path);
void write_binary(const KernelField& f, const std::string& path);  // plus path + ".json" sidecar

}  // namespace heatlands
