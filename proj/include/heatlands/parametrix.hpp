#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatlands/euclid.hpp"
#include "heatlands/group_convolution.hpp"
#include "heatlands/group_model.hpp"

namespace heatlands {

enum class TimeRule { Midpoint, GaussLegendre };

struct ParametrixOptions {
  int n_max = 6;
  double tail_tol = 1e-6;
  TimeRule rule = TimeRule::Midpoint;
  int time_nodes = 64;  // nodes in v for s = t v^m
  int cheb_nodes = 9;   // Chebyshev-Lobatto nodes in u = t^(1/m) for interpolated terms
  double t_max = 0.25;  // interpolation tables cover (0, t_max]
  // Alias check on the Euclidean kernel at alias_time; internal quadrature
  // times below it use the band-limited synthesis unchecked.
  double alias_eps = kAliasEpsilon;
  double alias_time = 0.0;  // 0 disables
};

using KernelFamily = std::function<CVec(double t)>;

class Parametrix {
 public:
  Parametrix(GroupModel model, OperatorSpec spec, LatticeGrid grid, ParametrixOptions opts = {});

  const GroupModel& model() const { return model_; }
  const OperatorSpec& spec() const { return spec_; }
  const LatticeGrid& grid() const { return grid_; }
  const SplitOperator& split() const { return split_; }
  const VectorFieldSet& fields() const { return fields_; }
  const EllipticityReport& report() const { return report_; }
  const ParametrixOptions& options() const { return opts_; }
  const Vec& haar() const { return sigma_; }
  const Vec& cutoff_values() const { return chi_; }

  CVec euclid_kernel(double t) const;  // K~_t of the constant-coefficient part
  CVec seed(double t) const;           // K0_t = chi K~_t
  CVec remainder(double t) const;      // M_t = H(chi K~_t) - chi H0 K~_t
  CVec apply_H(const CVec& f) const;   // chart form of H, spectral derivatives
  double l1(const CVec& f) const;      // Haar-weighted L1

  // K(n)_t = -int_0^t K(n-1)_{t-s} * M_s ds. For n >= 2 the inner factor comes
  // from the level n-1 interpolation table. recursion_bound receives
  // int ||K(n-1)_{t-s}||_1 ||M_s||_1 ds.
  CVec term_direct(int n, double t, double* recursion_bound = nullptr);
  // K(n)_t from the interpolation table (n >= 1), or the seed for n = 0.
  CVec term(int n, double t);
  // K0 + sum_{n=1..N} K(n), every term evaluated directly at t.
  CVec partial_sum(int N, double t);
  // Max of Delta over the support of M_t.
  double modular_bound(double t) const;

  Quadrature time_rule(double t) const;  // nodes s and weights ds on [0, t]
  int convolutions() const { return convolutions_; }

 private:
  void ensure_table(int n);

  GroupModel model_;
  OperatorSpec spec_;
  LatticeGrid grid_;
  ParametrixOptions opts_;
  EllipticityReport report_;
  VectorFieldSet fields_;
  SplitOperator split_;
  Vec sigma_;
  Vec chi_;
  ChebyshevGrid cheb_;
  std::vector<std::vector<CVec>> tables_;  // tables_[n] for n >= 1
  int convolutions_ = 0;
};

struct LedgerRow {
  int n = 0;
  double t = 0;
  double l1 = 0;
  double linf = 0;
  double recursion_bound = 0;  // int ||K(n-1)||_1 ||M||_1 ds, 0 for n = 0
  double envelope = 0;         // a b^n (t^n/n!)^(1/m) e^(omega t)
};

struct SeriesEnvelope {
  double a = 0;
  double b = 0;
  double omega = 0;
};

struct ParametrixResult {
  std::vector<double> times;
  std::vector<CVec> sums;                // partial sum per time
  std::vector<std::vector<CVec>> terms;  // terms[i][n] at times[i]
  std::vector<LedgerRow> ledger;
  SeriesEnvelope envelope;
  int terms_used = 0;
  bool converged = false;
  double tail_estimate = 0;  // relative to ||sum||_1, worst over times
  double modular_gamma = 1;

  nlohmann::json to_json() const;
  void write_ledger_csv(const std::string& path) const;
};

// Adds terms until the geometric tail estimate drops below tail_tol or
// n_max is reached; throws Diverging if norms grow three times in a row.
ParametrixResult iterate_series(Parametrix& p, const std::vector<double>& times, int n_max, double tail_tol);

// Fit of l1 <= a b^n (t^n/n!)^(1/m) e^(omega t) over rows with n >= 1; a is
// raised so that every row lies under the envelope.
SeriesEnvelope fit_series_envelope(const std::vector<LedgerRow>& rows, int m);

struct ResidualReport {
  std::vector<double> times;
  std::vector<double> l1;       // ||(d_t + H) K_t||_1 per time
  double weighted = 0;          // window average of t ||res_t||_1 (trapezoid)
  double max_weighted = 0;      // max of t ||res_t||_1
  nlohmann::json to_json() const;
};

// Centered difference in t (step rel_step * t) plus H applied by `apply_H`.
ResidualReport heat_residual(const KernelFamily& K, const std::function<CVec(const CVec&)>& apply_H,
                             const LatticeGrid& grid, const Vec& weight, const std::vector<double>& times,
                             double rel_step = 0.01);

// ||K_s * K_t - K_{s+t}||_1 with Haar weights. SupportLeak when more than
// 1e-2 of the product's mass lies outside the chart.
double semigroup_defect(const GroupModel& model, const LatticeGrid& grid, const CVec& Ks, const CVec& Kt,
                        const CVec& Kst);

struct BoundReport {
  GaussianFit pointwise;  // b as the smallest fitted value over times
  std::vector<double> times;
  std::vector<double> fitted_b;
  std::vector<std::pair<double, double>> weighted;  // (rho, max_t ||e^{rho|x|} K_t||_1 e^{-omega(1+rho^m) t})
  double omega = 0;
  nlohmann::json to_json() const;
};

// Fits the pointwise Gaussian envelope inside the inner chart ball and the
// weighted L1 bound; throws BoundViolation if no sane constants fit.
BoundReport gaussian_bound_check(const LatticeGrid& grid, int m, double omega, const std::vector<double>& times,
                                 const std::vector<CVec>& kernels, double r_max, const std::vector<double>& rhos);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ResolventResult {
  CVec kernel;
  double horizon = 0;  // T with e^{-(lambda - omega) T} < 1e-10
  int nodes = 0;
  double l1 = 0;
};

// L_lambda = int_0^T e^{-lambda t} K_t dt by graded Gauss-Legendre in u = t^(1/m).
ResolventResult resolvent_kernel(const KernelFamily& K, const LatticeGrid& grid, int m, double lambda, double omega,
                                 int per_panel = 8, int panels = 24);

}  // namespace heatlands
