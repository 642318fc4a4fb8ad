#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "heatlands/group_model.hpp"
#include "heatlands/representation.hpp"
#include "heatlands/symbolcore.hpp"

namespace heatlands {

struct TransferResult {
  CVec value;
  double operator_bound = 0;  // M ||U_rho K||_1
  double kernel_mass = 0;     // int K sigma
};

// S_t xi = U(K_t) xi. Throws ContinuityUnmeasured without (M, rho) and
// SupportLeak when K leaves the chart.
TransferResult transfer_semigroup(const GroupModel& model, const LatticeGrid& grid, const CVec& kernel,
                                  const Representation& rep, const CVec& xi);

// Ordered monomials of length k in d generators: all of them when d^k <= cap,
// otherwise the pure powers plus a fixed pseudo-random selection up to cap.
std::vector<MultiIndex> seminorm_monomials(int d, int k, int cap);

// N_k(v) = max over the monomials of length k of ||A^alpha v||, k = 0..n_max.
// Throws StencilOverflow when n_max stencil reaches exceed the carrier.
std::vector<double> monomial_norms(const Representation& rep, const CVec& v, int n_max, int cap);

// X_k K_tau on the group lattice.
using DerivativeKernel = std::function<CVec(int k, double tau)>;

// N_n(S_t xi) through A^alpha S_t = prod_j U(X_{alpha_j} K_{t/n}); exact on
// abelian groups. Entry 0 is left at 0.
std::vector<double> factorized_norms(const GroupModel& model, const LatticeGrid& grid, const DerivativeKernel& dk,
                                     const Representation& rep, const CVec& xi, double t, int n_max, int cap);

struct GrowthProfile {
  double t = 0;
  int m = 2;
  int monomial_cap = 64;
  double xi_norm = 0;
  double max_frequency = 0;        // carrier Nyquist, 0 if none
  std::vector<double> N;           // N_k at exact order k
  std::vector<double> seminorm;    // ||.||_n, running max of N_k
  std::vector<double> factorized;  // N_k by kernel factorization (empty if not computed)
  double a = 0;                    // fit of r_n = seminorm_n t^(n/m) / (n! ||xi||) ~ a b^n
  double b = 0;
  double s_star = 0;
  nlohmann::json to_json() const;
};

struct GrowthEnvelope {
  double a = 0;        // center line
  double a_bound = 0;  // a raised so every pooled point lies below
  double b = 0;
  double omega = 0;
  double residual = 0;  // max_n |r_n / (a b^n) - 1|
  nlohmann::json to_json() const;
};

struct GrowthOptions {
  int n_max = 6;
  int monomial_cap = 64;
  int factorized_max = 0;  // levels computed by the factorized route (0: none)
  DerivativeKernel dk;     // required when factorized_max > 0
};

// One profile per time; the transferred vectors come from `kernel(t)`.
std::vector<GrowthProfile> growth_profile(const GroupModel& model, const LatticeGrid& grid,
                                          const std::function<CVec(double)>& kernel, const Representation& rep,
                                          const CVec& xi, const std::vector<double>& times, int m,
                                          const GrowthOptions& opts = {});

// Minimax fit of log(max_t r_n e^(-omega t)) against n.
GrowthEnvelope fit_growth_envelope(const std::vector<GrowthProfile>& profiles, double omega = 0);

// Ratio-test radius of sum s^k N_k / k!: min over computed k of (k+1) N_k / N_{k+1}.
// Infinite when N_k = 0 for all k >= 1; 0 when consecutive ratios reach half the
// carrier Nyquist frequency. Throws InsufficientLevels below 4 levels.
double analytic_radius(const GrowthProfile& profile);

struct TestVectorOptions {
  int trials = 200;
  std::uint64_t seed = 7;
  double cap = 0;      // frequency cap (0: a quarter of the Nyquist frequency)
  double window = 0;   // bump radius (0: none)
  int probes = 0;      // modulated bumps along the coordinate axes, |eta| in [0, cap]
  double probe_width = 0;  // Gaussian width of the probes (0: window / 3)
};

// Random fields followed by the adversarial probes, all keyed by the seed.
std::vector<CVec> test_vectors(const Representation& rep, const TestVectorOptions& opts);

struct GardingSample {
  double form = 0;    // Re(phi, H phi)
  double norm2 = 0;   // ||phi||^2
  double seminorm2 = 0;   // N_{m/2}(phi)^2
  double laplacian = 0;   // (phi, Delta^{m/2} phi)
};

struct GardingReport {
  double lambda_hat = 0;
  double nu_hat = 0;
  int worst_trial = -1;
  double lambda_laplacian = 0;  // same scan against (phi, Delta^{m/2} phi)
  double nu_laplacian = 0;
  int skipped = 0;
  std::vector<GardingSample> samples;
  nlohmann::json to_json() const;
};

// nu_hat is the smallest nu >= 0 for which some lambda > 0 works on every
// sample; lambda_hat is the largest lambda at that nu.
GardingReport garding_check(const OperatorSpec& spec, const Representation& rep, const TestVectorOptions& opts);
GardingReport garding_from_samples(std::vector<GardingSample> samples);

struct RegularityReport {
  double a_hat = 0;
  int worst_trial = -1;
  CVec worst_phi;
  nlohmann::json to_json() const;
};

// a_hat = max N_m(phi) / (||H phi|| + ||phi||).
RegularityReport regularity_check(const OperatorSpec& spec, const Representation& rep, const TestVectorOptions& opts);
double regularity_ratio(const OperatorSpec& spec, const Representation& rep, const CVec& phi);

struct FormInfimum {
  double value = 0;  // min Re(phi, H phi) / ||phi||^2
  int worst_trial = -1;
};

FormInfimum form_infimum(const OperatorSpec& spec, const Representation& rep, const TestVectorOptions& opts);

}  // namespace heatlands
