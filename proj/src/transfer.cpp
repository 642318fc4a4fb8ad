#include "heatlands/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "heatlands/errors.hpp"
#include "heatlands/group_convolution.hpp"

namespace heatlands {

namespace {

double norm_of(const Vec& x) { return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0)); }

CVec laplacian_power(const Representation& rep, const CVec& phi, int power) {
  CVec v = phi;
  for (int p = 0; p < power; ++p) {
    CVec acc(v.size(), 0.0);
    for (int k = 0; k < rep.group_dim(); ++k) {
      CVec w = rep.generator(k, rep.generator(k, v));
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= w[i];
    }
    v = std::move(acc);
  }
  return v;
}

}  // namespace

TransferResult transfer_semigroup(const GroupModel& model, const LatticeGrid& grid, const CVec& kernel,
                                  const Representation& rep, const CVec& xi) {
  if (!rep.continuity) throw Error(ErrorKind::ContinuityUnmeasured, "representation has no measured (M, rho)");
  const auto& c = *rep.continuity;
  Vec sigma = haar_weights(model, grid);
  double kmax = linf_norm(kernel);
  Vec weighted(kernel.size(), 0.0), mass(kernel.size(), 0.0);
  double x[3];
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    grid.point(i, x);
    double r = norm_of(Vec(x, x + grid.d));
    if (model.cutoff_enabled() && r > model.chart_radius() && std::abs(kernel[i]) > 1e-14 * kmax)
      throw Error(ErrorKind::SupportLeak, "kernel support leaves the chart", {{"radius", r}});
    weighted[i] = std::abs(kernel[i]) * std::exp(c.rho * r) * sigma[i];
    mass[i] = kernel[i].real() * sigma[i];
  }
  TransferResult out;
  out.value = rep.transfer(model, grid, kernel, xi);
  out.operator_bound = c.M * pairwise_sum(std::span<const double>(weighted)) * grid.cell_volume();
  out.kernel_mass = pairwise_sum(std::span<const double>(mass)) * grid.cell_volume();
  return out;
}

std::vector<MultiIndex> seminorm_monomials(int d, int k, int cap) {
  std::vector<MultiIndex> out;
  if (k == 0) return {MultiIndex{}};
  double count = std::pow(static_cast<double>(d), k);
  if (count <= cap) {
    MultiIndex a(k, 0);
    while (true) {
      out.push_back(a);
      int p = k - 1;
      while (p >= 0 && ++a[p] == d) a[p--] = 0;
      if (p < 0) break;
    }
    return out;
  }
  std::set<MultiIndex> seen;
  for (int j = 0; j < d && static_cast<int>(out.size()) < cap; ++j) {
    MultiIndex a(k, j);
    seen.insert(a);
    out.push_back(a);
  }
  auto eng = keyed_engine(0x6d6f6e6fULL, static_cast<std::uint64_t>(d * 1000 + k));
  std::uniform_int_distribution<int> pick(0, d - 1);
  while (static_cast<int>(out.size()) < cap) {
    MultiIndex a(k);
    for (int& v : a) v = pick(eng);
    if (seen.insert(a).second) out.push_back(a);
  }
  return out;
}

std::vector<double> monomial_norms(const Representation& rep, const CVec& v, int n_max, int cap) {
  LatticeGrid cg = rep.carrier_grid();
  if (rep.generator_scheme() == "stencil4" && cg.n > 0 && 4 * n_max >= cg.n)
    throw Error(ErrorKind::StencilOverflow, "derivative stencils exceed the carrier lattice",
                {{"n_max", n_max}, {"n", cg.n}});
  std::vector<double> N(n_max + 1, 0.0);
  N[0] = rep.norm(v);
  const int d = rep.group_dim();
  for (int k = 1; k <= n_max; ++k) {
    auto monos = seminorm_monomials(d, k, cap);
    Vec vals(monos.size());
    parallel_for(monos.size(), [&](std::size_t i) { vals[i] = rep.norm(rep.monomial(monos[i], v)); });
    N[k] = *std::max_element(vals.begin(), vals.end());
  }
  return N;
}

std::vector<double> factorized_norms(const GroupModel& model, const LatticeGrid& grid, const DerivativeKernel& dk,
                                     const Representation& rep, const CVec& xi, double t, int n_max, int cap) {
  std::vector<double> N(n_max + 1, 0.0);
  const int d = rep.group_dim();
  for (int n = 1; n <= n_max; ++n) {
    const double tau = t / n;
    std::vector<CVec> factors(d);
    for (int k = 0; k < d; ++k) factors[k] = dk(k, tau);
    double best = 0;
    for (const auto& alpha : seminorm_monomials(d, n, cap)) {
      CVec v = xi;
      for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) v = rep.transfer(model, grid, factors[*it], v);
      best = std::max(best, rep.norm(v));
    }
    N[n] = best;
  }
  return N;
}

nlohmann::json GrowthProfile::to_json() const {
  nlohmann::json j{{"t", t},          {"m", m}, {"monomial_cap", monomial_cap}, {"xi_norm", xi_norm},
                   {"N", N},          {"seminorm", seminorm}, {"a", a}, {"b", b}};
  j["s_star"] = std::isfinite(s_star) ? nlohmann::json(s_star) : nlohmann::json("inf");
  if (!factorized.empty()) j["factorized"] = factorized;
  return j;
}

nlohmann::json GrowthEnvelope::to_json() const {
  return {{"a", a}, {"a_bound", a_bound}, {"b", b}, {"omega", omega}, {"residual", residual}};
}

namespace {

// log r_n for one profile.
Vec log_ratios(const GrowthProfile& p) {
  Vec y;
  for (std::size_t n = 0; n < p.seminorm.size(); ++n)
    y.push_back(std::log(p.seminorm[n] / p.xi_norm) + n / static_cast<double>(p.m) * std::log(p.t) -
                log_factorial(static_cast<int>(n)));
  return y;
}

}  // namespace

std::vector<GrowthProfile> growth_profile(const GroupModel& model, const LatticeGrid& grid,
                                          const std::function<CVec(double)>& kernel, const Representation& rep,
                                          const CVec& xi, const std::vector<double>& times, int m,
                                          const GrowthOptions& opts) {
  if (opts.factorized_max > 0 && !opts.dk)
    throw Error(ErrorKind::InvalidArgument, "factorized route needs derivative kernels");
  std::vector<GrowthProfile> out;
  const double xn = rep.norm(xi);
  if (xn == 0) throw Error(ErrorKind::InvalidArgument, "growth profile of the zero vector");
  for (double t : times) {
    GrowthProfile p;
    p.t = t;
    p.m = m;
    p.monomial_cap = opts.monomial_cap;
    p.xi_norm = xn;
    LatticeGrid cg = rep.carrier_grid();
    p.max_frequency = cg.n > 0 ? cg.nyquist() : 0.0;
    CVec v = transfer_semigroup(model, grid, kernel(t), rep, xi).value;
    p.N = monomial_norms(rep, v, opts.n_max, opts.monomial_cap);
    p.seminorm = p.N;
    for (std::size_t k = 1; k < p.seminorm.size(); ++k) p.seminorm[k] = std::max(p.seminorm[k], p.seminorm[k - 1]);
    if (opts.factorized_max > 0) {
      p.factorized = factorized_norms(model, grid, opts.dk, rep, xi, t, opts.factorized_max, opts.monomial_cap);
      p.factorized[0] = p.N[0];
    }
    Vec n(p.seminorm.size());
    std::iota(n.begin(), n.end(), 0.0);
    Vec y = log_ratios(p);
    auto fit = fit_line_minimax(n, y);
    p.a = std::exp(fit.intercept);
    p.b = std::exp(fit.slope);
    p.s_star = p.N.size() >= 4 ? analytic_radius(p) : 0.0;
    out.push_back(std::move(p));
  }
  return out;
}

GrowthEnvelope fit_growth_envelope(const std::vector<GrowthProfile>& profiles, double omega) {
  if (profiles.empty()) throw Error(ErrorKind::DegenerateFit, "no growth profiles");
  const std::size_t levels = profiles.front().seminorm.size();
  Vec n(levels), y(levels, -std::numeric_limits<double>::infinity());
  std::iota(n.begin(), n.end(), 0.0);
  for (const auto& p : profiles) {
    Vec lr = log_ratios(p);
    for (std::size_t k = 0; k < levels && k < lr.size(); ++k) y[k] = std::max(y[k], lr[k] - omega * p.t);
  }
  auto fit = fit_line_minimax(n, y);
  GrowthEnvelope e;
  e.a = std::exp(fit.intercept);
  e.a_bound = e.a * std::exp(fit.max_abs_dev);
  e.b = std::exp(fit.slope);
  e.omega = omega;
  for (std::size_t k = 0; k < levels; ++k)
    e.residual = std::max(e.residual, std::abs(std::exp(y[k] - fit.intercept - fit.slope * n[k]) - 1.0));
  return e;
}

double analytic_radius(const GrowthProfile& p) {
  if (p.N.size() < 4)
    throw Error(ErrorKind::InsufficientLevels, "ratio test needs at least 4 levels",
                {{"levels", static_cast<int>(p.N.size())}});
  bool all_zero = true;
  for (std::size_t k = 1; k < p.N.size(); ++k) all_zero = all_zero && p.N[k] == 0.0;
  if (all_zero) return std::numeric_limits<double>::infinity();
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < p.N.size(); ++k) {
    if (p.N[k + 1] == 0.0) continue;
    if (p.N[k] == 0.0) return 0.0;
    double ratio = p.N[k + 1] / p.N[k];
    if (p.max_frequency > 0 && ratio >= 0.5 * p.max_frequency) return 0.0;
    s = std::min(s, (k + 1) / ratio);
  }
  return s;
}

std::vector<CVec> test_vectors(const Representation& rep, const TestVectorOptions& opts) {
  LatticeGrid cg = rep.carrier_grid();
  std::vector<CVec> out(opts.trials + std::max(0, opts.probes));
  if (cg.n == 0) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto eng = keyed_engine(opts.seed, i);
      out[i].resize(rep.size());
      for (auto& z : out[i]) z = cplx(standard_normal(eng), standard_normal(eng));
    }
    return out;
  }
  const double cap = opts.cap > 0 ? opts.cap : 0.25 * cg.nyquist();
  parallel_for(opts.trials, [&](std::size_t i) { out[i] = random_field(cg, cap, opts.seed, i, opts.window); });
  const double width = opts.probe_width > 0 ? opts.probe_width : (opts.window > 0 ? opts.window / 3 : cg.length() / 12);
  for (int p = 0; p < opts.probes; ++p) {
    // Probes cycle through the signed coordinate axes with magnitudes on a
    // uniform grid of [0, cap].
    const int dirs = 2 * cg.d;
    const int levels = (opts.probes + dirs - 1) / dirs;
    const int q = p / dirs;
    double mag = levels > 1 ? cap * q / (levels - 1) : cap;
    Vec dir(cg.d, 0.0);
    dir[p % cg.d] = ((p / cg.d) % 2 ? -1.0 : 1.0) * mag;
    CVec f(cg.size());
    double x[3];
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      cg.point(idx, x);
      double r2 = 0, ph = 0;
      for (int a = 0; a < cg.d; ++a) {
        r2 += x[a] * x[a];
        ph += dir[a] * x[a];
      }
      f[idx] = std::exp(-r2 / (2 * width * width)) * std::polar(1.0, ph);
    }
    out[opts.trials + p] = std::move(f);
  }
  return out;
}

nlohmann::json GardingReport::to_json() const {
  return {{"lambda_hat", lambda_hat},
          {"nu_hat", nu_hat},
          {"worst_trial", worst_trial},
          {"lambda_laplacian", lambda_laplacian},
          {"nu_laplacian", nu_laplacian},
          {"samples", static_cast<int>(samples.size())},
          {"skipped", skipped}};
}

GardingReport garding_from_samples(std::vector<GardingSample> samples) {
  GardingReport r;
  std::vector<GardingSample> kept;
  for (const auto& s : samples) {
    if (s.seminorm2 <= 0 || s.norm2 <= 0) {
      ++r.skipped;
      continue;
    }
    kept.push_back(s);
  }
  r.samples = std::move(kept);
  auto scan = [&](auto seminorm, double& lambda, double& nu, int* worst) {
    nu = 0;
    for (const auto& s : r.samples) nu = std::max(nu, -s.form / s.norm2);
    lambda = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      const auto& s = r.samples[i];
      double l = (s.form + nu * s.norm2) / seminorm(s);
      if (l < lambda) {
        lambda = l;
        if (worst) *worst = static_cast<int>(i);
      }
    }
    if (r.samples.empty()) lambda = 0;
  };
  scan([](const GardingSample& s) { return s.seminorm2; }, r.lambda_hat, r.nu_hat, &r.worst_trial);
  scan([](const GardingSample& s) { return s.laplacian; }, r.lambda_laplacian, r.nu_laplacian, nullptr);
  return r;
}

GardingReport garding_check(const OperatorSpec& spec, const Representation& rep, const TestVectorOptions& opts) {
  if (spec.d() != rep.group_dim()) throw Error(ErrorKind::InvalidArgument, "operator and representation dimensions differ");
  const int half = spec.m() / 2;
  auto phis = test_vectors(rep, opts);
  std::vector<GardingSample> samples(phis.size());
  parallel_for(phis.size(), [&](std::size_t i) {
    const CVec& phi = phis[i];
    GardingSample s;
    s.form = rep.inner(phi, rep.apply(spec, phi)).real();
    s.norm2 = rep.inner(phi, phi).real();
    double nk = 0;
    for (const auto& alpha : seminorm_monomials(rep.group_dim(), half, 64)) {
      double v = rep.norm(rep.monomial(alpha, phi));
      nk = std::max(nk, v * v);
    }
    s.seminorm2 = nk;
    s.laplacian = rep.inner(phi, laplacian_power(rep, phi, half)).real();
    samples[i] = s;
  });
  // Skipped samples keep their trial numbers out of the worst index.
  GardingReport r = garding_from_samples(samples);
  if (r.worst_trial >= 0) {
    int seen = -1;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].seminorm2 > 0 && samples[i].norm2 > 0) ++seen;
      if (seen == r.worst_trial) {
        r.worst_trial = static_cast<int>(i);
        break;
      }
    }
  }
  return r;
}

nlohmann::json RegularityReport::to_json() const { return {{"a_hat", a_hat}, {"worst_trial", worst_trial}}; }

double regularity_ratio(const OperatorSpec& spec, const Representation& rep, const CVec& phi) {
  double nm = 0;
  for (const auto& alpha : seminorm_monomials(rep.group_dim(), spec.m(), 64))
    nm = std::max(nm, rep.norm(rep.monomial(alpha, phi)));
  double denom = rep.norm(rep.apply(spec, phi)) + rep.norm(phi);
  return denom > 0 ? nm / denom : 0.0;
}

RegularityReport regularity_check(const OperatorSpec& spec, const Representation& rep, const TestVectorOptions& opts) {
  auto phis = test_vectors(rep, opts);
  Vec ratio(phis.size());
  parallel_for(phis.size(), [&](std::size_t i) { ratio[i] = regularity_ratio(spec, rep, phis[i]); });
  RegularityReport r;
  for (std::size_t i = 0; i < ratio.size(); ++i)
    if (ratio[i] > r.a_hat) {
      r.a_hat = ratio[i];
      r.worst_trial = static_cast<int>(i);
    }
  if (r.worst_trial >= 0) r.worst_phi = phis[r.worst_trial];
  return r;
}

FormInfimum form_infimum(const OperatorSpec& spec, const Representation& rep, const TestVectorOptions& opts) {
  auto phis = test_vectors(rep, opts);
  Vec q(phis.size());
  parallel_for(phis.size(), [&](std::size_t i) {
    double n2 = rep.inner(phis[i], phis[i]).real();
    q[i] = n2 > 0 ? rep.inner(phis[i], rep.apply(spec, phis[i])).real() / n2 : std::numeric_limits<double>::infinity();
  });
  FormInfimum f;
  f.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] < f.value) {
      f.value = q[i];
      f.worst_trial = static_cast<int>(i);
    }
  return f;
}

}  // namespace heatlands
