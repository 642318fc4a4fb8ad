#include "heatlands/parametrix.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "heatlands/errors.hpp"

namespace heatlands {

namespace {

void axpy(CVec& y, cplx a, const CVec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

Parametrix::Parametrix(GroupModel model, OperatorSpec spec, LatticeGrid grid, ParametrixOptions opts)
    : model_(std::move(model)), spec_(std::move(spec)), grid_(grid), opts_(opts) {
  if (grid_.d != model_.dim() || spec_.d() != model_.dim())
    throw Error(ErrorKind::GridMismatch, "spec, group and lattice dimensions differ");
  if (opts_.time_nodes < 1 || opts_.n_max < 1) throw Error(ErrorKind::InvalidArgument, "time_nodes and n_max must be >= 1");
  report_ = certify_ellipticity(spec_);
  fields_ = model_.left_vector_fields();
  split_ = split_operator(spec_, fields_);
  sigma_ = haar_weights(model_, grid_);
  chi_.resize(grid_.size());
  double x[3];
  for (std::size_t i = 0; i < chi_.size(); ++i) {
    grid_.point(i, x);
    chi_[i] = model_.cutoff(x);
  }
  if (model_.cutoff_enabled() && model_.chart_radius() >= grid_.length() / 2)
    throw Error(ErrorKind::SupportLeak, "chart ball does not fit inside the lattice box",
                {{"chart_radius", model_.chart_radius()}, {"half_box", grid_.length() / 2}});
  if (opts_.alias_time > 0) check_alias(split_.h0, opts_.alias_time, grid_, 0, opts_.alias_eps);
  cheb_ = ChebyshevGrid::lobatto(std::max(2, opts_.cheb_nodes), 0.0, std::pow(opts_.t_max, 1.0 / spec_.m()));
}

CVec Parametrix::euclid_kernel(double t) const {
  return synthesize_kernel(split_.h0, report_, t, grid_, 0.0).values;
}

CVec Parametrix::seed(double t) const {
  CVec k = euclid_kernel(t);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] *= chi_[i];
  // The first index on each axis sits on the periodic seam x = -L/2.
  double edge = 0, total = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    auto j = grid_.unravel(i);
    bool seam = false;
    for (int a = 0; a < grid_.d; ++a) seam = seam || j[a] == 0;
    double v = std::abs(k[i]);
    total += v;
    if (seam) edge += v;
  }
  if (edge > 1e-12 * total)
    throw Error(ErrorKind::SupportLeak, "cutoff kernel reaches the lattice seam",
                {{"seam_fraction", edge / total}, {"chart_radius", model_.chart_radius()}, {"half_box", grid_.length() / 2}});
  return k;
}

CVec Parametrix::apply_H(const CVec& f) const { return apply_weyl(split_.full, grid_, f, DerivativeMode::Spectral); }

CVec Parametrix::remainder(double t) const {
  CVec kt = euclid_kernel(t);
  CVec h0k = apply_operator_spectral(split_.h0, grid_, kt);
  CVec ck(kt.size());
  for (std::size_t i = 0; i < kt.size(); ++i) ck[i] = chi_[i] * kt[i];
  CVec m = apply_H(ck);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] -= chi_[i] * h0k[i];
  return m;
}

double Parametrix::l1(const CVec& f) const { return l1_norm(grid_, f, &sigma_); }

Quadrature Parametrix::time_rule(double t) const {
  const int m = spec_.m();
  Quadrature v = opts_.rule == TimeRule::Midpoint ? composite_midpoint(opts_.time_nodes, 0.0, 1.0)
                                                  : gauss_legendre(opts_.time_nodes, 0.0, 1.0);
  Quadrature q;
  for (std::size_t i = 0; i < v.nodes.size(); ++i) {
    double vi = v.nodes[i];
    q.nodes.push_back(t * std::pow(vi, m));
    q.weights.push_back(v.weights[i] * t * m * std::pow(vi, m - 1));
  }
  return q;
}

CVec Parametrix::term_direct(int n, double t, double* recursion_bound) {
  if (n == 0) return seed(t);
  if (!(t > 0)) return CVec(grid_.size(), 0.0);
  if (n >= 2) ensure_table(n - 1);
  Quadrature q = time_rule(t);
  CVec out(grid_.size(), 0.0);
  double bound = 0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    double s = q.nodes[i];
    CVec prev = n == 1 ? seed(t - s) : term(n - 1, t - s);
    CVec M = remainder(s);
    bound += q.weights[i] * l1(prev) * l1(M);
    CVec c = group_convolve(model_, grid_, prev, M);
    ++convolutions_;
    axpy(out, -q.weights[i], c);
  }
  if (recursion_bound) *recursion_bound = bound;
  return out;
}

void Parametrix::ensure_table(int n) {
  if (n < 1) return;
  if (static_cast<int>(tables_.size()) > n && !tables_[n].empty()) return;
  ensure_table(n - 1);
  if (static_cast<int>(tables_.size()) <= n) tables_.resize(n + 1);
  std::vector<CVec> tab;
  for (double u : cheb_.nodes)
    tab.push_back(u == 0.0 ? CVec(grid_.size(), 0.0) : term_direct(n, std::pow(u, spec_.m())));
  tables_[n] = std::move(tab);
}

CVec Parametrix::term(int n, double t) {
  if (n == 0) return seed(t);
  double u = std::pow(std::max(t, 0.0), 1.0 / spec_.m());
  if (u > cheb_.nodes.back() * (1 + 1e-12))
    throw Error(ErrorKind::InvalidArgument, "time beyond the interpolation table", {{"t", t}, {"t_max", opts_.t_max}});
  ensure_table(n);
  Vec w = cheb_.weights_at(u);
  CVec out(grid_.size(), 0.0);
  for (std::size_t j = 0; j < w.size(); ++j)
    if (w[j] != 0.0) axpy(out, w[j], tables_[n][j]);
  return out;
}

CVec Parametrix::partial_sum(int N, double t) {
  CVec s = seed(t);
  for (int n = 1; n <= N; ++n) axpy(s, 1.0, term_direct(n, t));
  return s;
}

double Parametrix::modular_bound(double t) const {
  if (model_.is_unimodular()) return 1.0;
  CVec M = remainder(t);
  double mx = linf_norm(M), g = 1.0;
  double x[3];
  for (std::size_t i = 0; i < M.size(); ++i) {
    if (std::abs(M[i]) <= 1e-14 * mx) continue;
    grid_.point(i, x);
    g = std::max(g, model_.modular_function_unchecked(x));
  }
  return g;
}

SeriesEnvelope fit_series_envelope(const std::vector<LedgerRow>& rows, int m) {
  // log l1 - (1/m) log(t^n/n!) = log a + n log b + omega t
  std::vector<const LedgerRow*> use;
  for (auto& r : rows)
    if (r.n >= 1 && r.l1 > 0) use.push_back(&r);
  SeriesEnvelope env;
  if (use.size() < 3) return env;
  Eigen::MatrixXd A(use.size(), 3);
  Eigen::VectorXd y(use.size());
  for (std::size_t i = 0; i < use.size(); ++i) {
    const auto& r = *use[i];
    A(i, 0) = 1.0;
    A(i, 1) = r.n;
    A(i, 2) = r.t;
    y(i) = std::log(r.l1) - (r.n * std::log(r.t) - log_factorial(r.n)) / m;
  }
  Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  // Time spread may be too small to identify omega; keep it non-negative.
  if (c(2) < 0) {
    Eigen::MatrixXd A2 = A.leftCols(2);
    Eigen::Vector2d c2 = A2.colPivHouseholderQr().solve(y);
    c << c2(0), c2(1), 0.0;
  }
  double lift = 0;
  for (std::size_t i = 0; i < use.size(); ++i) lift = std::max(lift, y(i) - (A.row(i) * c)(0));
  env.a = std::exp(c(0) + lift);
  env.b = std::exp(c(1));
  env.omega = c(2);
  return env;
}

ParametrixResult iterate_series(Parametrix& p, const std::vector<double>& times, int n_max, double tail_tol) {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  ParametrixResult r;
  r.times = times;
  const int m = p.spec().m();
  std::vector<std::vector<double>> norms(times.size());
  r.terms.resize(times.size());
  r.sums.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    CVec k0 = p.seed(times[i]);
    norms[i].push_back(p.l1(k0));
    r.ledger.push_back({0, times[i], norms[i][0], linf_norm(k0), 0.0, 0.0});
    r.sums[i] = k0;
    r.terms[i].push_back(std::move(k0));
  }
  int growth_streak = 0;
  for (int n = 1; n <= n_max; ++n) {
    double tail = 0;
    bool grew_everywhere = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
      double bound = 0;
      CVec kn = p.term_direct(n, times[i], &bound);
      double l = p.l1(kn);
      r.ledger.push_back({n, times[i], l, linf_norm(kn), bound, 0.0});
      grew_everywhere = grew_everywhere && l > norms[i].back();
      double rho = norms[i].back() > 0 ? l / norms[i].back() : 0.0;
      norms[i].push_back(l);
      axpy(r.sums[i], 1.0, kn);
      r.terms[i].push_back(std::move(kn));
      double rest = rho < 1 ? l * rho / (1 - rho) : INFINITY;
      tail = std::max(tail, rest / std::max(p.l1(r.sums[i]), 1e-300));
    }
    growth_streak = grew_everywhere ? growth_streak + 1 : 0;
    r.terms_used = n;
    r.tail_estimate = tail;
    if (growth_streak >= 3)
      throw Error(ErrorKind::Diverging, "term norms grew for three consecutive orders", {{"n", n}});
    if (tail < tail_tol) {
      r.converged = true;
      break;
    }
  }
  r.envelope = fit_series_envelope(r.ledger, m);
  for (auto& row : r.ledger)
    row.envelope = r.envelope.a * std::pow(r.envelope.b, row.n) *
                   std::exp((row.n * std::log(row.t) - log_factorial(row.n)) / m + r.envelope.omega * row.t);
  double g = 1.0;
  for (double t : times) g = std::max(g, p.modular_bound(t));
  r.modular_gamma = g;
  return r;
}

nlohmann::json ParametrixResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (auto& l : ledger)
    rows.push_back({{"n", l.n}, {"t", l.t}, {"l1", l.l1}, {"linf", l.linf}, {"recursion_bound", l.recursion_bound},
                    {"envelope", l.envelope}});
  return {{"times", times},
          {"terms_used", terms_used},
          {"converged", converged},
          {"tail_estimate", tail_estimate},
          {"modular_gamma", modular_gamma},
          {"envelope", {{"a", envelope.a}, {"b", envelope.b}, {"omega", envelope.omega}}},
          {"ledger", rows}};
}

void ParametrixResult::write_ledger_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Resource, "cannot open " + path);
  os << "n,t,l1,linf,recursion_bound,envelope\n" << std::setprecision(17);
  for (auto& l : ledger)
    os << l.n << "," << l.t << "," << l.l1 << "," << l.linf << "," << l.recursion_bound << "," << l.envelope << "\n";
}

nlohmann::json ResidualReport::to_json() const {
  return {{"times", times}, {"l1", l1}, {"weighted", weighted}, {"max_weighted", max_weighted}};
}

ResidualReport heat_residual(const KernelFamily& K, const std::function<CVec(const CVec&)>& apply_H,
                             const LatticeGrid& grid, const Vec& weight, const std::vector<double>& times,
                             double rel_step) {
  ResidualReport r;
  r.times = times;
  Vec wt;
  for (double t : times) {
    double dt = rel_step * t;
    CVec kp = K(t + dt), km = K(t - dt), k0 = K(t);
    CVec res = apply_H(k0);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] += (kp[i] - km[i]) / (2 * dt);
    double l = l1_norm(grid, res, weight.empty() ? nullptr : &weight);
    r.l1.push_back(l);
    wt.push_back(t * l);
    r.max_weighted = std::max(r.max_weighted, t * l);
  }
  if (times.size() == 1) {
    r.weighted = wt[0];
  } else {
    double area = 0;
    for (std::size_t i = 1; i < times.size(); ++i) area += 0.5 * (wt[i] + wt[i - 1]) * (times[i] - times[i - 1]);
    r.weighted = area / (times.back() - times.front());
  }
  return r;
}

double semigroup_defect(const GroupModel& model, const LatticeGrid& grid, const CVec& Ks, const CVec& Kt,
                        const CVec& Kst) {
  Vec sigma = haar_weights(model, grid);
  CVec c = group_convolve(model, grid, Ks, Kt);
  if (model.cutoff_enabled() && !model.is_abelian()) {
    double out = 0, total = 0;
    double x[3];
    for (std::size_t i = 0; i < c.size(); ++i) {
      grid.point(i, x);
      double r = 0;
      for (int a = 0; a < grid.d; ++a) r += x[a] * x[a];
      double v = std::abs(c[i]) * sigma[i];
      total += v;
      if (std::sqrt(r) > model.chart_radius()) out += v;
    }
    if (out > 1e-2 * total)
      throw Error(ErrorKind::SupportLeak, "convolution mass leaves the chart; use smaller times",
                  {{"outside_fraction", out / total}});
  }
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= Kst[i];
  return l1_norm(grid, c, &sigma);
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json w = nlohmann::json::array();
  for (auto& [rho, v] : weighted) w.push_back({{"rho", rho}, {"a_rho", v}});
  return {{"a", pointwise.a}, {"b", pointwise.b}, {"omega", omega}, {"times", times},
          {"fitted_b", fitted_b}, {"weighted_l1", w}};
}

BoundReport gaussian_bound_check(const LatticeGrid& grid, int m, double omega, const std::vector<double>& times,
                                 const std::vector<CVec>& kernels, double r_max, const std::vector<double>& rhos) {
  BoundReport rep;
  rep.omega = omega;
  rep.times = times;
  rep.pointwise.b = INFINITY;
  for (std::size_t i = 0; i < times.size(); ++i) {
    KernelField f{grid, times[i], {}, kernels[i]};
    GaussianFit fit = fit_gaussian_envelope(f, m, times[i], {0.0, r_max}, omega);
    rep.fitted_b.push_back(fit.b);
    if (fit.b < rep.pointwise.b) rep.pointwise.b = fit.b;
    rep.pointwise.a = std::max(rep.pointwise.a, fit.a);
    rep.pointwise.residual = std::max(rep.pointwise.residual, fit.residual);
    rep.pointwise.points_used += fit.points_used;
  }
  if (!(rep.pointwise.b > 0) || !std::isfinite(rep.pointwise.b) || !std::isfinite(rep.pointwise.a))
    throw Error(ErrorKind::BoundViolation, "no Gaussian envelope fits the kernels", rep.to_json());
  for (double rho : rhos) {
    double worst = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      KernelField f{grid, times[i], {}, kernels[i]};
      worst = std::max(worst, weighted_l1(f, rho) * std::exp(-omega * (1 + std::pow(rho, m)) * times[i]));
    }
    if (!std::isfinite(worst)) throw Error(ErrorKind::BoundViolation, "weighted L1 norm is not finite", {{"rho", rho}});
    rep.weighted.push_back({rho, worst});
  }
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  Vec lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line_ls(lx, ly).slope;
}

ResolventResult resolvent_kernel(const KernelFamily& K, const LatticeGrid& grid, int m, double lambda, double omega,
                                 int per_panel, int panels) {
  if (!(lambda > omega + 1e-3))
    throw Error(ErrorKind::LambdaTooSmall, "lambda must exceed the growth bound omega",
                {{"lambda", lambda}, {"omega", omega}});
  ResolventResult r;
  r.horizon = std::log(1e10) / (lambda - omega);
  Quadrature q = graded_gauss_legendre(per_panel, panels, 2.0, std::pow(r.horizon, 1.0 / m));
  r.kernel.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    double u = q.nodes[i];
    double t = std::pow(u, m);
    double w = q.weights[i] * m * std::pow(u, m - 1) * std::exp(-lambda * t);
    if (w < 1e-300) continue;
    axpy(r.kernel, w, K(t));
  }
  r.nodes = static_cast<int>(q.nodes.size());
  r.l1 = l1_norm(grid, r.kernel);
  return r;
}

}  // namespace heatlands
