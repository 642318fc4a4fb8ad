#include "heatlands/euclid.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "heatlands/errors.hpp"

namespace heatlands {

namespace {

cplx partial_multiplier(const MultiIndex& alpha, const double* xi) {
  cplx p = 1.0;
  for (int k : alpha) p *= cplx(0.0, xi[k]);
  return p;
}

double axis_boundary_ratio(const OperatorSpec& spec, double t, double nyq, double step, int n, int extra) {
  const int d = spec.d();
  double worst = 0.0;
  for (int a = 0; a < d; ++a) {
    double ref = 0.0;
    Vec xi(d, 0.0);
    for (int k = 0; k <= n / 2; ++k) {
      xi[a] = k * step;
      for (double s : {1.0, -1.0}) {
        Vec x2 = xi;
        x2[a] *= s;
        ref = std::max(ref, std::abs(std::exp(-t * multiplier(spec, x2))) * std::pow(k * step, extra));
      }
    }
    for (double s : {1.0, -1.0}) {
      xi[a] = s * nyq;
      double v = std::abs(std::exp(-t * multiplier(spec, xi))) * std::pow(nyq, extra);
      if (ref > 0) worst = std::max(worst, v / ref);
    }
  }
  return worst;
}

}  // namespace

void check_alias(const OperatorSpec& spec, double t, const LatticeGrid& grid, int extra_order, double eps) {
  double ratio = axis_boundary_ratio(spec, t, grid.nyquist(), grid.dual_step(), grid.n, extra_order);
  if (ratio <= eps) return;
  int need = grid.n;
  while (need < (1 << 20)) {
    need *= 2;
    LatticeGrid g2(grid.d, need, grid.length() / need);
    if (axis_boundary_ratio(spec, t, g2.nyquist(), g2.dual_step(), need, extra_order) <= eps) break;
  }
  throw Error(ErrorKind::AliasingRisk,
              "multiplier not decayed on the dual boundary (ratio " + nlohmann::json(ratio).dump() + ")",
              {{"ratio", ratio}, {"eps", eps}, {"required_n", need}, {"box_length", grid.length()}});
}

std::vector<KernelField> synthesize_kernel(const OperatorSpec& spec, const EllipticityReport& report, double t,
                                           const LatticeGrid& grid, const std::vector<MultiIndex>& derivs,
                                           double alias_eps) {
  if (!report.strongly_elliptic || report.d != spec.d() || report.m != spec.m())
    throw Error(ErrorKind::NotCertified, "spec lacks a valid ellipticity report");
  if (!(t > 0)) throw Error(ErrorKind::InvalidArgument, "t must be positive");
  if (grid.d != spec.d()) throw Error(ErrorKind::GridMismatch, "grid dimension differs from spec");
  int extra = 0;
  for (auto& a : derivs) extra = std::max(extra, static_cast<int>(a.size()));
  if (alias_eps > 0) check_alias(spec, t, grid, extra, alias_eps);

  CVec base = lattice_delta(grid);
  fft_forward(grid, base);
  const double inv = 1.0 / static_cast<double>(grid.size());
  std::vector<KernelField> out;
  for (auto& alpha : derivs) {
    CVec a = base;
    scale_spectrum(grid, a, [&](const double* xi) {
      std::span<const double> s(xi, grid.d);
      return std::exp(-t * multiplier(spec, s)) * partial_multiplier(alpha, xi) * inv;
    });
    fft_backward(grid, a);
    out.push_back({grid, t, alpha, std::move(a)});
  }
  return out;
}

KernelField synthesize_kernel(const OperatorSpec& spec, const EllipticityReport& report, double t,
                              const LatticeGrid& grid, double alias_eps) {
  return synthesize_kernel(spec, report, t, grid, {MultiIndex{}}, alias_eps).front();
}

LatticeGrid choose_grid(const OperatorSpec& spec, const EllipticityReport& report, double t, int max_n) {
  const int d = spec.d();
  double L = 16.0 * std::max(1.0, std::pow(t, 1.0 / spec.m()));
  for (int attempt = 0; attempt < 12; ++attempt) {
    int n = 16;
    while (n <= max_n) {
      double ratio = axis_boundary_ratio(spec, t, M_PI * n / L, 2 * M_PI / L, n, 0);
      if (ratio <= kAliasEpsilon) break;
      n *= 2;
    }
    if (n > max_n)
      throw Error(ErrorKind::Resource, "grid would exceed max_n", {{"max_n", max_n}, {"box_length", L}});
    LatticeGrid g = LatticeGrid::box(d, n, L);
    KernelField k = synthesize_kernel(spec, report, t, g);
    double mx = linf_norm(k.values), edge = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto j = g.unravel(i);
      for (int a = 0; a < d; ++a)
        if (j[a] == 0 || j[a] == n - 1) edge = std::max(edge, std::abs(k.values[i]));
    }
    if (edge < 1e-14 * mx) return g;
    L *= 1.5;
  }
  throw Error(ErrorKind::Resource, "could not find a box with negligible boundary values");
}

KernelField convolve(const KernelField& f, const KernelField& g) {
  if (!(f.grid == g.grid)) throw Error(ErrorKind::GridMismatch, "convolve: grids differ");
  const LatticeGrid& gr = f.grid;
  CVec a = f.values, b = g.values;
  fft_forward(gr, a);
  fft_forward(gr, b);
  const double scale = gr.cell_volume() / static_cast<double>(gr.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto k = gr.unravel(i);
    int parity = 0;
    for (int ax = 0; ax < gr.d; ++ax) parity += k[ax];
    // (-1)^k recenters the circular convolution on x = 0.
    a[i] *= b[i] * ((parity % 2) ? -scale : scale);
  }
  fft_backward(gr, a);
  MultiIndex tag = f.tag;
  tag.insert(tag.end(), g.tag.begin(), g.tag.end());
  return {gr, f.t + g.t, tag, std::move(a)};
}

GaussianFit fit_gaussian_envelope(const KernelField& field, int m, double t, const FitRegion& region,
                                  double omega) {
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "envelope fit needs m >= 2");
  const LatticeGrid& g = field.grid;
  const double mx = linf_norm(field.values);
  const double floor = 1e-12 * mx;
  const double shift = (g.d + static_cast<double>(field.tag.size())) / m * std::log(t);
  Vec zs, ys;
  double x[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = std::abs(field.values[i]);
    if (!(v > floor)) continue;
    g.point(i, x);
    double r = 0;
    for (int a = 0; a < g.d; ++a) r += x[a] * x[a];
    r = std::sqrt(r);
    if (r < region.r_min || r > region.r_max) continue;
    zs.push_back(std::pow(std::pow(r, m) / t, 1.0 / (m - 1)));
    ys.push_back(std::log(v) + shift);
  }
  if (zs.size() < 8) throw Error(ErrorKind::DegenerateFit, "fewer than 8 usable points", {{"usable", zs.size()}});
  auto hull = upper_hull(zs, ys);
  LineFit lf;
  if (hull.size() >= 2) {
    Vec hx, hy;
    for (auto i : hull) {
      hx.push_back(zs[i]);
      hy.push_back(ys[i]);
    }
    lf = fit_line_ls(hx, hy);
  } else {
    lf = fit_line_ls(zs, ys);
  }
  GaussianFit fit;
  fit.b = -lf.slope;
  fit.a_regression = std::exp(lf.intercept);
  fit.omega = omega;
  fit.points_used = static_cast<int>(zs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i)
    worst = std::max(worst, std::exp(ys[i] - lf.intercept - lf.slope * zs[i]) - 1.0);
  fit.residual = worst;
  fit.a = fit.a_regression * (1.0 + worst);
  return fit;
}

double envelope_violation(const KernelField& field, int m, double t, const GaussianFit& fit) {
  const LatticeGrid& g = field.grid;
  const double pre = fit.a * std::pow(t, -(g.d + static_cast<double>(field.tag.size())) / m) * std::exp(fit.omega * t);
  // Values under the synthesis roundoff floor carry no information.
  const double floor = 1e-13 * linf_norm(field.values);
  double worst = 0.0, x[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = std::abs(field.values[i]);
    if (v <= floor) continue;
    g.point(i, x);
    double r = 0;
    for (int a = 0; a < g.d; ++a) r += x[a] * x[a];
    double z = std::pow(std::pow(std::sqrt(r), m) / t, 1.0 / (m - 1));
    double bound = pre * std::exp(-fit.b * z);
    if (bound > 0) worst = std::max(worst, v / bound - 1.0);
    else if (v > 0) worst = std::max(worst, 1e300);
  }
  return std::max(worst, 0.0);
}

double weighted_l1(const KernelField& field, double rho) {
  const LatticeGrid& g = field.grid;
  Vec w(g.size());
  double x[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    double r = 0;
    for (int a = 0; a < g.d; ++a) r += x[a] * x[a];
    w[i] = std::exp(rho * std::sqrt(r));
  }
  double v = l1_norm(g, field.values, &w);
  return std::isfinite(v) ? v : DBL_MAX;
}

namespace {

std::vector<MultiIndex> unordered_indices(int d, int k) {
  std::vector<MultiIndex> out;
  MultiIndex cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < d; ++i) {
      cur.push_back(i);
      rec(i);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace

SeminormProfile smoothing_seminorms(const OperatorSpec& spec, const EllipticityReport& report,
                                    const LatticeGrid& grid, const CVec& phi, double t, int k_max,
                                    double alias_eps) {
  if (!report.strongly_elliptic) throw Error(ErrorKind::NotCertified, "spec lacks a valid ellipticity report");
  if (alias_eps > 0) check_alias(spec, t, grid, k_max, alias_eps);
  CVec ph = phi;
  fft_forward(grid, ph);
  const double norm_scale = grid.cell_volume() / static_cast<double>(grid.size());
  double x0 = l2_norm(grid, phi);
  SeminormProfile prof;
  Vec ks, ys;
  for (int k = 0; k <= k_max; ++k) {
    double best = 0.0;
    for (auto& alpha : unordered_indices(grid.d, k)) {
      CVec a = ph;
      scale_spectrum(grid, a, [&](const double* xi) {
        std::span<const double> s(xi, grid.d);
        return std::exp(-t * multiplier(spec, s)) * partial_multiplier(alpha, xi);
      });
      Vec e(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) e[i] = std::norm(a[i]);
      best = std::max(best, std::sqrt(pairwise_sum(e) * norm_scale));
    }
    prof.levels.push_back({k, best});
    if (best > 0 && x0 > 0) {
      ks.push_back(k);
      ys.push_back(std::log(best * std::pow(t, static_cast<double>(k) / spec.m()) /
                            (std::exp(log_factorial(k) / spec.m()) * x0)));
    }
  }
  if (ks.size() >= 2) {
    LineFit lf = fit_line_ls(ks, ys);
    prof.b = std::exp(lf.slope);
    double a = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) a = std::max(a, std::exp(ys[i] - lf.slope * ks[i]));
    prof.a = a;
  }
  return prof;
}

double default_fractional_shift(const EllipticityReport& report) { return report.omega + report.lambda * 1e-6; }

CVec fractional_power_apply(const OperatorSpec& spec, const EllipticityReport& report, double gamma,
                            const LatticeGrid& grid, const CVec& phi, double shift) {
  if (!report.strongly_elliptic) throw Error(ErrorKind::NotCertified, "spec lacks a valid ellipticity report");
  if (!(gamma > 0 && gamma <= 1)) throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0, 1]");
  CVec out = phi;
  if (gamma == 1.0) {
    apply_multiplier(grid, out, [&](const double* xi) {
      return multiplier(spec, std::span<const double>(xi, grid.d)) + shift;
    });
    return out;
  }
  double worst = std::numeric_limits<double>::infinity();
  fft_forward(grid, out);
  const double inv = 1.0 / static_cast<double>(grid.size());
  scale_spectrum(grid, out, [&](const double* xi) {
    cplx z = multiplier(spec, std::span<const double>(xi, grid.d)) + shift;
    worst = std::min(worst, z.real());
    // Re z > 0 keeps the argument in (-pi/2, pi/2), where the principal
    // branch agrees with continuous tracking from the positive axis.
    return std::pow(z, gamma) * inv;
  });
  if (!(worst > 0))
    throw Error(ErrorKind::BranchCut, "Re(h) + shift <= 0 on the dual lattice", {{"min_real_part", worst}});
  fft_backward(grid, out);
  return out;
}

CVec spectral_derivative(const LatticeGrid& grid, const CVec& f, const MultiIndex& alpha) {
  CVec out = f;
  apply_multiplier(grid, out, [&](const double* xi) { return partial_multiplier(alpha, xi); });
  return out;
}

CVec apply_operator_spectral(const OperatorSpec& spec, const LatticeGrid& grid, const CVec& f) {
  CVec out = f;
  apply_multiplier(grid, out, [&](const double* xi) { return multiplier(spec, std::span<const double>(xi, grid.d)); });
  return out;
}

void write_csv(const KernelField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Resource, "cannot open " + path);
  for (int a = 0; a < f.grid.d; ++a) os << "x_" << (a + 1) << ",";
  os << "re,im\n" << std::setprecision(17);
  double x[3];
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    f.grid.point(i, x);
    for (int a = 0; a < f.grid.d; ++a) os << x[a] << ",";
    os << f.values[i].real() << "," << f.values[i].imag() << "\n";
  }
}

void write_binary(const KernelField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Resource, "cannot open " + path);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  nlohmann::json side = {{"grid", to_json(f.grid)},
                         {"t", f.t},
                         {"derivative_tag", f.tag},
                         {"layout", "row-major, last axis fastest"},
                         {"dtype", "complex128 (re, im) little-endian"}};
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

}  // namespace heatlands
