#include "heatlands/representation.hpp"

#include <cmath>
#include <numeric>

#include "heatlands/errors.hpp"
#include "heatlands/group_convolution.hpp"

namespace heatlands {

cplx Representation::inner(const CVec& a, const CVec& b) const {
  CVec p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = std::conj(a[i]) * b[i];
  return pairwise_sum(std::span<const cplx>(p));
}

double Representation::norm(const CVec& xi) const { return std::sqrt(std::max(0.0, inner(xi, xi).real())); }

CVec Representation::monomial(const MultiIndex& alpha, const CVec& xi) const {
  CVec v = xi;
  for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) v = generator(*it, v);
  return v;
}

CVec Representation::apply(const OperatorSpec& spec, const CVec& xi) const {
  if (spec.d() != group_dim()) throw Error(ErrorKind::InvalidArgument, "operator and representation dimensions differ");
  CVec out(xi.size(), 0.0);
  for (const auto& t : spec.terms()) {
    CVec v = monomial(t.alpha, xi);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += t.c * v[i];
  }
  return out;
}

CVec Representation::transfer(const GroupModel& model, const LatticeGrid& grid, const CVec& kernel,
                              const CVec& xi) const {
  if (model.dim() != group_dim() || grid.d != group_dim())
    throw Error(ErrorKind::GridMismatch, "kernel lattice does not match the representation");
  if (!continuity) throw Error(ErrorKind::ContinuityUnmeasured, "representation has no measured (M, rho)");
  double kmax = linf_norm(kernel);
  CVec out(xi.size(), 0.0);
  double x[3];
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    if (std::abs(kernel[i]) <= 1e-14 * kmax) continue;
    grid.point(i, x);
    Vec g(x, x + grid.d);
    if (model.cutoff_enabled() && std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0)) > model.chart_radius())
      throw Error(ErrorKind::SupportLeak, "kernel support leaves the chart");
    cplx w = kernel[i] * model.haar_density_unchecked(x) * grid.cell_volume();
    CVec v = act(g, xi);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += w * v[j];
  }
  return out;
}

CVec TranslationRep::apply_multiplier(const std::function<cplx(const double*)>& m, const CVec& xi) const {
  CVec v = xi;
  heatlands::apply_multiplier(grid_, v, m);
  return v;
}

CVec TranslationRep::act(const Vec& g, const CVec& xi) const {
  const int d = grid_.d;
  return apply_multiplier(
      [&](const double* w) {
        double ph = 0;
        for (int a = 0; a < d; ++a) ph += w[a] * g[a];
        return std::polar(1.0, -ph);
      },
      xi);
}

CVec TranslationRep::generator(int k, const CVec& xi) const {
  return apply_multiplier([k](const double* w) { return cplx(0.0, -w[k]); }, xi);
}

cplx TranslationRep::inner(const CVec& a, const CVec& b) const {
  return Representation::inner(a, b) * grid_.cell_volume();
}

CVec TranslationRep::transfer(const GroupModel& model, const LatticeGrid& grid, const CVec& kernel, const CVec& xi) const {
  if (!(grid == grid_) || model.dim() != grid_.d) return Representation::transfer(model, grid, kernel, xi);
  if (!continuity) throw Error(ErrorKind::ContinuityUnmeasured, "representation has no measured (M, rho)");
  // sum_i h^d K(x_i) xi(y - x_i), a circular convolution with the kernel centred at index n/2.
  CVec a = kernel, b = xi;
  fft_forward(grid_, a);
  fft_forward(grid_, b);
  const int n = grid_.n;
  for (std::size_t idx = 0; idx < a.size(); ++idx) a[idx] *= b[idx];
  fft_backward(grid_, a);
  CVec out(a.size());
  const double scale = grid_.cell_volume() / static_cast<double>(grid_.size());
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    auto j = grid_.unravel(idx);
    for (int q = 0; q < grid_.d; ++q) j[q] = (j[q] + n / 2) % n;
    out[idx] = a[grid_.ravel(j)] * scale;
  }
  return out;
}

LeftRegularRep::LeftRegularRep(GroupModel model, LatticeGrid grid, DerivativeMode mode)
    : model_(std::move(model)), grid_(grid), mode_(mode) {
  if (grid_.d != model_.dim()) throw Error(ErrorKind::GridMismatch, "lattice and group dimensions differ");
  fields_ = model_.left_vector_fields();
  sigma_ = haar_weights(model_, grid_);
}

CVec LeftRegularRep::act(const Vec& g, const CVec& xi) const { return left_translate(model_, grid_, xi, g); }

CVec LeftRegularRep::generator(int k, const CVec& xi) const { return apply_weyl(fields_.fields[k], grid_, xi, mode_); }

cplx LeftRegularRep::inner(const CVec& a, const CVec& b) const {
  CVec p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = std::conj(a[i]) * b[i] * sigma_[i];
  return pairwise_sum(std::span<const cplx>(p)) * grid_.cell_volume();
}

std::string LeftRegularRep::generator_scheme() const {
  return mode_ == DerivativeMode::Stencil4 ? "stencil4" : "spectral";
}

CVec LeftRegularRep::transfer(const GroupModel& model, const LatticeGrid& grid, const CVec& kernel, const CVec& xi) const {
  if (!(grid == grid_) || model.dim() != model_.dim()) return Representation::transfer(model, grid, kernel, xi);
  if (!continuity) throw Error(ErrorKind::ContinuityUnmeasured, "representation has no measured (M, rho)");
  // int K(g) xi(g^-1 h) dg is the group convolution K * xi.
  return group_convolve(model_, grid_, kernel, xi);
}

SchrodingerRep::SchrodingerRep(LatticeGrid line) : grid_(line) {
  if (line.d != 1) throw Error(ErrorKind::InvalidArgument, "Schrodinger carrier is a 1-d lattice");
}

CVec SchrodingerRep::act(const Vec& g, const CVec& xi) const {
  CVec v = xi;
  heatlands::apply_multiplier(grid_, v, [&](const double* w) { return std::polar(1.0, -w[0] * g[0]); });
  const cplx c = std::polar(1.0, -(g[2] - 0.5 * g[0] * g[1]));
  for (int j = 0; j < grid_.n; ++j) v[j] *= c * std::polar(1.0, g[1] * (grid_.coord(j) - g[0]));
  return v;
}

CVec SchrodingerRep::generator(int k, const CVec& xi) const {
  CVec v = xi;
  switch (k) {
    case 0:
      heatlands::apply_multiplier(grid_, v, [](const double* w) { return cplx(0.0, -w[0]); });
      break;
    case 1:
      for (int j = 0; j < grid_.n; ++j) v[j] *= cplx(0.0, grid_.coord(j));
      break;
    default:
      for (auto& z : v) z *= cplx(0.0, -1.0);
  }
  return v;
}

cplx SchrodingerRep::inner(const CVec& a, const CVec& b) const { return Representation::inner(a, b) * grid_.spacing; }

CVec random_field(const LatticeGrid& grid, double cap, std::uint64_t seed, std::uint64_t trial, double window) {
  auto eng = keyed_engine(seed, trial);
  CVec spec(grid.size(), 0.0);
  const int d = grid.d;
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    auto j = grid.unravel(idx);
    double r2 = 0;
    for (int a = 0; a < d; ++a) r2 += grid.freq(j[a]) * grid.freq(j[a]);
    // Draw for every index so the stream does not depend on the cap.
    double re = standard_normal(eng), im = standard_normal(eng);
    bool nyq = false;
    for (int a = 0; a < d; ++a) nyq = nyq || 2 * j[a] == grid.n;
    if (!nyq && std::sqrt(r2) <= cap) spec[idx] = cplx(re, im);
  }
  fft_backward(grid, spec);
  if (window > 0) {
    double x[3];
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
      grid.point(idx, x);
      double r2 = 0;
      for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
      double s = r2 / (window * window);
      spec[idx] *= s < 1 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
    }
  }
  return spec;
}

Continuity measure_continuity(const Representation& rep, double radius, int samples, std::uint64_t seed) {
  auto eng = keyed_engine(seed, 0xc0);
  const int d = rep.group_dim();
  LatticeGrid cg = rep.carrier_grid();
  struct Sample {
    double r, ratio;
  };
  std::vector<Sample> obs;
  for (int s = 0; s < samples; ++s) {
    Vec g(d);
    double nrm = 0;
    for (double& v : g) {
      v = standard_normal(eng);
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    double r = radius * std::pow(uniform01(eng), 1.0 / d);
    for (double& v : g) v *= r / nrm;
    CVec xi;
    if (cg.n > 0) {
      xi = random_field(cg, 0.25 * cg.nyquist(), seed, 1000 + s, 0.3 * cg.length() / 2);
    } else {
      xi.resize(rep.size());
      for (auto& z : xi) z = cplx(standard_normal(eng), standard_normal(eng));
    }
    double n0 = rep.norm(xi);
    if (n0 == 0) continue;
    obs.push_back({r, rep.norm(rep.act(g, xi)) / n0});
  }
  Continuity c;
  c.samples = static_cast<int>(obs.size());
  c.radius = radius;
  c.M = 1.0;
  for (auto& o : obs)
    if (o.r <= radius / 4) c.M = std::max(c.M, o.ratio);
  for (auto& o : obs)
    if (o.r > 0) c.rho = std::max(c.rho, std::log(o.ratio / c.M) / o.r);
  return c;
}

}  // namespace heatlands
