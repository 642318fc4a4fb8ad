#include "heatlands/group_convolution.hpp"

#include <cmath>

#include "heatlands/errors.hpp"

namespace heatlands {

bool IndexBox::empty() const {
  for (int a = 0; a < 3; ++a)
    if (hi[a] <= lo[a]) return true;
  return false;
}

nlohmann::json IndexBox::to_json(const LatticeGrid& g) const {
  nlohmann::json lo_x = nlohmann::json::array(), hi_x = nlohmann::json::array();
  for (int a = 0; a < g.d; ++a) {
    lo_x.push_back(g.coord(lo[a]));
    hi_x.push_back(g.coord(hi[a] - 1));
  }
  return {{"lo", lo_x}, {"hi", hi_x}, {"empty", empty()}};
}

IndexBox support_box(const LatticeGrid& grid, const CVec& f, double threshold) {
  IndexBox b;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = a < grid.d ? grid.n : 0;
    b.hi[a] = a < grid.d ? 0 : 1;
  }
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (!(std::abs(f[idx]) > threshold)) continue;
    auto j = grid.unravel(idx);
    for (int a = 0; a < grid.d; ++a) {
      b.lo[a] = std::min(b.lo[a], j[a]);
      b.hi[a] = std::max(b.hi[a], j[a] + 1);
    }
  }
  return b;
}

Vec haar_weights(const GroupModel& model, const LatticeGrid& grid) {
  Vec w(grid.size());
  double x[3];
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    grid.point(idx, x);
    w[idx] = model.haar_density_unchecked(x);
  }
  return w;
}

namespace {

void check_inputs(const GroupModel& model, const LatticeGrid& grid, const CVec& F, const CVec& G) {
  if (model.dim() != grid.d) throw Error(ErrorKind::GridMismatch, "group and lattice dimensions differ");
  if (F.size() != grid.size() || G.size() != grid.size())
    throw Error(ErrorKind::GridMismatch, "field sizes do not match the lattice");
}

// Linear convolution via zero padding to 2n per axis.
CVec abelian_fft(const LatticeGrid& grid, const CVec& F, const CVec& G) {
  const int n = grid.n, N = 2 * n, d = grid.d;
  LatticeGrid big(d, N, grid.spacing);
  CVec a(big.size(), 0.0), b(big.size(), 0.0);
  for (std::size_t idx = 0; idx < F.size(); ++idx) {
    auto j = grid.unravel(idx);
    std::size_t k = big.ravel(j);
    a[k] = F[idx];
    b[k] = G[idx];
  }
  fft_forward(big, a);
  fft_forward(big, b);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  fft_backward(big, a);
  const double scale = grid.cell_volume() / static_cast<double>(big.size());
  CVec out(F.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    auto j = grid.unravel(idx);
    for (int q = 0; q < d; ++q) j[q] += n / 2;
    out[idx] = a[big.ravel(j)] * scale;
  }
  return out;
}

// [a1, a2] = kappa a3 on R^3. Fourier along x3 turns the twist into a phase.
CVec step_two_twisted(const GroupModel& model, const LatticeGrid& grid, const CVec& F, const CVec& G) {
  const int n = grid.n;
  const double h = grid.spacing;
  const double kappa = model.algebra().c(0, 1, 2);
  IndexBox bf = support_box(grid, F), bg = support_box(grid, G);
  CVec out(grid.size(), 0.0);
  if (bf.empty() || bg.empty()) return out;
  CVec Fh = F, Gh = G;
  fft_forward_last_axis(grid, Fh);
  fft_forward_last_axis(grid, Gh);
  double fmax = 0, gmax = 0;
  for (auto v : Fh) fmax = std::max(fmax, std::abs(v));
  for (auto v : Gh) gmax = std::max(gmax, std::abs(v));
  auto at = [n](int i1, int i2, int k) { return (static_cast<std::size_t>(i1) * n + i2) * n + k; };
  Vec x(n);
  for (int j = 0; j < n; ++j) x[j] = grid.coord(j);
  // Output rows reachable from the supports.
  int g_lo[2], g_hi[2];
  for (int a = 0; a < 2; ++a) {
    g_lo[a] = std::max(0, bf.lo[a] + bg.lo[a] - n / 2);
    g_hi[a] = std::min(n, bf.hi[a] + bg.hi[a] - 1 - n / 2);
  }
  CVec P(grid.size(), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    double fk = 0, gk = 0;
    for (int i1 = bf.lo[0]; i1 < bf.hi[0]; ++i1)
      for (int i2 = bf.lo[1]; i2 < bf.hi[1]; ++i2) fk = std::max(fk, std::abs(Fh[at(i1, i2, k)]));
    for (int i1 = bg.lo[0]; i1 < bg.hi[0]; ++i1)
      for (int i2 = bg.lo[1]; i2 < bg.hi[1]; ++i2) gk = std::max(gk, std::abs(Gh[at(i1, i2, k)]));
    if (fk * gk <= 1e-17 * fmax * gmax) return;
    const bool nyq = 2 * k == n;
    const double xi = nyq ? grid.nyquist() : grid.freq(k);
    // phase(h, g) = exp(-i xi kappa/2 (h1 g2 - h2 g1)); E[a][b] = exp(-i xi kappa x_a x_b / 2).
    const int passes = nyq ? 2 : 1;
    for (int pass = 0; pass < passes; ++pass) {
      const double s = pass == 0 ? xi : -xi;
      const double w = nyq ? 0.5 : 1.0;
      std::vector<cplx> E(static_cast<std::size_t>(n) * n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) E[a * n + b] = std::polar(1.0, -0.5 * s * kappa * x[a] * x[b]);
      for (int g1 = g_lo[0]; g1 < g_hi[0]; ++g1)
        for (int g2 = g_lo[1]; g2 < g_hi[1]; ++g2) {
          cplx acc = 0.0;
          const int h1_lo = std::max(bf.lo[0], g1 + n / 2 - bg.hi[0] + 1), h1_hi = std::min(bf.hi[0], g1 + n / 2 - bg.lo[0] + 1);
          const int h2_lo = std::max(bf.lo[1], g2 + n / 2 - bg.hi[1] + 1), h2_hi = std::min(bf.hi[1], g2 + n / 2 - bg.lo[1] + 1);
          for (int h1 = h1_lo; h1 < h1_hi; ++h1) {
            const cplx e1 = E[h1 * n + g2];
            cplx row = 0.0;
            for (int h2 = h2_lo; h2 < h2_hi; ++h2)
              row += Fh[at(h1, h2, k)] * Gh[at(g1 - h1 + n / 2, g2 - h2 + n / 2, k)] * std::conj(E[h2 * n + g1]);
            acc += e1 * row;
          }
          P[at(g1, g2, k)] += w * acc;
        }
    }
  });
  // Back to coordinates: the centred origin contributes (-1)^k.
  for (std::size_t idx = 0; idx < P.size(); ++idx)
    if ((idx % n) % 2 == 1) P[idx] = -P[idx];
  fft_backward_last_axis(grid, P);
  const double scale = grid.cell_volume() / n;
  for (std::size_t idx = 0; idx < P.size(); ++idx) out[idx] = P[idx] * scale;
  (void)h;
  return out;
}

CVec direct_quadrature(const GroupModel& model, const LatticeGrid& grid, const CVec& F, const CVec& G) {
  const int d = grid.d;
  Vec sigma = haar_weights(model, grid);
  std::vector<std::size_t> live;
  for (std::size_t idx = 0; idx < F.size(); ++idx)
    if (F[idx] != cplx(0.0)) live.push_back(idx);
  IndexBox bg = support_box(grid, G);
  CVec out(F.size(), 0.0);
  if (live.empty() || bg.empty()) return out;
  // Conservative reach of G's support in chart coordinates.
  double reach = 0;
  for (int a = 0; a < d; ++a)
    reach = std::max({reach, std::abs(grid.coord(bg.lo[a])), std::abs(grid.coord(bg.hi[a] - 1))});
  reach = reach * std::sqrt(double(d)) + 3 * grid.spacing;
  const double vol = grid.cell_volume();
  parallel_for(out.size(), [&](std::size_t gi) {
    double g[3], hx[3], y[3];
    grid.point(gi, g);
    std::vector<cplx> terms;
    terms.reserve(live.size());
    for (std::size_t hi : live) {
      grid.point(hi, hx);
      double hinv[3];
      for (int a = 0; a < d; ++a) hinv[a] = -hx[a];
      model.product(hinv, g, y);
      double r = 0;
      for (int a = 0; a < d; ++a) r += y[a] * y[a];
      if (std::sqrt(r) > reach) continue;
      cplx v = sample_at(grid, G, y);
      if (v != cplx(0.0)) terms.push_back(F[hi] * v * sigma[hi]);
    }
    out[gi] = pairwise_sum(std::span<const cplx>(terms)) * vol;
  });
  return out;
}

}  // namespace

CVec group_convolve(const GroupModel& model, const LatticeGrid& grid, const CVec& F, const CVec& G,
                    ConvolutionEngine engine) {
  check_inputs(model, grid, F, G);
  if (engine == ConvolutionEngine::Auto) {
    if (model.law() == GroupLaw::Abelian) engine = ConvolutionEngine::AbelianFft;
    else if (model.law() == GroupLaw::StepTwo && grid.d == 3 && model.algebra().derived_coordinate_axes() == std::vector<int>{2} &&
             model.algebra().c(0, 2, 2) == 0 && model.algebra().c(1, 2, 2) == 0)
      engine = ConvolutionEngine::StepTwoTwisted;
    else engine = ConvolutionEngine::DirectQuadrature;
  }
  switch (engine) {
    case ConvolutionEngine::AbelianFft:
      if (model.law() != GroupLaw::Abelian) throw Error(ErrorKind::InvalidArgument, "FFT engine needs an abelian model");
      return abelian_fft(grid, F, G);
    case ConvolutionEngine::StepTwoTwisted:
      if (model.law() != GroupLaw::StepTwo || grid.d != 3)
        throw Error(ErrorKind::InvalidArgument, "twisted engine needs a step-two model on R^3");
      return step_two_twisted(model, grid, F, G);
    default:
      return direct_quadrature(model, grid, F, G);
  }
}

cplx sample_at(const LatticeGrid& grid, const CVec& f, const double* x) {
  constexpr int W = 6;
  const int d = grid.d, n = grid.n;
  int base[3] = {0, 0, 0};
  double w[3][W];
  for (int a = 0; a < d; ++a) {
    double u = x[a] / grid.spacing + n / 2;
    if (u < -W / 2.0 || u > n - 1 + W / 2.0) return 0.0;
    int j0 = static_cast<int>(std::floor(u));
    lagrange_weights(u - j0, W, w[a]);
    base[a] = j0 - W / 2 + 1;
  }
  cplx s = 0.0;
  std::array<int, 3> j{0, 0, 0};
  const int r1 = d > 1 ? W : 1, r2 = d > 2 ? W : 1;
  for (int p = 0; p < W; ++p) {
    j[0] = base[0] + p;
    if (j[0] < 0 || j[0] >= n) continue;
    for (int q = 0; q < r1; ++q) {
      if (d > 1) {
        j[1] = base[1] + q;
        if (j[1] < 0 || j[1] >= n) continue;
      }
      for (int r = 0; r < r2; ++r) {
        if (d > 2) {
          j[2] = base[2] + r;
          if (j[2] < 0 || j[2] >= n) continue;
        }
        double wt = w[0][p] * (d > 1 ? w[1][q] : 1.0) * (d > 2 ? w[2][r] : 1.0);
        s += wt * f[grid.ravel(j)];
      }
    }
  }
  return s;
}

CVec left_translate(const GroupModel& model, const LatticeGrid& grid, const CVec& f, const Vec& g) {
  Vec gi = model.inverse(g);
  CVec out(f.size());
  parallel_for(f.size(), [&](std::size_t idx) {
    double h[3], y[3];
    grid.point(idx, h);
    model.product(gi.data(), h, y);
    out[idx] = sample_at(grid, f, y);
  });
  return out;
}

CVec right_translate(const GroupModel& model, const LatticeGrid& grid, const CVec& f, const Vec& g) {
  CVec out(f.size());
  parallel_for(f.size(), [&](std::size_t idx) {
    double h[3], y[3];
    grid.point(idx, h);
    model.product(h, g.data(), y);
    out[idx] = sample_at(grid, f, y);
  });
  return out;
}

}  // namespace heatlands
