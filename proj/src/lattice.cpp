#include "heatlands/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "heatlands/errors.hpp"

namespace heatlands {

LatticeGrid::LatticeGrid(int d_, int n_, double spacing_) : d(d_), n(n_), spacing(spacing_) {
  if (d < 1 || d > 3) throw Error(ErrorKind::InvalidArgument, "lattice dimension must be 1..3");
  if (n < 2 || (n & (n - 1)) != 0) throw Error(ErrorKind::InvalidArgument, "lattice n must be a power of two");
  if (!(spacing > 0)) throw Error(ErrorKind::InvalidArgument, "lattice spacing must be positive");
}

LatticeGrid LatticeGrid::box(int d, int n, double length) { return LatticeGrid(d, n, length / n); }

std::size_t LatticeGrid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

double LatticeGrid::dual_step() const { return 2.0 * M_PI / length(); }
double LatticeGrid::nyquist() const { return M_PI / spacing; }

double LatticeGrid::freq(int k) const {
  int kk = (k <= n / 2) ? k : k - n;
  return kk * dual_step();
}

double LatticeGrid::cell_volume() const { return std::pow(spacing, d); }

std::array<int, 3> LatticeGrid::unravel(std::size_t idx) const {
  std::array<int, 3> j{0, 0, 0};
  for (int a = d - 1; a >= 0; --a) {
    j[a] = static_cast<int>(idx % n);
    idx /= n;
  }
  return j;
}

std::size_t LatticeGrid::ravel(const std::array<int, 3>& j) const {
  std::size_t idx = 0;
  for (int a = 0; a < d; ++a) idx = idx * n + j[a];
  return idx;
}

void LatticeGrid::point(std::size_t idx, double* x) const {
  auto j = unravel(idx);
  for (int a = 0; a < d; ++a) x[a] = coord(j[a]);
}

nlohmann::json to_json(const LatticeGrid& g) {
  return {{"d", g.d}, {"n", g.n}, {"spacing", g.spacing}, {"box", {-0.5 * g.length(), 0.5 * g.length()}}};
}

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int, bool>, fftw_plan> plans;

  fftw_plan get(int d, int n, int sign, bool last_axis) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(d, n, sign, last_axis);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= n;
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (!last_axis) {
      int dims[3] = {n, n, n};
      p = fftw_plan_dft(d, dims, buf, buf, sign, flags);
    } else {
      int len[1] = {n};
      int howmany = static_cast<int>(total / n);
      p = fftw_plan_many_dft(1, len, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n, sign, flags);
    }
    fftw_free(buf);
    plans[key] = p;
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(const LatticeGrid& g, CVec& a, int sign, bool last_axis) {
  if (a.size() != g.size()) throw Error(ErrorKind::GridMismatch, "array size does not match lattice");
  fftw_plan p = cache().get(g.d, g.n, sign, last_axis);
  auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

void fft_forward(const LatticeGrid& g, CVec& a) { run(g, a, FFTW_FORWARD, false); }
void fft_backward(const LatticeGrid& g, CVec& a) { run(g, a, FFTW_BACKWARD, false); }
void fft_forward_last_axis(const LatticeGrid& g, CVec& a) { run(g, a, FFTW_FORWARD, true); }
void fft_backward_last_axis(const LatticeGrid& g, CVec& a) { run(g, a, FFTW_BACKWARD, true); }

void scale_spectrum(const LatticeGrid& g, CVec& spec, const Multiplier& mult) {
  const int d = g.d, n = g.n;
  Vec f(n);
  for (int k = 0; k < n; ++k) f[k] = g.freq(k);
  const double fn = g.nyquist();
  double xi[3];
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    auto k = g.unravel(idx);
    int nyq[3], q = 0;
    for (int a = 0; a < d; ++a) {
      xi[a] = f[k[a]];
      if (k[a] == n / 2) nyq[q++] = a;
    }
    cplx m;
    if (q == 0) {
      m = mult(xi);
    } else {
      m = 0.0;
      for (int s = 0; s < (1 << q); ++s) {
        for (int b = 0; b < q; ++b) xi[nyq[b]] = ((s >> b) & 1) ? -fn : fn;
        m += mult(xi);
      }
      m /= static_cast<double>(1 << q);
    }
    spec[idx] *= m;
  }
}

void apply_multiplier(const LatticeGrid& g, CVec& f, const Multiplier& mult) {
  fft_forward(g, f);
  const double inv = 1.0 / static_cast<double>(g.size());
  scale_spectrum(g, f, [&](const double* xi) { return mult(xi) * inv; });
  fft_backward(g, f);
}

CVec lattice_delta(const LatticeGrid& g) {
  CVec a(g.size(), 0.0);
  a[g.ravel({g.n / 2, g.n / 2, g.n / 2})] = 1.0 / g.cell_volume();
  return a;
}

double l1_norm(const LatticeGrid& g, const CVec& f, const Vec* weight) {
  Vec v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::abs(f[i]) * (weight ? (*weight)[i] : 1.0);
  return pairwise_sum(v) * g.cell_volume();
}

double l2_norm(const LatticeGrid& g, const CVec& f) {
  Vec v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::norm(f[i]);
  return std::sqrt(pairwise_sum(v) * g.cell_volume());
}

double linf_norm(const CVec& f) {
  double m = 0.0;
  for (auto& z : f) m = std::max(m, std::abs(z));
  return m;
}

cplx lattice_integral(const LatticeGrid& g, const CVec& f) { return pairwise_sum(f) * g.cell_volume(); }

double sup_norm_upsampled(const LatticeGrid& g, const CVec& f, int factor) {
  if (factor <= 1) return linf_norm(f);
  LatticeGrid big(g.d, g.n * factor, g.spacing / factor);
  CVec a = f;
  fft_forward(g, a);
  CVec b(big.size(), 0.0);
  const int n = g.n, N = big.n;
  // Map each coarse frequency index to the fine index; the Nyquist plane is split in half.
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    auto k = g.unravel(idx);
    int q = 0;
    int targets[3][2];
    int count[3];
    for (int ax = 0; ax < g.d; ++ax) {
      if (k[ax] < n / 2) {
        targets[ax][0] = k[ax];
        count[ax] = 1;
      } else if (k[ax] > n / 2) {
        targets[ax][0] = k[ax] + (N - n);
        count[ax] = 1;
      } else {
        targets[ax][0] = n / 2;
        targets[ax][1] = N - n / 2;
        count[ax] = 2;
        ++q;
      }
    }
    const double w = 1.0 / std::pow(2.0, q);
    std::array<int, 3> t{0, 0, 0};
    int total = 1;
    for (int ax = 0; ax < g.d; ++ax) total *= count[ax];
    for (int c = 0; c < total; ++c) {
      int r = c;
      for (int ax = 0; ax < g.d; ++ax) {
        t[ax] = targets[ax][r % count[ax]];
        r /= count[ax];
      }
      b[big.ravel(t)] += a[idx] * w;
    }
  }
  fft_backward(big, b);
  const double inv = 1.0 / static_cast<double>(g.size());
  double m = 0.0;
  for (auto& z : b) m = std::max(m, std::abs(z) * inv);
  return m;
}

}  // namespace heatlands
