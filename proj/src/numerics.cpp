#include "heatlands/numerics.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "heatlands/errors.hpp"

namespace heatlands {

namespace {

template <class T>
T pairwise_impl(const T* p, std::size_t n) {
  if (n <= 8) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_impl(p, h) + pairwise_impl(p + h, n - h);
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_impl(v.data(), v.size()); }
cplx pairwise_sum(std::span<const cplx> v) { return pairwise_impl(v.data(), v.size()); }

LineFit fit_line_ls(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::DegenerateFit, "line fit needs >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw Error(ErrorKind::DegenerateFit, "line fit: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    f.max_abs_dev = std::max(f.max_abs_dev, std::abs(y[i] - f.intercept - f.slope * x[i]));
  return f;
}

LineFit fit_line_minimax(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::DegenerateFit, "line fit needs >= 2 points");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (x[i] != x[j]) {
        double s = (y[j] - y[i]) / (x[j] - x[i]);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
  if (!std::isfinite(lo)) throw Error(ErrorKind::DegenerateFit, "line fit: abscissae coincide");
  auto spread = [&](double s, double* mid) {
    double a = std::numeric_limits<double>::infinity(), b = -a;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - s * x[i];
      a = std::min(a, r);
      b = std::max(b, r);
    }
    if (mid) *mid = 0.5 * (a + b);
    return 0.5 * (b - a);
  };
  // The spread is convex in the slope.
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (spread(m1, nullptr) <= spread(m2, nullptr))
      hi = m2;
    else
      lo = m1;
  }
  LineFit f;
  f.slope = 0.5 * (lo + hi);
  f.max_abs_dev = spread(f.slope, &f.intercept);
  return f;
}

std::vector<std::size_t> upper_hull(std::span<const double> x, std::span<const double> y) {
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] > y[b]);
  });
  std::vector<std::size_t> h;
  for (std::size_t idx : order) {
    if (!h.empty() && x[h.back()] == x[idx]) continue;
    while (h.size() >= 2) {
      std::size_t a = h[h.size() - 2], b = h.back();
      double cross = (x[b] - x[a]) * (y[idx] - y[a]) - (y[b] - y[a]) * (x[idx] - x[a]);
      if (cross >= 0)
        h.pop_back();
      else
        break;
    }
    h.push_back(idx);
  }
  return h;
}

double golden_section_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Quadrature gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "gauss_legendre: n < 1");
  gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, i, &q.nodes[i], &q.weights[i], tab);
  gsl_integration_glfixed_table_free(tab);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return q.nodes[i] < q.nodes[j]; });
  Quadrature s;
  for (int i : idx) {
    s.nodes.push_back(q.nodes[i]);
    s.weights.push_back(q.weights[i]);
  }
  return s;
}

Quadrature graded_gauss_legendre(int per_panel, int panels, double ratio, double b) {
  Quadrature q;
  double right = b;
  std::vector<std::pair<double, double>> edges;
  for (int k = 0; k < panels; ++k) {
    double left = (k + 1 == panels) ? 0.0 : right / ratio;
    edges.emplace_back(left, right);
    right = left;
  }
  std::reverse(edges.begin(), edges.end());
  for (auto [l, r] : edges) {
    Quadrature p = gauss_legendre(per_panel, l, r);
    q.nodes.insert(q.nodes.end(), p.nodes.begin(), p.nodes.end());
    q.weights.insert(q.weights.end(), p.weights.begin(), p.weights.end());
  }
  return q;
}

Quadrature composite_midpoint(int n, double a, double b) {
  Quadrature q;
  double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    q.nodes.push_back(a + (i + 0.5) * h);
    q.weights.push_back(h);
  }
  return q;
}

ChebyshevGrid ChebyshevGrid::lobatto(int n, double a, double b) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "Chebyshev grid needs >= 2 nodes");
  ChebyshevGrid g;
  const int N = n - 1;
  for (int j = 0; j <= N; ++j) {
    double c = -std::cos(M_PI * j / N);
    g.nodes.push_back(a + 0.5 * (b - a) * (c + 1.0));
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == N) w *= 0.5;
    g.bary.push_back(w);
  }
  return g;
}

Vec ChebyshevGrid::weights_at(double x) const {
  Vec l(nodes.size(), 0.0);
  for (std::size_t j = 0; j < nodes.size(); ++j)
    if (x == nodes[j]) {
      l[j] = 1.0;
      return l;
    }
  double den = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    l[j] = bary[j] / (x - nodes[j]);
    den += l[j];
  }
  for (double& v : l) v /= den;
  return l;
}

void lagrange_weights(double frac, int width, double* w) {
  // Nodes at offsets -width/2+1 .. width/2 relative to the left-center node.
  const int lo = -width / 2 + 1;
  for (int i = 0; i < width; ++i) {
    double xi = lo + i, p = 1.0;
    for (int j = 0; j < width; ++j)
      if (j != i) {
        double xj = lo + j;
        p *= (frac - xj) / (xi - xj);
      }
    w[i] = p;
  }
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x68656174u};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& eng) {
  // Box-Muller; std::normal_distribution is implementation-defined.
  double u1 = uniform01(eng), u2 = uniform01(eng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("HEATLANDS_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errs(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace heatlands
