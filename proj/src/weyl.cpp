#include "heatlands/weyl.hpp"

#include <cmath>
#include <functional>

#include "heatlands/errors.hpp"

namespace heatlands {

int degree(const Mono& a) { return a[0] + a[1] + a[2]; }

void WeylOp::add(const Mono& xa, const Mono& db, cplx c) {
  if (c == cplx(0.0) || degree(xa) > max_deg_) return;
  cplx& slot = terms_[{xa, db}];
  slot += c;
  if (slot == cplx(0.0)) terms_.erase({xa, db});
}

WeylOp WeylOp::operator+(const WeylOp& o) const {
  WeylOp r = *this;
  r.max_deg_ = std::min(max_deg_, o.max_deg_);
  for (auto& [k, c] : o.terms_) r.add(k.first, k.second, c);
  return r;
}

WeylOp WeylOp::operator-(const WeylOp& o) const { return *this + o * cplx(-1.0); }

WeylOp WeylOp::operator*(cplx s) const {
  WeylOp r(d_, max_deg_);
  for (auto& [k, c] : terms_) r.add(k.first, k.second, c * s);
  return r;
}

WeylOp WeylOp::compose(const WeylOp& o) const {
  WeylOp r(d_, std::min(max_deg_, o.max_deg_));
  for (auto& [k1, c1] : terms_) {
    const Mono& a = k1.first;
    const Mono& b = k1.second;
    for (auto& [k2, c2] : o.terms_) {
      const Mono& c = k2.first;
      const Mono& e = k2.second;
      // d^b (x^c d^e f) = sum_g prod_i C(b_i, g_i) c_i!/(c_i-g_i)! x^{c-g} d^{b-g+e} f
      Mono g{0, 0, 0};
      std::function<void(int, double)> rec = [&](int i, double w) {
        if (i == 3) {
          Mono xa, db;
          for (int q = 0; q < 3; ++q) {
            xa[q] = a[q] + c[q] - g[q];
            db[q] = b[q] - g[q] + e[q];
          }
          r.add(xa, db, c1 * c2 * w);
          return;
        }
        for (g[i] = 0; g[i] <= std::min(b[i], c[i]); ++g[i]) {
          double f = binomial(b[i], g[i]) * std::exp(log_factorial(c[i]) - log_factorial(c[i] - g[i]));
          rec(i + 1, w * std::round(f));
        }
        g[i] = 0;
      };
      rec(0, 1.0);
    }
  }
  return r;
}

WeylOp WeylOp::pruned(double tol) const {
  WeylOp r(d_, max_deg_);
  for (auto& [k, c] : terms_)
    if (std::abs(c) > tol) r.add(k.first, k.second, c);
  return r;
}

int WeylOp::order() const {
  int m = 0;
  for (auto& [k, c] : terms_) m = std::max(m, degree(k.second));
  return m;
}

WeylOp WeylOp::identity(int d, int max_x_degree) {
  WeylOp r(d, max_x_degree);
  r.add({0, 0, 0}, {0, 0, 0}, 1.0);
  return r;
}

WeylOp WeylOp::partial(int d, int k, cplx c, int max_x_degree) {
  WeylOp r(d, max_x_degree);
  Mono b{0, 0, 0};
  b[k] = 1;
  r.add({0, 0, 0}, b, c);
  return r;
}

cplx WeylOp::coefficient_at(const Mono& db, const double* x) const {
  cplx s = 0.0;
  for (auto& [k, c] : terms_) {
    if (k.second != db) continue;
    double p = 1.0;
    for (int i = 0; i < d_; ++i) p *= std::pow(x[i], k.first[i]);
    s += c * p;
  }
  return s;
}

nlohmann::json WeylOp::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& [k, c] : terms_)
    arr.push_back({{"x_pow", std::vector<int>(k.first.begin(), k.first.begin() + d_)},
                   {"d_pow", std::vector<int>(k.second.begin(), k.second.begin() + d_)},
                   {"re", c.real()},
                   {"im", c.imag()}});
  return arr;
}

CVec stencil_derivative(const LatticeGrid& grid, const CVec& f, const Mono& db) {
  CVec cur = f;
  const int n = grid.n;
  const double h = grid.spacing;
  for (int axis = 0; axis < grid.d; ++axis)
    for (int rep = 0; rep < db[axis]; ++rep) {
      CVec next(cur.size(), 0.0);
      for (std::size_t idx = 0; idx < cur.size(); ++idx) {
        auto j = grid.unravel(idx);
        auto at = [&](int off) -> cplx {
          auto jj = j;
          jj[axis] += off;
          if (jj[axis] < 0 || jj[axis] >= n) return 0.0;
          return cur[grid.ravel(jj)];
        };
        next[idx] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
      }
      cur = std::move(next);
    }
  return cur;
}

CVec apply_weyl(const WeylOp& op, const LatticeGrid& grid, const CVec& f, DerivativeMode mode) {
  if (op.dim() != grid.d) throw Error(ErrorKind::GridMismatch, "operator and lattice dimensions differ");
  std::map<Mono, std::vector<std::pair<Mono, cplx>>> by_derivative;
  for (auto& [k, c] : op.terms()) by_derivative[k.second].push_back({k.first, c});
  CVec out(f.size(), 0.0);
  CVec spec;
  if (mode == DerivativeMode::Spectral) {
    spec = f;
    fft_forward(grid, spec);
  }
  const double inv = 1.0 / static_cast<double>(grid.size());
  Vec coords(grid.n);
  for (int j = 0; j < grid.n; ++j) coords[j] = grid.coord(j);
  for (auto& [db, polys] : by_derivative) {
    CVec df;
    if (degree(db) == 0) {
      df = f;
    } else if (mode == DerivativeMode::Spectral) {
      df = spec;
      scale_spectrum(grid, df, [&](const double* xi) {
        cplx p = inv;
        for (int a = 0; a < grid.d; ++a)
          for (int r = 0; r < db[a]; ++r) p *= cplx(0.0, xi[a]);
        return p;
      });
      fft_backward(grid, df);
    } else {
      df = stencil_derivative(grid, f, db);
    }
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      auto j = grid.unravel(idx);
      cplx coeff = 0.0;
      for (auto& [xa, c] : polys) {
        double p = 1.0;
        for (int a = 0; a < grid.d; ++a)
          for (int r = 0; r < xa[a]; ++r) p *= coords[j[a]];
        coeff += c * p;
      }
      out[idx] += coeff * df[idx];
    }
  }
  return out;
}

}  // namespace heatlands
