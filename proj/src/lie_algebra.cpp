#include "heatlands/lie_algebra.hpp"

#include <cmath>
#include <functional>

#include "heatlands/errors.hpp"

namespace heatlands {

LieAlgebra::LieAlgebra(int d) : d_(d), c_(static_cast<std::size_t>(d * d * d), 0.0) {
  if (d < 1 || d > 3) throw Error(ErrorKind::InvalidArgument, "algebra dimension must be 1..3");
}

void LieAlgebra::set(int i, int j, int k, double v) {
  if (i < 0 || j < 0 || k < 0 || i >= d_ || j >= d_ || k >= d_)
    throw Error(ErrorKind::InvalidArgument, "structure constant index out of range");
  c_[(i * d_ + j) * d_ + k] = v;
  c_[(j * d_ + i) * d_ + k] = -v;
}

Vec LieAlgebra::bracket(const Vec& x, const Vec& y) const {
  Vec z(d_, 0.0);
  for (int i = 0; i < d_; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < d_; ++j) {
      double p = x[i] * y[j];
      if (p == 0.0) continue;
      for (int k = 0; k < d_; ++k) z[k] += c(i, j, k) * p;
    }
  }
  return z;
}

Eigen::MatrixXd LieAlgebra::ad(const Vec& x) const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d_, d_);
  for (int j = 0; j < d_; ++j)
    for (int k = 0; k < d_; ++k) {
      double s = 0;
      for (int i = 0; i < d_; ++i) s += x[i] * c(i, j, k);
      A(k, j) = s;
    }
  return A;
}

bool LieAlgebra::is_abelian() const {
  for (double v : c_)
    if (v != 0.0) return false;
  return true;
}

namespace {

int rank_of(const std::vector<Vec>& vs, int d) {
  if (vs.empty()) return 0;
  Eigen::MatrixXd M(d, static_cast<int>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j)
    for (int k = 0; k < d; ++k) M(k, static_cast<int>(j)) = vs[j][k];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-12);
  return static_cast<int>(lu.rank());
}

}  // namespace

std::optional<int> LieAlgebra::nilpotency_step() const {
  // g^(1) = g, g^(k+1) = [g, g^(k)].
  std::vector<Vec> cur;
  for (int i = 0; i < d_; ++i) {
    Vec e(d_, 0.0);
    e[i] = 1.0;
    cur.push_back(e);
  }
  for (int step = 1; step <= d_ + 1; ++step) {
    std::vector<Vec> next;
    for (int i = 0; i < d_; ++i) {
      Vec e(d_, 0.0);
      e[i] = 1.0;
      for (auto& v : cur) next.push_back(bracket(e, v));
    }
    int r = rank_of(next, d_);
    if (r == 0) return step;
    if (r == rank_of(cur, d_)) return std::nullopt;
    cur = next;
  }
  return std::nullopt;
}

double LieAlgebra::antisymmetry_defect() const {
  double m = 0;
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      for (int k = 0; k < d_; ++k) m = std::max(m, std::abs(c(i, j, k) + c(j, i, k)));
  return m;
}

double LieAlgebra::jacobi_defect() const {
  double m = 0;
  auto e = [&](int i) {
    Vec v(d_, 0.0);
    v[i] = 1.0;
    return v;
  };
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      for (int k = 0; k < d_; ++k) {
        Vec a = bracket(e(i), bracket(e(j), e(k)));
        Vec b = bracket(e(j), bracket(e(k), e(i)));
        Vec c3 = bracket(e(k), bracket(e(i), e(j)));
        for (int q = 0; q < d_; ++q) m = std::max(m, std::abs(a[q] + b[q] + c3[q]));
      }
  return m;
}

std::vector<int> LieAlgebra::derived_coordinate_axes() const {
  std::vector<int> axes;
  for (int k = 0; k < d_; ++k) {
    bool used = false;
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        if (c(i, j, k) != 0.0) used = true;
    if (used) axes.push_back(k);
  }
  return axes;
}

LieAlgebra abelian_algebra(int d) { return LieAlgebra(d); }

LieAlgebra heisenberg_algebra() {
  LieAlgebra a(3);
  a.set(0, 1, 2, 1.0);
  return a;
}

LieAlgebra affine_algebra() {
  LieAlgebra a(2);
  a.set(0, 1, 1, 1.0);
  return a;
}

Vec bch_product(const LieAlgebra& alg, const Vec& a, const Vec& b, int order) {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "bch order must be >= 1");
  if (order > kMaxBchOrder)
    throw Error(ErrorKind::TruncationOverflow, "requested BCH order exceeds implemented depth",
                {{"requested", order}, {"max", kMaxBchOrder}});
  const int d = alg.dim();
  Vec z(d, 0.0);
  if (alg.is_abelian() || order == 1) {
    for (int k = 0; k < d; ++k) z[k] = a[k] + b[k];
    return z;
  }
  // Dynkin: sum_n (-1)^{n-1}/n sum over (r_i, s_i) with r_i + s_i > 0 of
  // [X^r1 Y^s1 ... X^rn Y^sn] / ((sum r_i + s_i) prod r_i! s_i!), with the
  // word bracketed from the right.
  std::vector<int> word;
  std::function<void(int, int, double, int)> rec = [&](int remaining, int pairs, double denom, int total) {
    if (remaining == 0) {
      Vec v = word.back() == 0 ? a : b;
      for (int p = static_cast<int>(word.size()) - 2; p >= 0; --p) v = alg.bracket(word[p] == 0 ? a : b, v);
      double coeff = ((pairs % 2 == 1) ? 1.0 : -1.0) / pairs / (total * denom);
      for (int k = 0; k < d; ++k) z[k] += coeff * v[k];
      return;
    }
    for (int len = 1; len <= remaining; ++len)
      for (int r = 0; r <= len; ++r) {
        int s = len - r;
        for (int i = 0; i < r; ++i) word.push_back(0);
        for (int i = 0; i < s; ++i) word.push_back(1);
        rec(remaining - len, pairs + 1, denom * std::tgamma(r + 1.0) * std::tgamma(s + 1.0), total);
        word.resize(word.size() - len);
      }
  };
  for (int N = 1; N <= order; ++N) rec(N, 0, 1.0, N);
  return z;
}

nlohmann::json to_json(const LieAlgebra& alg) {
  nlohmann::json s = nlohmann::json::array();
  const int d = alg.dim();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (alg.c(i, j, k) != 0.0) s.push_back({{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"c", alg.c(i, j, k)}});
  auto step = alg.nilpotency_step();
  return {{"d", d}, {"structure", s}, {"nilpotency_step", step ? nlohmann::json(*step) : nlohmann::json("none")}};
}

}  // namespace heatlands
