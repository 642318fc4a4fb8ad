#include "heatlands/group_model.hpp"

#include <cmath>
#include <map>

#include "heatlands/errors.hpp"

namespace heatlands {

namespace {

using Poly = std::map<Mono, double>;

// Bernoulli numbers with B_1 = -1/2, so z/(e^z - 1) = sum B_n z^n / n!.
std::vector<double> bernoulli(int n) {
  std::vector<double> b(n + 1, 0.0);
  b[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = 0;
    for (int j = 0; j < k; ++j) s += binomial(k + 1, j) * b[j];
    b[k] = -s / (k + 1);
  }
  return b;
}

double phi(double u) { return std::abs(u) < 1e-8 ? 1.0 + 0.5 * u + u * u / 6.0 : std::expm1(u) / u; }

double vec_norm(const Vec& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double bracket_constant(const LieAlgebra& alg) {
  // |[x,y]| <= C |x||y| with C the Frobenius norm of the structure tensor.
  double s = 0;
  const int d = alg.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) s += alg.c(i, j, k) * alg.c(i, j, k);
  return std::sqrt(s);
}

}  // namespace

double smooth_cutoff(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  double s = (outer - r) / (outer - inner);
  auto f = [](double u) { return u <= 0 ? 0.0 : std::exp(-1.0 / u); };
  double a = f(s), b = f(1.0 - s);
  return a / (a + b);
}

double VectorFieldSet::max_coefficient_at_origin() const {
  double m = 0;
  for (int k = 0; k < static_cast<int>(fields.size()); ++k)
    for (auto& [key, c] : fields[k].terms()) {
      if (degree(key.first) != 0) continue;
      Mono ek{0, 0, 0};
      ek[k] = 1;
      cplx y = key.second == ek ? c + 1.0 : c;
      m = std::max(m, std::abs(y));
    }
  return m;
}

GroupModel::GroupModel(std::string name, LieAlgebra alg, double chart_radius, int bch_order)
    : name_(std::move(name)), alg_(std::move(alg)), radius_(chart_radius), bch_order_(bch_order) {
  if (!(chart_radius > 0)) throw Error(ErrorKind::InvalidArgument, "chart_radius must be positive");
  if (alg_.antisymmetry_defect() > 1e-12 || alg_.jacobi_defect() > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "structure constants violate antisymmetry or Jacobi",
                {{"antisymmetry", alg_.antisymmetry_defect()}, {"jacobi", alg_.jacobi_defect()}});
  auto step = alg_.nilpotency_step();
  if (alg_.is_abelian()) {
    law_ = GroupLaw::Abelian;
    bch_order_ = 1;
  } else if (step) {
    if (*step > kMaxBchOrder)
      throw Error(ErrorKind::TruncationOverflow, "nilpotency step exceeds implemented BCH depth", {{"step", *step}});
    law_ = *step == 2 ? GroupLaw::StepTwo : GroupLaw::Nilpotent;
    bch_order_ = *step;
    taylor_degree_ = *step - 1;
  } else if (name_ == "affine2") {
    law_ = GroupLaw::Affine;
    taylor_degree_ = 24;
  } else {
    if (bch_order < 1 || bch_order > kMaxBchOrder)
      throw Error(ErrorKind::TruncationOverflow, "bch_order must be in 1..6 for non-nilpotent algebras",
                  {{"bch_order", bch_order}});
    double q = 2.0 * bracket_constant(alg_) * radius_ / std::log(2.0);
    double tail = q < 1 ? 2.0 * radius_ * std::pow(q, bch_order) / (1.0 - q) : INFINITY;
    if (!(tail < 1e-9))
      throw Error(ErrorKind::InvalidArgument, "chart_radius too large for the truncated BCH series",
                  {{"tail_estimate", tail}, {"chart_radius", radius_}});
    law_ = GroupLaw::Dynkin;
    taylor_degree_ = 24;
  }
}

GroupModel GroupModel::builtin(const std::string& name, double chart_radius, int euclid_dim) {
  if (name == "euclid") return GroupModel("euclid", abelian_algebra(euclid_dim), chart_radius, 1);
  if (name == "heisenberg3") return GroupModel("heisenberg3", heisenberg_algebra(), chart_radius, 2);
  if (name == "affine2") return GroupModel("affine2", affine_algebra(), chart_radius, kMaxBchOrder);
  throw Error(ErrorKind::InvalidArgument, "unknown built-in group '" + name + "'");
}

GroupModel GroupModel::from_json(const nlohmann::json& j) {
  try {
    if (j.contains("builtin")) {
      return builtin(j.at("builtin").get<std::string>(), j.value("chart_radius", 3.6), j.value("d", 1));
    }
    int d = j.at("d").get<int>();
    LieAlgebra alg(d);
    for (const auto& s : j.value("structure", nlohmann::json::array())) {
      int i = s.at("i").get<int>() - 1, jj = s.at("j").get<int>() - 1, k = s.at("k").get<int>() - 1;
      if (i == jj) throw Error(ErrorKind::ParseError, "structure entry with i == j");
      alg.set(i, jj, k, s.at("c").get<double>());
    }
    return GroupModel(j.value("name", std::string("custom")), alg, j.at("chart_radius").get<double>(),
                      j.value("bch_order", kMaxBchOrder));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("group document: ") + e.what());
  }
}

bool GroupModel::is_unimodular() const {
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    double tr = 0;
    for (int k = 0; k < d; ++k) tr += alg_.c(i, k, k);
    if (std::abs(tr) > 1e-14) return false;
  }
  return true;
}

void GroupModel::product(const double* x, const double* y, double* out) const {
  const int d = dim();
  switch (law_) {
    case GroupLaw::Abelian:
      for (int k = 0; k < d; ++k) out[k] = x[k] + y[k];
      return;
    case GroupLaw::StepTwo: {
      for (int k = 0; k < d; ++k) out[k] = x[k] + y[k];
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          double w = 0.5 * (x[i] * y[j] - x[j] * y[i]);
          if (w == 0.0) continue;
          for (int k = 0; k < d; ++k) out[k] += alg_.c(i, j, k) * w;
        }
      return;
    }
    case GroupLaw::Affine: {
      double z1 = x[0] + y[0];
      double z2 = (std::exp(x[0]) * y[1] * phi(y[0]) + x[1] * phi(x[0])) / phi(z1);
      out[0] = z1;
      out[1] = z2;
      return;
    }
    default: {
      Vec z = bch_product(alg_, Vec(x, x + d), Vec(y, y + d), bch_order_);
      for (int k = 0; k < d; ++k) out[k] = z[k];
    }
  }
}

Vec GroupModel::product(const Vec& x, const Vec& y) const {
  Vec z(dim());
  product(x.data(), y.data(), z.data());
  return z;
}

Vec GroupModel::inverse(const Vec& x) const {
  Vec z(x);
  for (double& v : z) v = -v;
  return z;
}

void GroupModel::check_in_chart(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim()) throw Error(ErrorKind::InvalidArgument, "chart point has wrong dimension");
  double r = vec_norm(x);
  if (r > radius_) throw Error(ErrorKind::OutsideChart, "point outside chart", {{"radius", r}, {"chart_radius", radius_}});
}

double GroupModel::haar_density_unchecked(const double* x) const {
  if (law_ == GroupLaw::Abelian) return 1.0;
  if (law_ == GroupLaw::Affine) return x[0] == 0.0 ? 1.0 : -std::expm1(-x[0]) / x[0];
  const int d = dim();
  Eigen::MatrixXd A = alg_.ad(Vec(x, x + d));
  // J(A) = sum_n (-A)^n / (n+1)!
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
  for (int n = 1; n < 200; ++n) {
    P = (-A * P) / static_cast<double>(n + 1);
    J += P;
    if (P.norm() < 1e-18) break;
  }
  return std::abs(J.determinant());
}

double GroupModel::modular_function_unchecked(const double* x) const {
  if (is_unimodular()) return 1.0;
  const int d = dim();
  return std::exp(-alg_.ad(Vec(x, x + d)).trace());
}

double GroupModel::haar_density(const Vec& x) const {
  check_in_chart(x);
  return haar_density_unchecked(x.data());
}

double GroupModel::modular_function(const Vec& x) const {
  check_in_chart(x);
  return modular_function_unchecked(x.data());
}

double GroupModel::chart_modulus(const Vec& x) const {
  check_in_chart(x);
  return vec_norm(x);
}

double GroupModel::cutoff(const double* x) const {
  if (!cutoff_enabled_) return 1.0;
  double s = 0;
  for (int k = 0; k < dim(); ++k) s += x[k] * x[k];
  return smooth_cutoff(std::sqrt(s), inner_radius(), radius_);
}

VectorFieldSet GroupModel::left_vector_fields() const {
  const int d = dim();
  VectorFieldSet out;
  out.d = d;
  out.exact = law_ != GroupLaw::Affine && law_ != GroupLaw::Dynkin;
  out.taylor_degree = taylor_degree_;
  const int maxdeg = std::max(taylor_degree_, 1);
  auto bern = bernoulli(taylor_degree_);
  // V_k(x) = -B(ad_x) e_k = -sum_n B_n/n! ad_x^n e_k, as polynomial vectors.
  std::vector<std::vector<Poly>> coeffs(d, std::vector<Poly>(d));
  for (int k = 0; k < d; ++k) {
    std::vector<Poly> cur(d);
    cur[k][Mono{0, 0, 0}] = 1.0;
    double fact = 1.0;
    for (int n = 0; n <= taylor_degree_; ++n) {
      if (n > 0) {
        fact *= n;
        std::vector<Poly> next(d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            for (int q = 0; q < d; ++q) {
              double c = alg_.c(i, j, q);
              if (c == 0.0) continue;
              for (auto& [a, v] : cur[j]) {
                Mono b = a;
                b[i] += 1;
                next[q][b] += c * v;
              }
            }
        cur = std::move(next);
      }
      double w = -bern[n] / fact;
      if (w == 0.0) continue;
      for (int l = 0; l < d; ++l)
        for (auto& [a, v] : cur[l])
          if (v != 0.0) coeffs[k][l][a] += w * v;
    }
  }
  for (int k = 0; k < d; ++k) {
    WeylOp X(d, std::max(maxdeg, 64));
    for (int l = 0; l < d; ++l) {
      Mono db{0, 0, 0};
      db[l] = 1;
      for (auto& [a, v] : coeffs[k][l]) X.add(a, db, v);
    }
    out.fields.push_back(std::move(X));
  }
  // The coefficient matrix must stay invertible across the chart.
  auto eng = keyed_engine(0x5eed, 17);
  double min_det = INFINITY;
  for (int s = 0; s < 256; ++s) {
    Vec x(d);
    for (double& v : x) v = standard_normal(eng);
    double nx = vec_norm(x);
    double r = radius_ * std::pow(uniform01(eng), 1.0 / d);
    for (double& v : x) v *= r / nx;
    Eigen::MatrixXd V(d, d);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        Mono db{0, 0, 0};
        db[l] = 1;
        V(l, k) = out.fields[k].coefficient_at(db, x.data()).real();
      }
    min_det = std::min(min_det, std::abs(V.determinant()));
  }
  if (!(min_det > 1e-8))
    throw Error(ErrorKind::ChartDegenerate, "vector-field Jacobian is singular in the chart", {{"min_abs_det", min_det}});
  return out;
}

double GroupModel::roundtrip_defect(int samples, std::uint64_t seed) const {
  const int d = dim();
  auto eng = keyed_engine(seed, 0x7217);
  auto draw = [&] {
    Vec x(d);
    for (double& v : x) v = (2.0 * uniform01(eng) - 1.0) * 0.5 * radius_ / std::sqrt(double(d));
    return x;
  };
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    Vec x = draw(), y = draw();
    Vec z = product(x, product(inverse(x), y));
    for (int k = 0; k < d; ++k) worst = std::max(worst, std::abs(z[k] - y[k]));
  }
  return worst;
}

nlohmann::json GroupModel::to_json() const {
  static const char* laws[] = {"abelian", "step_two", "affine_closed_form", "nilpotent_bch", "dynkin"};
  nlohmann::json j = heatlands::to_json(alg_);
  j["name"] = name_;
  j["chart_radius"] = radius_;
  j["inner_radius"] = inner_radius();
  j["bch_order"] = bch_order_;
  j["group_law"] = laws[static_cast<int>(law_)];
  j["unimodular"] = is_unimodular();
  return j;
}

WeylOp spec_as_weyl(const OperatorSpec& spec) {
  WeylOp r(spec.d());
  for (const auto& t : spec.terms()) {
    Mono db{0, 0, 0};
    for (int k : t.alpha) db[k] += 1;
    r.add({0, 0, 0}, db, t.c * ((t.alpha.size() % 2) ? -1.0 : 1.0));
  }
  return r;
}

WeylOp expand_in_fields(const OperatorSpec& spec, const VectorFieldSet& fields) {
  if (spec.d() != fields.d) throw Error(ErrorKind::InvalidArgument, "operator and group dimensions differ");
  const int maxdeg = fields.fields.empty() ? 64 : fields.fields[0].max_x_degree();
  WeylOp r(spec.d(), maxdeg);
  for (const auto& t : spec.terms()) {
    WeylOp p = WeylOp::identity(spec.d(), maxdeg);
    for (auto it = t.alpha.rbegin(); it != t.alpha.rend(); ++it) p = fields.fields[*it].compose(p);
    r = r + p * t.c;
  }
  return r;
}

SplitOperator split_operator(const OperatorSpec& spec, const VectorFieldSet& fields, double tol) {
  SplitOperator s;
  s.m = spec.m();
  s.h0 = spec;
  s.full = expand_in_fields(spec, fields);
  s.h1 = (s.full - spec_as_weyl(spec)).pruned(tol);
  std::map<Mono, int> vanishing;
  for (auto& [k, c] : s.h1.terms()) {
    auto it = vanishing.find(k.second);
    int deg = degree(k.first);
    if (it == vanishing.end() || deg < it->second) vanishing[k.second] = deg;
  }
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  for (auto& [db, found] : vanishing) {
    int required = std::max(0, degree(db) - (s.m - 1));
    ok = ok && found >= required;
    rows.push_back({{"d_pow", std::vector<int>(db.begin(), db.begin() + spec.d())},
                    {"vanishing_order", found},
                    {"required", required}});
  }
  s.effective_order = {{"monomials", rows}, {"ok", ok}};
  if (!ok) throw Error(ErrorKind::EffectiveOrderViolation, "remainder coefficient does not vanish to the required order", s.effective_order);
  return s;
}

}  // namespace heatlands
