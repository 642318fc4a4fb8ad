#include "heatlands/symbolcore.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "heatlands/errors.hpp"

namespace heatlands {

namespace {

const cplx I(0.0, 1.0);

cplx ipow(int n) {
  static const cplx table[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return table[((n % 4) + 4) % 4];
}

double monomial(const MultiIndex& a, std::span<const double> xi) {
  double p = 1.0;
  for (int k : a) p *= xi[k];
  return p;
}

// Point on S^{d-1} from angles (theta in [0,pi], phi in [0,2pi)) or the sign for d = 1.
Vec sphere_point(int d, const Vec& ang) {
  if (d == 1) return {ang[0]};
  if (d == 2) return {std::cos(ang[0]), std::sin(ang[0])};
  return {std::sin(ang[0]) * std::cos(ang[1]), std::sin(ang[0]) * std::sin(ang[1]), std::cos(ang[0])};
}

template <class F>
std::pair<Vec, double> sphere_minimize(int d, int res, double tol, F&& f) {
  if (d > 3) throw Error(ErrorKind::InvalidArgument, "dimension > 3 not supported");
  Vec best_ang;
  double best = std::numeric_limits<double>::infinity();
  if (d == 1) {
    for (double s : {1.0, -1.0}) {
      double v = f(Vec{s});
      if (v < best) {
        best = v;
        best_ang = {s};
      }
    }
    return {best_ang, best};
  }
  const int nt = (d == 2) ? res : res;
  const int np = (d == 2) ? 1 : res;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) {
      Vec ang = (d == 2) ? Vec{2.0 * M_PI * i / res} : Vec{M_PI * i / (res - 1), 2.0 * M_PI * j / res};
      double v = f(sphere_point(d, ang));
      if (v < best) {
        best = v;
        best_ang = ang;
      }
    }
  // Coordinate golden-section refinement in the angles.
  Vec step = (d == 2) ? Vec{2.0 * M_PI / res} : Vec{M_PI / (res - 1), 2.0 * M_PI / res};
  for (int sweep = 0; sweep < 20; ++sweep) {
    double before = best;
    for (std::size_t c = 0; c < best_ang.size(); ++c) {
      Vec ang = best_ang;
      auto g = [&](double a) {
        ang[c] = a;
        return f(sphere_point(d, ang));
      };
      double a = golden_section_min(g, best_ang[c] - step[c], best_ang[c] + step[c], tol);
      double v = g(a);
      if (v < best) {
        best = v;
        best_ang[c] = a;
      }
    }
    for (double& s : step) s *= 0.5;
    if (before - best < tol * 1e-3) break;
  }
  return {sphere_point(d, best_ang), best};
}

}  // namespace

OperatorSpec::OperatorSpec(int d, int m, std::vector<Term> terms) : d_(d), m_(m) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "d must be >= 1");
  if (m < 1 || m % 2 != 0) throw Error(ErrorKind::InvalidArgument, "order m must be a positive even integer");
  std::map<MultiIndex, cplx> merged;
  for (auto& t : terms) {
    if (static_cast<int>(t.alpha.size()) > m)
      throw Error(ErrorKind::InvalidArgument, "coefficient with |alpha| > m");
    for (int k : t.alpha)
      if (k < 0 || k >= d) throw Error(ErrorKind::InvalidArgument, "multi-index entry out of range");
    merged[t.alpha] += t.c;
  }
  bool principal = false;
  for (auto& [a, c] : merged) {
    if (c == cplx(0.0)) continue;
    terms_.push_back({a, c});
    if (static_cast<int>(a.size()) == m) principal = true;
  }
  if (!principal) throw Error(ErrorKind::InvalidArgument, "no nonzero coefficient of order m");
}

cplx OperatorSpec::constant_term() const { return coefficient({}); }

cplx OperatorSpec::coefficient(const MultiIndex& alpha) const {
  for (auto& t : terms_)
    if (t.alpha == alpha) return t.c;
  return 0.0;
}

bool OperatorSpec::has_lower_order() const {
  for (auto& t : terms_)
    if (static_cast<int>(t.alpha.size()) < m_) return true;
  return false;
}

OperatorSpec laplacian_spec(int d, double scale) {
  std::vector<Term> t;
  for (int k = 0; k < d; ++k) t.push_back({{k, k}, -scale});
  return OperatorSpec(d, 2, t);
}

OperatorSpec power_spec(int d, int m, double scale) {
  const int p = m / 2;
  std::vector<Term> terms;
  int count = 1;
  for (int i = 0; i < p; ++i) count *= d;
  for (int code = 0; code < count; ++code) {
    MultiIndex a;
    int c = code;
    for (int i = 0; i < p; ++i) {
      a.push_back(c % d);
      a.push_back(c % d);
      c /= d;
    }
    terms.push_back({a, scale * ((p % 2 == 0) ? 1.0 : -1.0)});
  }
  return OperatorSpec(d, m, terms);
}

cplx eval_symbol(const OperatorSpec& spec, std::span<const double> xi) {
  cplx s = 0.0;
  for (auto& t : spec.terms()) s += t.c * ipow(static_cast<int>(t.alpha.size())) * monomial(t.alpha, xi);
  return s;
}

cplx multiplier(const OperatorSpec& spec, std::span<const double> xi) {
  cplx s = 0.0;
  for (auto& t : spec.terms()) s += t.c * ipow(-static_cast<int>(t.alpha.size())) * monomial(t.alpha, xi);
  return s;
}

double principal_form(const OperatorSpec& spec, std::span<const double> xi) {
  cplx s = 0.0;
  for (auto& t : spec.terms())
    if (static_cast<int>(t.alpha.size()) == spec.m()) s += t.c * monomial(t.alpha, xi);
  double sign = ((spec.m() / 2) % 2 == 0) ? 1.0 : -1.0;
  return sign * s.real();
}

EllipticityReport analyze_ellipticity(const OperatorSpec& spec, int res, double tol) {
  const int d = spec.d(), m = spec.m();
  if (res < 8) throw Error(ErrorKind::InvalidArgument, "sphere_resolution below minimal lattice (8)");
  if (tol <= 0) throw Error(ErrorKind::InvalidArgument, "refine_tol must be positive");
  EllipticityReport r;
  r.d = d;
  r.m = m;
  r.sphere_resolution = res;
  auto [w, mu] = sphere_minimize(d, res, tol, [&](const Vec& xi) { return principal_form(spec, xi); });
  r.mu = mu;
  r.witness = w;
  auto modulus = [&](const Vec& xi) {
    cplx s = 0.0;
    for (auto& t : spec.terms())
      if (static_cast<int>(t.alpha.size()) == m) s += t.c * monomial(t.alpha, xi);
    return std::abs(s);
  };
  r.principal_nonvanishing = sphere_minimize(d, std::min(res, 181), tol, modulus).second > tol;
  if (mu <= tol) return r;
  r.strongly_elliptic = true;
  r.lambda = 0.9 * mu;

  // Triangle bound: Re h >= mu r^m - sum_{|a|<m} |c_a| r^|a|.
  std::vector<std::pair<int, double>> lower;
  for (auto& t : spec.terms())
    if (static_cast<int>(t.alpha.size()) < m) lower.push_back({static_cast<int>(t.alpha.size()), std::abs(t.c)});
  auto tri = [&](double rad) {
    double s = (r.lambda - mu) * std::pow(rad, m);
    for (auto [k, c] : lower) s += c * std::pow(rad, k);
    return s;
  };
  double rstar = 1.0;
  while (tri(rstar) > 0 || tri(2 * rstar) > 0) rstar *= 2;
  rstar *= 2;
  {
    double best = 0.0;
    const int nr = 2000;
    int ib = 0;
    for (int i = 0; i <= nr; ++i) {
      double v = tri(rstar * i / nr);
      if (v > best) {
        best = v;
        ib = i;
      }
    }
    if (ib > 0) {
      double a = rstar * (ib - 1) / nr, b = rstar * std::min(ib + 1, nr) / nr;
      double x = golden_section_min([&](double q) { return -tri(q); }, a, b, 1e-12 * rstar);
      best = std::max(best, tri(x));
    }
    r.omega_triangle = std::max(0.0, best);
  }
  if (lower.empty()) {
    r.omega = 0.0;
    return r;
  }
  // Direct maximization of lambda |xi|^m - Re h(xi) over directions and radii in [0, rstar].
  auto radial_max = [&](const Vec& dir) {
    Vec xi(d);
    auto g = [&](double rad) {
      for (int k = 0; k < d; ++k) xi[k] = rad * dir[k];
      return r.lambda * std::pow(rad, m) - eval_symbol(spec, xi).real();
    };
    const int nr = 200;
    double best = g(0.0);
    int ib = 0;
    for (int i = 1; i <= nr; ++i) {
      double v = g(rstar * i / nr);
      if (v > best) {
        best = v;
        ib = i;
      }
    }
    double a = rstar * std::max(ib - 1, 0) / nr, b = rstar * std::min(ib + 1, nr) / nr;
    double x = golden_section_min([&](double q) { return -g(q); }, a, b, 1e-10 * rstar);
    return std::max(best, g(x));
  };
  int dir_res = (d == 1) ? 2 : (d == 2 ? 360 : 61);
  auto worst = sphere_minimize(d, dir_res, 1e-8, [&](const Vec& dir) { return -radial_max(dir); });
  r.omega = std::max(0.0, -worst.second);
  return r;
}

EllipticityReport certify_ellipticity(const OperatorSpec& spec, int res, double tol) {
  EllipticityReport r = analyze_ellipticity(spec, res, tol);
  if (!r.strongly_elliptic)
    throw Error(ErrorKind::NotStronglyElliptic, "principal form minimum " + std::to_string(r.mu) + " <= tolerance",
                to_json(r));
  return r;
}

OperatorSpec formal_adjoint(const OperatorSpec& spec) {
  std::vector<Term> t;
  for (auto& term : spec.terms()) {
    MultiIndex rev(term.alpha.rbegin(), term.alpha.rend());
    double sign = (term.alpha.size() % 2 == 0) ? 1.0 : -1.0;
    t.push_back({rev, sign * std::conj(term.c)});
  }
  return OperatorSpec(spec.d(), spec.m(), t);
}

OperatorSpec add_specs(const OperatorSpec& a, const OperatorSpec& b) {
  if (a.d() != b.d()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  std::vector<Term> t = a.terms();
  t.insert(t.end(), b.terms().begin(), b.terms().end());
  return OperatorSpec(a.d(), std::max(a.m(), b.m()), t);
}

OperatorSpec scale_spec(const OperatorSpec& a, cplx s) {
  std::vector<Term> t = a.terms();
  for (auto& x : t) x.c *= s;
  return OperatorSpec(a.d(), a.m(), t);
}

OperatorSpec real_part(const OperatorSpec& spec) {
  return scale_spec(add_specs(spec, formal_adjoint(spec)), 0.5);
}

OperatorSpec compose_abelian(const OperatorSpec& a, const OperatorSpec& b) {
  if (a.d() != b.d()) throw Error(ErrorKind::InvalidArgument, "compose_abelian: dimension mismatch");
  std::vector<Term> t;
  for (auto& x : a.terms())
    for (auto& y : b.terms()) {
      MultiIndex c = x.alpha;
      c.insert(c.end(), y.alpha.begin(), y.alpha.end());
      std::sort(c.begin(), c.end());
      t.push_back({c, x.c * y.c});
    }
  return OperatorSpec(a.d(), a.m() + b.m(), t);
}

OperatorSpec transform_basis(const OperatorSpec& spec, const Eigen::MatrixXd& S) {
  const int d = spec.d();
  if (S.rows() != d || S.cols() != d) throw Error(ErrorKind::InvalidArgument, "transform_basis: shape");
  std::vector<Term> out;
  for (auto& term : spec.terms()) {
    const int n = static_cast<int>(term.alpha.size());
    int count = 1;
    for (int i = 0; i < n; ++i) count *= d;
    for (int code = 0; code < count; ++code) {
      MultiIndex l(n);
      int c = code;
      double w = 1.0;
      for (int j = 0; j < n; ++j) {
        l[j] = c % d;
        c /= d;
        w *= S(term.alpha[j], l[j]);
      }
      if (w != 0.0) out.push_back({l, term.c * w});
    }
  }
  return OperatorSpec(d, spec.m(), out);
}

nlohmann::json to_json(const OperatorSpec& spec) {
  nlohmann::json j;
  j["d"] = spec.d();
  j["m"] = spec.m();
  j["coeffs"] = nlohmann::json::array();
  for (auto& t : spec.terms()) {
    nlohmann::json a = nlohmann::json::array();
    for (int k : t.alpha) a.push_back(k + 1);
    j["coeffs"].push_back({{"alpha", a}, {"re", t.c.real()}, {"im", t.c.imag()}});
  }
  return j;
}

OperatorSpec spec_from_json(const nlohmann::json& j) {
  try {
    int d = j.at("d").get<int>();
    int m = j.at("m").get<int>();
    std::vector<Term> terms;
    for (auto& c : j.at("coeffs")) {
      MultiIndex a;
      for (auto& k : c.at("alpha")) a.push_back(k.get<int>() - 1);
      double re = c.value("re", 0.0), im = c.value("im", 0.0);
      terms.push_back({a, cplx(re, im)});
    }
    return OperatorSpec(d, m, terms);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("operator spec: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, std::string("operator spec: ") + e.what());
  }
}

nlohmann::json to_json(const EllipticityReport& r) {
  return {{"d", r.d},
          {"m", r.m},
          {"is_strongly_elliptic", r.strongly_elliptic},
          {"principal_symbol_nonvanishing", r.principal_nonvanishing},
          {"mu", r.mu},
          {"lambda", r.lambda},
          {"omega", r.omega},
          {"omega_triangle_bound", r.omega_triangle},
          {"witness_xi", r.witness},
          {"sphere_resolution", r.sphere_resolution}};
}

}  // namespace heatlands
