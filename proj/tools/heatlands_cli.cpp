#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heatlands/acceptance.hpp"
#include "heatlands/errors.hpp"
#include "heatlands/euclid.hpp"
#include "heatlands/io.hpp"
#include "heatlands/parametrix.hpp"

using namespace heatlands;
using json = nlohmann::json;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2, kResource = 3;

struct Flags {
  std::string config, group, spec, out, only;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tol;
};

// Values from the config file, overridden by flags.
struct RunConfig {
  std::string spec;
  std::string group = "euclid";
  double chart_radius = 3.6;
  int grid_n = 0;
  double grid_length = 0;
  std::vector<double> times{0.25, 0.5, 1.0};
  std::vector<std::string> checks;
  std::string out = "heatlands_out";
  std::uint64_t seed = 7;
  std::string only;
  std::map<std::string, double> tol;
  int terms = 1;
  double memory_cap_mb = 4096;
};

std::map<std::string, double> parse_tols(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& s : items) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--tol expects NAME=VALUE, got " + s);
    double v;
    try {
      v = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "--tol value is not a number: " + s);
    }
    if (!(v > 0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive: " + s);
    out[s.substr(0, eq)] = v;
  }
  return out;
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) {
    json j = read_json_file(f.config);
    try {
      c.spec = j.value("spec", c.spec);
      c.group = j.value("group", c.group);
      c.chart_radius = j.value("chart_radius", c.chart_radius);
      if (j.contains("grid")) {
        c.grid_n = j["grid"].value("n", 0);
        c.grid_length = j["grid"].value("length", 0.0);
      }
      c.times = j.value("times", c.times);
      c.checks = j.value("checks", c.checks);
      c.out = j.value("out", c.out);
      c.seed = j.value("seed", c.seed);
      c.only = j.value("only", c.only);
      c.terms = j.value("terms", c.terms);
      c.memory_cap_mb = j.value("memory_cap_mb", c.memory_cap_mb);
      if (j.contains("tolerances"))
        for (auto& [k, v] : j["tolerances"].items()) c.tol[k] = v.get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, f.config + ": " + e.what());
    }
  }
  if (!f.spec.empty()) c.spec = f.spec;
  if (!f.group.empty()) c.group = f.group;
  if (!f.out.empty()) c.out = f.out;
  if (!f.only.empty()) c.only = f.only;
  if (f.seed) c.seed = *f.seed;
  for (auto& [k, v] : parse_tols(f.tol)) c.tol[k] = v;
  for (auto& [k, v] : c.tol)
    if (!(v > 0)) throw Error(ErrorKind::InvalidArgument, "tolerance " + k + " must be positive");
  return c;
}

double tol_or(const RunConfig& c, const std::string& name, double fallback) {
  auto it = c.tol.find(name);
  return it == c.tol.end() ? fallback : it->second;
}

int cmd_symbol(const RunConfig& c) {
  if (c.spec.empty()) throw Error(ErrorKind::InvalidArgument, "symbol needs --spec");
  OperatorSpec spec = load_spec(c.spec);
  EllipticityReport r = analyze_ellipticity(spec);
  json j = to_json(r);
  j["spec"] = to_json(spec);
  write_json_file(c.out + "/symbol.json", j);
  std::cout << (r.strongly_elliptic ? "strongly elliptic" : "not strongly elliptic") << ", mu = " << r.mu << "\n";
  return r.strongly_elliptic ? kPass : kFail;
}

const std::vector<std::string> kEuclidChecks{"semigroup", "gaussfit", "derivatives"};
const std::vector<std::string> kGroupChecks{"residual", "semigroup", "ledger"};

void check_memory(const RunConfig& c, const LatticeGrid& g, double arrays) {
  double mb = static_cast<double>(g.size()) * 16.0 * arrays / (1 << 20);
  if (mb > c.memory_cap_mb)
    throw Error(ErrorKind::Resource, "grid exceeds the memory cap",
                {{"estimated_mb", mb}, {"memory_cap_mb", c.memory_cap_mb}, {"grid", to_json(g)}});
}

int kernel_euclid(const RunConfig& c, const OperatorSpec& spec, json& report) {
  auto rep = certify_ellipticity(spec);
  double t_max = *std::max_element(c.times.begin(), c.times.end());
  double t_min = *std::min_element(c.times.begin(), c.times.end());
  LatticeGrid g = c.grid_n > 0 ? LatticeGrid::box(spec.d(), c.grid_n, c.grid_length)
                               : choose_grid(spec, rep, 2 * t_max);
  // The box comes from the widest kernel, the spacing from the narrowest.
  while (c.grid_n == 0) {
    try {
      check_alias(spec, t_min, g, 0, kAliasEpsilon);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AliasingRisk) throw;
      g = LatticeGrid::box(spec.d(), e.detail().at("required_n").get<int>(), g.length());
    }
  }
  check_memory(c, g, 8);
  check_alias(spec, t_min, g, 0, kAliasEpsilon);
  report["grid"] = to_json(g);
  report["ellipticity"] = to_json(rep);
  bool ok = true;
  json files = json::array();
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    auto K = synthesize_kernel(spec, rep, c.times[i], g);
    std::string path = c.out + "/kernel_" + std::to_string(i) + ".bin";
    write_binary(K, path);
    files.push_back(path);
  }
  report["kernels"] = files;
  for (const auto& name : c.checks) {
    json r;
    if (name == "semigroup") {
      double t = t_min;
      auto Ks = synthesize_kernel(spec, rep, t, g);
      auto prod = convolve(Ks, Ks);
      auto K2 = synthesize_kernel(spec, rep, 2 * t, g);
      for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] -= K2.values[i];
      double defect = l1_norm(g, prod.values);
      double lim = tol_or(c, "semigroup", spec.m() == 2 ? 1e-6 : 1e-4);
      r = {{"s", t}, {"t", t}, {"defect_l1", defect}, {"tolerance", lim}, {"pass", defect <= lim}};
    } else if (name == "gaussfit") {
      json rows = json::array();
      bool pass = true;
      for (double t : c.times) {
        auto fit = fit_gaussian_envelope(synthesize_kernel(spec, rep, t, g), spec.m(), t, {}, rep.omega);
        pass = pass && fit.b > 0 && std::isfinite(fit.a);
        rows.push_back({{"t", t}, {"a", fit.a}, {"b", fit.b}, {"residual", fit.residual}});
      }
      r = {{"fits", rows}, {"pass", pass}};
    } else {
      std::vector<MultiIndex> derivs{{}};
      for (int a = 0; a < spec.d(); ++a) derivs.push_back({a});
      std::vector<std::vector<double>> sup(derivs.size());
      for (double t : c.times) {
        auto f = synthesize_kernel(spec, rep, t, g, derivs);
        for (std::size_t a = 0; a < derivs.size(); ++a) sup[a].push_back(linf_norm(f[a].values));
      }
      json rows = json::array();
      bool pass = c.times.size() >= 2;
      double lim = tol_or(c, "slope", 0.15);
      for (std::size_t a = 0; a < derivs.size() && c.times.size() >= 2; ++a) {
        double slope = loglog_slope(c.times, sup[a]);
        double expect = -(spec.d() + static_cast<double>(derivs[a].size())) / spec.m();
        pass = pass && std::abs(slope - expect) <= lim;
        rows.push_back({{"order", derivs[a].size()}, {"slope", slope}, {"expected", expect}});
      }
      r = {{"slopes", rows}, {"tolerance", lim}, {"pass", pass}};
    }
    ok = ok && r["pass"].get<bool>();
    report["checks"][name] = r;
  }
  return ok ? kPass : kFail;
}

int kernel_group(const RunConfig& c, const OperatorSpec& spec, json& report) {
  GroupModel model = load_group(c.group, c.chart_radius, spec.d());
  LatticeGrid g = LatticeGrid::box(model.dim(), c.grid_n > 0 ? c.grid_n : 32, c.grid_length > 0 ? c.grid_length : 8.0);
  check_memory(c, g, 64);
  double t_max = *std::max_element(c.times.begin(), c.times.end());
  double t_min = *std::min_element(c.times.begin(), c.times.end());
  ParametrixOptions po;
  po.rule = TimeRule::GaussLegendre;
  po.time_nodes = 10;
  po.t_max = 2 * t_max * 1.05;
  po.alias_time = t_min;
  po.alias_eps = 1e-3;
  Parametrix p(model, spec, g, po);
  report["grid"] = to_json(g);
  report["group"] = model.to_json();
  report["effective_order"] = p.split().effective_order;
  json files = json::array();
  std::vector<CVec> sums;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    sums.push_back(p.partial_sum(c.terms, c.times[i]));
    std::string path = c.out + "/kernel_" + std::to_string(i) + ".bin";
    write_binary(KernelField{g, c.times[i], {}, sums.back()}, path);
    files.push_back(path);
  }
  report["kernels"] = files;
  bool ok = true;
  for (const auto& name : c.checks) {
    json r;
    if (name == "residual") {
      Vec w = p.haar();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] *= p.cutoff_values()[i];
      auto res = heat_residual([&](double t) { return p.partial_sum(c.terms, t); },
                               [&](const CVec& f) { return p.apply_H(f); }, g, w, c.times);
      double lim = tol_or(c, "residual", 1e-2);
      r = res.to_json();
      r["tolerance"] = lim;
      r["pass"] = res.weighted <= lim;
    } else if (name == "semigroup") {
      CVec Ks = p.partial_sum(c.terms, t_min);
      double defect = semigroup_defect(model, g, Ks, Ks, p.partial_sum(c.terms, 2 * t_min));
      double lim = tol_or(c, "semigroup", 1e-2);
      r = {{"s", t_min}, {"t", t_min}, {"defect_l1", defect}, {"tolerance", lim}, {"pass", defect <= lim}};
    } else {
      auto res = iterate_series(p, c.times, std::max(c.terms, 1), 1e-6);
      res.write_ledger_csv(c.out + "/ledger.csv");
      r = res.to_json();
      r["pass"] = true;
    }
    ok = ok && r["pass"].get<bool>();
    report["checks"][name] = r;
  }
  return ok ? kPass : kFail;
}

int cmd_kernel(const RunConfig& c) {
  if (c.spec.empty()) throw Error(ErrorKind::InvalidArgument, "kernel needs --spec");
  if (c.times.empty()) throw Error(ErrorKind::InvalidArgument, "no times configured");
  for (double t : c.times)
    if (!(t > 0)) throw Error(ErrorKind::InvalidArgument, "times must be positive");
  const bool euclid = c.group == "euclid";
  const auto& valid = euclid ? kEuclidChecks : kGroupChecks;
  for (const auto& name : c.checks)
    if (std::find(valid.begin(), valid.end(), name) == valid.end()) {
      std::string list;
      for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
      throw Error(ErrorKind::InvalidArgument, "unknown check '" + name + "'; valid checks: " + list);
    }
  OperatorSpec spec = load_spec(c.spec);
  std::filesystem::create_directories(c.out);
  json report{{"group", c.group}, {"spec", to_json(spec)}, {"times", c.times}, {"checks", json::object()}};
  int code = euclid ? kernel_euclid(c, spec, report) : kernel_group(c, spec, report);
  report["status"] = code == kPass ? "pass" : "fail";
  write_json_file(c.out + "/verification.json", report);
  std::cout << "kernel: " << report["status"].get<std::string>() << "\n";
  return code;
}

int cmd_verify_all(const RunConfig& c) {
  AcceptanceOptions o;
  o.seed = c.seed;
  o.only = c.only;
  o.tol = c.tol;
  auto rep = run_acceptance(o);
  write_json_file(c.out + "/report.json", rep.to_json());
  json timings = rep.timings();
  write_json_file(c.out + "/timings.json", timings);
  std::cout << rep.summary();
  std::cout << "runtime " << timings["total"].get<double>() << " s\n";
  return rep.failures() == 0 ? kPass : kFail;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument:
      return kUsage;
    case ErrorKind::Resource:
      return kResource;
    default:
      return kFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat kernels of elliptic operators on Lie groups"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration");
    sub->add_option("--group", flags.group, "built-in group name or group JSON path");
    sub->add_option("--spec", flags.spec, "operator spec JSON path");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "RNG seed");
    sub->add_option("--only", flags.only, "restrict verify-all to one module");
    sub->add_option("--tol", flags.tol, "tolerance override NAME=VALUE")->take_all();
  };
  auto* symbol = app.add_subcommand("symbol", "certify strong ellipticity of a spec");
  auto* kernel = app.add_subcommand("kernel", "synthesize kernels and run checks");
  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  for (auto* s : {symbol, kernel, verify}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    RunConfig c = resolve(flags);
    if (symbol->parsed()) return cmd_symbol(c);
    if (kernel->parsed()) return cmd_kernel(c);
    return cmd_verify_all(c);
  } catch (const Error& e) {
    std::cerr << "heatlands: " << e.what() << "\n";
    if (!e.detail().is_null() && !e.detail().empty()) std::cerr << e.detail().dump() << "\n";
    return exit_code_for(e);
  } catch (const std::bad_alloc&) {
    std::cerr << "heatlands: out of memory\n";
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "heatlands: " << e.what() << "\n";
    return kFail;
  }
}
