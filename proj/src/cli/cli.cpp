#include "cpc/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "cpc/tractor.hpp"

namespace cpc::cli {

using nlohmann::json;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

std::vector<std::vector<std::string>> string_matrix(const json& j, int n, const char* key) {
  if (!j.is_array() || int(j.size()) != n) throw ConfigError(std::string(key) + " must be an n x n array");
  std::vector<std::vector<std::string>> out;
  for (const json& row : j) {
    if (!row.is_array() || int(row.size()) != n) throw ConfigError(std::string(key) + " must be an n x n array");
    std::vector<std::string> r;
    for (const json& e : row) {
      if (e.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << e.get<double>();
        r.push_back(os.str());
      } else if (e.is_string()) {
        r.push_back(e.get<std::string>());
      } else {
        throw ConfigError(std::string(key) + " entries must be numbers or expression strings");
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Expr> parse_matrix(const std::vector<std::vector<std::string>>& m, const Chart& chart) {
  std::vector<Expr> out;
  for (const auto& row : m)
    for (const std::string& s : row) out.push_back(parse_expression(s, chart));
  return out;
}

json diag_json(const Diagnostic& d) {
  json j;
  j["name"] = d.name;
  j["value"] = d.value;
  j["tolerance"] = d.tolerance >= 0.0 ? json(d.tolerance) : json(nullptr);
  return j;
}

json cert_json(const Certificate& c) {
  json j;
  j["name"] = c.name;
  j["anchor"] = c.anchor;
  j["verdict"] = verdict_name(c.verdict);
  j["diagnostics"] = json::array();
  for (const Diagnostic& d : c.diagnostics) j["diagnostics"].push_back(diag_json(d));
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Certificate not_applicable(std::string name, std::string anchor, std::string note) {
  Certificate c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.verdict = Verdict::not_applicable;
  c.note = std::move(note);
  return c;
}

std::vector<Point> sample_points(const RunConfig& cfg, const ExampleGeometry& geo) {
  if (geo.rho.valid()) return interior_points(geo, cfg.interior_points, cfg.seed);
  std::mt19937 rng(cfg.seed);
  std::vector<Point> out;
  for (int k = 0; k < cfg.interior_points; ++k) {
    Point p(std::size_t(geo.chart.dim()));
    for (double& v : p) v = double(rng()) / 4294967296.0 - 0.5;
    out.push_back(p);
  }
  return out;
}

bool integrable(const ExampleGeometry& geo, std::span<const Point> pts) {
  if (geo.J.constant) return true;
  const TensorField N = nijenhuis(geo.J);
  for (const Point& p : pts)
    if (max_abs(N.values(p)) > 1e-10) return false;
  return true;
}

LimitOptions limit_options(const RunConfig& cfg, double tol) { return {cfg.schedule, tol}; }

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"m", "J", "metric", "rho", "C", "patch", "schedule", "tolerances", "seed"}, "config");
  RunConfig cfg;
  cfg.hash = fnv1a_hex(j.dump());
  if (!j.contains("m")) throw ConfigError("config key 'm' is required");
  cfg.m = get_as<int>(j["m"], "m");
  if (cfg.m < 2) throw ConfigError("m must be at least 2");
  const Chart chart(cfg.m);
  const int n = chart.dim();

  if (j.contains("J")) {
    const json& jj = j["J"];
    if (jj.is_string()) {
      if (jj.get<std::string>() != "standard") throw ConfigError("J must be \"standard\" or a matrix");
    } else {
      cfg.J = "matrix";
      cfg.J_matrix = string_matrix(jj, n, "J");
      parse_matrix(cfg.J_matrix, chart);
    }
  }
  if (j.contains("metric")) {
    const json& mj = j["metric"];
    if (mj.is_string()) {
      if (mj.get<std::string>() != "from-rho") throw ConfigError("metric must be \"from-rho\" or {\"components\": ...}");
    } else {
      check_keys(mj, {"components"}, "metric");
      if (!mj.contains("components")) throw ConfigError("metric object needs 'components'");
      cfg.metric = "components";
      cfg.g = string_matrix(mj["components"], n, "metric.components");
      parse_matrix(cfg.g, chart);
    }
  }
  if (j.contains("rho")) {
    cfg.rho = get_as<std::string>(j["rho"], "rho");
    parse_expression(*cfg.rho, chart);
  }
  if (cfg.metric == "from-rho" && !cfg.rho) throw ConfigError("metric \"from-rho\" requires 'rho'");
  if (j.contains("C")) {
    cfg.C = get_as<double>(j["C"], "C");
    if (*cfg.C == 0.0) throw ConfigError("C must be nonzero");
  }
  if (j.contains("seed")) cfg.seed = get_as<unsigned>(j["seed"], "seed");

  cfg.patch.center.assign(std::size_t(n), 0.0);
  cfg.patch.center[0] = 1.0;
  cfg.patch.seed = cfg.seed;
  if (j.contains("patch")) {
    const json& p = j["patch"];
    check_keys(p, {"center", "radius", "count", "seed"}, "patch");
    if (p.contains("center")) {
      cfg.patch.center = get_as<std::vector<double>>(p["center"], "patch.center");
      if (int(cfg.patch.center.size()) != n) throw ConfigError("patch.center must have n entries");
    }
    if (p.contains("radius")) cfg.patch.radius = get_as<double>(p["radius"], "patch.radius");
    if (p.contains("count")) cfg.patch.count = get_as<int>(p["count"], "patch.count");
    if (p.contains("seed")) cfg.patch.seed = get_as<unsigned>(p["seed"], "patch.seed");
    if (cfg.patch.count < 1 || !(cfg.patch.radius >= 0.0)) throw ConfigError("patch needs count >= 1 and radius >= 0");
  }
  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    check_keys(s, {"t0", "K", "order"}, "schedule");
    if (s.contains("t0")) cfg.schedule.t0 = get_as<double>(s["t0"], "schedule.t0");
    if (s.contains("K")) cfg.schedule.K = get_as<int>(s["K"], "schedule.K");
    if (s.contains("order")) cfg.schedule.order = get_as<int>(s["order"], "schedule.order");
    if (!(cfg.schedule.t0 > 0.0) || cfg.schedule.K < 1 || cfg.schedule.order < 1 ||
        cfg.schedule.order > cfg.schedule.K)
      throw ConfigError("schedule needs t0 > 0 and 1 <= order <= K");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    const std::map<std::string, double*> slots{{"hermitean", &cfg.tol.hermitean},
                                               {"quasi_kahler", &cfg.tol.quasi_kahler},
                                               {"metricity", &cfg.tol.metricity},
                                               {"det_spread", &cfg.tol.det_spread},
                                               {"limit", &cfg.tol.limit},
                                               {"limit2", &cfg.tol.limit2},
                                               {"boundary_spread", &cfg.tol.boundary_spread},
                                               {"levi", &cfg.tol.levi}};
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      auto s = slots.find(it.key());
      if (s == slots.end()) throw ConfigError("unknown key '" + it.key() + "' in tolerances");
      *s->second = get_as<double>(it.value(), "tolerances");
      if (!(*s->second > 0.0)) throw ConfigError("tolerances must be positive");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExampleGeometry build_geometry(const RunConfig& cfg) {
  const Chart chart(cfg.m);
  const int n = chart.dim();
  const AlmostComplexStructure J = cfg.J == "standard"
                                       ? standard_J(chart)
                                       : complex_structure(expr_tensor_field("ul", n, 0.0, parse_matrix(cfg.J_matrix, chart)), cfg.m);
  if (cfg.metric == "from-rho") return from_rho(chart, parse_expression(*cfg.rho, chart), J, "custom");
  ExampleGeometry geo;
  geo.chart = chart;
  geo.J = J;
  geo.g = expr_tensor_field("ll", n, 0.0, parse_matrix(cfg.g, chart));
  geo.kind = "custom";
  if (cfg.rho) {
    geo.rho_expr = parse_expression(*cfg.rho, chart);
    geo.rho = scalar_field(*geo.rho_expr, n);
  }
  return geo;
}

std::vector<Ray> config_rays(const RunConfig& cfg, const ExampleGeometry& geo) {
  std::vector<Ray> rays;
  if (!geo.rho.valid()) return rays;
  for (const Point& b : boundary_patch(geo.rho, cfg.patch)) rays.push_back(inward_ray(geo.rho, b));
  return rays;
}

Ray parse_ray(const std::string& spec, const ExampleGeometry& geo) {
  if (!geo.rho.valid()) throw ConfigError("rays need a defining function 'rho'");
  const int n = geo.chart.dim();
  auto numbers = [&](const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(item, &used);
      } catch (const std::exception&) {
        throw ConfigError("ray spec entry '" + item + "' is not a number");
      }
      if (item.find_first_not_of(" \t", used) != std::string::npos)
        throw ConfigError("ray spec entry '" + item + "' is not a number");
      v.push_back(x);
    }
    return v;
  };
  const std::size_t semi = spec.find(';');
  const std::vector<double> b = numbers(spec.substr(0, semi));
  if (int(b.size()) != n) throw ConfigError("ray base must have n coordinates");
  const Point base = project_to_boundary(geo.rho, b);
  const std::string vs = semi == std::string::npos ? "" : spec.substr(semi + 1);
  if (vs.find_first_not_of(" \t") == std::string::npos) return inward_ray(geo.rho, base);
  const std::vector<double> v = numbers(vs);
  if (int(v.size()) != n) throw ConfigError("ray direction must have n coordinates");
  const Jet r = geo.rho.jets(base, 1).flat(0);
  double d = 0.0;
  for (int a = 0; a < n; ++a) d += r.derivative(a).value() * v[std::size_t(a)];
  if (!(d > 0.0)) throw ConfigError("ray direction must point into {rho > 0}");
  return {base, v};
}

ReportResult run_report(const RunConfig& cfg) {
  json report;
  report["meta"] = {{"config-hash", cfg.hash}, {"seed", cfg.seed}, {"version", kVersion}};
  report["certificates"] = json::array();
  report["signature"] = {{"metric", nullptr}, {"levi", nullptr}};
  ReportResult result;
  bool failed = false;
  auto push = [&](const Certificate& c) {
    report["certificates"].push_back(cert_json(c));
    if (c.verdict == Verdict::fail) failed = true;
  };
  try {
    const ExampleGeometry geo = build_geometry(cfg);
    const std::vector<Point> pts = sample_points(cfg, geo);
    const int n = geo.chart.dim();
    const double m = cfg.m;

    // Metric signature over the sample points.
    std::optional<std::pair<int, int>> sig;
    bool varies = false;
    for (const Point& p : pts) {
      const auto s = signature(geo.g.values(p), n);
      if (sig && *sig != s) varies = true;
      sig = s;
    }
    if (sig) report["signature"]["metric"] = varies ? json("varies") : json({sig->first, sig->second});

    {
      Certificate c;
      c.name = "metric-admissibility";
      c.anchor = "quasi-kahler-criterion";
      c.add("hermitean_residual", hermitean_residual(geo.g, geo.J, pts), cfg.tol.hermitean);
      c.add("quasi_kahler_residual", quasi_kahler_check(geo.g, geo.J, pts, cfg.tol.quasi_kahler).max_residual,
            cfg.tol.quasi_kahler);
      c.settle();
      push(c);
    }

    const std::vector<Ray> rays = config_rays(cfg, geo);
    const bool has_boundary = !rays.empty();
    if (has_boundary) {
      std::vector<Point> bpts;
      for (const Ray& r : rays) bpts.push_back(r.base);
      const LeviReport lr = levi_checks(geo.rho, geo.J, bpts, cfg.tol.levi);
      Certificate c;
      c.name = "levi-form";
      c.anchor = "levi-form-nondegeneracy";
      c.add("degenerate", lr.nondegenerate ? 0.0 : 1.0, 0.0);
      c.add("min_abs_eigenvalue", lr.min_abs_eigenvalue);
      c.add("hermitean_residual", lr.hermitean_residual, cfg.tol.hermitean);
      c.add("identity_residual", lr.identity_residual, cfg.tol.hermitean);
      c.add("tangentiality_residual", lr.tangentiality_residual, cfg.tol.hermitean);
      c.settle();
      push(c);
      report["signature"]["levi"] = {lr.p, lr.q};
    } else {
      push(not_applicable("levi-form", "levi-form-nondegeneracy", "no defining function"));
    }

    const GeometryBundle b = derive(geo);

    {
      Certificate c;
      c.name = "metricity";
      c.anchor = "metricity-equation";
      const TensorField res = metricity_residual(b.sigma, b.nabla, geo.J);
      double worst = 0.0;
      for (const Point& p : pts) worst = std::max(worst, max_abs(res.values(p)));
      c.add("max_residual", worst, cfg.tol.metricity);
      c.settle();
      push(c);
    }

    {
      double smax = 0.0;
      for (const Point& p : pts) smax = std::max(smax, std::abs(b.S.value(p)));
      if (smax < 1e-8) {
        push(not_applicable("det-H-scalar-curvature", "determinant-equals-scalar-curvature",
                            "scalar curvature vanishes on the sample points"));
      } else {
        const TensorField d = det_H(splitting_L_sigma(b.sigma, b.nabla, b.P, geo.J));
        double lo = INFINITY, hi = -INFINITY;
        for (const Point& p : pts) {
          const double r = d.value(p) / b.S.value(p);
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
        Certificate c;
        c.name = "det-H-scalar-curvature";
        c.anchor = "determinant-equals-scalar-curvature";
        const double mid = 0.5 * (lo + hi);
        c.add("relative_spread", mid != 0.0 ? (hi - lo) / std::abs(mid) : INFINITY, cfg.tol.det_spread);
        c.add("ratio", mid);
        c.add("expected_ratio", 1.0 / (4.0 * m * (m + 1.0)));
        c.settle();
        push(c);
      }
    }

    const LimitOptions opt1 = limit_options(cfg, cfg.tol.limit), opt2 = limit_options(cfg, cfg.tol.limit2);
    if (!has_boundary) {
      for (const char* name : {"asymptotic-form", "volume-density", "scalar-curvature-boundary", "asymptotic-constant",
                               "schouten-asymptotics", "curvature-asymptotics-1", "curvature-asymptotics-2"})
        push(not_applicable(name, "boundary", "no defining function"));
    } else {
      // C from the config, else from the scalar-curvature constant on the first ray.
      double C = -1.0;
      std::string c_note;
      if (cfg.C) {
        C = *cfg.C;
      } else {
        const LimitEstimate e = prop44_constant(geo.g, b.P, rays.front(), opt1);
        if (std::isfinite(e.value) && e.value != 0.0) C = e.value;
        c_note = "C inferred from the scalar-curvature constant";
      }
      Certificate af = certify_asymptotic_form(geo.g, geo.rho, geo.J, C, rays, opt1);
      if (!c_note.empty()) af.note = af.note.empty() ? c_note : c_note + "; " + af.note;
      push(af);
      push(certify_volume_density(b.tau, geo.rho, rays, opt1));
      const Certificate sc = scalar_boundary_constancy(b.S, rays, opt1);
      push(sc);
      if (sc.verdict == Verdict::not_applicable) {
        push(not_applicable("asymptotic-constant", "scalar-curvature-asymptotic-constant",
                            "boundary scalar curvature vanishes"));
      } else {
        Certificate c;
        c.name = "asymptotic-constant";
        c.anchor = "scalar-curvature-asymptotic-constant";
        double err = 0.0, dev = 0.0;
        for (const Ray& r : rays) {
          const LimitEstimate e = prop44_constant(geo.g, b.P, r, opt1);
          err = std::max(err, std::isfinite(e.error) ? e.error : INFINITY);
          dev = std::max(dev, std::isfinite(e.value) ? std::abs(e.value - C) : INFINITY);
        }
        c.add("max_extrapolation_error", err, cfg.tol.limit);
        c.add("max_deviation_from_C", dev, cfg.tol.limit2);
        c.add("C", C);
        c.settle();
        push(c);
      }
      push(certify_schouten_asymptotics(b.P, geo.g, geo.rho, geo.J, b.modified, rays, opt1));
      Certificate c1 = certify_curvature_asymptotics(b.R, geo.rho, geo.J, rays, 1, opt1);
      c1.name = "curvature-asymptotics-1";
      push(c1);
      if (integrable(geo, pts)) {
        Certificate c2 = certify_curvature_asymptotics(b.R, geo.rho, geo.J, rays, 2, opt2);
        c2.name = "curvature-asymptotics-2";
        push(c2);
      } else {
        push(not_applicable("curvature-asymptotics-2", "curvature-second-order-expansion", "J is not integrable"));
      }
    }

    {
      Certificate c;
      c.name = "einstein-residual";
      c.anchor = "normal-solution";
      const TensorField E = einstein_residual(b.sigma, b.P);
      double worst = 0.0;
      for (const Point& p : pts) worst = std::max(worst, max_abs(E.values(p)));
      c.add("max_residual", worst);
      c.note = "informational: vanishes exactly for Einstein metrics";
      c.settle();
      push(c);
    }

    if (has_boundary)
      push(certify_tracefree_extension(b.nabla, geo.J, rays, opt1));
    else
      push(not_applicable("tracefree-coefficients", "tracefree-connection-extension", "no defining function"));
    result.exit_code = failed ? exit_certificate : exit_ok;
  } catch (const ConfigError&) {
    throw;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    report["error"] = e.what();
    result.exit_code = exit_evaluation;
  }
  result.json = report.dump(2) + "\n";
  return result;
}

namespace {

struct Quantity {
  std::string anchor;
  std::function<std::vector<std::string>(int n)> columns;
  std::function<std::function<std::vector<double>(const Point&)>(const GeometryBundle&, const RunConfig&)> make;
};

std::vector<std::string> index_names(const std::string& stem, int n, int rank) {
  std::vector<std::string> out;
  const std::size_t total = ipow(n, rank);
  for (std::size_t k = 0; k < total; ++k) {
    std::string s = stem + "_";
    std::size_t r = k;
    std::string idx(std::size_t(rank), '0');
    for (int i = rank - 1; i >= 0; --i) {
      idx[std::size_t(i)] = char('0' + r % std::size_t(n));
      r /= std::size_t(n);
    }
    out.push_back(s + idx);
  }
  return out;
}

std::function<std::vector<double>(const Point&)> field_values(const TensorField& f) {
  return [f](const Point& x) { return f.values(x); };
}

std::function<std::vector<double>(const Point&)> field_max(const TensorField& f) {
  return [f](const Point& x) { return std::vector<double>{max_abs(f.values(x))}; };
}

const std::map<std::string, Quantity>& registry() {
  static const std::map<std::string, Quantity> q{
      {"S",
       {"scalar-curvature-constancy", [](int) { return std::vector<std::string>{"S"}; },
        [](const GeometryBundle& b, const RunConfig&) { return field_values(b.S); }}},
      {"g",
       {"defining-function-metric", [](int n) { return index_names("g", n, 2); },
        [](const GeometryBundle& b, const RunConfig&) { return field_values(b.geo.g); }}},
      {"h",
       {"compactness", [](int n) { return index_names("h", n, 2); },
        [](const GeometryBundle& b, const RunConfig& c) {
          return field_values(h_rho_C(b.geo.g, b.geo.rho, c.C.value_or(-1.0), b.geo.J));
        }}},
      {"rho2R-defect",
       {"rank-one-curvature-boundary-value", [](int) { return std::vector<std::string>{"max_abs"}; },
        [](const GeometryBundle& b, const RunConfig&) { return field_max(curvature_defect(b.R, b.geo.rho, b.geo.J, 1)); }}},
      {"rhoP-defect",
       {"asymptotic-einstein-equation", [](int) { return std::vector<std::string>{"max_abs"}; },
        [](const GeometryBundle& b, const RunConfig&) {
          return field_max(schouten_defect(b.P, b.geo.rho, b.geo.J, b.modified));
        }}},
      {"tau-over-rho",
       {"defining-density", [](int) { return std::vector<std::string>{"tau_over_rho"}; },
        [](const GeometryBundle& b, const RunConfig&) {
          const TensorField tau = b.tau, rho = b.geo.rho;
          return std::function<std::vector<double>(const Point&)>(
              [tau, rho](const Point& x) { return std::vector<double>{tau.value(x) / rho.value(x)}; });
        }}},
      {"Gamma-hat",
       {"compactness", [](int n) { return index_names("Gamma", n, 3); },
        [](const GeometryBundle& b, const RunConfig&) { return field_values(b.modified.gamma); }}},
      {"Psi",
       {"tracefree-connection-extension", [](int n) { return index_names("Psi", n, 3); },
        [](const GeometryBundle& b, const RunConfig&) {
          return field_values(tracefree_coefficients(b.nabla, b.geo.J));
        }}},
      {"detH-over-S",
       {"determinant-equals-scalar-curvature", [](int) { return std::vector<std::string>{"detH_over_S"}; },
        [](const GeometryBundle& b, const RunConfig&) {
          const TensorField d = det_H(splitting_L_sigma(b.sigma, b.nabla, b.P, b.geo.J));
          const TensorField S = b.S;
          return std::function<std::vector<double>(const Point&)>(
              [d, S](const Point& x) { return std::vector<double>{d.value(x) / S.value(x)}; });
        }}},
  };
  return q;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void collect_vars(const Expr& e, std::set<int>& out) {
  switch (e.op()) {
    case ExprOp::constant:
      return;
    case ExprOp::variable:
      out.insert(e.var());
      return;
    case ExprOp::neg:
    case ExprOp::pow:
    case ExprOp::exp:
    case ExprOp::log:
    case ExprOp::sqrt:
      collect_vars(e.lhs(), out);
      return;
    default:
      collect_vars(e.lhs(), out);
      collect_vars(e.rhs(), out);
  }
}

}  // namespace

std::vector<std::string> sweep_quantities() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

std::string run_sweep(const RunConfig& cfg, const std::string& quantity, const std::string& ray_spec) {
  const auto it = registry().find(quantity);
  if (it == registry().end()) {
    std::string known;
    for (const std::string& q : sweep_quantities()) known += (known.empty() ? "" : ", ") + q;
    throw ConfigError("unknown quantity '" + quantity + "' (known: " + known + ")");
  }
  const ExampleGeometry geo = build_geometry(cfg);
  const Ray ray = parse_ray(ray_spec, geo);
  const GeometryBundle b = derive(geo);
  const auto f = it->second.make(b, cfg);
  std::ostringstream out;
  out << "# quantity=" << quantity << " anchor=" << it->second.anchor << "\n";
  out << "t";
  for (const std::string& c : it->second.columns(geo.chart.dim())) out << "," << c;
  out << "\n";
  for (double t : cfg.schedule.times()) {
    out << fmt(t);
    for (double v : f(ray.at(t))) out << "," << fmt(v);
    out << "\n";
  }
  return out.str();
}

std::vector<std::string> limit_names() { return {"S", "rho", "tau", "trP", "detH"}; }

std::string run_limits(const RunConfig& cfg, const std::string& text, const std::string& ray_spec) {
  const ExampleGeometry geo = build_geometry(cfg);
  const Expr e = parse_expression(text, geo.chart, limit_names());
  const Ray ray = parse_ray(ray_spec, geo);
  const int n = geo.chart.dim();
  std::set<int> used;
  collect_vars(e, used);
  std::optional<GeometryBundle> b;
  for (int k : used)
    if (k >= n && k != n + 1 && !b) b = derive(geo);
  std::optional<TensorField> detH, trP;
  auto value = [&](const Point& x) {
    std::vector<double> v(x.begin(), x.end());
    v.resize(std::size_t(n) + limit_names().size(), 0.0);
    for (int k : used) {
      if (k < n) continue;
      double& slot = v[std::size_t(k)];
      switch (k - n) {
        case 0: slot = b->S.value(x); break;
        case 1: slot = geo.rho.value(x); break;
        case 2: slot = b->tau.value(x); break;
        case 3:
          if (!trP) trP = metric_trace(geo.g, b->P);
          slot = trP->value(x);
          break;
        case 4:
          if (!detH) detH = det_H(splitting_L_sigma(b->sigma, b->nabla, b->P, geo.J));
          slot = detH->value(x);
          break;
      }
    }
    return evaluate(e, v);
  };
  LimitEstimate l;
  try {
    l = extrapolate_limit(value, ray, cfg.schedule, cfg.tol.limit);
  } catch (const DomainError& err) {
    l.value = NAN;
    l.error = NAN;
    l.converged = false;
  }
  json j;
  j["expr"] = text;
  j["value"] = l.value;
  j["error"] = l.error;
  j["converged"] = l.converged;
  j["t"] = l.t;
  j["samples"] = l.samples;
  return j.dump(2) + "\n";
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certificates for compactified Kahler-type metrics"};
  app.require_subcommand(1);
  std::string config, out_path, quantity, ray, expr;
  CLI::App* report = app.add_subcommand("report", "Run the certificate suite and emit a JSON report");
  report->add_option("--config", config, "JSON config file")->required();
  report->add_option("--out", out_path, "Write the report here instead of stdout");
  CLI::App* sweep = app.add_subcommand("sweep", "Tabulate a quantity along a ray as CSV");
  sweep->add_option("--config", config, "JSON config file")->required();
  sweep->add_option("--quantity", quantity, "Quantity name")->required();
  sweep->add_option("--ray", ray, "Ray spec 'b1,..,bn;v1,..,vn'")->required();
  sweep->add_option("--out", out_path, "Write the table here instead of stdout");
  CLI::App* limits = app.add_subcommand("limits", "Extrapolate a scalar expression to the boundary");
  limits->add_option("--config", config, "JSON config file")->required();
  limits->add_option("--expr", expr, "Expression over coordinates and S, rho, tau, trP, detH")->required();
  limits->add_option("--ray", ray, "Ray spec 'b1,..,bn;v1,..,vn'")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_ok;
    }
    err << e.what() << "\n";
    return exit_config;
  }
  auto emit = [&](const std::string& text) {
    if (out_path.empty()) {
      out << text;
      return true;
    }
    std::ofstream f(out_path, std::ios::binary);
    f << text;
    if (!f) {
      err << "cannot write '" << out_path << "'\n";
      return false;
    }
    return true;
  };
  try {
    const RunConfig cfg = load_config(config);
    if (report->parsed()) {
      const ReportResult r = run_report(cfg);
      if (!emit(r.json)) return exit_config;
      return r.exit_code;
    }
    if (sweep->parsed()) return emit(run_sweep(cfg, quantity, ray)) ? exit_ok : exit_config;
    out << run_limits(cfg, expr, ray);
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    err << "evaluation error: " << e.what() << "\n";
    return exit_evaluation;
  }
}

}  // namespace cpc::cli
