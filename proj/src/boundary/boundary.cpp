#include "cpc/boundary.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cpc {

namespace {

Jet zero_jet(int n, int order) { return Jet(JetLayout::get(n), order); }

double at2(const std::vector<double>& v, int n, int i, int j) { return v[std::size_t(i * n + j)]; }

std::vector<double> gradient(const TensorField& rho, std::span<const double> x) {
  const Jet r = rho.jets(x, 1).flat(0);
  std::vector<double> g(static_cast<std::size_t>(rho.dim()));
  for (int a = 0; a < rho.dim(); ++a) g[std::size_t(a)] = r.derivative(a).value();
  return g;
}

// rho_a rho_b + theta_a theta_b at the requested order.
TensorJets levi_square(const Jet& r, const TensorJets& j, int order) {
  const int n = j.dim();
  std::vector<Jet> dr(static_cast<std::size_t>(n)), th(static_cast<std::size_t>(n), zero_jet(n, order));
  for (int a = 0; a < n; ++a) dr[std::size_t(a)] = r.derivative(a).truncated(order);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) th[std::size_t(a)] -= j(b, a).truncated(order) * dr[std::size_t(b)];
  TensorJets out("ll", n, 0.0, order);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Jet s = dr[std::size_t(a)] * dr[std::size_t(b)] + th[std::size_t(a)] * th[std::size_t(b)];
      out(b, a) = s;
      out(a, b) = std::move(s);
    }
  return out;
}

// Evaluates and extrapolates every component; failures become diagnostics.
struct RaySweep {
  std::vector<std::vector<LimitEstimate>> limits;  // [ray][component]
  int failures = 0;
  std::string first_failure;
  double max_error = 0.0;
  double max_abs_limit = 0.0;
  int nonconverged = 0;
};

RaySweep sweep(const std::function<std::vector<double>(const Point&)>& f, std::span<const Ray> rays,
               const LimitOptions& opt) {
  RaySweep s;
  for (const Ray& ray : rays) {
    try {
      s.limits.push_back(extrapolate_components(f, ray, opt.schedule, opt.tol));
    } catch (const std::exception& e) {
      if (s.failures++ == 0) s.first_failure = e.what();
      continue;
    }
    for (const LimitEstimate& l : s.limits.back()) {
      const double err = std::isfinite(l.error) ? l.error : std::numeric_limits<double>::max();
      s.max_error = std::max(s.max_error, err);
      if (std::isfinite(l.value)) s.max_abs_limit = std::max(s.max_abs_limit, std::abs(l.value));
      if (!l.converged) ++s.nonconverged;
    }
  }
  return s;
}

void add_sweep(Certificate& c, const RaySweep& s, const std::string& prefix, double tol) {
  c.add(prefix + "max_extrapolation_error", s.max_error, tol);
  c.add(prefix + "evaluation_failures", double(s.failures), 0.0);
  if (s.failures > 0 && c.note.empty()) c.note = s.first_failure;
}

std::function<std::vector<double>(const Point&)> values_of(const TensorField& f) {
  return [f](const Point& x) { return f.values(x); };
}

}  // namespace

TensorField theta(const TensorField& rho, const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  return TensorField("l", rho.dim(), 0.0, [rho, Jf](std::span<const double> x, int order) {
    const Jet r = rho.jets(x, order + 1).flat(0);
    const TensorJets j = Jf.jets(x, order);
    const int n = j.dim();
    TensorJets t("l", n, 0.0, order);
    for (int a = 0; a < n; ++a) {
      Jet s = zero_jet(n, order);
      for (int b = 0; b < n; ++b) s -= j(b, a) * r.derivative(b);
      t(a) = s;
    }
    return t;
  });
}

TensorField exterior_derivative(const TensorField& alpha) {
  if (alpha.pattern() != "l") throw std::invalid_argument("exterior_derivative expects a one-form");
  return TensorField("ll", alpha.dim(), alpha.weight(), [alpha](std::span<const double> x, int order) {
    const TensorJets d = pw::partial(alpha.jets(x, order + 1));
    const int n = d.dim();
    TensorJets out("ll", n, d.weight(), order);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        Jet s = d(a, b) - d(b, a);
        out(b, a) = -s;
        out(a, b) = std::move(s);
      }
    return out;
  });
}

// ---- rays and limits ----

std::vector<double> Schedule::times() const {
  std::vector<double> t;
  for (int k = 0; k <= K; ++k) t.push_back(std::ldexp(t0, -k));
  return t;
}

Point Ray::at(double t) const {
  Point p = base;
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += t * direction[i];
  return p;
}

LimitEstimate extrapolate_limit(std::span<const double> t, std::span<const double> f, int order, double tol) {
  if (t.size() != f.size() || t.empty()) throw std::invalid_argument("extrapolate_limit: sample size mismatch");
  std::vector<std::size_t> idx(t.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(t[a]) < std::abs(t[b]); });
  const std::size_t d = std::min<std::size_t>(std::size_t(std::max(order, 0)), t.size() - 1);
  LimitEstimate r;
  r.value = NAN;
  r.error = d > 0 ? INFINITY : 0.0;
  // Neville's scheme at 0 on each run of d + 1 consecutive samples; row k of
  // the triangle holds the degree-k extrapolations. Runs further out trade
  // truncation error for less roundoff, so the run with the smallest error
  // estimate wins; ties go to the run nearest 0.
  std::vector<double> ts(d + 1), p(d + 1);
  for (std::size_t w = 0; w + d < t.size(); ++w) {
    bool finite = true;
    for (std::size_t i = 0; i <= d; ++i) {
      ts[i] = t[idx[w + i]];
      p[i] = f[idx[w + i]];
      finite = finite && std::isfinite(p[i]);
    }
    if (!finite) continue;
    double prev = p[0];  // ends as the degree d - 1 value
    for (std::size_t k = 1; k <= d; ++k) {
      prev = p[0];
      for (std::size_t i = 0; i + k <= d; ++i) p[i] = (ts[i + k] * p[i] - ts[i] * p[i + 1]) / (ts[i + k] - ts[i]);
    }
    const double err = d > 0 ? std::abs(p[0] - prev) : 0.0;
    if (std::isnan(r.value) || err < r.error) {
      r.value = p[0];
      r.error = err;
    }
    if (d == 0) break;
  }
  r.t.assign(t.begin(), t.end());
  r.samples.assign(f.begin(), f.end());
  r.converged = std::isfinite(r.value) && std::isfinite(r.error) && r.error < tol;
  return r;
}

LimitEstimate extrapolate_limit(const std::function<double(const Point&)>& f, const Ray& ray, const Schedule& s,
                                double tol) {
  const std::vector<double> t = s.times();
  std::vector<double> v;
  for (double ti : t) v.push_back(f(ray.at(ti)));
  return extrapolate_limit(t, v, s.order, tol);
}

std::vector<LimitEstimate> extrapolate_components(const std::function<std::vector<double>(const Point&)>& f,
                                                  const Ray& ray, const Schedule& s, double tol) {
  const std::vector<double> t = s.times();
  std::vector<std::vector<double>> v;
  for (double ti : t) v.push_back(f(ray.at(ti)));
  std::vector<LimitEstimate> out;
  if (v.empty()) return out;
  std::vector<double> col(t.size());
  for (std::size_t c = 0; c < v[0].size(); ++c) {
    for (std::size_t k = 0; k < t.size(); ++k) col[k] = v[k][c];
    out.push_back(extrapolate_limit(t, col, s.order, tol));
  }
  return out;
}

Point project_to_boundary(const TensorField& rho, const Point& p) {
  Point x = p;
  for (int it = 0; it < 60; ++it) {
    const double r = rho.value(x);
    if (std::abs(r) < 1e-12) return x;
    const std::vector<double> g = gradient(rho, x);
    double nn = 0.0;
    for (double v : g) nn += v * v;
    if (nn < 1e-12) throw DomainError("defining function has vanishing gradient", "d rho");
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= r * g[i] / nn;
  }
  throw DomainError("projection to the boundary did not converge", "rho");
}

Ray inward_ray(const TensorField& rho, const Point& boundary_point) {
  std::vector<double> g = gradient(rho, boundary_point);
  double nn = 0.0;
  for (double v : g) nn += v * v;
  nn = std::sqrt(nn);
  if (nn < 1e-6) throw DomainError("defining function has vanishing gradient", "d rho");
  for (double& v : g) v /= nn;
  return {boundary_point, g};
}

std::vector<Point> boundary_patch(const TensorField& rho, const Patch& patch) {
  std::mt19937 rng(patch.seed);
  std::vector<Point> out;
  for (int k = 0; k < patch.count; ++k) {
    Point p = patch.center;
    for (double& v : p) v += patch.radius * (2.0 * (double(rng()) / 4294967296.0) - 1.0);
    out.push_back(project_to_boundary(rho, p));
  }
  return out;
}

// ---- Levi form ----

std::vector<double> horizontal_frame(std::span<const double> drho, std::span<const double> th, int n) {
  std::vector<std::vector<double>> u;
  for (std::span<const double> w : {drho, th}) {
    std::vector<double> v(w.begin(), w.end());
    for (const auto& e : u) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d += v[std::size_t(i)] * e[std::size_t(i)];
      for (int i = 0; i < n; ++i) v[std::size_t(i)] -= d * e[std::size_t(i)];
    }
    double nn = 0.0;
    for (double x : v) nn += x * x;
    nn = std::sqrt(nn);
    if (nn < 1e-12) continue;
    for (double& x : v) x /= nn;
    u.push_back(std::move(v));
  }
  std::vector<double> Z(std::size_t(n * n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      double v = i == k ? 1.0 : 0.0;
      for (const auto& e : u) v -= e[std::size_t(i)] * e[std::size_t(k)];
      Z[std::size_t(i * n + k)] = v;
    }
  return Z;
}

LeviReport levi_checks(const TensorField& rho, const AlmostComplexStructure& J, std::span<const Point> boundary,
                       double threshold) {
  const int n = rho.dim();
  const TensorField th = theta(rho, J);
  const TensorField dth = exterior_derivative(th);
  const TensorField N = nijenhuis(J);
  LeviReport rep;
  rep.nondegenerate = true;
  rep.min_abs_eigenvalue = std::numeric_limits<double>::infinity();
  bool first = true;
  for (const Point& x : boundary) {
    const std::vector<double> dr = gradient(rho, x);
    double gn = 0.0;
    for (double v : dr) gn = std::max(gn, std::abs(v));
    if (gn < 1e-6) throw DomainError("cannot build a frame: d rho vanishes", "d rho");
    const std::vector<double> t = th.values(x);
    const std::vector<double> w = dth.values(x);
    const std::vector<double> j = J.J.values(x);
    const std::vector<double> Nv = N.values(x);
    // Orthonormal basis of H from a full QR of [d rho, theta].
    Eigen::MatrixXd A(n, 2);
    for (int i = 0; i < n; ++i) {
      A(i, 0) = dr[std::size_t(i)];
      A(i, 1) = t[std::size_t(i)];
    }
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ() * Eigen::MatrixXd::Identity(n, n);
    const int h = n - 2;
    Eigen::MatrixXd B = Q.rightCols(h);
    Eigen::MatrixXd W(n, n), Jm(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        W(a, b) = at2(w, n, a, b);
        Jm(a, b) = at2(j, n, a, b);
      }
    const double scale = std::max(W.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::MatrixXd L = B.transpose() * W * Jm * B;
    L = 0.5 * (L + L.transpose()).eval();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L, Eigen::EigenvaluesOnly).eigenvalues();
    const double mn = ev.cwiseAbs().minCoeff() / scale;
    rep.min_abs_eigenvalue = std::min(rep.min_abs_eigenvalue, mn);
    if (W.cwiseAbs().maxCoeff() == 0.0 || mn <= threshold) rep.nondegenerate = false;
    int p = 0, q = 0;
    for (int i = 0; i < h; ++i)
      if (std::abs(ev(i)) > threshold * scale) (ev(i) > 0 ? p : q)++;
    if (first) {
      rep.p = p / 2;
      rep.q = q / 2;
      first = false;
    } else if (rep.p != p / 2 || rep.q != q / 2) {
      rep.p = rep.q = -1;  // signature changes across the patch
    }
    const Eigen::MatrixXd JB = Jm * B;
    const Eigen::MatrixXd herm = JB.transpose() * W * JB - B.transpose() * W * B;
    rep.hermitean_residual = std::max(rep.hermitean_residual, herm.cwiseAbs().maxCoeff() / scale);
    // Identity over coordinate vectors, and tangentiality over H.
    Eigen::MatrixXd dN(n, n);  // d rho(N(e_a, e_b))
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += dr[std::size_t(c)] * Nv[std::size_t((c * n + a) * n + b)];
        dN(a, b) = s;
      }
    const Eigen::MatrixXd id = Jm.transpose() * W + W * Jm - dN;
    rep.identity_residual = std::max(rep.identity_residual, id.cwiseAbs().maxCoeff() / scale);
    const Eigen::MatrixXd tang = B.transpose() * dN * B;
    rep.tangentiality_residual = std::max(rep.tangentiality_residual, tang.cwiseAbs().maxCoeff() / scale);
  }
  if (boundary.empty()) rep.nondegenerate = false;
  return rep;
}

// ---- asymptotic form ----

TensorField h_rho_C(const TensorField& g, const TensorField& rho, double C, const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  return TensorField("ll", g.dim(), 0.0, [g, rho, Jf, C](std::span<const double> x, int order) {
    const Jet r = rho.jets(x, order + 1).flat(0);
    if (!(r.value() > 0.0)) throw DomainError("h is defined only where rho > 0", "rho");
    TensorJets h = r.truncated(order) * g.jets(x, order);
    const TensorJets sq = levi_square(r, Jf.jets(x, order), order);
    const Jet k = reciprocal(r.truncated(order)) * C;
    h -= k * sq;
    return h;
  });
}

TensorField h_rescaled(const TensorField& h, const TensorField& f, const TensorField& rho_hat, double C,
                       const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  const TensorField th = theta(rho_hat, J);
  return TensorField("ll", h.dim(), 0.0, [h, f, rho_hat, th, Jf, C](std::span<const double> x, int order) {
    const Jet fj = f.jets(x, order + 1).flat(0);
    const Jet r = rho_hat.jets(x, order + 1).flat(0);
    const TensorJets t = th.jets(x, order);
    const TensorJets j = Jf.jets(x, order);
    const int n = t.dim();
    std::vector<Jet> df(static_cast<std::size_t>(n)), dr(static_cast<std::size_t>(n)),
        dfJ(static_cast<std::size_t>(n), zero_jet(n, order));
    for (int a = 0; a < n; ++a) {
      df[std::size_t(a)] = fj.derivative(a);
      dr[std::size_t(a)] = r.derivative(a);
    }
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) dfJ[std::size_t(a)] += df[std::size_t(i)] * j(i, a);
    TensorJets out = exp(fj.truncated(order)) * h.jets(x, order);
    const Jet rr = r.truncated(order);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Jet s = dfJ[std::size_t(a)] * t(b) + t(a) * dfJ[std::size_t(b)];
        s -= df[std::size_t(a)] * dr[std::size_t(b)] + dr[std::size_t(a)] * df[std::size_t(b)];
        s += rr * (df[std::size_t(a)] * df[std::size_t(b)] + dfJ[std::size_t(a)] * dfJ[std::size_t(b)]);
        out(a, b) += s * C;
      }
    return out;
  });
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "fail";
}

void Certificate::settle() {
  if (verdict == Verdict::not_applicable) return;
  verdict = Verdict::pass;
  for (const Diagnostic& d : diagnostics)
    if (d.exceeds()) verdict = Verdict::fail;
}

double Certificate::get(const std::string& n) const {
  for (const Diagnostic& d : diagnostics)
    if (d.name == n) return d.value;
  throw std::out_of_range("no diagnostic named " + n);
}

Certificate certify_asymptotic_form(const TensorField& g, const TensorField& rho, const AlmostComplexStructure& J,
                                    double C, std::span<const Ray> rays, const LimitOptions& opt) {
  Certificate cert;
  cert.name = "asymptotic-form";
  cert.anchor = "compactness";
  const int n = g.dim();
  const TensorField h = h_rho_C(g, rho, C, J);
  const TensorField th = theta(rho, J);
  const TensorField dth = exterior_derivative(th);
  const TensorField Jf = J.J;
  const RaySweep hs = sweep(values_of(h), rays, opt);
  // h(xi, J zeta) - C d theta(xi, zeta) for coordinate xi and horizontal zeta.
  auto defect = [=](const Point& x) {
    const std::vector<double> hv = h.values(x);
    const std::vector<double> w = dth.values(x);
    const std::vector<double> j = Jf.values(x);
    const std::vector<double> Z = horizontal_frame(gradient(rho, x), th.values(x), n);
    std::vector<double> out;
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int b = 0; b < n; ++b) {
          double Jz = 0.0;
          for (int i = 0; i < n; ++i) Jz += at2(j, n, b, i) * at2(Z, n, i, k);
          s += at2(hv, n, a, b) * Jz - C * at2(w, n, a, b) * at2(Z, n, b, k);
        }
        out.push_back(s);
      }
    return out;
  };
  const RaySweep ds = sweep(defect, rays, opt);
  add_sweep(cert, hs, "h_", opt.tol);
  cert.add("max_boundary_defect", ds.failures ? std::numeric_limits<double>::max() : ds.max_abs_limit, opt.tol);
  cert.add("C", C);
  cert.settle();
  return cert;
}

Certificate certify_volume_density(const TensorField& tau, const TensorField& rho, std::span<const Ray> rays,
                                   const LimitOptions& opt) {
  Certificate cert;
  cert.name = "volume-density";
  cert.anchor = "defining-density";
  const RaySweep s = sweep([&](const Point& x) { return std::vector<double>{tau.value(x) / rho.value(x)}; }, rays, opt);
  add_sweep(cert, s, "", opt.tol);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, mn = lo;
  for (const auto& r : s.limits) {
    lo = std::min(lo, r[0].value);
    hi = std::max(hi, r[0].value);
    mn = std::min(mn, std::abs(r[0].value));
  }
  if (s.limits.empty()) mn = 0.0;
  cert.add("reciprocal_min_abs_limit", mn > 0.0 ? 1.0 / mn : std::numeric_limits<double>::max(), 1e8);
  if (!s.limits.empty()) {
    cert.add("limit_min", lo);
    cert.add("limit_max", hi);
  }
  cert.settle();
  return cert;
}

Certificate scalar_boundary_constancy(const TensorField& S, std::span<const Ray> rays, const LimitOptions& opt) {
  Certificate cert;
  cert.name = "scalar-boundary-constancy";
  cert.anchor = "scalar-curvature-constancy";
  const RaySweep s = sweep([&](const Point& x) { return std::vector<double>{S.value(x)}; }, rays, opt);
  add_sweep(cert, s, "", opt.tol);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, mn = lo;
  for (const auto& r : s.limits) {
    lo = std::min(lo, r[0].value);
    hi = std::max(hi, r[0].value);
    mn = std::min(mn, std::abs(r[0].value));
  }
  if (s.limits.empty()) {
    cert.settle();
    return cert;
  }
  cert.add("boundary_min", lo);
  cert.add("boundary_max", hi);
  cert.add("spread", hi - lo, opt.tol);
  if (s.failures == 0 && std::max(std::abs(lo), std::abs(hi)) < opt.tol) {
    cert.verdict = Verdict::not_applicable;
    cert.note = "boundary value of the scalar curvature vanishes";
    return cert;
  }
  cert.add("reciprocal_min_abs_limit", mn > 0.0 ? 1.0 / mn : std::numeric_limits<double>::max(), 1e8);
  cert.settle();
  return cert;
}

LimitEstimate prop44_constant(const TensorField& g, const TensorField& P, const Ray& ray, const LimitOptions& opt) {
  const TensorField tr = metric_trace(g, P);
  const double m = g.dim() / 2;
  return extrapolate_limit(
      [&](const Point& x) {
        const double t = tr.value(x);
        if (t == 0.0) throw DomainError("trace of the Schouten tensor vanishes", "g^ij P_ij");
        return -0.5 * m / t;
      },
      ray, opt.schedule, opt.tol);
}

TensorJets rank_one_curvature(const TensorJets& phi, const TensorJets& J) {
  const int n = phi.dim();
  const int order = std::min(phi.order(), J.order());
  // A(a, b) = J^i_a phi_bi
  TensorJets A("ll", n, 0.0, order);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Jet s = zero_jet(n, order);
      for (int i = 0; i < n; ++i) s += J(i, a) * phi(b, i);
      A(a, b) = s;
    }
  TensorJets out("llul", n, 0.0, order);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Jet s = zero_jet(n, order);
          if (c == a) s += phi(b, d);
          if (c == b) s -= phi(a, d);
          s -= (A(a, b) - A(b, a)) * J(c, d);
          for (int i = 0; i < n; ++i) s -= (J(c, a) * phi(b, i) - J(c, b) * phi(a, i)) * J(i, d);
          out(b, a, c, d) = -s;
          out(a, b, c, d) = std::move(s);
        }
  return out;
}

TensorField rank_one_curvature(const TensorField& phi, const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  return TensorField("llul", phi.dim(), phi.weight(), [phi, Jf](std::span<const double> x, int order) {
    const TensorJets p = phi.jets(x, order);
    const TensorJets j = Jf.jets(x, order);
    const int n = p.dim();
    double worst = 0.0, scale = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) s += j(i, a).value() * j(k, b).value() * p(i, k).value();
        worst = std::max({worst, std::abs(s - p(a, b).value()), std::abs(p(a, b).value() - p(b, a).value())});
        scale = std::max(scale, std::abs(p(a, b).value()));
      }
    if (worst > 1e-10 * std::max(scale, 1.0)) throw DomainError("phi is not symmetric Hermitean", "phi");
    return rank_one_curvature(p, j);
  });
}

TensorField curvature_defect(const TensorField& R, const TensorField& rho, const AlmostComplexStructure& J, int order_) {
  if (order_ != 1 && order_ != 2) throw std::invalid_argument("curvature asymptotics are of order 1 or 2");
  const TensorField Jf = J.J;
  const TensorField dth = exterior_derivative(theta(rho, J));
  return TensorField("llul", R.dim(), 0.0, [R, rho, Jf, dth, order_](std::span<const double> x, int order) {
    const Jet r = rho.jets(x, order + 1).flat(0);
    if (!(r.value() > 0.0)) throw DomainError("defect is defined only where rho > 0", "rho");
    const TensorJets j = Jf.jets(x, order);
    const TensorJets Cq = rank_one_curvature(levi_square(r, j, order), j);
    const Jet rr = r.truncated(order);
    if (order_ == 1) {
      TensorJets D = (rr * rr) * R.jets(x, order);
      D += Cq * 0.25;
      return D;
    }
    TensorJets D = rr * R.jets(x, order);
    D += (reciprocal(rr) * 0.25) * Cq;
    const TensorJets w = dth.jets(x, order);
    const int n = w.dim();
    // Jw(b, d) = J^i_b dth_di, and Q(b, d) = J^i_b dth_ij J^j_d.
    TensorJets Jw("ll", n, 0.0, order), Q("ll", n, 0.0, order);
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        Jet s = zero_jet(n, order);
        for (int i = 0; i < n; ++i) s += j(i, b) * w(d, i);
        Jw(b, d) = s;
      }
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        Jet s = zero_jet(n, order);
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) s += (j(i, b) * w(i, k)) * j(k, d);
        Q(b, d) = s;
      }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            Jet X = w(a, b) * j(c, d) * -1.0;
            if (c == a) X += Jw(b, d) * 0.5;
            if (c == b) X -= Jw(a, d) * 0.5;
            X += (j(c, a) * Q(b, d) - j(c, b) * Q(a, d)) * 0.5;
            D(a, b, c, d) -= X * 0.5;
          }
    return D;
  });
}

Certificate certify_curvature_asymptotics(const TensorField& R, const TensorField& rho, const AlmostComplexStructure& J,
                                          std::span<const Ray> rays, int order, const LimitOptions& opt) {
  Certificate cert;
  cert.name = order == 1 ? "curvature-asymptotics-1" : "curvature-asymptotics-2";
  cert.anchor = order == 1 ? "rank-one-curvature-boundary-value" : "curvature-second-order-expansion";
  const RaySweep s = sweep(values_of(curvature_defect(R, rho, J, order)), rays, opt);
  add_sweep(cert, s, "", opt.tol);
  cert.add("max_boundary_defect", s.failures ? std::numeric_limits<double>::max() : s.max_abs_limit, opt.tol);
  cert.settle();
  return cert;
}

TensorField schouten_defect(const TensorField& P, const TensorField& rho, const AlmostComplexStructure& J,
                            const ConnectionField& modified) {
  const TensorField Jf = J.J;
  const TensorField G = modified.gamma;
  return TensorField("ll", P.dim(), 0.0, [P, rho, Jf, G](std::span<const double> x, int order) {
    const Jet r = rho.jets(x, order + 2).flat(0);
    if (!(r.value() > 0.0)) throw DomainError("defect is defined only where rho > 0", "rho");
    const TensorJets j = Jf.jets(x, order);
    const Jet rr = r.truncated(order);
    TensorJets D = rr * P.jets(x, order);
    D += (reciprocal(rr) * 0.25) * levi_square(r, j, order);
    const TensorJets gam = G.jets(x, order);
    const int n = D.dim();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Jet h = r.derivative(a).derivative(b);
        for (int c = 0; c < n; ++c) h -= gam(c, a, b) * r.derivative(c).truncated(order);
        D(a, b) -= h * 0.5;
      }
    return D;
  });
}

Certificate certify_schouten_asymptotics(const TensorField& P, const TensorField& g, const TensorField& rho,
                                         const AlmostComplexStructure& J, const ConnectionField& modified,
                                         std::span<const Ray> rays, const LimitOptions& opt) {
  Certificate cert;
  cert.name = "schouten-asymptotics";
  cert.anchor = "asymptotic-einstein-equation";
  const RaySweep a = sweep(values_of(schouten_defect(P, rho, J, modified)), rays, opt);
  add_sweep(cert, a, "", opt.tol);
  cert.add("max_boundary_defect", a.failures ? std::numeric_limits<double>::max() : a.max_abs_limit, opt.tol);
  const SchoutenDecomposition dec = decompose_schouten(P, J, g);
  const TensorField beta = dec.beta, Pm = dec.P_minus, Pc = dec.P_circ;
  const RaySweep b = sweep(
      [&](const Point& x) {
        std::vector<double> v = beta.values(x);
        const double r = rho.value(x);
        for (double pm : Pm.values(x)) v.push_back(r * pm);
        return v;
      },
      rays, opt);
  add_sweep(cert, b, "beta_rhoPminus_", opt.tol);
  const RaySweep c = sweep(values_of(Pc), rays, opt);
  add_sweep(cert, c, "Pcirc_", opt.tol);
  cert.add("Pcirc_max_boundary_value", c.max_abs_limit);
  cert.settle();
  return cert;
}

Certificate certify_vanishing_limit(const TensorField& field, std::span<const Ray> rays, const LimitOptions& opt) {
  Certificate cert;
  cert.name = "vanishing-limit";
  const RaySweep s = sweep(values_of(field), rays, opt);
  add_sweep(cert, s, "", opt.tol);
  cert.add("max_boundary_value", s.failures ? std::numeric_limits<double>::max() : s.max_abs_limit, opt.tol);
  cert.settle();
  return cert;
}

Certificate certify_tracefree_extension(const ConnectionField& nabla, const AlmostComplexStructure& J,
                                        std::span<const Ray> rays, const LimitOptions& opt) {
  Certificate cert;
  cert.name = "tracefree-coefficients";
  cert.anchor = "tracefree-connection-extension";
  const TensorField Psi = tracefree_coefficients(nabla, J);
  const TensorField G = nabla.gamma;
  add_sweep(cert, sweep(values_of(Psi), rays, opt), "psi_", opt.tol);
  const RaySweep r = sweep(
      [Psi, G](const Point& x) {
        double p = 0.0, g = 0.0;
        for (double v : Psi.values(x)) p = std::max(p, std::abs(v));
        for (double v : G.values(x)) g = std::max(g, std::abs(v));
        return std::vector<double>{g > 0.0 ? p / g : 0.0};
      },
      rays, opt);
  cert.add("ratio_max_boundary_value", r.failures ? std::numeric_limits<double>::max() : r.max_abs_limit, opt.tol);
  // Growth of max|Gamma| over the last halving of t; about 2 for a 1/rho blow-up.
  double growth = 0.0;
  const std::vector<double> t = opt.schedule.times();
  for (const Ray& ray : rays) {
    try {
      double a = 0.0, b = 0.0;
      for (double v : G.values(ray.at(t[t.size() - 2]))) a = std::max(a, std::abs(v));
      for (double v : G.values(ray.at(t.back()))) b = std::max(b, std::abs(v));
      if (a > 0.0) growth = std::max(growth, b / a);
    } catch (const std::exception&) {
    }
  }
  cert.add("raw_coefficient_growth", growth);
  cert.settle();
  return cert;
}

Certificate certify_asymptotically_parallel_N(const TensorField& N, const ConnectionField& nabla,
                                              std::span<const Ray> rays, const LimitOptions& opt) {
  Certificate cert = certify_vanishing_limit(covariant_derivative(nabla, N), rays, opt);
  cert.name = "asymptotically-parallel-nijenhuis";
  cert.anchor = "asymptotically-parallel-nijenhuis";
  return cert;
}

}  // namespace cpc
