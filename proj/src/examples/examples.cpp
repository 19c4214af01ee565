#include "cpc/examples.hpp"

#include <cmath>
#include <random>

namespace cpc {

namespace {

Jet zero_jet(int n, int order) { return Jet(JetLayout::get(n), order); }

Expr ball_rho(const Chart& chart) {
  Expr r = Expr::constant(1.0);
  for (int i = 0; i < chart.dim(); ++i) r = r - pow(Expr::variable(i), 2.0);
  return r;
}

}  // namespace

TensorField grho_from_rho(const TensorField& rho, const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  const TensorField dth = exterior_derivative(theta(rho, J));
  return TensorField(
      "ll", rho.dim(), 0.0,
      [rho, Jf, dth](std::span<const double> x, int order) {
        const Jet r = rho.jets(x, order + 1).flat(0);
        if (!(r.value() > 0.0)) throw DomainError("metric is defined only where rho > 0", "rho");
        const TensorJets j = Jf.jets(x, order);
        const TensorJets w = dth.jets(x, order);
        const int n = j.dim();
        std::vector<Jet> dr(static_cast<std::size_t>(n)), th(static_cast<std::size_t>(n), zero_jet(n, order));
        for (int a = 0; a < n; ++a) dr[std::size_t(a)] = r.derivative(a);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) th[std::size_t(a)] -= j(b, a) * dr[std::size_t(b)];
        const Jet inv = reciprocal(r.truncated(order));
        const Jet inv2 = inv * inv;
        TensorJets wJ("ll", n, 0.0, order);  // d theta(e_a, J e_b)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            Jet s = zero_jet(n, order);
            for (int i = 0; i < n; ++i) s += w(a, i) * j(i, b);
            wJ(a, b) = s;
          }
        TensorJets g("ll", n, 0.0, order);
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b) {
            Jet s = inv * ((wJ(a, b) + wJ(b, a)) * 0.5);
            s -= inv2 * (dr[std::size_t(a)] * dr[std::size_t(b)] + th[std::size_t(a)] * th[std::size_t(b)]);
            g(b, a) = s;
            g(a, b) = std::move(s);
          }
        return g;
      },
      true);
}

ExampleGeometry from_rho(const Chart& chart, const Expr& rho, const AlmostComplexStructure& J, std::string kind) {
  ExampleGeometry geo;
  geo.chart = chart;
  geo.J = J;
  geo.rho_expr = rho;
  geo.rho = scalar_field(rho, chart.dim());
  geo.g = grho_from_rho(geo.rho, J);
  geo.kind = std::move(kind);
  return geo;
}

ExampleGeometry unit_ball(int m) {
  if (m < 2) throw std::invalid_argument("complex dimension must be at least 2");
  const Chart chart(m);
  return from_rho(chart, ball_rho(chart), standard_J(chart), "ball");
}

ExampleGeometry perturbed_ball(int m, double eps, std::optional<Expr> direction) {
  if (m < 2) throw std::invalid_argument("complex dimension must be at least 2");
  const Chart chart(m);
  const Expr dir = direction ? *direction : pow(Expr::variable(0), 2.0);
  const Expr rho = eps == 0.0 ? ball_rho(chart) : ball_rho(chart) * exp(eps * dir);
  ExampleGeometry geo = from_rho(chart, rho, standard_J(chart), eps == 0.0 ? "ball" : "perturbed-ball");
  // Probe region 0.001 < rho < 0.9.
  for (const Point& p : interior_points(geo, 40, 7, 0.001, 0.9)) {
    const auto [pos, neg] = signature(geo.g.values(p), chart.dim());
    if (pos + neg != chart.dim()) throw DomainError("perturbed metric degenerates on the probe region", "g");
  }
  return geo;
}

ExampleGeometry flat_space(int m, std::optional<Expr> rho) {
  const Chart chart(m);
  const int n = chart.dim();
  std::vector<double> id(std::size_t(n * n), 0.0);
  for (int i = 0; i < n; ++i) id[std::size_t(i * n + i)] = 1.0;
  ExampleGeometry geo;
  geo.chart = chart;
  geo.J = standard_J(chart);
  geo.rho_expr = rho ? *rho : Expr::variable(0);
  geo.rho = scalar_field(*geo.rho_expr, n);
  geo.g = constant_tensor_field("ll", n, 0.0, id);
  geo.kind = "flat";
  return geo;
}

AlmostComplexStructure synthetic_J(const Chart& chart, double eps) {
  const int n = chart.dim();
  const Expr s = eps * Expr::variable(1);
  const Expr den = 1.0 + pow(s, 2.0);
  const Expr c = (1.0 - pow(s, 2.0)) / den;
  const Expr sn = 2.0 * s / den;
  // Q rotates the (x1, x2) plane, i.e. coordinates 0 and 2.
  std::vector<Expr> Q(std::size_t(n * n), Expr::constant(0.0));
  for (int i = 0; i < n; ++i) Q[std::size_t(i * n + i)] = Expr::constant(1.0);
  Q[0] = c;
  Q[std::size_t(2 * n + 2)] = c;
  Q[std::size_t(0 * n + 2)] = -sn;
  Q[std::size_t(2 * n + 0)] = sn;
  std::vector<double> J0(std::size_t(n * n), 0.0);
  for (int k = 0; k < chart.m(); ++k) {
    J0[std::size_t((2 * k + 1) * n + 2 * k)] = 1.0;
    J0[std::size_t((2 * k) * n + 2 * k + 1)] = -1.0;
  }
  // J = Q J0 Q^T
  std::vector<Expr> J(std::size_t(n * n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Expr e = Expr::constant(0.0);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          const double v = J0[std::size_t(i * n + k)];
          if (v != 0.0) e = e + v * Q[std::size_t(a * n + i)] * Q[std::size_t(b * n + k)];
        }
      J[std::size_t(a * n + b)] = e;
    }
  return complex_structure(expr_tensor_field("ul", n, 0.0, J), chart.m());
}

ConnectionField complex_connection(const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  TensorField G(
      "ull", Jf.dim(), 0.0,
      [Jf](std::span<const double> x, int order) {
        const TensorJets j = Jf.jets(x, order + 1);
        const TensorJets dj = pw::partial(j);  // dj(a, c, i) = d_a J^c_i
        const int n = j.dim();
        TensorJets G("ull", n, 0.0, order);
        for (int c = 0; c < n; ++c)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              Jet s = zero_jet(n, order);
              for (int i = 0; i < n; ++i) s += dj(a, c, i) * j(i, b);
              G(c, a, b) = s * 0.5;
            }
        return G;
      },
      true);
  return {G, true, false};
}

std::vector<Point> interior_points(const ExampleGeometry& geo, int count, unsigned seed, double rho_min,
                                   double rho_max) {
  if (!geo.rho.valid()) throw std::invalid_argument("geometry has no defining function");
  std::mt19937 rng(seed);
  std::vector<Point> out;
  const int n = geo.chart.dim();
  for (int tries = 0; int(out.size()) < count; ++tries) {
    if (tries > 1000000) throw std::runtime_error("could not sample interior points");
    Point p(static_cast<std::size_t>(n));
    for (double& v : p) v = 2.0 * (double(rng()) / 4294967296.0) - 1.0;
    const double r = geo.rho.value(p);
    if (r > rho_min && r < rho_max) out.push_back(p);
  }
  return out;
}

GeometryBundle derive(const ExampleGeometry& geo, const CanonicalOptions& options) {
  GeometryBundle b;
  b.geo = geo;
  b.ginv = inverse_metric(geo.g);
  b.nabla = canonical_connection(geo.g, geo.J, options);
  b.R = curvature(b.nabla);
  b.Ric = ricci(b.R);
  b.S = scalar_curvature(geo.g, b.Ric);
  b.P = schouten(b.Ric, geo.J);
  b.dec = decompose_schouten(b.P, geo.J, geo.g);
  const VolumeAndTau vt = volume_density_and_tau(geo.g);
  b.vol = vt.vol;
  b.tau = vt.tau;
  const TensorField tau = b.tau, ginv = b.ginv;
  b.sigma = TensorField(
      "uu", geo.g.dim(), -2.0,
      [tau, ginv](std::span<const double> x, int order) {
        TensorJets s = reciprocal(tau.jets(x, order).flat(0)) * ginv.jets(x, order);
        return s;
      },
      true);
  if (geo.rho.valid()) {
    b.theta = theta(geo.rho, geo.J);
    b.dtheta = exterior_derivative(b.theta);
    b.modified = modified_connection_for_defining_function(b.nabla, geo.rho, geo.J);
  }
  return b;
}

}  // namespace cpc
