#include "support.hpp"

using namespace cpc;
using cpc::test::ball_bundle;
using cpc::test::box_points;
using cpc::test::max_abs;
using cpc::test::max_diff;
using cpc::test::perturbed_bundle;

namespace {

const int n = 4;

TensorField euclidean() {
  std::vector<double> id(16, 0.0);
  for (int i = 0; i < 4; ++i) id[std::size_t(i * 5)] = 1.0;
  return constant_tensor_field("ll", n, 0.0, id);
}

ConnectionField flat_connection() { return {constant_tensor_field("ull", n, 0.0, std::vector<double>(64, 0.0)), true, true}; }

std::vector<Point> ball_points(int count, unsigned seed) { return interior_points(unit_ball(2), count, seed); }

double at(const std::vector<double>& v, std::initializer_list<int> idx) {
  std::size_t off = 0;
  for (int i : idx) off = off * 4 + std::size_t(i);
  return v[off];
}

// Nijenhuis tensor of coordinate fields from brackets:
// N(X, Y) = [X, Y] + J[JX, Y] + J[X, JY] - [JX, JY], X = d_a, Y = d_b.
std::vector<double> bracket_nijenhuis(const AlmostComplexStructure& J, const Point& x) {
  const TensorJets j = J.J.jets(x, 1);
  auto Jv = [&](int c, int a) { return j(c, a).value(); };
  auto dJ = [&](int i, int c, int a) { return j(c, a).derivative(i).value(); };  // d_i J^c_a
  std::vector<double> N(64, 0.0);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += Jv(c, k) * (-dJ(b, k, a) + dJ(a, k, b));
        for (int i = 0; i < n; ++i) s -= Jv(i, a) * dJ(i, c, b) - Jv(i, b) * dJ(i, c, a);
        N[std::size_t((c * n + a) * n + b)] = s;
      }
  return N;
}

}  // namespace

TEST_CASE("standard J rotates x_k into y_k") {
  const AlmostComplexStructure J = standard_J(Chart(2));
  const std::vector<double> j = J.J.values(Point{0, 0, 0, 0});
  CHECK(at(j, {1, 0}) == 1.0);   // J d_x1 = d_y1
  CHECK(at(j, {0, 1}) == -1.0);  // J d_y1 = -d_x1
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += at(j, {a, i}) * at(j, {i, b});
      CHECK(s == (a == b ? -1.0 : 0.0));
    }
  CHECK(max_abs(nijenhuis(J).values(Point{0.1, 0.2, 0.3, 0.4})) == 0.0);
}

TEST_CASE("synthetic J squares to -1 and leaves the Euclidean metric Hermitean") {
  const AlmostComplexStructure J = synthetic_J(Chart(2), 0.7);
  const auto pts = box_points(n, 20, 2);
  for (const Point& x : pts) {
    const std::vector<double> j = J.J.values(x);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += at(j, {a, i}) * at(j, {i, b});
        CHECK(std::abs(s + (a == b ? 1.0 : 0.0)) < 1e-12);
      }
  }
  CHECK(hermitean_residual(euclidean(), J, pts) < 1e-12);
}

TEST_CASE("nijenhuis: matches the bracket formula and is conjugate linear") {
  const AlmostComplexStructure J = synthetic_J(Chart(2), 0.7);
  const TensorField N = nijenhuis(J);
  double size = 0.0;
  for (const Point& x : box_points(n, 50, 4)) {
    const std::vector<double> v = N.values(x), j = J.J.values(x);
    size = std::max(size, max_abs(v));
    CHECK(max_diff(v, bracket_nijenhuis(J, x)) < 1e-12);
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a) {
        CHECK(at(v, {c, a, a}) == 0.0);
        for (int b = 0; b < n; ++b) {
          double lhs = 0.0, rhs = 0.0, both = 0.0;  // N(J d_a, d_b), -J N(d_a, d_b), N(J d_a, J d_b)
          for (int i = 0; i < n; ++i) {
            lhs += at(j, {i, a}) * at(v, {c, i, b});
            rhs -= at(j, {c, i}) * at(v, {i, a, b});
            for (int k = 0; k < n; ++k) both += at(j, {i, a}) * at(j, {k, b}) * at(v, {c, i, k});
          }
          CHECK(std::abs(lhs - rhs) < 1e-10);
          CHECK(std::abs(both + at(v, {c, a, b})) < 1e-10);
        }
      }
  }
  CHECK(size > 0.1);  // the structure is genuinely non-integrable
}

TEST_CASE("levi-civita: flat, homogeneous and metric") {
  CHECK(max_abs(levi_civita(euclidean()).gamma.values(Point{0.3, 0.1, 0.2, 0.5})) == 0.0);
  const ExampleGeometry ball = unit_ball(2);
  const TensorField g3 = add_fields(ball.g, ball.g, 2.0);  // 3 g
  const ConnectionField lc = levi_civita(ball.g);
  for (const Point& x : ball_points(50, 5)) {
    CHECK(max_diff(lc.gamma.values(x), levi_civita(g3).gamma.values(x)) < 1e-10);
    // oracle: d_a g_bc - Gamma^i_ab g_ic - Gamma^i_ac g_bi
    const TensorJets g = ball.g.jets(x, 1);
    const std::vector<double> G = lc.gamma.values(x);
    double worst = 0.0, scale = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double s = g(b, c).derivative(a).value();
          scale = std::max(scale, std::abs(s));
          for (int i = 0; i < n; ++i) s -= at(G, {i, a, b}) * g(i, c).value() + at(G, {i, a, c}) * g(b, i).value();
          worst = std::max(worst, std::abs(s));
        }
    CHECK(worst <= 1e-10 * std::max(1.0, scale));
  }
}

TEST_CASE("canonical connection: Kahler case is Levi-Civita") {
  const GeometryBundle& b = ball_bundle();
  const ConnectionField lc = levi_civita(b.geo.g);
  for (const Point& x : ball_points(10, 6)) CHECK(max_diff(b.nabla.gamma.values(x), lc.gamma.values(x)) < 1e-12);
  CHECK(max_abs(canonical_connection(euclidean(), standard_J(Chart(2))).gamma.values(Point{0.1, 0.2, 0.3, 0.4})) == 0.0);
}

TEST_CASE("canonical connection: torsion is -N/4 for a non-integrable J") {
  const AlmostComplexStructure J = synthetic_J(Chart(2), 0.7);
  CanonicalOptions opt;
  opt.require_quasi_kahler = false;
  const ConnectionField nabla = canonical_connection(euclidean(), J, opt);
  const TensorField N = nijenhuis(J);
  for (const Point& x : box_points(n, 30, 8)) {
    const std::vector<double> G = nabla.gamma.values(x), v = N.values(x);
    double worst = 0.0;
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          worst = std::max(worst, std::abs(at(G, {c, a, b}) - at(G, {c, b, a}) + 0.25 * at(v, {c, a, b})));
    CHECK(worst < 1e-9);
    CHECK(max_abs(covariant_derivative(nabla, euclidean()).values(x)) < 1e-10);
  }
}

TEST_CASE("canonical connection: preserves g and J for quasi-Kahler pairs") {
  for (const GeometryBundle* b : {&ball_bundle(), &perturbed_bundle()}) {
    const TensorField dg = covariant_derivative(b->nabla, b->geo.g), dJ = covariant_derivative(b->nabla, b->geo.J.J);
    for (const Point& x : interior_points(b->geo, 20, 7)) {
      CHECK(max_abs(dg.values(x)) <= 1e-10 * std::max(1.0, max_abs(b->geo.g.values(x))));
      CHECK(max_abs(dJ.values(x)) < 1e-10);
    }
  }
}

TEST_CASE("quasi-Kahler criterion") {
  const AlmostComplexStructure J = standard_J(Chart(2));
  const auto pts = ball_points(20, 9);
  const QuasiKahlerResult ball = quasi_kahler_check(unit_ball(2).g, J, pts);
  CHECK(ball.ok);
  CHECK(ball.max_residual < 1e-10);
  const QuasiKahlerResult flat = quasi_kahler_check(euclidean(), J, pts);
  CHECK(flat.ok);
  CHECK(flat.max_residual == 0.0);
  std::vector<Expr> c(16, Expr::constant(0.0));
  for (int i = 0; i < 4; ++i) c[std::size_t(i * 5)] = exp(Expr::variable(0));
  const QuasiKahlerResult conf = quasi_kahler_check(expr_tensor_field("ll", n, 0.0, c), J, pts);
  CHECK_FALSE(conf.ok);
  CHECK(conf.max_residual > 0.1);
}

TEST_CASE("curvature: flat, antisymmetric, complex linear, Bianchi") {
  CHECK(max_abs(curvature(flat_connection()).values(Point{0.2, 0.1, 0, 0})) == 0.0);
  const GeometryBundle& b = ball_bundle();
  const std::vector<double> j = b.geo.J.J.values(Point{0, 0, 0, 0});
  for (const Point& x : ball_points(10, 10)) {
    const std::vector<double> R = b.R.values(x);
    double anti = 0.0, cl = 0.0, bianchi = 0.0;
    for (int a = 0; a < n; ++a)
      for (int bb = 0; bb < n; ++bb)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            anti = std::max(anti, std::abs(at(R, {a, bb, c, d}) + at(R, {bb, a, c, d})));
            double l = 0.0, r = 0.0;
            for (int i = 0; i < n; ++i) {
              l += at(R, {a, bb, c, i}) * at(j, {i, d});
              r += at(R, {a, bb, i, d}) * at(j, {c, i});
            }
            cl = std::max(cl, std::abs(l - r));
            bianchi = std::max(bianchi, std::abs(at(R, {a, bb, c, d}) + at(R, {bb, d, c, a}) + at(R, {d, a, c, bb})));
          }
    CHECK(anti == 0.0);
    CHECK(cl < 1e-10);
    CHECK(bianchi < 1e-10);
  }
}

TEST_CASE("curvature: agrees with finite differences of the connection") {
  const GeometryBundle& b = ball_bundle();
  const Point x{0.1, 0.2, -0.15, 0.05};
  const double h = 1e-4;
  std::vector<std::vector<double>> dG(4);
  for (int i = 0; i < n; ++i) {
    Point xp = x, xm = x;
    xp[std::size_t(i)] += h;
    xm[std::size_t(i)] -= h;
    const std::vector<double> gp = b.nabla.gamma.values(xp), gm = b.nabla.gamma.values(xm);
    dG[std::size_t(i)].resize(64);
    for (std::size_t k = 0; k < 64; ++k) dG[std::size_t(i)][k] = (gp[k] - gm[k]) / (2 * h);
  }
  const std::vector<double> G = b.nabla.gamma.values(x), R = b.R.values(x);
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int bb = 0; bb < n; ++bb)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double r = at(dG[std::size_t(a)], {c, bb, d}) - at(dG[std::size_t(bb)], {c, a, d});
          for (int e = 0; e < n; ++e) r += at(G, {c, a, e}) * at(G, {e, bb, d}) - at(G, {c, bb, e}) * at(G, {e, a, d});
          worst = std::max(worst, std::abs(r - at(R, {a, bb, c, d})));
        }
  CHECK(worst < 1e-5);
}

TEST_CASE("ricci: independent oracle from the volume form") {
  // For a Kahler metric Ric_ab = -(H_ab + J^i_a J^j_b H_ij) / 4 with H the
  // coordinate Hessian of log|det g|.
  for (const GeometryBundle* b : {&ball_bundle(), &perturbed_bundle()}) {
    for (const Point& x : interior_points(b->geo, 10, 11)) {
      const TensorJets g = b->geo.g.jets(x, 2);
      Jet det = pw::determinant(g);
      if (det.value() < 0.0) det *= -1.0;
      const Jet ld = log(det);
      const std::vector<double> j = b->geo.J.J.values(x), Ric = b->Ric.values(x);
      double worst = 0.0, scale = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
          double o = ld.derivative(a).derivative(c).value();
          for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) o += at(j, {i, a}) * at(j, {k, c}) * ld.derivative(i).derivative(k).value();
          o *= -0.25;
          scale = std::max(scale, std::abs(o));
          worst = std::max(worst, std::abs(o - at(Ric, {a, c})));
        }
      CHECK(worst <= 1e-10 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("ricci: the ball metric is Einstein with constant 3/2") {
  const GeometryBundle& b = ball_bundle();
  CHECK(max_abs(ricci(curvature(flat_connection())).values(Point{0, 0, 0, 0})) == 0.0);
  double lo = 1e300, hi = -1e300, herm = 0.0;
  const std::vector<double> j = b.geo.J.J.values(Point{0, 0, 0, 0});
  for (const Point& x : ball_points(20, 12)) {
    const std::vector<double> Ric = b.Ric.values(x), g = b.geo.g.values(x);
    for (std::size_t k = 0; k < 16; ++k)
      if (std::abs(g[k]) > 1e-3) {
        lo = std::min(lo, Ric[k] / g[k]);
        hi = std::max(hi, Ric[k] / g[k]);
      }
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        double s = at(Ric, {a, c});
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) s -= at(j, {i, a}) * at(j, {k, c}) * at(Ric, {i, k});
        herm = std::max(herm, std::abs(s));
      }
  }
  CHECK(hi - lo < 1e-8);
  CHECK(lo == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(herm < 1e-10);
}

TEST_CASE("scalar curvature: ball value, flat value, scaling") {
  const GeometryBundle& b = ball_bundle();
  double lo = 1e300, hi = -1e300;
  for (const Point& x : ball_points(20, 13)) {
    lo = std::min(lo, b.S.value(x));
    hi = std::max(hi, b.S.value(x));
  }
  CHECK(hi - lo < 1e-8);
  CHECK(lo == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(scalar_curvature(euclidean(), ricci(curvature(flat_connection()))).value(Point{0, 0, 0, 0}) == 0.0);
  // g -> 3g: same connection and Ricci, S -> S / 3.
  const TensorField g3 = add_fields(b.geo.g, b.geo.g, 2.0);
  const TensorField S3 = scalar_curvature(g3, b.Ric);
  for (const Point& x : ball_points(5, 14)) CHECK(S3.value(x) == doctest::Approx(b.S.value(x) / 3.0).epsilon(1e-12));
}

TEST_CASE("schouten: normalization and decomposition") {
  const AlmostComplexStructure J = standard_J(Chart(2));
  const Point x{0.2, -0.1, 0.3, 0.1};
  CHECK(max_abs(schouten(constant_tensor_field("ll", n, 0.0, std::vector<double>(16, 0.0)), J).values(x)) == 0.0);
  // Hermitean symmetric Ric: P = Ric / (2(m + 1)) = Ric / 6.
  const std::vector<double> h{2, 0, 1, 0.5, 0, 2, -0.5, 1, 1, -0.5, 3, 0, 0.5, 1, 0, 3};
  const std::vector<double> P = schouten(constant_tensor_field("ll", n, 0.0, h), J).values(x);
  for (std::size_t k = 0; k < 16; ++k) CHECK(P[k] == doctest::Approx(h[k] / 6.0).epsilon(1e-15));
  // The ball is Einstein: P circ vanishes.
  for (const Point& y : ball_points(10, 15)) CHECK(max_abs(ball_bundle().dec.P_circ.values(y)) < 1e-9);
}

TEST_CASE("property: Schouten decomposition invariants on a non-Einstein metric") {
  const GeometryBundle& b = perturbed_bundle();
  const std::vector<double> j = b.geo.J.J.values(Point{0, 0, 0, 0});
  double pcirc = 0.0;
  for (const Point& x : interior_points(b.geo, 20, 16)) {
    const std::vector<double> P = b.dec.P.values(x), be = b.dec.beta.values(x), pp = b.dec.P_plus.values(x),
                              pm = b.dec.P_minus.values(x), pc = b.dec.P_circ.values(x), gi = b.ginv.values(x);
    for (std::size_t k = 0; k < 16; ++k) CHECK(P[k] == doctest::Approx(be[k] + pp[k] + pm[k]).epsilon(1e-14));
    double herm = 0.0, tr = 0.0;
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        double s = at(pp, {a, c});
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) s -= at(j, {i, a}) * at(j, {k, c}) * at(pp, {i, k});
        herm = std::max(herm, std::abs(s));
        tr += at(gi, {a, c}) * at(pc, {a, c});
      }
    CHECK(herm <= 1e-12 * std::max(1.0, max_abs(pp)));
    CHECK(std::abs(tr) < 1e-10);
    pcirc = std::max(pcirc, max_abs(pc));
  }
  CHECK(pcirc > 1e-3);
}

TEST_CASE("weyl candidate: trace vanishes and it is antisymmetric") {
  const TensorField Wflat = weyl_candidate(curvature(flat_connection()),
                                           constant_tensor_field("ll", n, 0.0, std::vector<double>(16, 0.0)),
                                           standard_J(Chart(2)));
  CHECK(max_abs(Wflat.values(Point{0.1, 0, 0, 0})) == 0.0);
  for (const GeometryBundle* b : {&ball_bundle(), &perturbed_bundle()}) {
    const TensorField W = weyl_candidate(b->R, b->P, b->geo.J);
    for (const Point& x : interior_points(b->geo, 20, 17)) {
      const std::vector<double> w = W.values(x);
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
          double t = 0.0;
          for (int i = 0; i < n; ++i) t += at(w, {i, a, i, c});
          CHECK(std::abs(t) < 1e-9);
          for (int bb = 0; bb < n; ++bb)
            for (int d = 0; d < n; ++d) CHECK(at(w, {a, bb, c, d}) == -at(w, {bb, a, c, d}));
        }
    }
  }
}

TEST_CASE("volume density and tau") {
  const VolumeAndTau flat = volume_density_and_tau(euclidean());
  CHECK(flat.vol.value(Point{0.3, 0, 0, 0}) == 1.0);
  CHECK(flat.tau.value(Point{0.3, 0, 0, 0}) == 1.0);
  const GeometryBundle& b = ball_bundle();
  const Point o{0, 0, 0, 0};
  const std::vector<double> g = b.geo.g.values(o);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) CHECK(at(g, {a, c}) == doctest::Approx(a == c ? -4.0 : 0.0).epsilon(1e-15));
  CHECK(b.vol.value(o) == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(b.tau.value(o) == doctest::Approx(std::pow(16.0, -1.0 / 3.0)).epsilon(1e-14));
  CHECK(b.tau.value(o) == doctest::Approx(0.39685).epsilon(1e-5));
  CHECK(b.vol.weight() == -6.0);
  CHECK(b.tau.weight() == 2.0);
  const TensorField dtau = density_covariant_derivative(b.nabla, b.tau);
  for (const Point& x : ball_points(30, 18)) CHECK(max_abs(dtau.values(x)) < 1e-10);
}

TEST_CASE("density derivative: weight zero, volume form, transformation law") {
  const ExampleGeometry ball = unit_ball(2);
  const ConnectionField lc = levi_civita(ball.g);
  const Expr e = parse_expression("exp(x1 * y2) + x2^2", ball.chart);
  const TensorField s0 = scalar_field(e, n, 0.0);
  const VolumeAndTau vt = volume_density_and_tau(ball.g);
  const TensorField dv = density_covariant_derivative(lc, vt.vol);
  for (const Point& x : ball_points(20, 19)) {
    const std::vector<double> d = density_covariant_derivative(lc, s0).values(x);
    for (int a = 0; a < n; ++a) CHECK(d[std::size_t(a)] == doctest::Approx(differentiate(e, a).evaluate(x)).epsilon(1e-13));
    CHECK(max_abs(dv.values(x)) <= 1e-12 * std::max(1.0, vt.vol.value(x)));
  }
}

TEST_CASE("property: density derivatives follow the c-projective change law") {
  const GeometryBundle& b = ball_bundle();
  const Expr e = parse_expression("2 + x1 * y1 - x2^2", b.geo.chart);
  const auto pts = ball_points(10, 20);
  for (unsigned trial = 0; trial < 10; ++trial) {
    const TensorField Y = cpc::test::random_one_form(n, 100 + trial);
    const ConnectionField hat = cproj_change(b.nabla, Y, b.geo.J);
    for (double w : {-6.0, -2.0, 0.0, 2.0}) {
      const TensorField s = scalar_field(e, n, w);
      const TensorField d0 = density_covariant_derivative(b.nabla, s), d1 = density_covariant_derivative(hat, s);
      for (const Point& x : pts) {
        const std::vector<double> a = d0.values(x), c = d1.values(x), y = Y.values(x);
        const double sv = s.value(x);
        for (int i = 0; i < n; ++i) CHECK(std::abs(c[std::size_t(i)] - a[std::size_t(i)] - w * y[std::size_t(i)] * sv) < 1e-10);
      }
    }
  }
}

TEST_CASE("errors: singular metrics and non-Hermitean metrics are refused") {
  const TensorField zero = constant_tensor_field("ll", n, 0.0, std::vector<double>(16, 0.0));
  CHECK_THROWS(inverse_metric(zero).values(Point{0, 0, 0, 0}));
  std::vector<double> nh(16, 0.0);
  nh[0] = 1;
  nh[5] = 2;
  nh[10] = 1;
  nh[15] = 1;
  CHECK_THROWS(canonical_connection(constant_tensor_field("ll", n, 0.0, nh), standard_J(Chart(2))).gamma.values(Point{0, 0, 0, 0}));
}
