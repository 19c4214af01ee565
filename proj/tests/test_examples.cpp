#include "support.hpp"

using namespace cpc;
using cpc::test::ball_bundle;
using cpc::test::max_abs;
using cpc::test::max_diff;
using cpc::test::perturbed_bundle;

namespace {

const int n = 4;

std::pair<double, double> s_range(const GeometryBundle& b, int count, unsigned seed) {
  double lo = 1e300, hi = -1e300;
  for (const Point& x : interior_points(b.geo, count, seed)) {
    lo = std::min(lo, b.S.value(x));
    hi = std::max(hi, b.S.value(x));
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("ball metric at the origin") {
  const ExampleGeometry ball = unit_ball(2);
  CHECK(ball.kind == "ball");
  const std::vector<double> g = ball.g.values(Point{0, 0, 0, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) CHECK(g[std::size_t(a * n + b)] == (a == b ? -4.0 : 0.0));
}

TEST_CASE("property: defining-function metrics are Hermitean and quasi-Kahler") {
  for (const ExampleGeometry& geo : {unit_ball(2), perturbed_ball(2, 0.1), perturbed_ball(2, -0.2, parse_expression("x1 * y2 + y1", Chart(2)))}) {
    const auto pts = interior_points(geo, 100, 7);
    CHECK(hermitean_residual(geo.g, geo.J, pts) < 1e-12);
    for (const Point& x : pts) {
      const std::vector<double> g = geo.g.values(x);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) CHECK(g[std::size_t(a * n + b)] == g[std::size_t(b * n + a)]);
    }
    CHECK(quasi_kahler_check(geo.g, geo.J, std::vector<Point>(pts.begin(), pts.begin() + 20)).ok);
  }
}

TEST_CASE("grho: domain errors") {
  const ExampleGeometry ball = unit_ball(2);
  CHECK_THROWS_AS(ball.g.values(Point{1.0, 0, 0, 0}), DomainError);
  CHECK_THROWS_AS(ball.g.values(Point{0.9, 0.9, 0, 0}), DomainError);
}

TEST_CASE("perturbed ball: zero perturbation is the ball") {
  const ExampleGeometry a = unit_ball(2), b = perturbed_ball(2, 0.0);
  CHECK(perturbed_ball(2, 0.1).kind == "perturbed-ball");
  for (const Point& x : interior_points(a, 20, 8)) CHECK(max_diff(a.g.values(x), b.g.values(x)) == 0.0);
}

TEST_CASE("perturbed ball: interior scalar curvature varies") {
  const auto [lo, hi] = s_range(perturbed_bundle(), 50, 9);
  CHECK(hi - lo > 1e-2);
}

TEST_CASE("perturbed ball: a linear direction leaves the metric on the ball's orbit") {
  // rho exp(eps x1) differs from the ball's defining function by the modulus
  // of a holomorphic function, so the metric is still of constant scalar
  // curvature 6.
  const GeometryBundle b = derive(perturbed_ball(2, 0.1, Expr::variable(0)));
  const auto [lo, hi] = s_range(b, 20, 10);
  CHECK(hi - lo < 1e-8);
  CHECK(lo == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("ball scalar curvature is m(m+1)") {
  const auto [lo, hi] = s_range(ball_bundle(), 10, 11);
  CHECK(lo == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(hi == doctest::Approx(6.0).epsilon(1e-9));
  const GeometryBundle b3 = derive(unit_ball(3));
  for (const Point& x : interior_points(b3.geo, 3, 12)) CHECK(b3.S.value(x) == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("flat space") {
  const ExampleGeometry f = flat_space(2);
  CHECK(f.kind == "flat");
  CHECK(f.rho.value(Point{0.25, 1, 2, 3}) == 0.25);
  const std::vector<double> g = f.g.values(Point{0.1, 0.2, 0.3, 0.4});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) CHECK(g[std::size_t(a * n + b)] == (a == b ? 1.0 : 0.0));
}

TEST_CASE("interior points respect the probe window") {
  const ExampleGeometry ball = unit_ball(2);
  const auto pts = interior_points(ball, 30, 13, 0.05, 0.9);
  CHECK(pts.size() == 30);
  for (const Point& x : pts) {
    const double r = ball.rho.value(x);
    CHECK(r > 0.05);
    CHECK(r < 0.9);
  }
  CHECK(interior_points(ball, 30, 13, 0.05, 0.9) == pts);
}
