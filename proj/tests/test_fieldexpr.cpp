#include <cstring>

#include "support.hpp"

using namespace cpc;
using cpc::test::box_points;

namespace {

const Chart chart2(2);

Expr P(const std::string& s) { return parse_expression(s, chart2); }

// One expression per supported node type, each defined on [-0.5, 0.5]^4.
std::vector<std::string> node_samples() {
  return {"3.5",       "x1",          "x1 + y2",     "x1 - y1",         "x1 * y1 * x2", "x1 / (2 + y2)",
          "-x2",       "(1 + x1)^2.5", "exp(x1*y1)", "log(2 + x1 - y2)", "sqrt(3 + x2)", "(2 + x1)^-1.5"};
}

}  // namespace

TEST_CASE("parse: ball defining function") {
  const Expr e = P("1 - x1^2 - y1^2 - x2^2 - y2^2");
  CHECK(e.op() == ExprOp::sub);
  CHECK(e.lhs().op() != ExprOp::constant);  // depth >= 2
  const Point zero{0, 0, 0, 0};
  CHECK(e.evaluate(zero) == 1.0);
  CHECK(e.evaluate(Point{1, 0, 0, 0}) == 0.0);
  CHECK(e.evaluate(Point{0.5, 0.5, 0.5, 0.5}) == 0.0);
}

TEST_CASE("parse: exp at the origin and log outside its domain") {
  CHECK(P("exp(0.1*x1)").evaluate(Point{0, 0, 0, 0}) == 1.0);
  CHECK_THROWS_AS(P("log(x1)").evaluate(Point{-1, 0, 0, 0}), DomainError);
  try {
    P("1 + log(x1)").evaluate(Point{-1, 0, 0, 0});
  } catch (const DomainError& e) {
    CHECK(e.node().find("log") != std::string::npos);
  }
}

TEST_CASE("parse: errors carry positions") {
  try {
    P("1 + z3");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  try {
    P("x1 ^ y1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("exponent") != std::string::npos);
  }
  CHECK_THROWS_AS(P("(x1 + 1"), ParseError);
  CHECK_THROWS_AS(P("x1 +"), ParseError);
  CHECK_THROWS_AS(P("x3"), ParseError);  // m = 2 has no x3
  CHECK_THROWS_AS(P("sin(x1)"), ParseError);
}

TEST_CASE("parse: signed exponents and unary minus") {
  const Point x{0.3, -0.2, 0.1, 0.4};
  CHECK(P("(2 + x1)^-1.5").evaluate(x) == doctest::Approx(std::pow(2.3, -1.5)).epsilon(1e-15));
  CHECK(P("-x1^2").evaluate(x) == doctest::Approx(-0.09).epsilon(1e-15));
  CHECK(P("2e-1 * y2").evaluate(x) == doctest::Approx(0.08).epsilon(1e-15));
}

TEST_CASE("differentiate: examples") {
  for (const Point& x : box_points(4, 10, 3)) {
    CHECK(differentiate(P("x1^2"), 0).evaluate(x) == doctest::Approx(2 * x[0]).epsilon(1e-15));
    CHECK(differentiate(P("1 - x1^2 - y1^2 - x2^2 - y2^2"), 3).evaluate(x) ==
          doctest::Approx(-2 * x[3]).epsilon(1e-15));
  }
}

TEST_CASE("differentiate: mixed partials commute") {
  const Expr e = P("exp(x1*y1)");
  const Expr a = differentiate(differentiate(e, 0), 1), b = differentiate(differentiate(e, 1), 0);
  for (const Point& x : box_points(4, 20, 5)) CHECK(std::abs(a.evaluate(x) - b.evaluate(x)) <= 1e-14);
}

TEST_CASE("property: derivatives match central differences for every node type") {
  const double h = 1e-4;
  for (const std::string& s : node_samples()) {
    const Expr e = P(s);
    for (const Point& x : box_points(4, 100, 11, 0.5)) {
      for (int i = 0; i < 4; ++i) {
        Point xp = x, xm = x;
        xp[std::size_t(i)] += h;
        xm[std::size_t(i)] -= h;
        const double fd = (e.evaluate(xp) - e.evaluate(xm)) / (2 * h);
        const double ex = differentiate(e, i).evaluate(x);
        CHECK_MESSAGE(std::abs(fd - ex) <= 1e-6 * std::max(1.0, std::abs(ex)), s);
      }
    }
  }
}

TEST_CASE("property: printed form re-parses to the same function") {
  for (const std::string& s : node_samples()) {
    const Expr e = P(s);
    const Expr r = P(e.str(chart2));
    for (const Point& x : box_points(4, 100, 13, 0.5)) CHECK(r.evaluate(x) == e.evaluate(x));
  }
}

TEST_CASE("derivative_tensor: ball examples") {
  const Expr rho = P("1 - x1^2 - y1^2 - x2^2 - y2^2");
  const std::vector<double> d1 = derivative_tensor(rho, Point{1, 0, 0, 0}, 1, 4);
  CHECK(d1 == std::vector<double>{-2, 0, 0, 0});
  const Point x{0.3, 0.1, -0.7, 0.2};
  const std::vector<double> d2 = derivative_tensor(rho, x, 2, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(d2[std::size_t(i * 4 + j)] == (i == j ? -2.0 : 0.0));
  CHECK(cpc::test::max_abs(derivative_tensor(rho, x, 3, 4)) == 0.0);
}

TEST_CASE("property: derivative_tensor is exactly permutation symmetric") {
  const Expr e = P("exp(x1*y1) * log(2 + x2) / (3 + y2^2)");
  const Point x{0.2, -0.3, 0.4, 0.1};
  const std::vector<double> d = derivative_tensor(e, x, 3, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        const double v = d[std::size_t((i * 4 + j) * 4 + k)];
        CHECK(std::memcmp(&v, &d[std::size_t((j * 4 + k) * 4 + i)], sizeof v) == 0);
        CHECK(std::memcmp(&v, &d[std::size_t((k * 4 + j) * 4 + i)], sizeof v) == 0);
      }
}

TEST_CASE("jets: Taylor coefficients agree with symbolic derivatives") {
  const Expr e = P("exp(x1*y1) * sqrt(2 + x2) - (1 + y2)^3");
  const ExprJets J(e, 4);
  const Point x{0.1, 0.2, -0.3, 0.4};
  const Jet j = J.at(x, 3);
  CHECK(j.value() == doctest::Approx(e.evaluate(x)).epsilon(1e-14));
  const std::vector<double> d2 = derivative_tensor(e, x, 2, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      CHECK(j.derivative(a).derivative(b).value() == doctest::Approx(d2[std::size_t(a * 4 + b)]).epsilon(1e-12));
}

TEST_CASE("jets: arithmetic is consistent with composition") {
  const Expr e = P("log(2 + x1 * y2)"), f = P("1 + x2^2");
  const Point x{0.3, -0.1, 0.5, 0.2};
  const Jet je = ExprJets(e, 4).at(x, 4), jf = ExprJets(f, 4).at(x, 4);
  const Jet prod = je * jf, quo = je / jf;
  const Jet pe = ExprJets(e * f, 4).at(x, 4), qe = ExprJets(e / f, 4).at(x, 4);
  for (std::size_t k = 0; k < prod.size(); ++k) {
    CHECK(prod[k] == doctest::Approx(pe[k]).epsilon(1e-12));
    CHECK(quo[k] == doctest::Approx(qe[k]).epsilon(1e-12));
  }
}

TEST_CASE("tape: shared subexpressions and batch faults") {
  const Expr a = P("exp(x1*y1)");
  const Expr b = a * a + a;
  const Tape t({b, a});
  CHECK(t.outputs() == 2);
  const Point x{0.3, 0.2, 0, 0};
  const std::vector<double> v = t.evaluate(x);
  CHECK(v[0] == doctest::Approx(b.evaluate(x)).epsilon(1e-15));
  const Tape l({P("log(x1)")});
  const std::vector<double> pts{0.5, 0, 0, 0, -0.5, 0, 0, 0};
  const Tape::BatchResult r = l.evaluate_batch(pts, 4);
  CHECK(r.fault[0] == -1);
  CHECK(r.fault[1] >= 0);
  CHECK_THROWS_AS(l.evaluate(Point{-1, 0, 0, 0}), DomainError);
}

TEST_CASE("hash-consing shares structurally equal expressions") {
  CHECK(P("x1*y1 + 2").same(P("x1 * y1 + 2")));
  CHECK_FALSE(P("x1*y1").same(P("y1*x1")));
}
