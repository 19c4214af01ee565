#pragma once

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cpc/examples.hpp"
#include "cpc/tractor.hpp"

namespace cpc::test {

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::vector<Point> box_points(int n, int count, unsigned seed, double half = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<Point> out;
  for (int k = 0; k < count; ++k) {
    Point p(static_cast<std::size_t>(n));
    for (double& v : p) v = u(rng);
    out.push_back(p);
  }
  return out;
}

// Polynomial one-form with seeded coefficients: Y_a = c_a + sum_i l_ai x_i + q_a x_a^2.
inline TensorField random_one_form(int n, unsigned seed, double scale = 0.3) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Expr> c;
  for (int a = 0; a < n; ++a) {
    Expr e = Expr::constant(u(rng));
    for (int i = 0; i < n; ++i) e = e + u(rng) * Expr::variable(i);
    e = e + u(rng) * pow(Expr::variable(a), 2.0);
    c.push_back(e);
  }
  return expr_tensor_field("l", n, 0.0, c);
}

inline const GeometryBundle& ball_bundle() {
  static const GeometryBundle b = derive(unit_ball(2));
  return b;
}

inline const GeometryBundle& perturbed_bundle() {
  static const GeometryBundle b = derive(perturbed_ball(2, 0.1));
  return b;
}

inline Expr random_poly(std::mt19937& rng, double scale = 0.5) {
  const int n = 4;
  std::uniform_real_distribution<double> u(-scale, scale);
  Expr e = Expr::constant(u(rng));
  for (int i = 0; i < n; ++i) e = e + u(rng) * Expr::variable(i);
  for (int i = 0; i < n; ++i) e = e + u(rng) * Expr::variable(i) * Expr::variable((i + 1) % n);
  return e;
}

// Random slot fields on the m = 2 chart, polynomial of degree 2.

// Symmetric Hermitean for the standard J; the same averaging works for both
// index positions because J is orthogonal.
inline TensorField random_hermitean(const std::string& p, unsigned seed) {
  const int n = 4;
  std::mt19937 rng(seed);
  std::vector<Expr> M;
  for (int k = 0; k < 16; ++k) M.push_back(random_poly(rng));
  const std::vector<double> j = standard_J(Chart(2)).J.values(Point{0, 0, 0, 0});
  std::vector<Expr> H;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Expr e = 0.25 * (M[std::size_t(a * n + b)] + M[std::size_t(b * n + a)]);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          const double c = j[std::size_t(i * n + a)] * j[std::size_t(k * n + b)];
          if (c != 0.0) e = e + (0.25 * c) * (M[std::size_t(i * n + k)] + M[std::size_t(k * n + i)]);
        }
      H.push_back(e);
    }
  return expr_tensor_field(p, n, 0.0, H);
}

inline TensorField random_vector(const std::string& p, unsigned seed) {
  const int n = 4;
  std::mt19937 rng(seed);
  std::vector<Expr> c;
  for (int a = 0; a < n; ++a) c.push_back(random_poly(rng));
  return expr_tensor_field(p, n, 0.0, c);
}

inline TensorField random_scalar(unsigned seed, double offset = 0.0) {
  std::mt19937 rng(seed);
  return scalar_field(random_poly(rng) + offset, 4);
}

inline HSection random_h(const ConnectionField& scale, unsigned seed) {
  return h_section(scale, random_scalar(seed), random_vector("l", seed + 1), random_hermitean("ll", seed + 2));
}
inline HStarSection random_hstar(const ConnectionField& scale, unsigned seed) {
  return hstar_section(scale, random_hermitean("uu", seed), random_vector("u", seed + 1), random_scalar(seed + 2));
}

}  // namespace cpc::test
