#pragma once

// Test geometries: flat space, the metric built from a defining function,
// the unit ball and its perturbations, and a non-integrable structure.

#include <optional>
#include <string>
#include <vector>

#include "cpc/boundary.hpp"

namespace cpc {

struct ExampleGeometry {
  Chart chart{2};
  AlmostComplexStructure J;
  std::optional<Expr> rho_expr;
  TensorField rho;  // empty when no defining function is attached
  TensorField g;
  std::string kind;  // flat | ball | perturbed-ball | custom
};

// g(X, Y) = -(d rho(X) d rho(Y) + theta(X) theta(Y)) / rho^2 + d theta(X, JY) / rho,
// symmetrized.
TensorField grho_from_rho(const TensorField& rho, const AlmostComplexStructure& J);

ExampleGeometry from_rho(const Chart& chart, const Expr& rho, const AlmostComplexStructure& J,
                         std::string kind = "custom");
// rho = 1 - |z|^2 with the standard J.
ExampleGeometry unit_ball(int m);
// rho = (1 - |z|^2) exp(eps * direction); direction defaults to x1^2. Throws
// DomainError if g degenerates on the probe region.
ExampleGeometry perturbed_ball(int m, double eps, std::optional<Expr> direction = {});
// Euclidean metric and standard J; rho defaults to x1.
ExampleGeometry flat_space(int m, std::optional<Expr> rho = {});

// Standard J conjugated by the rotation of the (x1, x2) plane with
// cos = (1 - s^2) / (1 + s^2), sin = 2s / (1 + s^2), s = eps * y1. The
// Euclidean metric is Hermitean for it; it is not integrable for eps != 0.
AlmostComplexStructure synthetic_J(const Chart& chart, double eps);
// Gamma^c_ab = (d_a J^c_i) J^i_b / 2, a connection preserving J.
ConnectionField complex_connection(const AlmostComplexStructure& J);

// Interior points with rho_min < rho < rho_max drawn from [-1, 1]^n.
std::vector<Point> interior_points(const ExampleGeometry& geo, int count, unsigned seed, double rho_min = 0.05,
                                   double rho_max = 0.9);

// Everything derived from a metric that the certificates consume.
struct GeometryBundle {
  ExampleGeometry geo;
  TensorField ginv;
  ConnectionField nabla;  // canonical connection
  TensorField R, Ric, S, P;
  SchoutenDecomposition dec;
  TensorField vol, tau;
  TensorField sigma;  // tau^-1 g^ab, weight -2
  TensorField theta, dtheta;       // empty without rho
  ConnectionField modified;        // nabla + d rho / (2 rho); empty without rho
};
GeometryBundle derive(const ExampleGeometry& geo, const CanonicalOptions& options = {});

}  // namespace cpc
