#pragma once

// Boundary geometry of {rho = 0}, limits along inward rays, and certificates
// for the asymptotic statements about compactified metrics.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cpc/cproj.hpp"

namespace cpc {

// theta_a = -J^b_a rho_b.
TensorField theta(const TensorField& rho, const AlmostComplexStructure& J);
// (d alpha)_ab = d_a alpha_b - d_b alpha_a.
TensorField exterior_derivative(const TensorField& alpha);

// ---- rays and limits ----

struct Schedule {
  double t0 = 0.1;
  int K = 8;
  int order = 3;
  std::vector<double> times() const;  // t0 * 2^-k, k = 0..K
};

struct Ray {
  Point base;       // on {rho = 0}
  Point direction;  // d rho(direction) > 0
  Point at(double t) const;
};

struct LimitEstimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  std::vector<double> t;
  std::vector<double> samples;
};

// Polynomial extrapolation to t = 0 of degree `order` over runs of order + 1
// consecutive samples; the error estimate is the change from the previous
// extrapolation order, and the run with the smallest estimate is reported.
LimitEstimate extrapolate_limit(std::span<const double> t, std::span<const double> f, int order, double tol);
LimitEstimate extrapolate_limit(const std::function<double(const Point&)>& f, const Ray& ray, const Schedule& s,
                                double tol);
// Componentwise limits of a vector-valued quantity, evaluated once per sample.
std::vector<LimitEstimate> extrapolate_components(const std::function<std::vector<double>(const Point&)>& f,
                                                  const Ray& ray, const Schedule& s, double tol);

// Newton iteration along d rho until |rho| < 1e-12.
Point project_to_boundary(const TensorField& rho, const Point& p);
// Ray along the coordinate gradient of rho from a boundary point.
Ray inward_ray(const TensorField& rho, const Point& boundary_point);

struct Patch {
  Point center;
  double radius = 0.2;
  int count = 10;
  unsigned seed = 1;
};
// Points scattered around `center` in chart coordinates, projected to the boundary.
std::vector<Point> boundary_patch(const TensorField& rho, const Patch& patch);

// ---- Levi form ----

struct LeviReport {
  bool nondegenerate = false;
  double min_abs_eigenvalue = 0.0;  // of the Levi form on H, relative to |d theta|
  int p = 0, q = 0;                 // complex signature of d theta(., J.) on H
  double hermitean_residual = 0.0;  // d theta(J., J.) - d theta on H
  double identity_residual = 0.0;   // d theta(J X, Y) + d theta(X, J Y) - d rho(N(X, Y))
  double tangentiality_residual = 0.0;  // d rho(N(X, Y)) for X, Y in H
};
// H = ker d rho /\ ker theta at each boundary point.
LeviReport levi_checks(const TensorField& rho, const AlmostComplexStructure& J, std::span<const Point> boundary,
                       double threshold = 1e-8);

// Euclidean-orthogonal projections of the coordinate vectors onto
// ker d rho /\ ker theta; columns of the returned n x n matrix, row-major.
std::vector<double> horizontal_frame(std::span<const double> drho, std::span<const double> th, int n);

// ---- asymptotic form ----

// h = rho g - (C / rho)(d rho (x) d rho + theta (x) theta).
TensorField h_rho_C(const TensorField& g, const TensorField& rho, double C, const AlmostComplexStructure& J);
// e^f h + 2C(-df . d rho_hat + (df o J) . theta_hat) + C rho_hat (df^2 + (df o J)^2), with
// a . b = (a (x) b + b (x) a) / 2, rho_hat = e^f rho.
TensorField h_rescaled(const TensorField& h, const TensorField& f, const TensorField& rho_hat, double C,
                       const AlmostComplexStructure& J);

enum class Verdict { pass, fail, not_applicable };
const char* verdict_name(Verdict v);

struct Diagnostic {
  std::string name;
  double value = 0.0;
  double tolerance = -1.0;  // negative: informational
  bool exceeds() const { return tolerance >= 0.0 && !(value <= tolerance); }
};

struct Certificate {
  std::string name;
  std::string anchor;
  Verdict verdict = Verdict::fail;
  std::vector<Diagnostic> diagnostics;
  std::string note;
  void add(std::string n, double v, double tol = -1.0) { diagnostics.push_back({std::move(n), v, tol}); }
  // pass iff no diagnostic exceeds its tolerance.
  void settle();
  double get(const std::string& n) const;
};

struct LimitOptions {
  Schedule schedule;
  double tol = 1e-6;
};

Certificate certify_asymptotic_form(const TensorField& g, const TensorField& rho, const AlmostComplexStructure& J,
                                    double C, std::span<const Ray> rays, const LimitOptions& opt);
Certificate certify_volume_density(const TensorField& tau, const TensorField& rho, std::span<const Ray> rays,
                                   const LimitOptions& opt);
// Boundary values of S along rays through a connected patch.
Certificate scalar_boundary_constancy(const TensorField& S, std::span<const Ray> rays, const LimitOptions& opt);
// -(m/2)(g^ij P_ij)^-1 along a ray.
LimitEstimate prop44_constant(const TensorField& g, const TensorField& P, const Ray& ray, const LimitOptions& opt);

// C_ab^c_d = 2(d^c_[a phi_b]d - J^i_[a phi_b]i J^c_d - J^c_[a phi_b]i J^i_d), pattern "llul".
TensorJets rank_one_curvature(const TensorJets& phi, const TensorJets& J);
TensorField rank_one_curvature(const TensorField& phi, const AlmostComplexStructure& J);

// order 1: rho^2 R + C(d rho^2 + theta^2) / 4 -> 0;
// order 2: rho R + C(d rho^2 + theta^2) / (4 rho) - X / 2 -> 0 with
// X = d^c_[a J^i_b] dth_di - dth_ab J^c_d + J^c_[a J^i_b] dth_ij J^j_d.
TensorField curvature_defect(const TensorField& R, const TensorField& rho, const AlmostComplexStructure& J, int order);
Certificate certify_curvature_asymptotics(const TensorField& R, const TensorField& rho, const AlmostComplexStructure& J,
                                          std::span<const Ray> rays, int order, const LimitOptions& opt);

// rho P + (d rho^2 + theta^2) / (4 rho) - (1/2) nabla_hat_a rho_b.
TensorField schouten_defect(const TensorField& P, const TensorField& rho, const AlmostComplexStructure& J,
                            const ConnectionField& modified);
Certificate certify_schouten_asymptotics(const TensorField& P, const TensorField& g, const TensorField& rho,
                                         const AlmostComplexStructure& J, const ConnectionField& modified,
                                         std::span<const Ray> rays, const LimitOptions& opt);

// Every component of `field` extrapolates to zero.
Certificate certify_vanishing_limit(const TensorField& field, std::span<const Ray> rays, const LimitOptions& opt);
// Tracefree connection coefficients converge along every ray while the raw
// coefficients do not; max|Psi| / max|Gamma| must tend to 0.
Certificate certify_tracefree_extension(const ConnectionField& nabla, const AlmostComplexStructure& J,
                                        std::span<const Ray> rays, const LimitOptions& opt);
Certificate certify_asymptotically_parallel_N(const TensorField& N, const ConnectionField& nabla,
                                              std::span<const Ray> rays, const LimitOptions& opt);

}  // namespace cpc
