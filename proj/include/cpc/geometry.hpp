#pragma once

// Almost complex structures, metrics, connections and curvature.
//
// Conventions: nabla_a d_b = Gamma^c_ab d_c, stored [c][a][b];
// R_ab^c_d = d_a Gamma^c_bd - d_b Gamma^c_ad + Gamma^c_ae Gamma^e_bd - Gamma^c_be Gamma^e_ad;
// Ric_ab = R_ia^i_b. A density of weight w has
// nabla_a s = d_a s + (w / (2m + 2)) Gamma^i_ai s.

#include <span>
#include <string>
#include <vector>

#include "cpc/tensor.hpp"

namespace cpc {

struct AlmostComplexStructure {
  TensorField J;  // J^a_b, pattern "ul"
  int m = 0;
  bool constant = false;
};

// J d_{x_k} = d_{y_k}, J d_{y_k} = -d_{x_k}.
AlmostComplexStructure standard_J(const Chart& chart);
AlmostComplexStructure complex_structure(const TensorField& J, int m);

// N^c_ab = -(J^i_a d_i J^c_b - J^i_b d_i J^c_a + J^c_i d_b J^i_a - J^c_i d_a J^i_b),
// so that N(X, Y) = [X, Y] + J[JX, Y] + J[X, JY] - [JX, JY]. With this sign the
// torsion of a minimal complex connection is -N/4 and
// d theta(JX, Y) + d theta(X, JY) = d rho(N(X, Y)).
TensorField nijenhuis(const AlmostComplexStructure& J);

struct ConnectionField {
  TensorField gamma;  // pattern "ull"
  bool complex = false;
  bool minimal = false;
};

TensorField inverse_metric(const TensorField& g);
ConnectionField levi_civita(const TensorField& g);

struct CanonicalOptions {
  // Check the quasi-Kahler condition at every evaluation point. Disable for
  // synthetic structures whose metric is only Hermitean.
  bool require_quasi_kahler = true;
  double tolerance = 1e-8;  // relative to the size of the derivative terms
};

// Gamma = Gamma_LC + A with torsion T = -N/4 and nabla g = 0.
ConnectionField canonical_connection(const TensorField& g, const AlmostComplexStructure& J,
                                     const CanonicalOptions& options = {});

struct QuasiKahlerResult {
  bool ok = true;
  double max_residual = 0.0;  // relative
  Point worst;
};
// omega_ab = -g_ai J^i_b; residual (nabla omega)_abc + J^i_a J^j_b (nabla omega)_ijc.
QuasiKahlerResult quasi_kahler_check(const TensorField& g, const AlmostComplexStructure& J,
                                     std::span<const Point> points, double tolerance = 1e-8);
// max |g(JX, JY) - g(X, Y)| over coordinate vectors, relative to max |g|.
double hermitean_residual(const TensorField& g, const AlmostComplexStructure& J, std::span<const Point> points);

TensorField torsion(const ConnectionField& nabla);
TensorField curvature(const ConnectionField& nabla);
TensorField ricci(const TensorField& R);
TensorField scalar_curvature(const TensorField& g, const TensorField& Ric);
// g^ij T_ij for a covariant 2-tensor T.
TensorField metric_trace(const TensorField& g, const TensorField& T);

TensorField schouten(const TensorField& Ric, const AlmostComplexStructure& J);

struct SchoutenDecomposition {
  TensorField P;
  TensorField beta;     // P_[ab]
  TensorField P_plus;   // symmetric J-invariant part
  TensorField P_minus;  // symmetric J-anti-invariant part
  TensorField P_circ;   // trace-free part of P_plus
};
SchoutenDecomposition decompose_schouten(const TensorField& P, const AlmostComplexStructure& J, const TensorField& g);

TensorField weyl_candidate(const TensorField& R, const TensorField& P, const AlmostComplexStructure& J);

struct VolumeAndTau {
  TensorField vol;  // sqrt|det g|, weight -2m-2
  TensorField tau;  // vol^(-1/(m+1)), weight 2
};
VolumeAndTau volume_density_and_tau(const TensorField& g);

// nabla_a T for any tensor density T; the result has pattern "l" + pattern(T).
TensorField covariant_derivative(const ConnectionField& nabla, const TensorField& T);
TensorField density_covariant_derivative(const ConnectionField& nabla, const TensorField& s);

// Signature (positive, negative) of a symmetric form, counting eigenvalues
// whose magnitude exceeds tol * max magnitude.
std::pair<int, int> signature(std::span<const double> sym, int n, double tol = 1e-9);

namespace pw {
// Pointwise operations on jets.
TensorJets inverse(const TensorJets& g);
Jet determinant(const TensorJets& g);
TensorJets partial(const TensorJets& t);  // "l" + pattern, order - 1
TensorJets covariant_derivative(const TensorJets& gamma, const TensorJets& t, double weight);
TensorJets levi_civita(const TensorJets& g, const TensorJets& ginv);
TensorJets nijenhuis(const TensorJets& J);
TensorJets curvature(const TensorJets& gamma);
}  // namespace pw

}  // namespace cpc
