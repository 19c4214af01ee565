#pragma once

// c-projective changes of connection and the invariant trace-free part of
// connection coefficients.

#include <span>
#include <vector>

#include "cpc/geometry.hpp"

namespace cpc {

// Gamma^c_ab + Y_a d^c_b + Y_b d^c_a - (YJ)_a J^c_b - (YJ)_b J^c_a with (YJ)_a = Y_i J^i_a.
ConnectionField cproj_change(const ConnectionField& nabla, const TensorField& Upsilon, const AlmostComplexStructure& J);

// P_ab - nabla_a Y_b + Y_a Y_b - J^i_a J^j_b Y_i Y_j.
TensorField schouten_transform(const TensorField& P, const TensorField& Upsilon, const ConnectionField& nabla,
                               const AlmostComplexStructure& J);

// Y = d rho / (2 rho); undefined where rho <= 0.
TensorField defining_one_form(const TensorField& rho);
ConnectionField modified_connection_for_defining_function(const ConnectionField& nabla, const TensorField& rho,
                                                          const AlmostComplexStructure& J);

// Psi^i_jk = Phi^i_jk - (phi_j d^i_k + phi_k d^i_j - J^l_j phi_l J^i_k - J^l_k phi_l J^i_j) / (2m + 2),
// phi_j = Phi^k_jk.
TensorJets tracefree_coefficients(const TensorJets& Phi, const TensorJets& J);
TensorField tracefree_coefficients(const ConnectionField& nabla, const AlmostComplexStructure& J);

struct BoundednessResult {
  bool bounded = false;
  double relative_residual = 0.0;
  std::vector<double> fit;  // c0 + c1 t + c2 t^2
};
// Least-squares quadratic fit in t; bounded when the relative residual is
// below `tolerance`.
BoundednessResult check_bounded(std::span<const double> t, std::span<const double> f, double tolerance = 1e-3);

}  // namespace cpc
