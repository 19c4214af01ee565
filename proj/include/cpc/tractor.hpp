#pragma once

// Slot forms of Hermitean forms on the standard tractor bundle (H) and of the
// metricity bundle (H*), relative to a choice of scale (a connection in the
// c-projective class).

#include <span>

#include "cpc/cproj.hpp"

namespace cpc {

// (tau, phi_a, psi_bc), all of weight 2; psi symmetric Hermitean.
struct HSection {
  ConnectionField scale;
  TensorField tau, phi, psi;
};
// (sigma^ab, mu^c, nu), all of weight -2; sigma symmetric Hermitean.
struct HStarSection {
  ConnectionField scale;
  TensorField sigma, mu, nu;
};

// One-form valued versions: every slot carries a leading form index a.
struct HForm {
  TensorField tau, phi, psi;  // "l", "ll", "lll"
};
struct HStarForm {
  TensorField sigma, mu, nu;  // "luu", "lu", "l"
};

// Validate patterns and assign the slot weights.
HSection h_section(const ConnectionField& scale, const TensorField& tau, const TensorField& phi,
                   const TensorField& psi);
HStarSection hstar_section(const ConnectionField& scale, const TensorField& sigma, const TensorField& mu,
                           const TensorField& nu);

// tau, phi + Y tau, psi + (d d + J J)(Y phi + phi Y + Y Y tau).
HSection h_change_scale(const HSection& s, const TensorField& Upsilon, const AlmostComplexStructure& J);
HForm h_change_scale(const HForm& s, const TensorField& Upsilon, const AlmostComplexStructure& J);
// sigma, mu^c - 2 Y_i sigma^ic, nu - Y_i mu^i + Y_i Y_j sigma^ij.
HStarSection hstar_change_scale(const HStarSection& s, const TensorField& Upsilon, const AlmostComplexStructure& J);
HStarForm hstar_change_scale(const HStarForm& s, const TensorField& Upsilon, const AlmostComplexStructure& J);

// tau nu + phi_i mu^i + psi_ij sigma^ij / 2. Throws std::invalid_argument
// on evaluation when the sections are given in different scales.
TensorField pairing(const HSection& h, const HStarSection& s);
TensorField pairing(const HForm& h, const HStarSection& s);  // "l"
TensorField pairing(const HSection& h, const HStarForm& s);  // "l"

// P is the Schouten tensor of the section's scale.
HForm tractor_connection_H(const HSection& h, const TensorField& P, const AlmostComplexStructure& J);
HStarForm tractor_connection_Hstar(const HStarSection& s, const TensorField& P, const AlmostComplexStructure& J);

// The trace part d_a^(b mu^c) + J_a^(b J_i^c) mu^i of a "luu" tensor and its
// complement; mu^c = psi_i^ic.
TensorJets tfp(const TensorJets& psi, const TensorJets& J);
TensorField tfp(const TensorField& psi, const AlmostComplexStructure& J);
TensorJets trace_part(const TensorJets& mu, const TensorJets& J);  // "luu" from "u"

// tfp(nabla_a sigma^bc) for sigma of weight -2.
TensorField metricity_residual(const TensorField& sigma, const ConnectionField& nabla, const AlmostComplexStructure& J);

// (sigma; -(1/m) nabla_i sigma^ic; nabla_i nabla_j sigma^ij / (4m^2) + sigma^ij P_ij / (2m)).
HStarSection splitting_L_sigma(const TensorField& sigma, const ConnectionField& nabla, const TensorField& P,
                               const AlmostComplexStructure& J);
// (tau; nabla_a tau / 2; symmetric Hermitean part of (nabla_b nabla_c tau / 2 + P_bc tau)).
HSection splitting_L_tau(const TensorField& tau, const ConnectionField& nabla, const TensorField& P,
                         const AlmostComplexStructure& J);

// (1/m) sigma^ij P_ij d^b_a - 2 sigma^bi P_ai, pattern "lu".
TensorField einstein_residual(const TensorField& sigma, const TensorField& P);

// Complex determinant of the form: (-1)^(q/2) sqrt|det sigma| nu with q the
// number of negative eigenvalues of sigma. Requires |mu| <= mu_tol * |sigma|
// at every evaluation point; the general case is refused.
TensorField det_H(const HStarSection& s, double mu_tol = 1e-8);
// (1 / nu, 0, sigma^-1) and back; both require the middle slot to vanish.
HSection invert_H(const HStarSection& s, double mu_tol = 1e-8);
HStarSection invert_Hstar(const HSection& h, double phi_tol = 1e-8);

// Max over points of the symmetric Hermitean defect of psi (resp. sigma),
// relative to its size.
double slot_hermitean_residual(const HSection& h, const AlmostComplexStructure& J, std::span<const Point> points);
double slot_hermitean_residual(const HStarSection& s, const AlmostComplexStructure& J, std::span<const Point> points);

}  // namespace cpc
