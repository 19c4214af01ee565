#include "cpc/cproj.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cpc {

namespace {

Jet zero_jet(int n, int order) { return Jet(JetLayout::get(n), order); }

// (YJ)_a = Y_i J^i_a
std::vector<Jet> upsilon_J(const TensorJets& Y, const TensorJets& J, int order) {
  const int n = Y.dim();
  std::vector<Jet> out(static_cast<std::size_t>(n), zero_jet(n, order));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) out[std::size_t(a)] += Y(i) * J(i, a);
  return out;
}

}  // namespace

ConnectionField cproj_change(const ConnectionField& nabla, const TensorField& Upsilon, const AlmostComplexStructure& J) {
  if (Upsilon.pattern() != "l") throw std::invalid_argument("Upsilon must be a one-form");
  const TensorField G = nabla.gamma;
  const TensorField Jf = J.J;
  TensorField out(
      "ull", G.dim(), 0.0,
      [G, Upsilon, Jf](std::span<const double> x, int order) {
        TensorJets g = G.jets(x, order);
        const TensorJets y = Upsilon.jets(x, order);
        const TensorJets j = Jf.jets(x, order);
        const int n = g.dim();
        const std::vector<Jet> yj = upsilon_J(y, j, order);
        for (int c = 0; c < n; ++c)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              Jet& v = g(c, a, b);
              if (c == b) v += y(a);
              if (c == a) v += y(b);
              v -= yj[std::size_t(a)] * j(c, b);
              v -= yj[std::size_t(b)] * j(c, a);
            }
        return g;
      },
      true);
  return {out, nabla.complex, nabla.minimal};
}

TensorField schouten_transform(const TensorField& P, const TensorField& Upsilon, const ConnectionField& nabla,
                               const AlmostComplexStructure& J) {
  const TensorField dY = covariant_derivative(nabla, Upsilon);
  const TensorField Jf = J.J;
  return TensorField("ll", P.dim(), 0.0, [P, Upsilon, dY, Jf](std::span<const double> x, int order) {
    TensorJets p = P.jets(x, order);
    const TensorJets y = Upsilon.jets(x, order);
    const TensorJets d = dY.jets(x, order);
    const TensorJets j = Jf.jets(x, order);
    const int n = p.dim();
    const std::vector<Jet> yj = upsilon_J(y, j, order);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) p(a, b) += y(a) * y(b) - yj[std::size_t(a)] * yj[std::size_t(b)] - d(a, b);
    return p;
  });
}

TensorField defining_one_form(const TensorField& rho) {
  if (!rho.pattern().empty()) throw std::invalid_argument("rho must be a scalar");
  return TensorField("l", rho.dim(), 0.0, [rho](std::span<const double> x, int order) {
    const Jet r = rho.jets(x, order + 1).flat(0);
    if (!(r.value() > 0.0)) throw DomainError("defining function is not positive", "rho");
    const int n = rho.dim();
    const Jet inv = reciprocal(r.truncated(order)) * 0.5;
    TensorJets y("l", n, 0.0, order);
    for (int a = 0; a < n; ++a) y(a) = r.derivative(a) * inv;
    return y;
  });
}

ConnectionField modified_connection_for_defining_function(const ConnectionField& nabla, const TensorField& rho,
                                                          const AlmostComplexStructure& J) {
  return cproj_change(nabla, defining_one_form(rho), J);
}

TensorJets tracefree_coefficients(const TensorJets& Phi, const TensorJets& J) {
  const int n = Phi.dim();
  const int order = std::min(Phi.order(), J.order());
  std::vector<Jet> phi(static_cast<std::size_t>(n), zero_jet(n, order));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) phi[std::size_t(j)] += Phi(k, j, k);
  const std::vector<Jet> phiJ = [&] {
    std::vector<Jet> r(static_cast<std::size_t>(n), zero_jet(n, order));
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) r[std::size_t(j)] += J(l, j) * phi[std::size_t(l)];
    return r;
  }();
  const double c = 1.0 / double(n + 2);
  TensorJets Psi = Phi.truncated(order);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet s = zero_jet(n, order);
        if (i == k) s += phi[std::size_t(j)];
        if (i == j) s += phi[std::size_t(k)];
        s -= phiJ[std::size_t(j)] * J(i, k);
        s -= phiJ[std::size_t(k)] * J(i, j);
        Psi(i, j, k) -= s * c;
      }
  return Psi;
}

TensorField tracefree_coefficients(const ConnectionField& nabla, const AlmostComplexStructure& J) {
  const TensorField G = nabla.gamma;
  const TensorField Jf = J.J;
  return TensorField("ull", G.dim(), 0.0, [G, Jf](std::span<const double> x, int order) {
    return tracefree_coefficients(G.jets(x, order), Jf.jets(x, order));
  });
}

BoundednessResult check_bounded(std::span<const double> t, std::span<const double> f, double tolerance) {
  const Eigen::Index k = Eigen::Index(t.size());
  if (k < 3 || t.size() != f.size()) throw std::invalid_argument("need at least 3 samples");
  Eigen::MatrixXd A(k, 3);
  Eigen::VectorXd y(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double ti = t[std::size_t(i)];
    A(i, 0) = 1.0;
    A(i, 1) = ti;
    A(i, 2) = ti * ti;
    y(i) = f[std::size_t(i)];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  const double res = (A * c - y).norm();
  const double scale = std::max(y.norm(), 1e-300);
  BoundednessResult r;
  r.fit = {c(0), c(1), c(2)};
  r.relative_residual = y.norm() == 0.0 ? 0.0 : res / scale;
  r.bounded = std::isfinite(r.relative_residual) && r.relative_residual < tolerance;
  return r;
}

}  // namespace cpc
