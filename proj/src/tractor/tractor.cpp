#include "cpc/tractor.hpp"

#include <cmath>

namespace cpc {

namespace {

Jet zero_jet(int n, int order) { return Jet(JetLayout::get(n), order); }

void expect(const TensorField& t, const char* pattern, const char* what) {
  if (!t.valid() || t.pattern() != pattern) throw std::invalid_argument(std::string("slot ") + what + " must have pattern '" + pattern + "'");
}

std::size_t lead_count(int n, int lead) { return lead ? std::size_t(n) : 1; }

// In place; lead = 1 when every slot carries a leading form index.
void change_h(TensorJets& tau, TensorJets& phi, TensorJets& psi, const TensorJets& Y, const TensorJets& J, int lead) {
  const int n = Y.dim();
  const int order = tau.order();
  const std::size_t N = std::size_t(n);
  for (std::size_t l = 0; l < lead_count(n, lead); ++l) {
    const Jet t = tau.flat(l);
    std::vector<Jet> X(N * N, zero_jet(n, order));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        X[std::size_t(i) * N + std::size_t(j)] = Y(i) * phi.flat(l * N + std::size_t(j)) +
                                                 Y(j) * phi.flat(l * N + std::size_t(i)) + (Y(i) * Y(j)) * t;
    for (int j = 0; j < n; ++j) phi.flat(l * N + std::size_t(j)) += Y(j) * t;
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Jet s = X[std::size_t(b) * N + std::size_t(c)];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += (J(i, b) * J(j, c)) * X[std::size_t(i) * N + std::size_t(j)];
        psi.flat(l * N * N + std::size_t(b) * N + std::size_t(c)) += s;
      }
  }
}

void change_hstar(TensorJets& sigma, TensorJets& mu, TensorJets& nu, const TensorJets& Y, int lead) {
  const int n = Y.dim();
  const std::size_t N = std::size_t(n);
  const int order = nu.order();
  for (std::size_t l = 0; l < lead_count(n, lead); ++l) {
    auto sg = [&](int i, int j) -> const Jet& { return sigma.flat(l * N * N + std::size_t(i) * N + std::size_t(j)); };
    Jet dn = zero_jet(n, order);
    for (int i = 0; i < n; ++i) {
      dn -= Y(i) * mu.flat(l * N + std::size_t(i));
      for (int j = 0; j < n; ++j) dn += (Y(i) * Y(j)) * sg(i, j);
    }
    nu.flat(l) += dn;
    for (int c = 0; c < n; ++c) {
      Jet s = zero_jet(n, order);
      for (int i = 0; i < n; ++i) s += Y(i) * sg(i, c);
      mu.flat(l * N + std::size_t(c)) -= s * 2.0;
    }
  }
}

// Pairing with the leading index on the H side (hl) or the H* side (sl).
TensorJets pair_pw(const TensorJets& tau, const TensorJets& phi, const TensorJets& psi, const TensorJets& sigma,
                   const TensorJets& mu, const TensorJets& nu, bool hl, bool sl) {
  const int n = tau.dim();
  const std::size_t N = std::size_t(n);
  const int order = std::min(tau.order(), nu.order());
  const bool lead = hl || sl;
  TensorJets out(lead ? "l" : "", n, 0.0, order);
  for (std::size_t l = 0; l < lead_count(n, lead); ++l) {
    const std::size_t lh = hl ? l : 0, ls = sl ? l : 0;
    Jet s = tau.flat(lh) * nu.flat(ls);
    for (std::size_t i = 0; i < N; ++i) {
      s += phi.flat(lh * N + i) * mu.flat(ls * N + i);
      for (std::size_t j = 0; j < N; ++j) s += (psi.flat(lh * N * N + i * N + j) * sigma.flat(ls * N * N + i * N + j)) * 0.5;
    }
    out.flat(l) = s;
  }
  return out;
}

// Scales built separately (e.g. by two scale changes with the same Upsilon)
// are compared by their Christoffel symbols at the evaluation point.
void same_scale(const ConnectionField& a, const ConnectionField& b, std::span<const double> x) {
  if (a.gamma.id() == b.gamma.id()) return;
  const std::vector<double> ga = a.gamma.values(x), gb = b.gamma.values(x);
  double scale = 1.0, diff = 0.0;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    scale = std::max(scale, std::abs(ga[i]));
    diff = std::max(diff, std::abs(ga[i] - gb[i]));
  }
  if (diff > 1e-12 * scale) throw std::invalid_argument("sections are given in different scales");
}

// Symmetric Hermitean part of a covariant 2-tensor.
TensorJets herm_sym(const TensorJets& X, const TensorJets& J) {
  const int n = X.dim();
  const int order = std::min(X.order(), J.order());
  TensorJets sym("ll", n, 0.0, order), out("ll", n, 0.0, order);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sym(a, b) = (X(a, b) + X(b, a)) * 0.5;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Jet s = sym(a, b);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += (J(i, a) * J(j, b)) * sym(i, j);
      out(a, b) = s * 0.5;
    }
  return out;
}

double max_mu_ratio(const TensorJets& sigma, const TensorJets& mu) {
  double s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) s = std::max(s, std::abs(sigma.flat(i).value()));
  for (std::size_t i = 0; i < mu.size(); ++i) m = std::max(m, std::abs(mu.flat(i).value()));
  return s > 0.0 ? m / s : (m > 0.0 ? INFINITY : 0.0);
}

}  // namespace

HSection h_section(const ConnectionField& scale, const TensorField& tau, const TensorField& phi,
                   const TensorField& psi) {
  expect(tau, "", "tau");
  expect(phi, "l", "phi");
  expect(psi, "ll", "psi");
  return {scale, with_weight(tau, 2.0), with_weight(phi, 2.0), with_weight(psi, 2.0)};
}

HStarSection hstar_section(const ConnectionField& scale, const TensorField& sigma, const TensorField& mu,
                           const TensorField& nu) {
  expect(sigma, "uu", "sigma");
  expect(mu, "u", "mu");
  expect(nu, "", "nu");
  return {scale, with_weight(sigma, -2.0), with_weight(mu, -2.0), with_weight(nu, -2.0)};
}

HSection h_change_scale(const HSection& s, const TensorField& Upsilon, const AlmostComplexStructure& J) {
  HForm f = h_change_scale(HForm{s.tau, s.phi, s.psi}, Upsilon, J);
  return {cproj_change(s.scale, Upsilon, J), f.tau, f.phi, f.psi};
}

HForm h_change_scale(const HForm& s, const TensorField& Upsilon, const AlmostComplexStructure& J) {
  const TensorField tau = s.tau, phi = s.phi, psi = s.psi, Jf = J.J;
  const int lead = tau.pattern() == "l" ? 1 : 0;
  struct Out {
    TensorJets t, p, q;
  };
  auto eval = std::make_shared<std::function<Out(std::span<const double>, int)>>(
      [=](std::span<const double> x, int order) {
        Out o{tau.jets(x, order), phi.jets(x, order), psi.jets(x, order)};
        change_h(o.t, o.p, o.q, Upsilon.jets(x, order), Jf.jets(x, order), lead);
        return o;
      });
  const int n = tau.dim();
  return {TensorField(tau.pattern(), n, tau.weight(), [eval](std::span<const double> x, int k) { return (*eval)(x, k).t; }),
          TensorField(phi.pattern(), n, phi.weight(), [eval](std::span<const double> x, int k) { return (*eval)(x, k).p; }),
          TensorField(psi.pattern(), n, psi.weight(), [eval](std::span<const double> x, int k) { return (*eval)(x, k).q; })};
}

HStarSection hstar_change_scale(const HStarSection& s, const TensorField& Upsilon, const AlmostComplexStructure& J) {
  HStarForm f = hstar_change_scale(HStarForm{s.sigma, s.mu, s.nu}, Upsilon, J);
  return {cproj_change(s.scale, Upsilon, J), f.sigma, f.mu, f.nu};
}

HStarForm hstar_change_scale(const HStarForm& s, const TensorField& Upsilon, const AlmostComplexStructure&) {
  const TensorField sigma = s.sigma, mu = s.mu, nu = s.nu;
  const int lead = nu.pattern() == "l" ? 1 : 0;
  const int n = nu.dim();
  TensorField mu2(mu.pattern(), n, mu.weight(), [=](std::span<const double> x, int order) {
    TensorJets sg = sigma.jets(x, order), m = mu.jets(x, order), v = nu.jets(x, order);
    change_hstar(sg, m, v, Upsilon.jets(x, order), lead);
    return m;
  });
  TensorField nu2(nu.pattern(), n, nu.weight(), [=](std::span<const double> x, int order) {
    TensorJets sg = sigma.jets(x, order), m = mu.jets(x, order), v = nu.jets(x, order);
    change_hstar(sg, m, v, Upsilon.jets(x, order), lead);
    return v;
  });
  return {sigma, mu2, nu2};
}

TensorField pairing(const HSection& h, const HStarSection& s) {
  return TensorField("", h.tau.dim(), 0.0, [h, s](std::span<const double> x, int order) {
    same_scale(h.scale, s.scale, x);
    return pair_pw(h.tau.jets(x, order), h.phi.jets(x, order), h.psi.jets(x, order), s.sigma.jets(x, order),
                   s.mu.jets(x, order), s.nu.jets(x, order), false, false);
  });
}

TensorField pairing(const HForm& h, const HStarSection& s) {
  return TensorField("l", h.tau.dim(), 0.0, [h, s](std::span<const double> x, int order) {
    return pair_pw(h.tau.jets(x, order), h.phi.jets(x, order), h.psi.jets(x, order), s.sigma.jets(x, order),
                   s.mu.jets(x, order), s.nu.jets(x, order), true, false);
  });
}

TensorField pairing(const HSection& h, const HStarForm& s) {
  return TensorField("l", h.tau.dim(), 0.0, [h, s](std::span<const double> x, int order) {
    return pair_pw(h.tau.jets(x, order), h.phi.jets(x, order), h.psi.jets(x, order), s.sigma.jets(x, order),
                   s.mu.jets(x, order), s.nu.jets(x, order), false, true);
  });
}

HForm tractor_connection_H(const HSection& h, const TensorField& P, const AlmostComplexStructure& J) {
  const TensorField Dtau = covariant_derivative(h.scale, h.tau);
  const TensorField Dphi = covariant_derivative(h.scale, h.phi);
  const TensorField Dpsi = covariant_derivative(h.scale, h.psi);
  const TensorField tau = h.tau, phi = h.phi, psi = h.psi, Jf = J.J;
  const int n = tau.dim();
  TensorField top("l", n, 2.0, [=](std::span<const double> x, int order) {
    TensorJets t = Dtau.jets(x, order);
    t -= phi.jets(x, order) * 2.0;
    return t;
  });
  TensorField mid("ll", n, 2.0, [=](std::span<const double> x, int order) {
    TensorJets t = Dphi.jets(x, order);
    t += tau.jets(x, order).flat(0) * P.jets(x, order);
    t -= psi.jets(x, order);
    return t;
  });
  TensorField bot("lll", n, 2.0, [=](std::span<const double> x, int order) {
    TensorJets t = Dpsi.jets(x, order);
    const TensorJets p = P.jets(x, order), f = phi.jets(x, order), j = Jf.jets(x, order);
    std::vector<Jet> PJ(std::size_t(n * n), zero_jet(n, order)), fJ(std::size_t(n), zero_jet(n, order));
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int i = 0; i < n; ++i) PJ[std::size_t(a * n + c)] += p(a, i) * j(i, c);
    for (int d = 0; d < n; ++d)
      for (int i = 0; i < n; ++i) fJ[std::size_t(d)] += f(i) * j(i, d);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          t(a, c, d) += p(a, c) * f(d) + p(a, d) * f(c) + PJ[std::size_t(a * n + c)] * fJ[std::size_t(d)] +
                        PJ[std::size_t(a * n + d)] * fJ[std::size_t(c)];
    return t;
  });
  return {top, mid, bot};
}

TensorJets trace_part(const TensorJets& mu, const TensorJets& J) {
  const int n = mu.dim();
  const int order = std::min(mu.order(), J.order());
  std::vector<Jet> Jmu(std::size_t(n), zero_jet(n, order));
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < n; ++i) Jmu[std::size_t(c)] += J(c, i) * mu(i);
  TensorJets T("luu", n, 0.0, order);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Jet s = J(b, a) * Jmu[std::size_t(c)] + J(c, a) * Jmu[std::size_t(b)];
        if (a == b) s += mu(c).truncated(order);
        if (a == c) s += mu(b).truncated(order);
        T(a, b, c) = s * 0.5;
      }
  return T;
}

HStarForm tractor_connection_Hstar(const HStarSection& s, const TensorField& P, const AlmostComplexStructure& J) {
  const TensorField Dsigma = covariant_derivative(s.scale, s.sigma);
  const TensorField Dmu = covariant_derivative(s.scale, s.mu);
  const TensorField Dnu = covariant_derivative(s.scale, s.nu);
  const TensorField sigma = s.sigma, mu = s.mu, nu = s.nu, Jf = J.J;
  const int n = nu.dim();
  TensorField top("luu", n, -2.0, [=](std::span<const double> x, int order) {
    TensorJets t = Dsigma.jets(x, order);
    t += trace_part(mu.jets(x, order), Jf.jets(x, order));
    return t;
  });
  TensorField mid("lu", n, -2.0, [=](std::span<const double> x, int order) {
    TensorJets t = Dmu.jets(x, order);
    const TensorJets sg = sigma.jets(x, order), p = P.jets(x, order);
    const Jet v = nu.jets(x, order).flat(0);
    for (int a = 0; a < n; ++a)
      for (int d = 0; d < n; ++d) {
        Jet q = zero_jet(n, order);
        for (int i = 0; i < n; ++i) q += sg(d, i) * p(a, i);
        t(a, d) -= q * 2.0;
        if (a == d) t(a, d) += v * 2.0;
      }
    return t;
  });
  TensorField bot("l", n, -2.0, [=](std::span<const double> x, int order) {
    TensorJets t = Dnu.jets(x, order);
    const TensorJets m = mu.jets(x, order), p = P.jets(x, order);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) t(a) -= m(i) * p(a, i);
    return t;
  });
  return {top, mid, bot};
}

TensorJets tfp(const TensorJets& psi, const TensorJets& J) {
  const int n = psi.dim();
  const int order = std::min(psi.order(), J.order());
  TensorJets mu("u", n, 0.0, order);
  for (int c = 0; c < n; ++c) {
    Jet s = zero_jet(n, order);
    for (int i = 0; i < n; ++i) s += psi(i, i, c).truncated(order);
    mu(c) = s;
  }
  TensorJets out = psi.truncated(order);
  out -= trace_part(mu, J) * (2.0 / double(n));
  return out;
}

TensorField tfp(const TensorField& psi, const AlmostComplexStructure& J) {
  if (psi.pattern() != "luu") throw std::invalid_argument("tfp expects a tensor of pattern 'luu'");
  const TensorField Jf = J.J;
  return TensorField("luu", psi.dim(), psi.weight(), [psi, Jf](std::span<const double> x, int order) {
    return tfp(psi.jets(x, order), Jf.jets(x, order));
  });
}

TensorField metricity_residual(const TensorField& sigma, const ConnectionField& nabla, const AlmostComplexStructure& J) {
  expect(sigma, "uu", "sigma");
  return tfp(covariant_derivative(nabla, with_weight(sigma, -2.0)), J);
}

HStarSection splitting_L_sigma(const TensorField& sigma, const ConnectionField& nabla, const TensorField& P,
                               const AlmostComplexStructure&) {
  expect(sigma, "uu", "sigma");
  const TensorField sw = with_weight(sigma, -2.0);
  const TensorField D = covariant_derivative(nabla, sw);
  const TensorField DD = covariant_derivative(nabla, D);
  const int n = sigma.dim();
  const double m = n / 2;
  TensorField mu("u", n, -2.0, [D, n, m](std::span<const double> x, int order) {
    const TensorJets d = D.jets(x, order);
    TensorJets out("u", n, -2.0, order);
    for (int c = 0; c < n; ++c) {
      Jet s = zero_jet(n, order);
      for (int i = 0; i < n; ++i) s += d(i, i, c);
      out(c) = s * (-1.0 / m);
    }
    return out;
  });
  TensorField nu("", n, -2.0, [sw, DD, P, n, m](std::span<const double> x, int order) {
    const TensorJets dd = DD.jets(x, order), sg = sw.jets(x, order), p = P.jets(x, order);
    Jet a = zero_jet(n, order), b = zero_jet(n, order);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a += dd(i, j, i, j);
        b += sg(i, j) * p(i, j);
      }
    TensorJets out("", n, -2.0, order);
    out.flat(0) = a * (1.0 / (4.0 * m * m)) + b * (1.0 / (2.0 * m));
    return out;
  });
  return {nabla, sw, mu, nu};
}

HSection splitting_L_tau(const TensorField& tau, const ConnectionField& nabla, const TensorField& P,
                         const AlmostComplexStructure& J) {
  expect(tau, "", "tau");
  const TensorField tw = with_weight(tau, 2.0);
  const TensorField D = covariant_derivative(nabla, tw);
  const TensorField DD = covariant_derivative(nabla, D);
  const TensorField Jf = J.J;
  const int n = tau.dim();
  TensorField phi("l", n, 2.0, [D](std::span<const double> x, int order) { return D.jets(x, order) * 0.5; });
  TensorField psi("ll", n, 2.0, [tw, DD, P, Jf](std::span<const double> x, int order) {
    TensorJets X = DD.jets(x, order) * 0.5;
    X += tw.jets(x, order).flat(0) * P.jets(x, order);
    return herm_sym(X, Jf.jets(x, order));
  });
  return {nabla, tw, phi, psi};
}

TensorField einstein_residual(const TensorField& sigma, const TensorField& P) {
  expect(sigma, "uu", "sigma");
  const int n = sigma.dim();
  const double m = n / 2;
  return TensorField("lu", n, sigma.weight(), [sigma, P, n, m](std::span<const double> x, int order) {
    const TensorJets sg = sigma.jets(x, order), p = P.jets(x, order);
    Jet tr = zero_jet(n, order);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tr += sg(i, j) * p(i, j);
    TensorJets E("lu", n, sigma.weight(), order);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Jet s = zero_jet(n, order);
        for (int i = 0; i < n; ++i) s += sg(b, i) * p(a, i);
        E(a, b) = s * -2.0;
        if (a == b) E(a, b) += tr * (1.0 / m);
      }
    return E;
  });
}

TensorField det_H(const HStarSection& s, double mu_tol) {
  const TensorField sigma = s.sigma, mu = s.mu, nu = s.nu;
  const int n = sigma.dim();
  return TensorField("", n, 0.0, [sigma, mu, nu, mu_tol, n](std::span<const double> x, int order) {
    const TensorJets sg = sigma.jets(x, order);
    if (max_mu_ratio(sg, mu.jets(x, 0)) > mu_tol)
      throw std::invalid_argument("det_H is only defined in a scale where the middle slot vanishes");
    const auto [pos, neg] = signature(sg.values(), n, 1e-12);
    if (pos + neg != n) throw DomainError("sigma is degenerate", "sigma");
    Jet d = pw::determinant(sg);
    if (d.value() < 0.0) d *= -1.0;
    const double sign = (neg / 2) % 2 ? -1.0 : 1.0;
    TensorJets out("", n, 0.0, order);
    out.flat(0) = (sqrt(d) * nu.jets(x, order).flat(0)) * sign;
    return out;
  });
}

HSection invert_H(const HStarSection& s, double mu_tol) {
  const TensorField sigma = s.sigma, mu = s.mu, nu = s.nu;
  const int n = sigma.dim();
  TensorField tau("", n, 2.0, [sigma, mu, nu, mu_tol, n](std::span<const double> x, int order) {
    if (max_mu_ratio(sigma.jets(x, 0), mu.jets(x, 0)) > mu_tol)
      throw std::invalid_argument("invert_H requires a vanishing middle slot");
    const Jet v = nu.jets(x, order).flat(0);
    if (v.value() == 0.0) throw DomainError("bottom slot vanishes", "nu");
    TensorJets out("", n, 2.0, order);
    out.flat(0) = reciprocal(v);
    return out;
  });
  TensorField phi("l", n, 2.0, [n](std::span<const double>, int order) { return TensorJets("l", n, 2.0, order); });
  TensorField psi("ll", n, 2.0, [sigma](std::span<const double> x, int order) { return pw::inverse(sigma.jets(x, order)); });
  return {s.scale, tau, phi, psi};
}

HStarSection invert_Hstar(const HSection& h, double phi_tol) {
  const TensorField tau = h.tau, phi = h.phi, psi = h.psi;
  const int n = tau.dim();
  TensorField nu("", n, -2.0, [tau, phi, psi, phi_tol, n](std::span<const double> x, int order) {
    if (max_mu_ratio(psi.jets(x, 0), phi.jets(x, 0)) > phi_tol)
      throw std::invalid_argument("invert_Hstar requires a vanishing middle slot");
    const Jet v = tau.jets(x, order).flat(0);
    if (v.value() == 0.0) throw DomainError("top slot vanishes", "tau");
    TensorJets out("", n, -2.0, order);
    out.flat(0) = reciprocal(v);
    return out;
  });
  TensorField mu("u", n, -2.0, [n](std::span<const double>, int order) { return TensorJets("u", n, -2.0, order); });
  TensorField sigma("uu", n, -2.0, [psi](std::span<const double> x, int order) { return pw::inverse(psi.jets(x, order)); });
  return {h.scale, sigma, mu, nu};
}

namespace {

double herm_residual(const TensorField& t, const AlmostComplexStructure& J, std::span<const Point> points, bool upper) {
  const int n = t.dim();
  double worst = 0.0;
  for (const Point& p : points) {
    const std::vector<double> v = t.values(p), j = J.J.values(p);
    double scale = 0.0;
    for (double a : v) scale = std::max(scale, std::abs(a));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k)
            s += upper ? j[std::size_t(a * n + i)] * j[std::size_t(b * n + k)] * v[std::size_t(i * n + k)]
                       : j[std::size_t(i * n + a)] * j[std::size_t(k * n + b)] * v[std::size_t(i * n + k)];
        const double r = std::max(std::abs(s - v[std::size_t(a * n + b)]),
                                  std::abs(v[std::size_t(a * n + b)] - v[std::size_t(b * n + a)]));
        worst = std::max(worst, scale > 0.0 ? r / scale : r);
      }
  }
  return worst;
}

}  // namespace

double slot_hermitean_residual(const HSection& h, const AlmostComplexStructure& J, std::span<const Point> points) {
  return herm_residual(h.psi, J, points, false);
}

double slot_hermitean_residual(const HStarSection& s, const AlmostComplexStructure& J, std::span<const Point> points) {
  return herm_residual(s.sigma, J, points, true);
}

}  // namespace cpc
