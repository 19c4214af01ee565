#include "cpc/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cpc {

namespace {

int m_of(int dim) { return dim / 2; }

std::vector<int> digits(std::size_t flat, int rank, int n) {
  std::vector<int> d(static_cast<std::size_t>(rank));
  for (int i = rank - 1; i >= 0; --i) {
    d[std::size_t(i)] = int(flat % std::size_t(n));
    flat /= std::size_t(n);
  }
  return d;
}

std::size_t undigits(const std::vector<int>& d, int n) {
  std::size_t f = 0;
  for (int v : d) f = f * std::size_t(n) + std::size_t(v);
  return f;
}

Jet zero_jet(int n, int order) { return Jet(JetLayout::get(n), order); }

}  // namespace

// ---- pointwise ----

namespace pw {

TensorJets inverse(const TensorJets& g) {
  const int n = g.dim();
  const int order = g.order();
  std::vector<Jet> A(g.size()), B(g.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A[std::size_t(i * n + j)] = g(i, j);
      B[std::size_t(i * n + j)] = Jet::constant(JetLayout::get(n), order, i == j ? 1.0 : 0.0);
    }
  auto at = [n](std::vector<Jet>& M, int i, int j) -> Jet& { return M[std::size_t(i * n + j)]; };
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(at(A, r, c).value()) > std::abs(at(A, piv, c).value())) piv = r;
    if (at(A, piv, c).value() == 0.0) throw DomainError("metric is degenerate", "g");
    if (piv != c)
      for (int j = 0; j < n; ++j) {
        std::swap(at(A, piv, j), at(A, c, j));
        std::swap(at(B, piv, j), at(B, c, j));
      }
    const Jet inv = reciprocal(at(A, c, c));
    for (int j = 0; j < n; ++j) {
      at(A, c, j) = at(A, c, j) * inv;
      at(B, c, j) = at(B, c, j) * inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const Jet f = at(A, r, c);
      for (int j = 0; j < n; ++j) {
        at(A, r, j) -= f * at(A, c, j);
        at(B, r, j) -= f * at(B, c, j);
      }
    }
  }
  TensorJets out(g.pattern() == "ll" ? "uu" : "ll", n, -g.weight(), order);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet s = (at(B, i, j) + at(B, j, i)) * 0.5;
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

Jet determinant(const TensorJets& g) {
  const int n = g.dim();
  std::vector<Jet> A(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) A[i] = g.flat(i);
  auto at = [n](std::vector<Jet>& M, int i, int j) -> Jet& { return M[std::size_t(i * n + j)]; };
  Jet det = Jet::constant(JetLayout::get(n), g.order(), 1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(at(A, r, c).value()) > std::abs(at(A, piv, c).value())) piv = r;
    if (at(A, piv, c).value() == 0.0) return zero_jet(n, g.order());
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(at(A, piv, j), at(A, c, j));
      det *= -1.0;
    }
    det = det * at(A, c, c);
    const Jet inv = reciprocal(at(A, c, c));
    for (int r = c + 1; r < n; ++r) {
      const Jet f = at(A, r, c) * inv;
      for (int j = c; j < n; ++j) at(A, r, j) -= f * at(A, c, j);
    }
  }
  return det;
}

TensorJets partial(const TensorJets& t) {
  const int n = t.dim();
  TensorJets out("l" + t.pattern(), n, t.weight(), t.order() - 1);
  const std::size_t inner = t.size();
  for (int a = 0; a < n; ++a)
    for (std::size_t k = 0; k < inner; ++k) out.flat(std::size_t(a) * inner + k) = t.flat(k).derivative(a);
  return out;
}

TensorJets covariant_derivative(const TensorJets& gamma, const TensorJets& t, double weight) {
  const int n = t.dim();
  const int rank = t.rank();
  const int order = std::min(gamma.order(), t.order() - 1);
  TensorJets out = partial(t).truncated(order);
  const std::size_t inner = t.size();
  const double c = weight / double(n + 2);
  std::vector<Jet> trace(static_cast<std::size_t>(n), zero_jet(n, order));
  if (weight != 0.0)
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) trace[std::size_t(a)] += gamma(i, a, i).truncated(order);
  for (int a = 0; a < n; ++a) {
    for (std::size_t k = 0; k < inner; ++k) {
      Jet& o = out.flat(std::size_t(a) * inner + k);
      std::vector<int> d = digits(k, rank, n);
      for (int s = 0; s < rank; ++s) {
        const int orig = d[std::size_t(s)];
        const bool upper = t.pattern()[std::size_t(s)] == 'u';
        for (int e = 0; e < n; ++e) {
          d[std::size_t(s)] = e;
          const Jet& te = t.flat(undigits(d, n));
          if (upper)
            o += gamma(orig, a, e) * te;
          else
            o -= gamma(e, a, orig) * te;
        }
        d[std::size_t(s)] = orig;
      }
      if (weight != 0.0) o += (trace[std::size_t(a)] * t.flat(k)) * c;
    }
  }
  return out;
}

TensorJets levi_civita(const TensorJets& g, const TensorJets& ginv) {
  const int n = g.dim();
  const TensorJets dg = partial(g);  // dg(a, b, d) = d_a g_bd
  const int order = std::min(dg.order(), ginv.order());
  TensorJets G("ull", n, 0.0, order);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      std::vector<Jet> low(static_cast<std::size_t>(n));
      for (int d = 0; d < n; ++d) low[std::size_t(d)] = (dg(a, b, d) + dg(b, a, d) - dg(d, a, b)) * 0.5;
      for (int c = 0; c < n; ++c) {
        Jet s = zero_jet(n, order);
        for (int d = 0; d < n; ++d) s += ginv(c, d) * low[std::size_t(d)];
        G(c, a, b) = s;
        G(c, b, a) = s;
      }
    }
  return G;
}

TensorJets nijenhuis(const TensorJets& J) {
  const int n = J.dim();
  const TensorJets dJ = partial(J);  // dJ(i, c, b) = d_i J^c_b
  const int order = dJ.order();
  TensorJets N("ull", n, 0.0, order);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Jet s = zero_jet(n, order);
        for (int i = 0; i < n; ++i) {
          s += J(i, a) * dJ(i, c, b);
          s -= J(i, b) * dJ(i, c, a);
          s += J(c, i) * dJ(b, i, a);
          s -= J(c, i) * dJ(a, i, b);
        }
        N(c, a, b) = -s;
        N(c, b, a) = std::move(s);
      }
  return N;
}

TensorJets curvature(const TensorJets& gamma) {
  const int n = gamma.dim();
  const TensorJets dG = partial(gamma);  // dG(a, c, b, d) = d_a Gamma^c_bd
  const int order = dG.order();
  TensorJets R("llul", n, 0.0, order);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Jet s = dG(a, c, b, d) - dG(b, c, a, d);
          for (int e = 0; e < n; ++e) {
            s += gamma(c, a, e) * gamma(e, b, d);
            s -= gamma(c, b, e) * gamma(e, a, d);
          }
          R(b, a, c, d) = -s;
          R(a, b, c, d) = std::move(s);
        }
  return R;
}

}  // namespace pw

// ---- fields ----

AlmostComplexStructure standard_J(const Chart& chart) {
  const int n = chart.dim();
  std::vector<double> c(std::size_t(n * n), 0.0);
  for (int k = 0; k < chart.m(); ++k) {
    c[std::size_t((2 * k + 1) * n + 2 * k)] = 1.0;   // J^{y_k}_{x_k} = 1
    c[std::size_t((2 * k) * n + 2 * k + 1)] = -1.0;  // J^{x_k}_{y_k} = -1
  }
  return {constant_tensor_field("ul", n, 0.0, c), chart.m(), true};
}

AlmostComplexStructure complex_structure(const TensorField& J, int m) {
  if (J.pattern() != "ul" || J.dim() != 2 * m) throw std::invalid_argument("J must be an endomorphism field");
  return {J, m, false};
}

TensorField nijenhuis(const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  const int n = Jf.dim();
  if (J.constant)
    return TensorField("ull", n, 0.0, [n](std::span<const double>, int order) { return TensorJets("ull", n, 0.0, order); });
  return TensorField(
      "ull", n, 0.0, [Jf](std::span<const double> x, int order) { return pw::nijenhuis(Jf.jets(x, order + 1)); }, true);
}

TensorField inverse_metric(const TensorField& g) {
  return TensorField(
      "uu", g.dim(), -g.weight(), [g](std::span<const double> x, int order) { return pw::inverse(g.jets(x, order)); },
      true);
}

ConnectionField levi_civita(const TensorField& g) {
  const TensorField ginv = inverse_metric(g);
  TensorField G(
      "ull", g.dim(), 0.0,
      [g, ginv](std::span<const double> x, int order) { return pw::levi_civita(g.jets(x, order + 1), ginv.jets(x, order)); },
      true);
  return {G, false, false};
}

namespace {

// Raw residual (nabla omega)_abc + J^i_a J^j_b (nabla omega)_ijc and the size
// of the derivative terms entering it.
std::pair<double, double> qk_residual_at(const TensorField& g, const TensorField& Jf, const TensorJets& lc,
                                         std::span<const double> x) {
  const int n = g.dim();
  const TensorJets gj = g.jets(x, 1);
  const TensorJets Jj = Jf.jets(x, 1);
  TensorJets omega("ll", n, 0.0, 1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Jet s = zero_jet(n, 1);
      for (int i = 0; i < n; ++i) s -= gj(a, i) * Jj(i, b);
      omega(a, b) = s;
    }
  const TensorJets dw = pw::covariant_derivative(lc.truncated(0), omega, 0.0);
  const TensorJets pd = pw::partial(omega);
  double scale = 1.0;
  for (std::size_t i = 0; i < pd.size(); ++i) scale = std::max(scale, std::abs(pd.flat(i).value()));
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double r = dw(a, b, c).value();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) r += Jj(i, a).value() * Jj(j, b).value() * dw(i, j, c).value();
        worst = std::max(worst, std::abs(r));
      }
  return {worst, scale};
}

}  // namespace

ConnectionField canonical_connection(const TensorField& g, const AlmostComplexStructure& J,
                                     const CanonicalOptions& options) {
  const ConnectionField lc = levi_civita(g);
  const TensorField ginv = inverse_metric(g);
  const TensorField N = nijenhuis(J);
  const TensorField Jf = J.J;
  const TensorField lcg = lc.gamma;
  const bool check = options.require_quasi_kahler;
  const double tol = options.tolerance;
  TensorField G(
      "ull", g.dim(), 0.0,
      [g, ginv, N, Jf, lcg, check, tol](std::span<const double> x, int order) {
        const int n = g.dim();
        TensorJets G = lcg.jets(x, order);
        {
          const std::vector<double> gv = g.values(x), jv = Jf.values(x);
          double res = 0.0, scale = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              double r = gv[std::size_t(a * n + b)];
              scale = std::max(scale, std::abs(r));
              for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                  r -= jv[std::size_t(i * n + a)] * jv[std::size_t(j * n + b)] * gv[std::size_t(i * n + j)];
              res = std::max(res, std::abs(r));
            }
          if (res > 1e-10 * std::max(1.0, scale)) throw DomainError("metric is not Hermitean", "g");
        }
        if (check) {
          auto [res, scale] = qk_residual_at(g, Jf, lcg.jets(x, 0), x);
          if (res > tol * scale) throw DomainError("metric is not quasi-Kahler", "g");
        }
        const TensorJets Nj = N.jets(x, order);
        bool zero = true;
        for (std::size_t i = 0; i < Nj.size() && zero; ++i)
          for (double v : Nj.flat(i).coeffs()) zero = zero && v == 0.0;
        if (zero) return G;
        const TensorJets gj = g.jets(x, order);
        const TensorJets gi = ginv.jets(x, order);
        TensorJets T = Nj * -0.25;
        // K(b, a, c) = g_ib T^i_aj g^jc
        TensorJets U("lll", n, 0.0, order);
        for (int b = 0; b < n; ++b)
          for (int a = 0; a < n; ++a)
            for (int j = 0; j < n; ++j) {
              Jet s = zero_jet(n, order);
              for (int i = 0; i < n; ++i) s += gj(i, b) * T(i, a, j);
              U(b, a, j) = s;
            }
        TensorJets K("llu", n, 0.0, order);
        for (int b = 0; b < n; ++b)
          for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) {
              Jet s = zero_jet(n, order);
              for (int j = 0; j < n; ++j) s += U(b, a, j) * gi(j, c);
              K(b, a, c) = s;
            }
        for (int c = 0; c < n; ++c)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) G(c, a, b) += (T(c, a, b) - K(b, a, c) - K(a, b, c)) * 0.5;
        return G;
      },
      true);
  return {G, true, true};
}

QuasiKahlerResult quasi_kahler_check(const TensorField& g, const AlmostComplexStructure& J,
                                     std::span<const Point> points, double tolerance) {
  const ConnectionField lc = levi_civita(g);
  QuasiKahlerResult r;
  for (const Point& p : points) {
    auto [res, scale] = qk_residual_at(g, J.J, lc.gamma.jets(p, 0), p);
    const double rel = res / scale;
    if (rel >= r.max_residual) {
      r.max_residual = rel;
      r.worst = p;
    }
  }
  r.ok = r.max_residual <= tolerance;
  return r;
}

double hermitean_residual(const TensorField& g, const AlmostComplexStructure& J, std::span<const Point> points) {
  double worst = 0.0;
  const int n = g.dim();
  for (const Point& p : points) {
    const std::vector<double> gv = g.values(p);
    const std::vector<double> Jv = J.J.values(p);
    double scale = 0.0;
    for (double v : gv) scale = std::max(scale, std::abs(v));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += Jv[std::size_t(i * n + a)] * Jv[std::size_t(j * n + b)] * gv[std::size_t(i * n + j)];
        worst = std::max(worst, std::abs(s - gv[std::size_t(a * n + b)]) / std::max(scale, 1e-300));
      }
  }
  return worst;
}

TensorField torsion(const ConnectionField& nabla) {
  const TensorField G = nabla.gamma;
  return TensorField("ull", G.dim(), 0.0, [G](std::span<const double> x, int order) {
    const TensorJets g = G.jets(x, order);
    const int n = g.dim();
    TensorJets T("ull", n, 0.0, order);
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) T(c, a, b) = g(c, a, b) - g(c, b, a);
    return T;
  });
}

TensorField curvature(const ConnectionField& nabla) {
  const TensorField G = nabla.gamma;
  return TensorField(
      "llul", G.dim(), 0.0, [G](std::span<const double> x, int order) { return pw::curvature(G.jets(x, order + 1)); },
      true);
}

TensorField ricci(const TensorField& R) {
  return TensorField(
      "ll", R.dim(), 0.0,
      [R](std::span<const double> x, int order) {
        const TensorJets r = R.jets(x, order);
        const int n = r.dim();
        TensorJets out("ll", n, 0.0, order);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            Jet s = zero_jet(n, order);
            for (int i = 0; i < n; ++i) s += r(i, a, i, b);
            out(a, b) = s;
          }
        return out;
      },
      true);
}

TensorField metric_trace(const TensorField& g, const TensorField& T) {
  const TensorField ginv = inverse_metric(g);
  return TensorField("", g.dim(), 0.0, [ginv, T](std::span<const double> x, int order) {
    const TensorJets gi = ginv.jets(x, order);
    const TensorJets t = T.jets(x, order);
    const int n = t.dim();
    TensorJets out("", n, 0.0, order);
    Jet s = zero_jet(n, order);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += gi(i, j) * t(i, j);
    out.flat(0) = s;
    return out;
  });
}

TensorField scalar_curvature(const TensorField& g, const TensorField& Ric) { return metric_trace(g, Ric); }

TensorField schouten(const TensorField& Ric, const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  const int m = J.m;
  return TensorField(
      "ll", Ric.dim(), 0.0,
      [Ric, Jf, m](std::span<const double> x, int order) {
        const TensorJets r = Ric.jets(x, order);
        const TensorJets j = Jf.jets(x, order);
        const int n = r.dim();
        TensorJets sym("ll", n, 0.0, order);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) sym(a, b) = (r(a, b) + r(b, a)) * 0.5;
        TensorJets P("ll", n, 0.0, order);
        const double k1 = 1.0 / (2.0 * (m + 1));
        const double k2 = 1.0 / double(m - 1);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            Jet jj = zero_jet(n, order);
            for (int i = 0; i < n; ++i)
              for (int l = 0; l < n; ++l) jj += (j(i, a) * j(l, b)) * sym(i, l);
            P(a, b) = (r(a, b) + (sym(a, b) - jj) * k2) * k1;
          }
        return P;
      },
      true);
}

SchoutenDecomposition decompose_schouten(const TensorField& P, const AlmostComplexStructure& J, const TensorField& g) {
  const TensorField Jf = J.J;
  const int n = P.dim();
  const int m = J.m;
  auto part = [P, Jf, n](int which) {
    return TensorField("ll", n, 0.0, [P, Jf, n, which](std::span<const double> x, int order) {
      const TensorJets p = P.jets(x, order);
      TensorJets out("ll", n, 0.0, order);
      if (which == 0) {
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) out(a, b) = (p(a, b) - p(b, a)) * 0.5;
        return out;
      }
      const TensorJets j = Jf.jets(x, order);
      TensorJets sym("ll", n, 0.0, order);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) sym(a, b) = (p(a, b) + p(b, a)) * 0.5;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          Jet jj = zero_jet(n, order);
          for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) jj += (j(i, a) * j(l, b)) * sym(i, l);
          const Jet plus = (sym(a, b) + jj) * 0.5;
          out(a, b) = which == 1 ? plus : sym(a, b) - plus;
        }
      return out;
    });
  };
  SchoutenDecomposition d;
  d.P = P;
  d.beta = part(0);
  d.P_plus = part(1);
  d.P_minus = part(2);
  const TensorField trP = metric_trace(g, P);
  const TensorField Pp = d.P_plus;
  d.P_circ = TensorField("ll", n, 0.0, [Pp, trP, g, m](std::span<const double> x, int order) {
    TensorJets out = Pp.jets(x, order);
    const Jet t = trP.jets(x, order).flat(0) * (1.0 / (2.0 * m));
    out -= t * g.jets(x, order);
    return out;
  });
  return d;
}

TensorField weyl_candidate(const TensorField& R, const TensorField& P, const AlmostComplexStructure& J) {
  const TensorField Jf = J.J;
  return TensorField("llul", R.dim(), 0.0, [R, P, Jf](std::span<const double> x, int order) {
    TensorJets W = R.jets(x, order);
    const TensorJets p = P.jets(x, order);
    const TensorJets j = Jf.jets(x, order);
    const int n = W.dim();
    // JP(b, a) = J^i_b P_ai, the combination in J^i_[a P_b]i.
    TensorJets JP("ll", n, 0.0, order);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Jet s = zero_jet(n, order);
        for (int i = 0; i < n; ++i) s += j(i, a) * p(b, i);
        JP(a, b) = s;  // J^i_a P_bi
      }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            // 2 * (delta^c_[a P_b]d - P_[ab] delta^c_d - J^i_[a P_b]i J^c_d - J^c_[a P_b]i J^i_d)
            Jet s = zero_jet(n, order);
            if (c == a) s += p(b, d);
            if (c == b) s -= p(a, d);
            if (c == d) s -= p(a, b) - p(b, a);
            s -= (JP(a, b) - JP(b, a)) * j(c, d);
            for (int i = 0; i < n; ++i) s -= (j(c, a) * p(b, i) - j(c, b) * p(a, i)) * j(i, d);
            W(a, b, c, d) -= s;
          }
    return W;
  });
}

VolumeAndTau volume_density_and_tau(const TensorField& g) {
  const int n = g.dim();
  const int m = m_of(n);
  TensorField vol(
      "", n, -double(n + 2),
      [g, n](std::span<const double> x, int order) {
        Jet d = pw::determinant(g.jets(x, order));
        if (d.value() < 0.0) d *= -1.0;
        if (d.value() == 0.0) throw DomainError("metric is degenerate", "det g");
        TensorJets t("", n, -double(n + 2), order);
        t.flat(0) = sqrt(d);
        return t;
      },
      true);
  TensorField tau("", n, 2.0, [vol, n, m](std::span<const double> x, int order) {
    TensorJets t("", n, 2.0, order);
    t.flat(0) = pow(vol.jets(x, order).flat(0), -1.0 / double(m + 1));
    return t;
  });
  return {vol, tau};
}

TensorField covariant_derivative(const ConnectionField& nabla, const TensorField& T) {
  const TensorField G = nabla.gamma;
  const double w = T.weight();
  return TensorField("l" + T.pattern(), T.dim(), w, [G, T, w](std::span<const double> x, int order) {
    return pw::covariant_derivative(G.jets(x, order), T.jets(x, order + 1), w);
  });
}

TensorField density_covariant_derivative(const ConnectionField& nabla, const TensorField& s) {
  if (!s.pattern().empty()) throw std::invalid_argument("density_covariant_derivative expects a scalar density");
  return covariant_derivative(nabla, s);
}

std::pair<int, int> signature(std::span<const double> sym, int n, double tol) {
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = 0.5 * (sym[std::size_t(i * n + j)] + sym[std::size_t(j * n + i)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double big = ev.cwiseAbs().maxCoeff();
  int p = 0, q = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev(i)) <= tol * big) continue;
    (ev(i) > 0 ? p : q)++;
  }
  return {p, q};
}

}  // namespace cpc
