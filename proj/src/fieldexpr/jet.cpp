#include <cmath>
#include <algorithm>
#include <functional>

#include "cpc/fieldexpr.hpp"

namespace cpc {

namespace {

void enumerate_degree(int vars, int degree, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
  if (pos == vars - 1) {
    cur[std::size_t(pos)] = degree;
    out.push_back(cur);
    return;
  }
  for (int d = degree; d >= 0; --d) {
    cur[std::size_t(pos)] = d;
    enumerate_degree(vars, degree - d, cur, pos + 1, out);
  }
}

}  // namespace

JetLayout::JetLayout(int vars) : vars_(vars) {
  if (vars < 1) throw std::invalid_argument("jet layout needs at least one variable");
  std::vector<std::vector<int>> all;
  for (int d = 0; d <= kMaxOrder; ++d) {
    std::vector<int> cur(static_cast<std::size_t>(vars), 0);
    enumerate_degree(vars, d, cur, 0, all);
    size_.push_back(all.size());
  }
  const std::size_t total = all.size();
  for (std::size_t k = 0; k < total; ++k) {
    lookup_.emplace(all[k], k);
    alpha_.insert(alpha_.end(), all[k].begin(), all[k].end());
    int deg = 0;
    double f = 1.0;
    for (int a : all[k]) {
      deg += a;
      for (int i = 2; i <= a; ++i) f *= i;
    }
    degree_.push_back(deg);
    fact_.push_back(f);
  }
  raise_.assign(total * std::size_t(vars), -1);
  parent_var_.assign(total, -1);
  parent_.assign(total, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<int> a = all[k];
    if (degree_[k] < kMaxOrder) {
      for (int v = 0; v < vars; ++v) {
        ++a[std::size_t(v)];
        raise_[k * std::size_t(vars) + std::size_t(v)] = std::int32_t(lookup_.at(a));
        --a[std::size_t(v)];
      }
    }
    for (int v = vars - 1; v >= 0 && degree_[k] > 0; --v) {
      if (a[std::size_t(v)] > 0) {
        parent_var_[k] = v;
        --a[std::size_t(v)];
        parent_[k] = lookup_.at(a);
        break;
      }
    }
  }

  // Pair lists for the truncated product, grouped by lanes within each degree.
  std::size_t pair_cursor = 0;
  for (int d = 0; d <= kMaxOrder; ++d) {
    const std::size_t begin = d == 0 ? 0 : size_[std::size_t(d - 1)];
    const std::size_t end = size_[std::size_t(d)];
    for (std::size_t g0 = begin; g0 < end; g0 += simd::kLanes) {
      const std::size_t lanes = std::min(simd::kLanes, end - g0);
      std::vector<std::vector<std::pair<int, int>>> pairs(simd::kLanes);
      std::size_t longest = 0;
      for (std::size_t l = 0; l < lanes; ++l) {
        const std::vector<int>& gamma = all[g0 + l];
        std::vector<int> beta(static_cast<std::size_t>(vars), 0);
        // Walk all beta <= gamma componentwise.
        std::function<void(int)> walk = [&](int v) {
          if (v == vars) {
            std::vector<int> rest(static_cast<std::size_t>(vars));
            for (int i = 0; i < vars; ++i) rest[std::size_t(i)] = gamma[std::size_t(i)] - beta[std::size_t(i)];
            pairs[l].emplace_back(int(lookup_.at(beta)), int(lookup_.at(rest)));
            return;
          }
          for (int b = 0; b <= gamma[std::size_t(v)]; ++b) {
            beta[std::size_t(v)] = b;
            walk(v + 1);
          }
          beta[std::size_t(v)] = 0;
        };
        walk(0);
        std::sort(pairs[l].begin(), pairs[l].end());
        longest = std::max(longest, pairs[l].size());
      }
      simd::ProductGroup grp{std::uint32_t(g0), std::uint32_t(lanes), std::uint32_t(pair_cursor),
                             std::uint32_t(longest)};
      for (std::size_t p = 0; p < longest; ++p) {
        for (std::size_t l = 0; l < simd::kLanes; ++l) {
          const bool real = l < lanes && p < pairs[l].size();
          plan_.ia.push_back(real ? pairs[l][p].first : 0);
          plan_.ib.push_back(real ? pairs[l][p].second : 0);
          plan_.mask.push_back(real ? ~std::uint64_t(0) : 0);
        }
      }
      pair_cursor += longest;
      plan_.groups.push_back(grp);
    }
    groups_.push_back(plan_.groups.size());
  }
}

const JetLayout& JetLayout::get(int vars) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<JetLayout>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[vars];
  if (!slot) slot.reset(new JetLayout(vars));
  return *slot;
}

std::size_t JetLayout::index_of(std::span<const int> alpha) const {
  return lookup_.at(std::vector<int>(alpha.begin(), alpha.end()));
}

Jet::Jet(const JetLayout& layout, int order) : layout_(&layout), order_(order) {
  if (order < 0 || order > JetLayout::kMaxOrder) throw std::invalid_argument("jet order out of range");
  c_.assign(layout.size(order), 0.0);
}

Jet Jet::constant(const JetLayout& layout, int order, double v) {
  Jet j(layout, order);
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(const JetLayout& layout, int order, double x0, int var) {
  Jet j(layout, order);
  j.c_[0] = x0;
  if (order >= 1) j.c_[std::size_t(layout.raise(0, var))] = 1.0;
  return j;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet j(*layout_, order);
  std::copy(c_.begin(), c_.begin() + std::ptrdiff_t(j.c_.size()), j.c_.begin());
  return j;
}

Jet Jet::derivative(int var) const {
  if (order_ < 1) throw std::logic_error("cannot differentiate an order-0 jet");
  Jet j(*layout_, order_ - 1);
  for (std::size_t k = 0; k < j.c_.size(); ++k) {
    const int a = layout_->alpha(k)[std::size_t(var)];
    j.c_[k] = double(a + 1) * c_[std::size_t(layout_->raise(k, var))];
  }
  return j;
}

double Jet::partial(std::span<const int> alpha) const {
  const std::size_t k = layout_->index_of(alpha);
  if (k >= c_.size()) throw std::out_of_range("derivative order exceeds jet order");
  return layout_->alpha_factorial(k) * c_[k];
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator-(Jet a) { return a *= -1.0; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator+(Jet a, double s) { return a += s; }

Jet operator*(const Jet& a, const Jet& b) {
  const int order = std::min(a.order(), b.order());
  if (order == 0) return Jet::constant(a.layout(), 0, a.value() * b.value());
  Jet out(a.layout(), order);
  simd::series_product(a.layout().plan(), a.layout().groups(order), a.coeffs().data(), b.coeffs().data(),
                       &out[0]);
  return out;
}

namespace {

// f(a) from the Taylor coefficients d[k] = f^(k)(a0)/k! of f at a0.
Jet compose(const Jet& a, const std::vector<double>& d) {
  const int order = a.order();
  Jet rest = a;
  rest[0] = 0.0;
  Jet r = Jet::constant(a.layout(), order, d[std::size_t(order)]);
  for (int k = order - 1; k >= 0; --k) {
    r = r * rest;
    r[0] += d[std::size_t(k)];
  }
  return r;
}

}  // namespace

Jet reciprocal(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0 || !std::isfinite(a0)) throw DomainError("reciprocal of zero", "jet");
  std::vector<double> d(std::size_t(a.order()) + 1);
  double p = 1.0 / a0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = (k % 2 ? -p : p);
    p /= a0;
  }
  return compose(a, d);
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b.order() == 0 || a.order() == 0) {
    const int order = std::min(a.order(), b.order());
    if (b.value() == 0.0) throw DomainError("division by zero", "jet");
    if (order == 0) return Jet::constant(a.layout(), 0, a.value() / b.value());
  }
  return a * reciprocal(b);
}

Jet exp(const Jet& a) {
  std::vector<double> d(std::size_t(a.order()) + 1);
  double v = std::exp(a.value());
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (k > 0) v /= double(k);
    d[k] = v;
  }
  return compose(a, d);
}

Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("logarithm of a non-positive value", "jet");
  std::vector<double> d(std::size_t(a.order()) + 1);
  d[0] = std::log(a0);
  double p = 1.0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    p /= a0;
    d[k] = (k % 2 ? p : -p) / double(k);
  }
  return compose(a, d);
}

Jet pow(const Jet& a, double p) {
  const double a0 = a.value();
  const bool integral = p == std::floor(p);
  if (a0 < 0.0 && !integral) throw DomainError("non-integer power of a negative value", "jet");
  if (a0 == 0.0 && (p < 0.0 || (a.order() > 0 && !integral))) throw DomainError("singular power at zero", "jet");
  std::vector<double> d(std::size_t(a.order()) + 1);
  double binom = 1.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (k > 0) binom *= (p - double(k - 1)) / double(k);
    d[k] = binom == 0.0 ? 0.0 : binom * std::pow(a0, p - double(k));
  }
  return compose(a, d);
}

Jet sqrt(const Jet& a) {
  if (a.order() == 0) {
    if (a.value() < 0.0) throw DomainError("square root of a negative value", "jet");
    return Jet::constant(a.layout(), 0, std::sqrt(a.value()));
  }
  return pow(a, 0.5);
}

ExprJets::ExprJets(Expr e, int dim) : expr_(e), dim_(dim) {
  if (e.max_variable() >= dim) throw std::invalid_argument("expression uses variables outside the chart");
}

std::shared_ptr<const Tape> ExprJets::tape_for(int order) const {
  std::lock_guard lock(mu_);
  if (order < 0 || order > JetLayout::kMaxOrder) throw std::invalid_argument("jet order out of range");
  if (tapes_.size() <= std::size_t(order)) tapes_.resize(std::size_t(order) + 1);
  auto& slot = tapes_[std::size_t(order)];
  if (slot) return slot;
  const JetLayout& L = JetLayout::get(dim_);
  const std::size_t n = L.size(order);
  std::vector<Expr> d(n);
  d[0] = expr_;
  for (std::size_t k = 1; k < n; ++k) d[k] = d[L.parent(k)].diff(L.parent_var(k));
  slot = std::make_shared<const Tape>(d);
  return slot;
}

Jet ExprJets::at(std::span<const double> x, int order) const {
  const JetLayout& L = JetLayout::get(dim_);
  const auto tape = tape_for(order);
  std::vector<double> v = tape->evaluate(x);
  Jet j(L, order);
  for (std::size_t k = 0; k < j.size(); ++k) j[k] = v[k] / L.alpha_factorial(k);
  return j;
}

std::vector<Jet> ExprJets::at_many(std::span<const double> points, int order) const {
  const JetLayout& L = JetLayout::get(dim_);
  const auto tape = tape_for(order);
  const Tape::BatchResult res = tape->evaluate_batch(points, dim_);
  const std::size_t lanes = res.fault.size();
  std::vector<Jet> out;
  for (std::size_t l = 0; l < lanes; ++l) {
    if (res.fault[l] >= 0)
      throw DomainError("expression is undefined at point " + std::to_string(l), tape->describe_op(res.fault[l]));
    Jet j(L, order);
    for (std::size_t k = 0; k < j.size(); ++k) j[k] = res.values[k * lanes + l] / L.alpha_factorial(k);
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace cpc
