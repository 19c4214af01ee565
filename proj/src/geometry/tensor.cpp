#include "cpc/tensor.hpp"

#include <cmath>
#include <deque>
#include <mutex>

namespace cpc {

std::size_t ipow(int n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= std::size_t(n);
  return r;
}

TensorJets::TensorJets(std::string pattern, int dim, double weight, int order)
    : pattern_(std::move(pattern)), dim_(dim), weight_(weight), order_(order) {
  const JetLayout& L = JetLayout::get(dim);
  comps_.assign(ipow(dim, int(pattern_.size())), Jet(L, order));
}

std::size_t TensorJets::offset(std::initializer_list<int> idx) const {
  std::size_t off = 0;
  for (int i : idx) off = off * std::size_t(dim_) + std::size_t(i);
  return off;
}

std::vector<double> TensorJets::values() const {
  std::vector<double> v(comps_.size());
  for (std::size_t i = 0; i < comps_.size(); ++i) v[i] = comps_[i].value();
  return v;
}

double TensorJets::max_abs() const {
  double m = 0.0;
  for (const Jet& j : comps_) m = std::max(m, std::abs(j.value()));
  return m;
}

TensorJets TensorJets::truncated(int order) const {
  if (order >= order_) return *this;
  TensorJets t = *this;
  t.order_ = order;
  for (Jet& j : t.comps_) j = j.truncated(order);
  return t;
}

TensorJets& TensorJets::operator+=(const TensorJets& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
  return *this;
}

TensorJets& TensorJets::operator-=(const TensorJets& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
  return *this;
}

TensorJets& TensorJets::operator*=(double s) {
  for (Jet& j : comps_) j *= s;
  return *this;
}

TensorJets operator+(TensorJets a, const TensorJets& b) { return a += b; }
TensorJets operator-(TensorJets a, const TensorJets& b) { return a -= b; }
TensorJets operator*(TensorJets a, double s) { return a *= s; }
TensorJets operator*(const Jet& s, const TensorJets& t) {
  TensorJets r(t.pattern(), t.dim(), t.weight(), std::min(s.order(), t.order()));
  for (std::size_t i = 0; i < t.size(); ++i) r.flat(i) = s * t.flat(i);
  return r;
}

struct TensorField::Impl {
  std::string pattern;
  int dim;
  double weight;
  Evaluator eval;
  bool cached;
  struct Entry {
    Point x;
    int order;
    TensorJets value;
  };
  mutable std::mutex mu;
  mutable std::deque<Entry> cache;
};

TensorField::TensorField(std::string pattern, int dim, double weight, Evaluator eval, bool cached) {
  auto impl = std::make_shared<Impl>();
  impl->pattern = std::move(pattern);
  impl->dim = dim;
  impl->weight = weight;
  impl->eval = std::move(eval);
  impl->cached = cached;
  impl_ = impl;
}

const std::string& TensorField::pattern() const { return impl_->pattern; }
int TensorField::dim() const { return impl_->dim; }
double TensorField::weight() const { return impl_->weight; }

TensorJets TensorField::jets(std::span<const double> x, int order) const {
  if (!impl_) throw std::logic_error("evaluating an empty tensor field");
  if (!impl_->cached) return impl_->eval(x, order);
  {
    std::lock_guard lock(impl_->mu);
    for (const auto& e : impl_->cache)
      if (e.order >= order && std::equal(e.x.begin(), e.x.end(), x.begin(), x.end()))
        return e.value.truncated(order);
  }
  TensorJets v = impl_->eval(x, order);
  std::lock_guard lock(impl_->mu);
  impl_->cache.push_front({Point(x.begin(), x.end()), order, v});
  if (impl_->cache.size() > 8) impl_->cache.pop_back();
  return v;
}

TensorField scalar_field(const Expr& e, int dim, double weight) {
  auto src = std::make_shared<ExprJets>(e, dim);
  return TensorField("", dim, weight, [src, dim, weight](std::span<const double> x, int order) {
    TensorJets t("", dim, weight, order);
    t.flat(0) = src->at(x, order);
    return t;
  });
}

TensorField expr_tensor_field(const std::string& pattern, int dim, double weight, const std::vector<Expr>& comps) {
  if (comps.size() != ipow(dim, int(pattern.size()))) throw std::invalid_argument("component count mismatch");
  std::vector<std::shared_ptr<ExprJets>> src;
  for (const Expr& e : comps) src.push_back(std::make_shared<ExprJets>(e, dim));
  return TensorField(pattern, dim, weight, [src, pattern, dim, weight](std::span<const double> x, int order) {
    TensorJets t(pattern, dim, weight, order);
    for (std::size_t i = 0; i < src.size(); ++i) t.flat(i) = src[i]->at(x, order);
    return t;
  });
}

TensorField constant_tensor_field(const std::string& pattern, int dim, double weight, const std::vector<double>& comps) {
  if (comps.size() != ipow(dim, int(pattern.size()))) throw std::invalid_argument("component count mismatch");
  return TensorField(pattern, dim, weight, [comps, pattern, dim, weight](std::span<const double>, int order) {
    TensorJets t(pattern, dim, weight, order);
    for (std::size_t i = 0; i < comps.size(); ++i) t.flat(i)[0] = comps[i];
    return t;
  });
}

TensorField scale_field(const TensorField& s, const TensorField& t) {
  return TensorField(t.pattern(), t.dim(), s.weight() + t.weight(), [s, t](std::span<const double> x, int order) {
    TensorJets r = s.jets(x, order).flat(0) * t.jets(x, order);
    return r;
  });
}

TensorField add_fields(const TensorField& a, const TensorField& b, double cb) {
  if (a.pattern() != b.pattern()) throw std::invalid_argument("adding tensors of different type");
  return TensorField(a.pattern(), a.dim(), a.weight(), [a, b, cb](std::span<const double> x, int order) {
    return a.jets(x, order) + b.jets(x, order) * cb;
  });
}

TensorField with_weight(const TensorField& t, double weight) {
  if (t.weight() == weight) return t;
  return TensorField(t.pattern(), t.dim(), weight, [t](std::span<const double> x, int order) { return t.jets(x, order); });
}

}  // namespace cpc
