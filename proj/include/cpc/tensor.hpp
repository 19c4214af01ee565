#pragma once

// Pointwise tensors whose components are jets, and lazily evaluated tensor
// fields producing them.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cpc/fieldexpr.hpp"

namespace cpc {

using Point = std::vector<double>;

// Components stored row-major in the written index order. `pattern` has one
// letter per index: 'u' upper, 'l' lower. Example: R_ab^c_d is "llul".
class TensorJets {
 public:
  TensorJets() = default;
  TensorJets(std::string pattern, int dim, double weight, int order);

  const std::string& pattern() const { return pattern_; }
  int rank() const { return int(pattern_.size()); }
  int dim() const { return dim_; }
  double weight() const { return weight_; }
  int order() const { return order_; }
  std::size_t size() const { return comps_.size(); }

  Jet& flat(std::size_t i) { return comps_[i]; }
  const Jet& flat(std::size_t i) const { return comps_[i]; }
  template <class... I>
  Jet& operator()(I... idx) { return comps_[offset({int(idx)...})]; }
  template <class... I>
  const Jet& operator()(I... idx) const { return comps_[offset({int(idx)...})]; }
  std::size_t offset(std::initializer_list<int> idx) const;

  std::vector<double> values() const;
  double max_abs() const;
  TensorJets truncated(int order) const;
  TensorJets& operator+=(const TensorJets& o);
  TensorJets& operator-=(const TensorJets& o);
  TensorJets& operator*=(double s);

 private:
  std::string pattern_;
  int dim_ = 0;
  double weight_ = 0.0;
  int order_ = 0;
  std::vector<Jet> comps_;
};

TensorJets operator+(TensorJets a, const TensorJets& b);
TensorJets operator-(TensorJets a, const TensorJets& b);
TensorJets operator*(TensorJets a, double s);
TensorJets operator*(const Jet& s, const TensorJets& t);

// A tensor field (or weighted tensor density) on a chart: evaluation at a
// point returns every component with exact partial derivatives up to the
// requested order.
class TensorField {
 public:
  using Evaluator = std::function<TensorJets(std::span<const double>, int)>;

  TensorField() = default;
  // With `cached`, the most recent evaluations are memoized; the evaluator
  // must then be a pure function of (point, order).
  TensorField(std::string pattern, int dim, double weight, Evaluator eval, bool cached = false);

  bool valid() const { return impl_ != nullptr; }
  // Identity of the underlying evaluator; copies share it.
  const void* id() const { return impl_.get(); }
  const std::string& pattern() const;
  int dim() const;
  double weight() const;
  TensorJets jets(std::span<const double> x, int order = 0) const;
  std::vector<double> values(std::span<const double> x) const { return jets(x, 0).values(); }
  // Convenience for scalar fields.
  double value(std::span<const double> x) const { return jets(x, 0).flat(0).value(); }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Scalar field from an expression, derivatives taken symbolically.
TensorField scalar_field(const Expr& e, int dim, double weight = 0.0);
// Tensor field from per-component expressions in row-major order.
TensorField expr_tensor_field(const std::string& pattern, int dim, double weight, const std::vector<Expr>& comps);
// Constant-component tensor field.
TensorField constant_tensor_field(const std::string& pattern, int dim, double weight, const std::vector<double>& comps);

// Pointwise product and sum helpers used when composing fields.
TensorField scale_field(const TensorField& s, const TensorField& t);  // s scalar
TensorField add_fields(const TensorField& a, const TensorField& b, double cb = 1.0);
// Same components, different density weight.
TensorField with_weight(const TensorField& t, double weight);

std::size_t ipow(int n, int k);

}  // namespace cpc
