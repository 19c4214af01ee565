#pragma once

// Scalar expressions over real chart coordinates (x1, y1, ..., xm, ym),
// exact symbolic differentiation, compiled evaluation tapes and truncated
// multivariate Taylor jets seeded from exact derivatives.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpc/simd.hpp"

namespace cpc {

// Real coordinates (x1, y1, ..., xm, ym): index 2k is x_{k+1}, 2k+1 is y_{k+1}.
class Chart {
 public:
  explicit Chart(int m);
  int m() const { return m_; }
  int dim() const { return 2 * m_; }
  const std::string& name(int i) const { return names_.at(std::size_t(i)); }
  std::optional<int> index_of(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }

 private:
  int m_;
  std::vector<std::string> names_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Raised when an expression is evaluated outside its domain. Carries the
// offending subexpression in printed form.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string node);
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

enum class ExprOp : std::uint8_t { constant, variable, add, sub, mul, div, neg, pow, exp, log, sqrt };

struct ExprNode;

// Immutable scalar expression. Nodes are hash-consed for the process lifetime,
// so structurally equal expressions share storage and derivative caches.
class Expr {
 public:
  Expr();  // the constant 0
  static Expr constant(double v);
  static Expr variable(int index);

  ExprOp op() const;
  double number() const;  // constant value or pow exponent
  int var() const;
  Expr lhs() const;
  Expr rhs() const;
  bool is_constant(double v) const;
  std::size_t hash() const;
  const ExprNode* node() const { return node_; }
  bool same(const Expr& other) const { return node_ == other.node_; }

  Expr diff(int var) const;
  double evaluate(std::span<const double> x) const;
  // Printed form re-parses to an expression that evaluates identically.
  std::string str(const std::vector<std::string>& names) const;
  std::string str(const Chart& chart) const { return str(chart.names()); }
  int max_variable() const;  // -1 when no variables occur

 private:
  explicit Expr(const ExprNode* n) : node_(n) {}
  const ExprNode* node_;
  friend struct ExprFactory;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(double a, const Expr& b);
Expr operator+(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator*(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator/(const Expr& a, double b);
Expr operator/(double a, const Expr& b);
Expr pow(const Expr& a, double p);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

// Parses over the chart coordinates. Extra names (e.g. derived quantities)
// are assigned variable indices dim, dim+1, ... in order.
Expr parse_expression(const std::string& text, const Chart& chart,
                      const std::vector<std::string>& extra_names = {});
Expr parse_expression(const std::string& text, const std::vector<std::string>& names);

Expr differentiate(const Expr& e, int var);
double evaluate(const Expr& e, std::span<const double> x);

// All k-th partial derivatives at x, as a flat n^k array in row-major index
// order. Entries related by index permutation are bitwise identical.
std::vector<double> derivative_tensor(const Expr& e, std::span<const double> x, int k, int dim);

// Straight-line program for a set of expressions with shared subexpressions
// merged.
class Tape {
 public:
  explicit Tape(const std::vector<Expr>& outputs);
  std::size_t size() const { return ops_.size(); }
  std::size_t outputs() const { return out_.size(); }
  // Throws DomainError naming the first non-finite subexpression.
  std::vector<double> evaluate(std::span<const double> x) const;

  struct BatchResult {
    std::vector<double> values;        // [output * lanes + lane]
    std::vector<std::int32_t> fault;   // per lane: -1 or faulting op
  };
  // points is [lane][var] with `dim` coordinates each.
  BatchResult evaluate_batch(std::span<const double> points, int dim) const;
  std::string describe_op(std::int32_t op) const;
  const std::vector<simd::TapeOp>& ops() const { return ops_; }

 private:
  std::vector<simd::TapeOp> ops_;
  std::vector<std::int32_t> out_;
  std::vector<Expr> origin_;
  int vars_ = 0;
};

// Graded multi-index enumeration for n variables up to kMaxOrder.
class JetLayout {
 public:
  static constexpr int kMaxOrder = 8;
  static const JetLayout& get(int vars);

  int vars() const { return vars_; }
  std::size_t size(int order) const { return size_.at(std::size_t(order)); }
  std::span<const int> alpha(std::size_t k) const {
    return {alpha_.data() + k * std::size_t(vars_), std::size_t(vars_)};
  }
  int degree(std::size_t k) const { return degree_[k]; }
  std::size_t index_of(std::span<const int> alpha) const;
  // Index of alpha_k + e_var, or -1 when beyond kMaxOrder.
  std::int32_t raise(std::size_t k, int var) const { return raise_[k * std::size_t(vars_) + std::size_t(var)]; }
  // For degree >= 1: the variable removed to get the parent multi-index.
  int parent_var(std::size_t k) const { return parent_var_[k]; }
  std::size_t parent(std::size_t k) const { return parent_[k]; }
  double alpha_factorial(std::size_t k) const { return fact_[k]; }
  const simd::ProductPlan& plan() const { return plan_; }
  std::size_t groups(int order) const { return groups_.at(std::size_t(order)); }

 private:
  explicit JetLayout(int vars);
  int vars_;
  std::vector<std::size_t> size_;
  std::vector<int> alpha_;
  std::vector<int> degree_;
  std::vector<std::int32_t> raise_;
  std::vector<int> parent_var_;
  std::vector<std::size_t> parent_;
  std::vector<double> fact_;
  std::map<std::vector<int>, std::size_t> lookup_;
  simd::ProductPlan plan_;
  std::vector<std::size_t> groups_;
};

// Truncated Taylor series: coefficient k is d^alpha f / alpha! at the base point.
class Jet {
 public:
  Jet() = default;
  Jet(const JetLayout& layout, int order);
  static Jet constant(const JetLayout& layout, int order, double v);
  static Jet variable(const JetLayout& layout, int order, double x0, int var);

  bool valid() const { return layout_ != nullptr; }
  const JetLayout& layout() const { return *layout_; }
  int order() const { return order_; }
  double value() const { return c_[0]; }
  std::size_t size() const { return c_.size(); }
  double& operator[](std::size_t k) { return c_[k]; }
  double operator[](std::size_t k) const { return c_[k]; }
  std::span<const double> coeffs() const { return c_; }

  Jet truncated(int order) const;
  Jet derivative(int var) const;
  double partial(std::span<const int> alpha) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  Jet& operator+=(double s) { c_[0] += s; return *this; }

 private:
  const JetLayout* layout_ = nullptr;
  int order_ = 0;
  std::vector<double> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator-(Jet a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator+(Jet a, double s);
Jet operator/(const Jet& a, const Jet& b);
Jet reciprocal(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);

// Jets of an expression built from its exact symbolic partial derivatives.
// Thread-safe; one derivative tape per requested order is compiled lazily.
class ExprJets {
 public:
  ExprJets(Expr e, int dim);
  const Expr& expr() const { return expr_; }
  Jet at(std::span<const double> x, int order) const;
  std::vector<Jet> at_many(std::span<const double> points, int order) const;

 private:
  std::shared_ptr<const Tape> tape_for(int order) const;
  Expr expr_;
  int dim_;
  mutable std::mutex mu_;
  mutable std::vector<std::shared_ptr<const Tape>> tapes_;
};

}  // namespace cpc
