#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <functional>
#include <unordered_map>

#include "cpc/fieldexpr.hpp"

namespace cpc {

struct ExprNode {
  ExprOp op;
  double num;
  int var;
  const ExprNode* a;
  const ExprNode* b;
  std::size_t hash;
  int max_var;
  mutable std::vector<const ExprNode*> dcache;  // guarded by ExprFactory::memo_mu
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

struct ExprFactory {
  std::mutex mu;
  std::mutex memo_mu;
  std::deque<ExprNode> storage;
  std::unordered_multimap<std::size_t, const ExprNode*> table;

  static ExprFactory& get() {
    static ExprFactory f;
    return f;
  }

  static Expr wrap(const ExprNode* n) { return Expr(n); }

  const ExprNode* intern(ExprOp op, double num, int var, const ExprNode* a, const ExprNode* b) {
    if (num == 0.0) num = 0.0;  // fold -0 into +0 for a canonical key
    std::size_t h = mix(std::size_t(op) + 1, std::bit_cast<std::uint64_t>(num));
    h = mix(h, std::size_t(var + 7));
    h = mix(h, a ? a->hash : 0x51);
    h = mix(h, b ? b->hash : 0x73);
    std::lock_guard lock(mu);
    auto [lo, hi] = table.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      const ExprNode* n = it->second;
      if (n->op == op && std::bit_cast<std::uint64_t>(n->num) == std::bit_cast<std::uint64_t>(num) &&
          n->var == var && n->a == a && n->b == b)
        return n;
    }
    int mv = op == ExprOp::variable ? var : -1;
    if (a) mv = std::max(mv, a->max_var);
    if (b) mv = std::max(mv, b->max_var);
    storage.push_back(ExprNode{op, num, var, a, b, h, mv, {}});
    const ExprNode* n = &storage.back();
    table.emplace(h, n);
    return n;
  }
};

namespace {

const ExprNode* make(ExprOp op, double num, int var, const ExprNode* a, const ExprNode* b) {
  return ExprFactory::get().intern(op, num, var, a, b);
}

bool is_num(const ExprNode* n, double v) { return n->op == ExprOp::constant && n->num == v; }
bool is_const(const ExprNode* n) { return n->op == ExprOp::constant; }

Expr wrap(const ExprNode* n) { return ExprFactory::wrap(n); }

const ExprNode* cnum(double v) { return make(ExprOp::constant, v, -1, nullptr, nullptr); }

// Folds only when the folded value is finite, so domain errors survive to evaluation.
const ExprNode* fold_or(double v, const std::function<const ExprNode*()>& build) {
  return std::isfinite(v) ? cnum(v) : build();
}

const ExprNode* n_neg(const ExprNode* a) {
  if (is_const(a)) return cnum(-a->num);
  if (a->op == ExprOp::neg) return a->a;
  return make(ExprOp::neg, 0.0, -1, a, nullptr);
}

const ExprNode* n_add(const ExprNode* a, const ExprNode* b) {
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return cnum(a->num + b->num);
  return make(ExprOp::add, 0.0, -1, a, b);
}

const ExprNode* n_sub(const ExprNode* a, const ExprNode* b) {
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return n_neg(b);
  if (is_const(a) && is_const(b)) return cnum(a->num - b->num);
  return make(ExprOp::sub, 0.0, -1, a, b);
}

const ExprNode* n_mul(const ExprNode* a, const ExprNode* b) {
  if (is_num(a, 0.0) || is_num(b, 0.0)) return cnum(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (is_num(a, -1.0)) return n_neg(b);
  if (is_num(b, -1.0)) return n_neg(a);
  if (is_const(a) && is_const(b)) return cnum(a->num * b->num);
  return make(ExprOp::mul, 0.0, -1, a, b);
}

const ExprNode* n_div(const ExprNode* a, const ExprNode* b) {
  if (is_num(b, 1.0)) return a;
  if (is_num(a, 0.0) && !is_num(b, 0.0)) return cnum(0.0);
  if (is_const(a) && is_const(b))
    return fold_or(a->num / b->num, [&] { return make(ExprOp::div, 0.0, -1, a, b); });
  return make(ExprOp::div, 0.0, -1, a, b);
}

const ExprNode* n_pow(const ExprNode* a, double p) {
  if (p == 0.0) return cnum(1.0);
  if (p == 1.0) return a;
  if (is_const(a)) return fold_or(std::pow(a->num, p), [&] { return make(ExprOp::pow, p, -1, a, nullptr); });
  return make(ExprOp::pow, p, -1, a, nullptr);
}

const ExprNode* n_unary(ExprOp op, const ExprNode* a) {
  if (is_const(a)) {
    const double v = op == ExprOp::exp ? std::exp(a->num) : op == ExprOp::log ? std::log(a->num) : std::sqrt(a->num);
    return fold_or(v, [&] { return make(op, 0.0, -1, a, nullptr); });
  }
  return make(op, 0.0, -1, a, nullptr);
}

const ExprNode* n_diff(const ExprNode* n, int v);

const ExprNode* n_diff_raw(const ExprNode* n, int v) {
  switch (n->op) {
    case ExprOp::constant: return cnum(0.0);
    case ExprOp::variable: return cnum(n->var == v ? 1.0 : 0.0);
    case ExprOp::add: return n_add(n_diff(n->a, v), n_diff(n->b, v));
    case ExprOp::sub: return n_sub(n_diff(n->a, v), n_diff(n->b, v));
    case ExprOp::mul: return n_add(n_mul(n_diff(n->a, v), n->b), n_mul(n->a, n_diff(n->b, v)));
    case ExprOp::div: {
      const ExprNode* da = n_diff(n->a, v);
      const ExprNode* db = n_diff(n->b, v);
      return n_sub(n_div(da, n->b), n_div(n_mul(n->a, db), n_mul(n->b, n->b)));
    }
    case ExprOp::neg: return n_neg(n_diff(n->a, v));
    case ExprOp::pow:
      return n_mul(n_mul(cnum(n->num), n_pow(n->a, n->num - 1.0)), n_diff(n->a, v));
    case ExprOp::exp: return n_mul(n, n_diff(n->a, v));
    case ExprOp::log: return n_div(n_diff(n->a, v), n->a);
    case ExprOp::sqrt: return n_div(n_diff(n->a, v), n_mul(cnum(2.0), n));
  }
  return cnum(0.0);
}

const ExprNode* n_diff(const ExprNode* n, int v) {
  if (n->max_var < v || n->op == ExprOp::constant) return cnum(0.0);
  ExprFactory& f = ExprFactory::get();
  {
    std::lock_guard lock(f.memo_mu);
    if (std::size_t(v) < n->dcache.size() && n->dcache[std::size_t(v)]) return n->dcache[std::size_t(v)];
  }
  const ExprNode* d = n_diff_raw(n, v);
  std::lock_guard lock(f.memo_mu);
  if (n->dcache.size() <= std::size_t(v)) n->dcache.resize(std::size_t(v) + 1, nullptr);
  n->dcache[std::size_t(v)] = d;
  return d;
}

int precedence(const ExprNode* n) {
  switch (n->op) {
    case ExprOp::add:
    case ExprOp::sub: return 1;
    case ExprOp::mul:
    case ExprOp::div: return 2;
    case ExprOp::neg: return 3;
    case ExprOp::pow: return 4;
    case ExprOp::constant: return n->num < 0 || std::signbit(n->num) ? 3 : 5;
    default: return 5;
  }
}

void print(const ExprNode* n, const std::vector<std::string>& names, std::string& out);

void print_at(const ExprNode* n, int min_prec, const std::vector<std::string>& names, std::string& out) {
  if (precedence(n) < min_prec) {
    out += '(';
    print(n, names, out);
    out += ')';
  } else {
    print(n, names, out);
  }
}

void print(const ExprNode* n, const std::vector<std::string>& names, std::string& out) {
  switch (n->op) {
    case ExprOp::constant:
      if (std::signbit(n->num)) {
        out += '-';
        out += format_real(-n->num);
      } else {
        out += format_real(n->num);
      }
      return;
    case ExprOp::variable:
      out += std::size_t(n->var) < names.size() ? names[std::size_t(n->var)] : "v" + std::to_string(n->var);
      return;
    case ExprOp::add:
    case ExprOp::sub:
      print_at(n->a, 1, names, out);
      out += n->op == ExprOp::add ? " + " : " - ";
      print_at(n->b, 2, names, out);
      return;
    case ExprOp::mul:
    case ExprOp::div:
      print_at(n->a, 2, names, out);
      out += n->op == ExprOp::mul ? " * " : " / ";
      print_at(n->b, 3, names, out);
      return;
    case ExprOp::neg:
      out += '-';
      print_at(n->a, 4, names, out);
      return;
    case ExprOp::pow:
      print_at(n->a, 5, names, out);
      out += '^';
      out += format_real(n->num);
      return;
    case ExprOp::exp:
    case ExprOp::log:
    case ExprOp::sqrt:
      out += n->op == ExprOp::exp ? "exp(" : n->op == ExprOp::log ? "log(" : "sqrt(";
      print(n->a, names, out);
      out += ')';
      return;
  }
}

double eval_node(const ExprNode* n, std::span<const double> x,
                 std::unordered_map<const ExprNode*, double>& memo) {
  if (n->op == ExprOp::constant) return n->num;
  if (n->op == ExprOp::variable) return x[std::size_t(n->var)];
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  const double a = eval_node(n->a, x, memo);
  const double b = n->b ? eval_node(n->b, x, memo) : 0.0;
  double r = 0.0;
  switch (n->op) {
    case ExprOp::add: r = a + b; break;
    case ExprOp::sub: r = a - b; break;
    case ExprOp::mul: r = a * b; break;
    case ExprOp::div: r = a / b; break;
    case ExprOp::neg: r = -a; break;
    case ExprOp::pow: r = std::pow(a, n->num); break;
    case ExprOp::exp: r = std::exp(a); break;
    case ExprOp::log: r = std::log(a); break;
    case ExprOp::sqrt: r = std::sqrt(a); break;
    default: break;
  }
  if (!std::isfinite(r)) {
    std::string s;
    print(n, {}, s);
    throw DomainError("expression is undefined at this point", s);
  }
  memo.emplace(n, r);
  return r;
}

}  // namespace

Chart::Chart(int m) : m_(m) {
  if (m < 2) throw std::invalid_argument("chart requires m >= 2");
  for (int k = 1; k <= m; ++k) {
    names_.push_back("x" + std::to_string(k));
    names_.push_back("y" + std::to_string(k));
  }
}

std::optional<int> Chart::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return int(i);
  return std::nullopt;
}

ParseError::ParseError(const std::string& msg, std::size_t position)
    : std::runtime_error(msg + " at position " + std::to_string(position)), position_(position) {}

DomainError::DomainError(const std::string& what, std::string node)
    : std::runtime_error(what + ": " + (node.size() > 200 ? node.substr(0, 200) + "..." : node)),
      node_(std::move(node)) {}

Expr::Expr() : node_(cnum(0.0)) {}
Expr Expr::constant(double v) { return Expr(cnum(v)); }
Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  return Expr(make(ExprOp::variable, 0.0, index, nullptr, nullptr));
}
ExprOp Expr::op() const { return node_->op; }
double Expr::number() const { return node_->num; }
int Expr::var() const { return node_->var; }
Expr Expr::lhs() const { return Expr(node_->a); }
Expr Expr::rhs() const { return Expr(node_->b); }
bool Expr::is_constant(double v) const { return is_num(node_, v); }
std::size_t Expr::hash() const { return node_->hash; }
int Expr::max_variable() const { return node_->max_var; }
Expr Expr::diff(int var) const { return Expr(n_diff(node_, var)); }

double Expr::evaluate(std::span<const double> x) const {
  if (node_->max_var >= int(x.size())) throw std::invalid_argument("point has too few coordinates");
  std::unordered_map<const ExprNode*, double> memo;
  return eval_node(node_, x, memo);
}

std::string Expr::str(const std::vector<std::string>& names) const {
  std::string out;
  print(node_, names, out);
  return out;
}

Expr operator+(const Expr& a, const Expr& b) { return wrap(n_add(a.node(), b.node())); }
Expr operator-(const Expr& a, const Expr& b) { return wrap(n_sub(a.node(), b.node())); }
Expr operator*(const Expr& a, const Expr& b) { return wrap(n_mul(a.node(), b.node())); }
Expr operator/(const Expr& a, const Expr& b) { return wrap(n_div(a.node(), b.node())); }
Expr operator-(const Expr& a) { return wrap(n_neg(a.node())); }
Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }
Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }
Expr pow(const Expr& a, double p) { return wrap(n_pow(a.node(), p)); }
Expr exp(const Expr& a) { return wrap(n_unary(ExprOp::exp, a.node())); }
Expr log(const Expr& a) { return wrap(n_unary(ExprOp::log, a.node())); }
Expr sqrt(const Expr& a) { return wrap(n_unary(ExprOp::sqrt, a.node())); }

Expr differentiate(const Expr& e, int var) { return e.diff(var); }
double evaluate(const Expr& e, std::span<const double> x) { return e.evaluate(x); }

// ---- parser ----

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& names) : s_(text), names_(names) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ < s_.size()) {
      if (s_[pos_] == ')') throw ParseError("unbalanced parentheses", pos_);
      throw ParseError(std::string("unexpected token '") + s_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (eat('+')) e = e + term();
      else if (eat('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (eat('*')) e = e * factor();
      else if (eat('/')) e = e / factor();
      else return e;
    }
  }

  Expr factor() {
    if (eat('-')) return -factor();
    Expr b = base();
    if (eat('^')) {
      skip();
      const std::size_t at = pos_;
      std::optional<double> p = real(true);
      if (!p) throw ParseError("malformed exponent", at);
      return pow(b, *p);
    }
    return b;
  }

  std::optional<double> real(bool allow_sign) {
    skip();
    const std::size_t start = pos_;
    std::size_t i = pos_;
    if (allow_sign && i < s_.size() && (s_[i] == '-' || s_[i] == '+')) ++i;
    const std::size_t digits_start = i;
    while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i;
    if (i < s_.size() && s_[i] == '.') {
      ++i;
      while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i;
    }
    if (i == digits_start || (i == digits_start + 1 && s_[digits_start] == '.')) return std::nullopt;
    if (i < s_.size() && (s_[i] == 'e' || s_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < s_.size() && (s_[j] == '-' || s_[j] == '+')) ++j;
      const std::size_t exp_digits = j;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      if (j == exp_digits) throw ParseError("malformed number", start);
      i = j;
    }
    pos_ = i;
    return std::stod(s_.substr(start, i - start));
  }

  Expr base() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      const std::size_t open = pos_;
      ++pos_;
      Expr e = expr();
      if (!eat(')')) throw ParseError("unbalanced parentheses", open);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::optional<double> v = real(false);
      if (!v) throw ParseError("malformed number", pos_);
      return Expr::constant(*v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(' && (id == "exp" || id == "log" || id == "sqrt")) {
        const std::size_t open = pos_;
        ++pos_;
        Expr arg = expr();
        if (!eat(')')) throw ParseError("unbalanced parentheses", open);
        return id == "exp" ? exp(arg) : id == "log" ? log(arg) : sqrt(arg);
      }
      for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == id) return Expr::variable(int(i));
      throw ParseError("unknown variable '" + id + "'", start);
    }
    if (c == ')') throw ParseError("unbalanced parentheses", pos_);
    throw ParseError(std::string("unexpected token '") + c + "'", pos_);
  }

  const std::string& s_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(const std::string& text, const std::vector<std::string>& names) {
  return Parser(text, names).run();
}

Expr parse_expression(const std::string& text, const Chart& chart, const std::vector<std::string>& extra_names) {
  std::vector<std::string> names = chart.names();
  names.insert(names.end(), extra_names.begin(), extra_names.end());
  return parse_expression(text, names);
}

// ---- derivative tensors ----

std::vector<double> derivative_tensor(const Expr& e, std::span<const double> x, int k, int dim) {
  if (k < 0 || k > 6) throw std::invalid_argument("derivative order must be in [0, 6]");
  if (int(x.size()) < dim) throw std::invalid_argument("point has too few coordinates");
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= std::size_t(dim);
  // Sorted index tuples map to one derivative expression each.
  std::map<std::vector<int>, std::size_t> slot;
  std::vector<Expr> exprs;
  std::vector<std::size_t> which(total);
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    for (int i = k - 1; i >= 0; --i) {
      idx[std::size_t(i)] = int(r % std::size_t(dim));
      r /= std::size_t(dim);
    }
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    auto [it, inserted] = slot.try_emplace(sorted, exprs.size());
    if (inserted) {
      Expr d = e;
      for (int v : sorted) d = d.diff(v);
      exprs.push_back(d);
    }
    which[flat] = it->second;
  }
  const std::vector<double> vals = Tape(exprs).evaluate(x);
  std::vector<double> out(total);
  for (std::size_t flat = 0; flat < total; ++flat) out[flat] = vals[which[flat]];
  return out;
}

// ---- tape ----

Tape::Tape(const std::vector<Expr>& outputs) {
  std::unordered_map<const ExprNode*, std::int32_t> reg;
  std::function<std::int32_t(const ExprNode*)> emit = [&](const ExprNode* n) -> std::int32_t {
    if (auto it = reg.find(n); it != reg.end()) return it->second;
    simd::TapeOp op;
    switch (n->op) {
      case ExprOp::constant: op = {simd::TapeCode::constant, -1, -1, n->num}; break;
      case ExprOp::variable:
        op = {simd::TapeCode::variable, n->var, -1, 0.0};
        vars_ = std::max(vars_, n->var + 1);
        break;
      default: {
        const std::int32_t a = emit(n->a);
        const std::int32_t b = n->b ? emit(n->b) : -1;
        simd::TapeCode code = simd::TapeCode::add;
        switch (n->op) {
          case ExprOp::add: code = simd::TapeCode::add; break;
          case ExprOp::sub: code = simd::TapeCode::sub; break;
          case ExprOp::mul: code = simd::TapeCode::mul; break;
          case ExprOp::div: code = simd::TapeCode::div; break;
          case ExprOp::neg: code = simd::TapeCode::neg; break;
          case ExprOp::pow: code = simd::TapeCode::pow; break;
          case ExprOp::exp: code = simd::TapeCode::exp; break;
          case ExprOp::log: code = simd::TapeCode::log; break;
          case ExprOp::sqrt: code = simd::TapeCode::sqrt; break;
          default: break;
        }
        op = {code, a, b, n->op == ExprOp::pow ? n->num : 0.0};
      }
    }
    ops_.push_back(op);
    origin_.push_back(ExprFactory::wrap(n));
    const std::int32_t id = std::int32_t(ops_.size() - 1);
    reg.emplace(n, id);
    return id;
  };
  for (const Expr& e : outputs) out_.push_back(emit(e.node()));
}

std::string Tape::describe_op(std::int32_t op) const {
  if (op < 0 || std::size_t(op) >= origin_.size()) return "?";
  return origin_[std::size_t(op)].str(std::vector<std::string>{});
}

std::vector<double> Tape::evaluate(std::span<const double> x) const {
  if (int(x.size()) < vars_) throw std::invalid_argument("point has too few coordinates");
  std::vector<double> r(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const simd::TapeOp& op = ops_[i];
    double a = 0.0, b = 0.0;
    if (op.code == simd::TapeCode::variable) a = x[std::size_t(op.a)];
    else if (op.code != simd::TapeCode::constant) {
      a = r[std::size_t(op.a)];
      if (op.b >= 0) b = r[std::size_t(op.b)];
    }
    r[i] = simd::detail::scalar_op(op.code, a, b, op.k);
    if (!std::isfinite(r[i])) throw DomainError("expression is undefined at this point", describe_op(std::int32_t(i)));
  }
  std::vector<double> out(out_.size());
  for (std::size_t i = 0; i < out_.size(); ++i) out[i] = r[std::size_t(out_[i])];
  return out;
}

Tape::BatchResult Tape::evaluate_batch(std::span<const double> points, int dim) const {
  if (dim < vars_) throw std::invalid_argument("point has too few coordinates");
  const std::size_t lanes = points.size() / std::size_t(dim);
  std::vector<double> vars(static_cast<std::size_t>(dim) * lanes);
  for (std::size_t l = 0; l < lanes; ++l)
    for (int v = 0; v < dim; ++v) vars[std::size_t(v) * lanes + l] = points[l * std::size_t(dim) + std::size_t(v)];
  std::vector<double> regs(ops_.size() * lanes);
  BatchResult res;
  res.fault.assign(lanes, -1);
  simd::evaluate_tape(ops_, vars.data(), lanes, regs.data(), res.fault.data());
  res.values.resize(out_.size() * lanes);
  for (std::size_t o = 0; o < out_.size(); ++o)
    for (std::size_t l = 0; l < lanes; ++l) res.values[o * lanes + l] = regs[std::size_t(out_[o]) * lanes + l];
  return res;
}

}  // namespace cpc
