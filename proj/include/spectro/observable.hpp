#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectro/phase_point.hpp"

namespace spectro {

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(const std::string& msg, size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

/// Expression tree over q_1..q_d, p_1..p_d with +, -, *, /, integer powers,
/// sin, cos, exp and numeric literals.
struct Expr {
  enum class Op { constant, variable, add, sub, mul, div, pow, neg, sin, cos, exp };
  Op op = Op::constant;
  double value = 0.0;  // constant
  int var = -1;        // variable index: 0..d-1 are q, d..2d-1 are p
  int ipow = 0;        // pow exponent
  std::vector<Expr> kids;

  bool operator==(const Expr& o) const {
    return op == o.op && value == o.value && var == o.var && ipow == o.ipow && kids == o.kids;
  }

  template <class Real>
  Real eval(std::span<const Real> vars) const {
    switch (op) {
      case Op::constant: return static_cast<Real>(value);
      case Op::variable: return vars[var];
      case Op::add: return kids[0].eval(vars) + kids[1].eval(vars);
      case Op::sub: return kids[0].eval(vars) - kids[1].eval(vars);
      case Op::mul: return kids[0].eval(vars) * kids[1].eval(vars);
      case Op::div: return kids[0].eval(vars) / kids[1].eval(vars);
      case Op::neg: return -kids[0].eval(vars);
      case Op::sin: return std::sin(kids[0].eval(vars));
      case Op::cos: return std::cos(kids[0].eval(vars));
      case Op::exp: return std::exp(kids[0].eval(vars));
      case Op::pow: {
        const Real b = kids[0].eval(vars);
        if (ipow == 0) return Real(1);
        Real r = Real(1);
        const int n = std::abs(ipow);
        for (int i = 0; i < n; ++i) r *= b;
        return ipow > 0 ? r : Real(1) / r;
      }
    }
    return Real(0);
  }
};

/// Multivariate polynomial as exponent-vector -> coefficient.
struct Polynomial {
  int nvars = 0;
  std::map<std::vector<int>, double> terms;

  int degree() const {
    int deg = 0;
    for (const auto& [m, c] : terms) {
      if (c == 0.0) continue;
      int d = 0;
      for (int e : m) d += e;
      deg = std::max(deg, d);
    }
    return deg;
  }
};

namespace detail {

class Parser {
 public:
  Parser(const std::string& src, int d) : src_(src), d_(d) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < src_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  Expr parse_sum() {
    Expr lhs = parse_prod();
    for (;;) {
      skip_ws();
      if (consume('+')) {
        lhs = binary(Expr::Op::add, std::move(lhs), parse_prod());
      } else if (consume('-')) {
        lhs = binary(Expr::Op::sub, std::move(lhs), parse_prod());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_prod() {
    Expr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        lhs = binary(Expr::Op::mul, std::move(lhs), parse_unary());
      } else if (consume('/')) {
        lhs = binary(Expr::Op::div, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    skip_ws();
    if (consume('-')) {
      Expr e;
      e.op = Expr::Op::neg;
      e.kids.push_back(parse_unary());
      return e;
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    skip_ws();
    if (!consume('^')) return base;
    skip_ws();
    bool negexp = consume('-');
    skip_ws();
    const size_t start = pos_;
    long v = 0;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      v = v * 10 + (src_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) throw ParseError("expected integer exponent", pos_);
    if (v > 64) throw ParseError("exponent too large", start);
    Expr e;
    e.op = Expr::Op::pow;
    e.ipow = static_cast<int>(negexp ? -v : v);
    e.kids.push_back(std::move(base));
    return e;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (consume('(')) {
      Expr e = parse_sum();
      skip_ws();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    const size_t start = pos_;
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(src_.substr(start), &used);
    } catch (const std::exception&) {
      throw ParseError("malformed number", start);
    }
    pos_ = start + used;
    Expr e;
    e.op = Expr::Op::constant;
    e.value = v;
    return e;
  }

  Expr parse_ident() {
    const size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string name = src_.substr(start, pos_ - start);
    if (name == "sin" || name == "cos" || name == "exp") {
      skip_ws();
      if (!consume('(')) throw ParseError("expected '(' after " + name, pos_);
      Expr arg = parse_sum();
      skip_ws();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      Expr e;
      e.op = name == "sin" ? Expr::Op::sin : (name == "cos" ? Expr::Op::cos : Expr::Op::exp);
      e.kids.push_back(std::move(arg));
      return e;
    }
    const int var = variable_index(name);
    if (var < 0) throw ParseError("unknown identifier '" + name + "'", start);
    Expr e;
    e.op = Expr::Op::variable;
    e.var = var;
    return e;
  }

  /// q, p (d = 1) or q1/q_1 .. p1/p_1 .. naming; returns -1 when unknown.
  int variable_index(const std::string& name) const {
    if (name.empty()) return -1;
    const char head = name[0];
    if (head != 'q' && head != 'p') return -1;
    std::string rest = name.substr(1);
    if (!rest.empty() && rest[0] == '_') rest = rest.substr(1);
    int axis = 0;
    if (rest.empty()) {
      if (d_ != 1) return -1;
      axis = 0;
    } else {
      for (char ch : rest)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return -1;
      axis = std::stoi(rest) - 1;
      if (axis < 0 || axis >= d_) return -1;
    }
    return head == 'q' ? axis : d_ + axis;
  }

  Expr binary(Expr::Op op, Expr a, Expr b) {
    Expr e;
    e.op = op;
    e.kids.push_back(std::move(a));
    e.kids.push_back(std::move(b));
    return e;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  const std::string& src_;
  int d_;
  size_t pos_ = 0;
};

inline bool is_const(const Expr& e) { return e.op == Expr::Op::constant; }

/// Bottom-up constant folding; IEEE semantics (division by a constant zero
/// folds to inf/nan like evaluation would).
inline Expr fold_constants(Expr e) {
  for (auto& k : e.kids) k = fold_constants(std::move(k));
  bool all_const = !e.kids.empty();
  for (const auto& k : e.kids) all_const = all_const && is_const(k);
  if (all_const) {
    const double v = e.eval<double>(std::span<const double>());
    Expr c;
    c.op = Expr::Op::constant;
    c.value = v;
    return c;
  }
  return e;
}

inline void poly_mul(std::map<std::vector<int>, double>& out, const std::map<std::vector<int>, double>& a,
                     const std::map<std::vector<int>, double>& b) {
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      std::vector<int> m(ma.size());
      for (size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out[m] += ca * cb;
    }
}

inline std::optional<Polynomial> to_polynomial(const Expr& e, int nvars) {
  Polynomial p;
  p.nvars = nvars;
  const std::vector<int> one(nvars, 0);
  switch (e.op) {
    case Expr::Op::constant:
      p.terms[one] = e.value;
      return p;
    case Expr::Op::variable: {
      std::vector<int> m(nvars, 0);
      m[e.var] = 1;
      p.terms[m] = 1.0;
      return p;
    }
    case Expr::Op::add:
    case Expr::Op::sub: {
      auto a = to_polynomial(e.kids[0], nvars);
      auto b = to_polynomial(e.kids[1], nvars);
      if (!a || !b) return std::nullopt;
      p = *a;
      const double sgn = e.op == Expr::Op::add ? 1.0 : -1.0;
      for (const auto& [m, c] : b->terms) p.terms[m] += sgn * c;
      return p;
    }
    case Expr::Op::mul: {
      auto a = to_polynomial(e.kids[0], nvars);
      auto b = to_polynomial(e.kids[1], nvars);
      if (!a || !b) return std::nullopt;
      poly_mul(p.terms, a->terms, b->terms);
      return p;
    }
    case Expr::Op::div: {
      if (!is_const(e.kids[1]) || e.kids[1].value == 0.0) return std::nullopt;
      auto a = to_polynomial(e.kids[0], nvars);
      if (!a) return std::nullopt;
      p = *a;
      for (auto& [m, c] : p.terms) c /= e.kids[1].value;
      return p;
    }
    case Expr::Op::neg: {
      auto a = to_polynomial(e.kids[0], nvars);
      if (!a) return std::nullopt;
      p = *a;
      for (auto& [m, c] : p.terms) c = -c;
      return p;
    }
    case Expr::Op::pow: {
      if (e.ipow < 0) return std::nullopt;
      auto a = to_polynomial(e.kids[0], nvars);
      if (!a) return std::nullopt;
      p.terms[one] = 1.0;
      for (int i = 0; i < e.ipow; ++i) {
        std::map<std::vector<int>, double> acc;
        poly_mul(acc, p.terms, a->terms);
        p.terms = std::move(acc);
      }
      return p;
    }
    default: return std::nullopt;  // sin, cos, exp
  }
}

inline void pretty_print(const Expr& e, std::ostringstream& os) {
  auto paren = [&os](const Expr& k) {
    os << '(';
    pretty_print(k, os);
    os << ')';
  };
  switch (e.op) {
    case Expr::Op::constant: os << e.value; break;
    case Expr::Op::variable: os << "v" << e.var; break;  // resolved by Observable::pretty
    case Expr::Op::add:
      paren(e.kids[0]);
      os << " + ";
      paren(e.kids[1]);
      break;
    case Expr::Op::sub:
      paren(e.kids[0]);
      os << " - ";
      paren(e.kids[1]);
      break;
    case Expr::Op::mul:
      paren(e.kids[0]);
      os << "*";
      paren(e.kids[1]);
      break;
    case Expr::Op::div:
      paren(e.kids[0]);
      os << "/";
      paren(e.kids[1]);
      break;
    case Expr::Op::neg:
      os << "-";
      paren(e.kids[0]);
      break;
    case Expr::Op::pow:
      paren(e.kids[0]);
      os << "^" << e.ipow;
      break;
    case Expr::Op::sin:
    case Expr::Op::cos:
    case Expr::Op::exp:
      os << (e.op == Expr::Op::sin ? "sin" : e.op == Expr::Op::cos ? "cos" : "exp");
      paren(e.kids[0]);
      break;
  }
}

inline void collect_vars(const Expr& e, std::vector<bool>& used) {
  if (e.op == Expr::Op::variable) used[e.var] = true;
  for (const auto& k : e.kids) collect_vars(k, used);
}

}  // namespace detail

/// Phase-space observable a(q, p): parsed expression with evaluation over
/// PhasePoints (variables laid out q_1..q_d, p_1..p_d).
class Observable {
 public:
  static Observable parse(const std::string& src, int d) {
    if (src.empty()) throw ParseError("empty expression", 0);
    Observable o;
    o.dim_ = d;
    o.source_ = src;
    o.ast_ = detail::fold_constants(detail::Parser(src, d).parse());
    return o;
  }

  int dim() const { return dim_; }
  const std::string& source() const { return source_; }
  const Expr& ast() const { return ast_; }

  template <class Real = double>
  Real eval_vars(std::span<const Real> vars) const {
    return ast_.eval(vars);
  }

  double eval(const PhasePoint& z) const {
    std::vector<double> vars(2 * dim_);
    for (int j = 0; j < dim_; ++j) {
      vars[j] = z.q[j];
      vars[dim_ + j] = z.p[j];
    }
    return ast_.eval(std::span<const double>(vars));
  }

  /// Polynomial total degree, or nullopt for non-polynomial expressions.
  std::optional<int> degree() const {
    auto p = detail::to_polynomial(ast_, 2 * dim_);
    if (!p) return std::nullopt;
    return p->degree();
  }

  std::optional<Polynomial> polynomial() const { return detail::to_polynomial(ast_, 2 * dim_); }

  /// Indices of variables the expression actually reads.
  std::vector<int> used_vars() const {
    std::vector<bool> used(2 * dim_, false);
    detail::collect_vars(ast_, used);
    std::vector<int> out;
    for (int i = 0; i < 2 * dim_; ++i)
      if (used[i]) out.push_back(i);
    return out;
  }

  /// Canonical fully-parenthesized form; parse(pretty()) == ast holds.
  std::string pretty() const {
    std::ostringstream os;
    os.precision(17);
    detail::pretty_print(ast_, os);
    std::string s = os.str();
    // Resolve the neutral variable spellings emitted by pretty_print.
    for (int v = 2 * dim_ - 1; v >= 0; --v) {
      const std::string from = "v" + std::to_string(v);
      const std::string to =
          (v < dim_ ? "q" : "p") + (dim_ == 1 ? "" : std::to_string(v % dim_ + 1));
      size_t pos = 0;
      while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
      }
    }
    return s;
  }

 private:
  int dim_ = 1;
  std::string source_;
  Expr ast_;
};

}  // namespace spectro
