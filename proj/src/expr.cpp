#include "contactforge/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace cforge {

const char* to_string(ErrKind k) {
  switch (k) {
    case ErrKind::Parse: return "ParseError";
    case ErrKind::UnboundVariable: return "UnboundVariable";
    case ErrKind::Domain: return "DomainError";
    case ErrKind::ChartMismatch: return "ChartMismatch";
    case ErrKind::DegreeOverflow: return "DegreeOverflow";
    case ErrKind::UnsupportedDegree: return "UnsupportedDegree";
    case ErrKind::SingularFlat: return "SingularFlat";
    case ErrKind::SingularSymplectic: return "SingularSymplectic";
    case ErrKind::SingularSharp: return "SingularSharp";
    case ErrKind::EigenSolverFailure: return "EigenSolverFailure";
    case ErrKind::TrackingAmbiguity: return "TrackingAmbiguity";
    case ErrKind::WrongCount: return "WrongCount";
    case ErrKind::NotHomogeneous: return "NotHomogeneous";
    case ErrKind::NameCollision: return "NameCollision";
    case ErrKind::UnsupportedConformalFactor: return "UnsupportedConformalFactor";
    case ErrKind::RejectionExhausted: return "RejectionExhausted";
    case ErrKind::UnknownReference: return "UnknownReference";
    case ErrKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrKind::AntisymmetryViolation: return "AntisymmetryViolation";
    case ErrKind::IllConditionedJacobian: return "IllConditionedJacobian";
    case ErrKind::InternalInconsistency: return "InternalInconsistency";
    case ErrKind::Usage: return "UsageError";
  }
  return "Error";
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

namespace detail {

void throw_domain(const ExprNode& node, const char* what) {
  Expr sub{std::make_shared<ExprNode>(node)};
  throw Error(ErrKind::Domain, std::string(what) + " in subexpression '" + sub.pretty() + "'");
}

void throw_unbound(const ExprNode& node) {
  throw Error(ErrKind::UnboundVariable, "variable '" + node.name + "' is not bound");
}

}  // namespace detail

// -- constructors -------------------------------------------------------

static ExprPtr mk(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

Expr Expr::constant(double c) {
  ExprNode n;
  n.op = ExprOp::Constant;
  n.constant = c;
  return Expr(mk(std::move(n)));
}

Expr Expr::variable(std::string name) {
  ExprNode n;
  n.op = ExprOp::Variable;
  n.name = std::move(name);
  return Expr(mk(std::move(n)));
}

Expr Expr::neg(Expr a) {
  ExprNode n;
  n.op = ExprOp::Neg;
  n.a = a.ptr();
  return Expr(mk(std::move(n)));
}

static Expr binary(ExprOp op, Expr a, Expr b) {
  ExprNode n;
  n.op = op;
  n.a = a.ptr();
  n.b = b.ptr();
  return Expr(mk(std::move(n)));
}

Expr Expr::add(Expr a, Expr b) { return binary(ExprOp::Add, std::move(a), std::move(b)); }
Expr Expr::sub(Expr a, Expr b) { return binary(ExprOp::Sub, std::move(a), std::move(b)); }
Expr Expr::mul(Expr a, Expr b) { return binary(ExprOp::Mul, std::move(a), std::move(b)); }
Expr Expr::div(Expr a, Expr b) { return binary(ExprOp::Div, std::move(a), std::move(b)); }

Expr Expr::pow(Expr base, Rational exponent) {
  if (exponent.den <= 0) throw Error(ErrKind::Parse, "pow exponent denominator must be positive");
  ExprNode n;
  n.op = ExprOp::Pow;
  n.a = base.ptr();
  n.exponent = exponent;
  return Expr(mk(std::move(n)));
}

Expr Expr::call(Func f, Expr arg) {
  ExprNode n;
  n.op = ExprOp::Call;
  n.func = f;
  n.a = arg.ptr();
  return Expr(mk(std::move(n)));
}

// -- introspection ------------------------------------------------------

static void collect_vars(const ExprNode& n, std::set<std::string>& out) {
  if (n.op == ExprOp::Variable) out.insert(n.name);
  if (n.a) collect_vars(*n.a, out);
  if (n.b) collect_vars(*n.b, out);
}

std::set<std::string> Expr::free_variables() const {
  std::set<std::string> out;
  if (root_) collect_vars(*root_, out);
  return out;
}

static ExprPtr substitute_node(const ExprPtr& n, std::string_view name, const ExprPtr& value) {
  if (!n) return n;
  if (n->op == ExprOp::Variable) return n->name == name ? value : n;
  ExprPtr a = substitute_node(n->a, name, value);
  ExprPtr b = substitute_node(n->b, name, value);
  if (a == n->a && b == n->b) return n;
  ExprNode copy = *n;
  copy.a = a;
  copy.b = b;
  return mk(std::move(copy));
}

Expr Expr::substitute(std::string_view name, const Expr& value) const {
  return Expr(substitute_node(root_, name, value.ptr()));
}

// -- pretty printer -----------------------------------------------------

// Precedence levels: additive 1, multiplicative 2, unary minus 3, power 4.
static int precedence(const ExprNode& n) {
  switch (n.op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 1;
    case ExprOp::Mul:
    case ExprOp::Div: return 2;
    case ExprOp::Neg: return 3;
    case ExprOp::Pow: return 4;
    default: return 5;
  }
}

static void print_node(const ExprNode& n, int parent_prec, bool rhs, std::string& out) {
  int prec = precedence(n);
  bool parens = prec < parent_prec || (prec == parent_prec && rhs);
  if (parens) out += '(';
  switch (n.op) {
    case ExprOp::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.constant);
      out += buf;
      break;
    }
    case ExprOp::Variable:
      out += n.name;
      break;
    case ExprOp::Neg:
      out += '-';
      print_node(*n.a, prec, true, out);
      break;
    case ExprOp::Add:
      print_node(*n.a, prec, false, out);
      out += " + ";
      print_node(*n.b, prec, true, out);
      break;
    case ExprOp::Sub:
      print_node(*n.a, prec, false, out);
      out += " - ";
      print_node(*n.b, prec, true, out);
      break;
    case ExprOp::Mul:
      print_node(*n.a, prec, false, out);
      out += "*";
      print_node(*n.b, prec, true, out);
      break;
    case ExprOp::Div:
      print_node(*n.a, prec, false, out);
      out += "/";
      print_node(*n.b, prec, true, out);
      break;
    case ExprOp::Pow:
      print_node(*n.a, prec + 1, false, out);
      out += '^';
      if (n.exponent.is_integer()) {
        if (n.exponent.num < 0) {
          out += '(' + std::to_string(n.exponent.num) + ')';
        } else {
          out += std::to_string(n.exponent.num);
        }
      } else {
        out += '(' + std::to_string(n.exponent.num) + '/' + std::to_string(n.exponent.den) + ')';
      }
      break;
    case ExprOp::Call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.a, 0, false, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

std::string Expr::pretty() const {
  if (!root_) return "<empty>";
  std::string out;
  print_node(*root_, 0, false, out);
  return out;
}

// -- parser -------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input", "end of input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, std::string expected = "") {
    throw ParseError(pos_, msg, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      if (accept('+')) {
        e = Expr::add(e, parse_product());
      } else if (accept('-')) {
        e = Expr::sub(e, parse_product());
      } else {
        return e;
      }
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*')) {
        e = Expr::mul(e, parse_unary());
      } else if (accept('/')) {
        e = Expr::div(e, parse_unary());
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::neg(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (!accept('^')) return base;
    Rational r = parse_exponent();
    if (peek('^')) fail("chained '^' needs parentheses", "operator or end of input");
    return Expr::pow(base, r);
  }

  // Exponents are literal: an optionally signed integer, or a parenthesised
  // integer / rational such as (3/2) or (-1/2).
  Rational parse_exponent() {
    skip_ws();
    if (accept('(')) {
      bool neg = accept('-');
      std::int64_t num = parse_integer();
      Rational r{neg ? -num : num, 1};
      if (accept('/')) {
        r.den = parse_integer();
        if (r.den == 0) fail("zero exponent denominator");
      }
      if (!accept(')')) fail("missing ')' in exponent", ")");
      return r;
    }
    bool neg = accept('-');
    std::int64_t num = parse_integer();
    return Rational{neg ? -num : num, 1};
  }

  std::int64_t parse_integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected an integer exponent", "integer literal");
    std::int64_t value = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc{}) fail("integer exponent out of range");
    return value;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input", "number, name, or '('");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!accept(')')) fail("missing ')'", ")");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail(std::string("unexpected character '") + c + "'", "number, name, or '('");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to a following name, not this literal
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    if (token == ".") fail("malformed number literal");
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) fail("malformed number literal");
    return Expr::constant(v);
  }

  Expr parse_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (peek('(')) {
      Func f;
      if (name == "exp") f = Func::Exp;
      else if (name == "log") f = Func::Log;
      else if (name == "sin") f = Func::Sin;
      else if (name == "cos") f = Func::Cos;
      else if (name == "sqrt") f = Func::Sqrt;
      else {
        pos_ = start;
        fail("unknown function '" + name + "'", "exp, log, sin, cos, or sqrt");
      }
      accept('(');
      Expr arg = parse_sum();
      if (!accept(')')) fail("missing ')' after function argument", ")");
      return Expr::call(f, arg);
    }
    return Expr::variable(std::move(name));
  }
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace cforge
