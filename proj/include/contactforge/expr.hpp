#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contactforge/errors.hpp"
#include "contactforge/scalar.hpp"

namespace cforge {

// Exponents in pow nodes are literal rationals; everything else in an
// expression is an ordinary subtree.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  bool is_integer() const { return den == 1; }
  double as_double() const { return double(num) / double(den); }
};

enum class ExprOp : std::uint8_t {
  Constant,
  Variable,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Call,
};

enum class Func : std::uint8_t { Exp, Log, Sin, Cos, Sqrt };

const char* func_name(Func f);

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Immutable expression tree. Nodes are shared freely; evaluation never
// mutates, so concurrent use is safe.
struct ExprNode {
  ExprOp op = ExprOp::Constant;
  double constant = 0.0;   // Constant
  std::string name;        // Variable
  Func func = Func::Exp;   // Call
  Rational exponent;       // Pow
  ExprPtr a, b;            // operands
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(ExprPtr root) : root_(std::move(root)) {}

  static Expr constant(double c);
  static Expr variable(std::string name);
  static Expr neg(Expr a);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr base, Rational exponent);
  static Expr call(Func f, Expr arg);

  bool empty() const { return root_ == nullptr; }
  const ExprNode& node() const { return *root_; }
  const ExprPtr& ptr() const { return root_; }

  std::set<std::string> free_variables() const;
  std::string pretty() const;

  // Replaces every occurrence of `name` by `value`. No simplification.
  Expr substitute(std::string_view name, const Expr& value) const;

 private:
  ExprPtr root_;
};

// Standard infix grammar: ^ binds tighter than unary minus, which binds
// tighter than * and /, which bind tighter than + and -. All binary
// operators associate left except ^, whose exponent must be an integer or
// parenthesised rational literal. Unknown function names are parse errors.
Expr parse(std::string_view text);

// -- evaluation --------------------------------------------------------

// Environment binding coordinate names to scalar values. Charts are small
// (dim <= 6), so name lookup is a linear scan.
template <class T>
struct Env {
  std::span<const std::string> names;
  std::span<const T> values;

  const T* find(std::string_view n) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return &values[i];
    return nullptr;
  }
};

namespace detail {

[[noreturn]] void throw_domain(const ExprNode& node, const char* what);
[[noreturn]] void throw_unbound(const ExprNode& node);

template <class T>
T eval_node(const ExprNode& n, const Env<T>& env) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  switch (n.op) {
    case ExprOp::Constant:
      return T(n.constant);
    case ExprOp::Variable: {
      const T* v = env.find(n.name);
      if (!v) throw_unbound(n);
      return *v;
    }
    case ExprOp::Neg:
      return -eval_node(*n.a, env);
    case ExprOp::Add:
      return eval_node(*n.a, env) + eval_node(*n.b, env);
    case ExprOp::Sub:
      return eval_node(*n.a, env) - eval_node(*n.b, env);
    case ExprOp::Mul:
      return eval_node(*n.a, env) * eval_node(*n.b, env);
    case ExprOp::Div: {
      T num = eval_node(*n.a, env);
      T den = eval_node(*n.b, env);
      if (primal_of(den) == 0.0) throw_domain(n, "division by zero");
      return num / den;
    }
    case ExprOp::Pow: {
      T base = eval_node(*n.a, env);
      if (n.exponent.is_integer()) {
        std::int64_t e = n.exponent.num;
        if (e < 0 && primal_of(base) == 0.0) throw_domain(n, "zero raised to a negative power");
        T acc(1.0);
        std::int64_t k = e < 0 ? -e : e;
        for (std::int64_t i = 0; i < k; ++i) acc = acc * base;
        if (e < 0) acc = T(1.0) / acc;
        return acc;
      }
      if (primal_of(base) <= 0.0) throw_domain(n, "rational power of a non-positive value");
      return exp(T(n.exponent.as_double()) * log(base));
    }
    case ExprOp::Call: {
      T arg = eval_node(*n.a, env);
      switch (n.func) {
        case Func::Exp:
          return exp(arg);
        case Func::Log:
          if (primal_of(arg) <= 0.0) throw_domain(n, "log of a non-positive value");
          return log(arg);
        case Func::Sin:
          return sin(arg);
        case Func::Cos:
          return cos(arg);
        case Func::Sqrt:
          if (primal_of(arg) <= 0.0) throw_domain(n, "sqrt of a non-positive value");
          return sqrt(arg);
      }
      break;
    }
  }
  throw Error(ErrKind::Domain, "corrupt expression node");
}

}  // namespace detail

template <class T>
T eval(const Expr& e, const Env<T>& env) {
  if (e.empty()) throw Error(ErrKind::Domain, "evaluating empty expression");
  return detail::eval_node(*e.ptr(), env);
}

template <class T>
T eval(const Expr& e, std::span<const std::string> names, std::span<const T> values) {
  return eval(e, Env<T>{names, values});
}

}  // namespace cforge
