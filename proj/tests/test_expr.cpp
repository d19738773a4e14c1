#include <cmath>
#include <cstring>

#include "doctest.h"
#include "test_support.hpp"

using namespace cforge;

namespace {

double eval_at(const Expr& e, const std::vector<std::string>& names,
               const std::vector<double>& vals) {
  return eval<double>(e, names, vals);
}

}  // namespace

TEST_CASE("parser shapes") {
  Expr e = parse("p - z");
  CHECK(e.node().op == ExprOp::Sub);
  CHECK(e.node().a->op == ExprOp::Variable);
  CHECK(e.node().a->name == "p");
  CHECK(e.node().b->name == "z");

  Expr l = parse("log(p1*p2*x2)");
  CHECK(l.node().op == ExprOp::Call);
  CHECK(l.node().func == Func::Log);
  CHECK(l.node().a->op == ExprOp::Mul);
  CHECK(l.node().a->a->op == ExprOp::Mul);  // left-associative
  CHECK(l.node().a->b->name == "x2");

  Expr h = parse("r*z - r*p");
  CHECK(h.node().op == ExprOp::Sub);
  CHECK(h.node().a->op == ExprOp::Mul);
  CHECK(h.node().b->op == ExprOp::Mul);
}

TEST_CASE("evaluation basics") {
  CHECK(eval_at(parse("p - z"), {"p", "z"}, {2, 5}) == -3.0);
  CHECK(eval_at(parse("p2*x2"), {"p2", "x2"}, {1.5, 2}) == 3.0);
  CHECK(eval_at(parse("log(x2)"), {"x2"}, {1}) == 0.0);
  CHECK(eval_at(parse("2^3"), {}, {}) == 8.0);
  CHECK(eval_at(parse("x^-2"), {"x"}, {2}) == 0.25);
  CHECK(eval_at(parse("x^(3/2)"), {"x"}, {4}) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(eval_at(parse("-x^2"), {"x"}, {3}) == -9.0);  // ^ binds before unary minus
  CHECK(eval_at(parse("(-x)^2"), {"x"}, {3}) == 9.0);
  CHECK(eval_at(parse("2*3+1"), {}, {}) == 7.0);
  CHECK(eval_at(parse("1e2 + 1"), {}, {}) == 101.0);
}

TEST_CASE("free variables") {
  auto fv = parse("p - z").free_variables();
  CHECK(fv == std::set<std::string>{"p", "z"});
  CHECK(parse("3.5").free_variables().empty());
  CHECK(parse("r*z - r*p").free_variables() == std::set<std::string>{"p", "r", "z"});
}

TEST_CASE("parse errors carry position and hint") {
  CHECK_THROWS_AS(parse("1 + "), ParseError);
  CHECK_THROWS_AS(parse("foo(1)"), ParseError);  // unknown function
  CHECK_THROWS_AS(parse("x^y"), ParseError);     // exponent must be a literal
  CHECK_THROWS_AS(parse("x^2^3"), ParseError);
  CHECK_THROWS_AS(parse("(x"), ParseError);
  try {
    parse("a + $");
    CHECK(false);
  } catch (const ParseError& pe) {
    CHECK(pe.position() == 4);
  }
}

TEST_CASE("domain errors name the offending subtree") {
  CHECK_THROWS_AS(eval_at(parse("log(x)"), {"x"}, {-1}), Error);
  CHECK_THROWS_AS(eval_at(parse("sqrt(x)"), {"x"}, {0}), Error);
  CHECK_THROWS_AS(eval_at(parse("1/x"), {"x"}, {0}), Error);
  CHECK_THROWS_AS(eval_at(parse("x^-1"), {"x"}, {0}), Error);
  try {
    eval_at(parse("1 + log(x)"), {"x"}, {-2});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::Domain);
    CHECK(std::string(e.what()).find("log(x)") != std::string::npos);
  }
  CHECK_THROWS_AS(eval_at(parse("y"), {"x"}, {1}), Error);  // unbound
}

namespace {

// random expressions that stay evaluable on positive environments
Expr safe_expr(Rng& rng, const std::vector<std::string>& names, int depth) {
  auto leaf = [&]() -> Expr {
    if (rng.next_below(2) == 0) return Expr::constant(rng.uniform(0.25, 2.0));
    return Expr::variable(names[rng.next_below(names.size())]);
  };
  if (depth <= 0) return leaf();
  switch (rng.next_below(8)) {
    case 0: return Expr::add(safe_expr(rng, names, depth - 1), safe_expr(rng, names, depth - 1));
    case 1: return Expr::sub(safe_expr(rng, names, depth - 1), safe_expr(rng, names, depth - 1));
    case 2: return Expr::mul(safe_expr(rng, names, depth - 1), safe_expr(rng, names, depth - 1));
    case 3: return Expr::div(safe_expr(rng, names, depth - 1),
                             Expr::add(Expr::constant(0.5), Expr::mul(leaf(), leaf())));
    case 4: return Expr::call(Func::Sin, safe_expr(rng, names, depth - 1));
    case 5: return Expr::call(Func::Cos, safe_expr(rng, names, depth - 1));
    case 6: return Expr::pow(Expr::add(Expr::constant(0.5), Expr::mul(leaf(), leaf())),
                             Rational{std::int64_t(rng.next_below(3)) - 1, 2});
    default: return Expr::call(Func::Log, Expr::add(Expr::constant(0.5), Expr::mul(leaf(), leaf())));
  }
}

}  // namespace

TEST_CASE("pretty-print round trip evaluates bit-identically") {
  Rng rng(20240811);
  std::vector<std::string> names = {"a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    Expr e = safe_expr(rng, names, 3);
    Expr back = parse(e.pretty());
    for (int k = 0; k < 100; ++k) {
      std::vector<double> env = {rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0),
                                 rng.uniform(0.3, 2.0)};
      double v1 = eval<double>(e, names, env);
      double v2 = eval<double>(back, names, env);
      REQUIRE(std::memcmp(&v1, &v2, sizeof v1) == 0);
    }
  }
}

TEST_CASE("eval commutes with constant substitution") {
  Rng rng(77);
  std::vector<std::string> names = {"a", "b", "c"};
  for (int trial = 0; trial < 50; ++trial) {
    Expr e = safe_expr(rng, names, 3);
    double c = rng.uniform(0.4, 1.8);
    Expr subbed = e.substitute("a", Expr::constant(c));
    std::vector<double> env = {c, rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0)};
    CHECK(eval<double>(e, names, env) ==
          doctest::Approx(eval<double>(subbed, names, env)).epsilon(1e-15));
  }
}
