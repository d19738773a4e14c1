#pragma once

// Shared fixtures: the two running examples (a bi-Hamiltonian pair on a
// cotangent-bundle chart and a contact system on R^3) plus random-input
// helpers for property tests.

#include <vector>

#include "contactforge/bihamiltonian.hpp"
#include "contactforge/flows.hpp"
#include "contactforge/rng.hpp"
#include "contactforge/structures.hpp"
#include "contactforge/symplectization.hpp"

namespace tf {

using namespace cforge;

inline Expr E(const char* s) { return parse(s); }

// (q, p, z) with the canonical contact form dz - p dq
inline ChartPtr chart_qpz() { return make_chart("qpz", {"q", "p", "z"}); }

inline TensorField eta_canonical(const ChartPtr& c) {
  auto eta = make_one_form(c);
  eta.set({0}, E("-p"));
  eta.set({2}, E("1"));
  return eta;
}

// closed form of the induced Jacobi structure of dz - p dq:
// Lambda = (d_q + p d_z) ^ d_p, E = -d_z
inline TensorField lambda_eta(const ChartPtr& c) {
  auto lam = make_field(c, FieldKind::Multivector, 2);
  lam.set({0, 1}, E("1"));
  lam.set({1, 2}, E("-p"));
  return lam;
}

inline TensorField e_eta(const ChartPtr& c) {
  auto e = make_vector_field(c);
  e.set({2}, E("-1"));
  return e;
}

// (x1, x2, p1, p2), the dense subset with x2, p1, p2 positive
inline ChartPtr chart_bundle() {
  return make_chart("bundle", {"x1", "x2", "p1", "p2"},
                    {E("x2"), E("p1"), E("p2")});
}

inline TensorField lambda_canonical(const ChartPtr& c) {
  auto lam = make_field(c, FieldKind::Multivector, 2);
  lam.set({0, 2}, E("1"));
  lam.set({1, 3}, E("1"));
  return lam;
}

inline TensorField lambda_second(const ChartPtr& c) {
  auto lam = make_field(c, FieldKind::Multivector, 2);
  lam.set({0, 2}, E("p1"));
  lam.set({1, 3}, E("p2*x2"));
  return lam;
}

inline TensorField theta_bundle(const ChartPtr& c) {
  auto th = make_one_form(c);
  th.set({0}, E("p1"));
  th.set({1}, E("p2"));
  return th;
}

inline TensorField euler_field_bundle(const ChartPtr& c) {
  auto d = make_vector_field(c);
  d.set({2}, E("p1"));
  d.set({3}, E("p2"));
  return d;
}

// angle-action side chart of the contact example: (phi1, phi2, lam)
inline ChartPtr chart_angles() { return make_chart("angles", {"phi1", "phi2", "lam"}); }

inline TensorField eta_angles(const ChartPtr& c) {
  auto eta = make_one_form(c);
  eta.set({0}, E("-lam"));
  eta.set({1}, E("1"));
  return eta;
}

inline std::vector<double> rand_point(Rng& rng, int dim, double lo = -2.0, double hi = 2.0) {
  std::vector<double> x(dim);
  for (auto& v : x) v = rng.uniform(lo, hi);
  return x;
}

inline std::vector<std::vector<double>> rand_points(Rng& rng, int n, int dim, double lo = -2.0,
                                                    double hi = 2.0) {
  std::vector<std::vector<double>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(rand_point(rng, dim, lo, hi));
  return out;
}

// random polynomial in the chart coordinates, total degree <= 2 per monomial
inline Expr rand_poly(Rng& rng, const Chart& chart, int monomials = 3) {
  Expr acc = Expr::constant(rng.uniform(-1.0, 1.0));
  for (int m = 0; m < monomials; ++m) {
    Expr term = Expr::constant(rng.uniform(-1.5, 1.5));
    int deg = int(rng.next_below(3));
    for (int d = 0; d < deg; ++d) {
      int i = int(rng.next_below(chart.dim()));
      term = Expr::mul(term, Expr::variable(chart.coords[i]));
    }
    acc = Expr::add(acc, term);
  }
  return acc;
}

}  // namespace tf
