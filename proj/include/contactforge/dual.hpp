#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "contactforge/errors.hpp"
#include "contactforge/scalar.hpp"

namespace cforge {

// Forward-mode dual scalar with a vector of tangents (one per seeded
// direction). An empty tangent vector means "all tangents zero"; constants
// stay cheap that way. Nesting Dual<Dual<double>> yields exact second
// derivatives.
template <class T>
struct Dual {
  T v{};
  std::vector<T> d;

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT: implicit by design, mirrors double
  Dual(T value, std::vector<T> tangent) : v(std::move(value)), d(std::move(tangent)) {}
};

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

template <class T>
double primal_of(const Dual<T>& x) {
  return primal_of(x.v);
}

namespace dual_detail {

template <class T>
const T& tangent_at(const std::vector<T>& d, std::size_t i) {
  static const T zero{};
  return i < d.size() ? d[i] : zero;
}

}  // namespace dual_detail

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  Dual<T> r;
  r.v = -a.v;
  r.d.reserve(a.d.size());
  for (const T& t : a.d) r.d.push_back(-t);
  return r;
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  using dual_detail::tangent_at;
  Dual<T> r;
  r.v = a.v + b.v;
  std::size_t w = std::max(a.d.size(), b.d.size());
  r.d.resize(w);
  for (std::size_t i = 0; i < w; ++i) r.d[i] = tangent_at(a.d, i) + tangent_at(b.d, i);
  return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  using dual_detail::tangent_at;
  Dual<T> r;
  r.v = a.v - b.v;
  std::size_t w = std::max(a.d.size(), b.d.size());
  r.d.resize(w);
  for (std::size_t i = 0; i < w; ++i) r.d[i] = tangent_at(a.d, i) - tangent_at(b.d, i);
  return r;
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  using dual_detail::tangent_at;
  Dual<T> r;
  r.v = a.v * b.v;
  std::size_t w = std::max(a.d.size(), b.d.size());
  r.d.resize(w);
  for (std::size_t i = 0; i < w; ++i)
    r.d[i] = tangent_at(a.d, i) * b.v + a.v * tangent_at(b.d, i);
  return r;
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  using dual_detail::tangent_at;
  Dual<T> r;
  r.v = a.v / b.v;
  std::size_t w = std::max(a.d.size(), b.d.size());
  r.d.resize(w);
  T inv_b2 = T(1.0) / (b.v * b.v);
  for (std::size_t i = 0; i < w; ++i)
    r.d[i] = (tangent_at(a.d, i) * b.v - a.v * tangent_at(b.d, i)) * inv_b2;
  return r;
}

// chain rule helper: g(a) with derivative dg at a.v
template <class T>
Dual<T> lift_unary(const Dual<T>& a, T value, T deriv) {
  Dual<T> r;
  r.v = std::move(value);
  r.d.reserve(a.d.size());
  for (const T& t : a.d) r.d.push_back(deriv * t);
  return r;
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.v);
  return lift_unary(a, e, e);
}

template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return lift_unary(a, log(a.v), T(1.0) / a.v);
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return lift_unary(a, sin(a.v), cos(a.v));
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return lift_unary(a, cos(a.v), -sin(a.v));
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  return lift_unary(a, s, T(0.5) / s);
}

// -- seeding helpers -----------------------------------------------------

// First-order environment: variable i carries tangent e_i.
std::vector<D1> seed_first_order(std::span<const double> x);

// Second-order environment: evaluating at it yields value, gradient (both
// tangent layers) and the full Hessian in d[j].d[i].
std::vector<D2> seed_second_order(std::span<const double> x);

// Generic re-seeding: promote an existing environment of T to Dual<T> with
// unit tangents, for one more derivative layer on top of whatever T tracks.
template <class T>
std::vector<Dual<T>> seed_over(std::span<const T> x) {
  std::size_t n = x.size();
  std::vector<Dual<T>> env(n);
  for (std::size_t i = 0; i < n; ++i) {
    env[i].v = x[i];
    env[i].d.assign(n, T{});
    env[i].d[i] = T(1.0);
  }
  return env;
}

}  // namespace cforge
