#pragma once

#include <functional>
#include <span>
#include <vector>

#include "contactforge/chart.hpp"
#include "contactforge/dual.hpp"
#include "contactforge/expr.hpp"

namespace cforge {

// Dense symmetric matrix as a flat row-major block; tiny dimensions only.
struct SymMatrix {
  int n = 0;
  std::vector<double> a;
  double operator()(int i, int j) const { return a[std::size_t(i) * n + j]; }
  double& operator()(int i, int j) { return a[std::size_t(i) * n + j]; }
};

// Exact partial derivatives of an expression at a point, one forward pass
// with all directions seeded.
std::vector<double> gradient(const Expr& f, const Chart& chart, std::span<const double> x);

// Exact second partials via nested duals, symmetrised.
SymMatrix hessian(const Expr& f, const Chart& chart, std::span<const double> x);

// Pointwise-only functions (eigenvalue fields and the like) fall back to
// central differences, error O(h^2). The step is scaled per coordinate by
// max(1, |x_i|).
using PointFn = std::function<double(std::span<const double>)>;

std::vector<double> fd_gradient(const PointFn& f, std::span<const double> x, double h = 1e-5);

// Directional derivative along a vector, same stencil.
double fd_directional(const PointFn& f, std::span<const double> x, std::span<const double> dir,
                      double h = 1e-5);

}  // namespace cforge
