#include "contactforge/autodiff.hpp"

#include <cmath>

namespace cforge {

std::vector<D1> seed_first_order(std::span<const double> x) {
  std::size_t n = x.size();
  std::vector<D1> env(n);
  for (std::size_t i = 0; i < n; ++i) {
    env[i].v = x[i];
    env[i].d.assign(n, 0.0);
    env[i].d[i] = 1.0;
  }
  return env;
}

std::vector<D2> seed_second_order(std::span<const double> x) {
  std::size_t n = x.size();
  std::vector<D2> env(n);
  for (std::size_t i = 0; i < n; ++i) {
    D1 inner;
    inner.v = x[i];
    inner.d.assign(n, 0.0);
    inner.d[i] = 1.0;
    env[i].v = std::move(inner);
    env[i].d.assign(n, D1{});
    env[i].d[i] = D1(1.0);
  }
  return env;
}

std::vector<double> gradient(const Expr& f, const Chart& chart, std::span<const double> x) {
  auto env = seed_first_order(x);
  D1 r = eval<D1>(f, chart.coords, env);
  r.d.resize(x.size(), 0.0);
  return r.d;
}

SymMatrix hessian(const Expr& f, const Chart& chart, std::span<const double> x) {
  int n = int(x.size());
  auto env = seed_second_order(x);
  D2 r = eval<D2>(f, chart.coords, env);
  SymMatrix h;
  h.n = n;
  h.a.assign(std::size_t(n) * n, 0.0);
  r.d.resize(n);
  for (int j = 0; j < n; ++j) {
    const D1& row = r.d[j];
    for (int i = 0; i < n; ++i) h(j, i) = i < int(row.d.size()) ? row.d[i] : 0.0;
  }
  // symmetrise; forward-mode values already match to rounding
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double m = 0.5 * (h(i, j) + h(j, i));
      h(i, j) = h(j, i) = m;
    }
  return h;
}

std::vector<double> fd_gradient(const PointFn& f, std::span<const double> x, double h) {
  std::size_t n = x.size();
  std::vector<double> g(n), pt(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    double step = h * std::max(1.0, std::abs(x[i]));
    double saved = pt[i];
    pt[i] = saved + step;
    double fp = f(pt);
    pt[i] = saved - step;
    double fm = f(pt);
    pt[i] = saved;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

double fd_directional(const PointFn& f, std::span<const double> x, std::span<const double> dir,
                      double h) {
  std::size_t n = x.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(dir[i]));
  if (scale == 0.0) return 0.0;
  double step = h / scale;
  std::vector<double> p(n), m(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = x[i] + step * dir[i];
    m[i] = x[i] - step * dir[i];
  }
  return (f(p) - f(m)) / (2.0 * step);
}

}  // namespace cforge
