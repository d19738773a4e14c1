#include "contactforge/tensor_ops.hpp"

#include <algorithm>
#include <cmath>

namespace cforge {

static ValGrad valgrad_from_dual(const PointTensor<D1>& t) {
  ValGrad out;
  out.value = PointTensor<double>{t.dim, t.degree, {}};
  out.grad.assign(t.dim, PointTensor<double>{t.dim, t.degree, {}});
  for (const auto& [idx, v] : t.comp) {
    out.value.comp[idx] = v.v;
    for (int a = 0; a < t.dim; ++a)
      out.grad[a].comp[idx] = a < int(v.d.size()) ? v.d[a] : 0.0;
  }
  return out;
}

ValGrad field_valgrad(const TensorField& f, std::span<const double> x) {
  auto env = seed_first_order(x);
  auto t = f.value<D1>(env);
  return valgrad_from_dual(t);
}

PointTensor<double> exterior_derivative(const TensorField& alpha, std::span<const double> x) {
  return exterior_derivative_value<double>(alpha, x);
}

PointTensor<double> lie_derivative_core(const ValGrad& x_vg, const ValGrad& t_vg,
                                        FieldKind kind) {
  const int n = t_vg.value.dim;
  const int k = t_vg.value.degree;
  std::vector<double> xv(n, 0.0);
  for (const auto& [idx, v] : x_vg.value.comp) xv[idx[0]] = v;
  // dx[a][i] = d_a X^i
  std::vector<std::vector<double>> dx(n, std::vector<double>(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (const auto& [idx, v] : x_vg.grad[a].comp) dx[a][idx[0]] = v;

  PointTensor<double> out{n, k, {}};
  for (const auto& tuple : increasing_tuples(n, k)) {
    double acc = 0.0;
    for (int a = 0; a < n; ++a) acc += xv[a] * t_vg.grad[a].full(tuple);
    for (int m = 0; m < k; ++m) {
      for (int a = 0; a < n; ++a) {
        IndexTuple swapped = tuple;
        swapped[m] = a;
        double tv = t_vg.value.full(swapped);
        if (tv == 0.0) continue;
        if (kind == FieldKind::Multivector) {
          acc -= dx[a][tuple[m]] * tv;  // frame legs transform with -dX
        } else {
          acc += dx[tuple[m]][a] * tv;  // coframe legs transform with +dX
        }
      }
    }
    if (acc != 0.0) out.comp[tuple] = acc;
  }
  return out;
}

PointTensor<double> lie_derivative(const TensorField& x_field, const TensorField& t_field,
                                   std::span<const double> x) {
  require_same_chart(x_field, t_field);
  if (x_field.degree != 1 || x_field.kind != FieldKind::Multivector)
    throw Error(ErrKind::UnsupportedDegree, "Lie derivative direction must be a vector field");
  return lie_derivative_core(field_valgrad(x_field, x), field_valgrad(t_field, x),
                             t_field.kind);
}

PointTensor<double> lie_derivative(const TensorField& x_field, const EvaluableField& t_field,
                                   std::span<const double> x) {
  return lie_derivative_core(field_valgrad(x_field, x), t_field.valgrad(x), t_field.kind);
}

PointTensor<double> schouten_22_core(const ValGrad& p, const ValGrad& q) {
  const int n = p.value.dim;
  auto dP = [&](int a, int j, int k) { return p.grad[a].full({j, k}); };
  auto dQ = [&](int a, int j, int k) { return q.grad[a].full({j, k}); };
  auto P = [&](int i, int j) { return p.value.full({i, j}); };
  auto Q = [&](int i, int j) { return q.value.full({i, j}); };

  PointTensor<double> out{n, 3, {}};
  for (const auto& t : increasing_tuples(n, 3)) {
    int i = t[0], j = t[1], k = t[2];
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      s += P(a, i) * dQ(a, j, k) + Q(a, i) * dP(a, j, k);
      s += P(a, j) * dQ(a, k, i) + Q(a, j) * dP(a, k, i);
      s += P(a, k) * dQ(a, i, j) + Q(a, k) * dP(a, i, j);
    }
    if (s != 0.0) out.comp[t] = -s;
  }
  return out;
}

PointTensor<double> schouten(const TensorField& a, const TensorField& b,
                             std::span<const double> x) {
  require_same_chart(a, b);
  if (a.kind != FieldKind::Multivector || b.kind != FieldKind::Multivector)
    throw Error(ErrKind::UnsupportedDegree, "Schouten bracket acts on multivector fields");
  int da = a.degree, db = b.degree;
  if (da == 1 && db == 1) {
    // Lie bracket [X, Y]
    auto xv = field_valgrad(a, x);
    auto yv = field_valgrad(b, x);
    const int n = a.dim();
    PointTensor<double> out{n, 1, {}};
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int c = 0; c < n; ++c)
        acc += xv.value.full({c}) * yv.grad[c].full({i}) -
               yv.value.full({c}) * xv.grad[c].full({i});
      if (acc != 0.0) out.comp[{i}] = acc;
    }
    return out;
  }
  if (da == 1 && db == 2) return lie_derivative(a, b, x);
  if (da == 2 && db == 1) {
    // graded antisymmetry: [P, X] = -[X, P] for a bivector and a vector
    auto r = lie_derivative(b, a, x);
    return r.scaled(-1.0);
  }
  if (da == 2 && db == 2) return schouten_22_core(field_valgrad(a, x), field_valgrad(b, x));
  throw Error(ErrKind::UnsupportedDegree,
              "Schouten bracket implemented for degrees (1,1), (1,2), (2,2)");
}

EvaluableField evaluable(const TensorField& f) {
  EvaluableField e;
  e.chart = f.chart;
  e.kind = f.kind;
  e.degree = f.degree;
  TensorField copy = f;
  e.value = [copy](std::span<const double> x) { return copy.at(x); };
  e.valgrad = [copy](std::span<const double> x) { return field_valgrad(copy, x); };
  return e;
}

EvaluableField evaluable_scalar(const ScalarField& f) {
  EvaluableField e;
  e.chart = f.chart;
  e.kind = FieldKind::Form;
  e.degree = 0;
  ScalarField copy = f;
  e.value = [copy](std::span<const double> x) {
    PointTensor<double> t{copy.chart->dim(), 0, {}};
    t.comp[{}] = copy.at(x);
    return t;
  };
  e.valgrad = [copy](std::span<const double> x) {
    ValGrad vg;
    int n = copy.chart->dim();
    vg.value = PointTensor<double>{n, 0, {}};
    vg.value.comp[{}] = copy.at(x);
    vg.grad.assign(n, PointTensor<double>{n, 0, {}});
    auto g = gradient(copy.expr, *copy.chart, x);
    for (int a = 0; a < n; ++a) vg.grad[a].comp[{}] = g[a];
    return vg;
  };
  return e;
}

EvaluableField evaluable_d_of(const TensorField& one_form, double factor) {
  if (one_form.kind != FieldKind::Form || one_form.degree != 1)
    throw Error(ErrKind::UnsupportedDegree, "expected a one-form");
  EvaluableField e;
  e.chart = one_form.chart;
  e.kind = FieldKind::Form;
  e.degree = 2;
  TensorField copy = one_form;
  e.value = [copy, factor](std::span<const double> x) {
    return exterior_derivative(copy, x).scaled(factor);
  };
  e.valgrad = [copy, factor](std::span<const double> x) {
    auto env = seed_first_order(x);
    auto d = exterior_derivative_value<D1>(copy, std::span<const D1>(env));
    ValGrad vg;
    vg.value = PointTensor<double>{d.dim, d.degree, {}};
    vg.grad.assign(d.dim, PointTensor<double>{d.dim, d.degree, {}});
    for (const auto& [idx, v] : d.comp) {
      vg.value.comp[idx] = factor * v.v;
      for (int a = 0; a < d.dim; ++a)
        vg.grad[a].comp[idx] = factor * (a < int(v.d.size()) ? v.d[a] : 0.0);
    }
    return vg;
  };
  return e;
}

}  // namespace cforge
