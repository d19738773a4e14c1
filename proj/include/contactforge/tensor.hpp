#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "contactforge/chart.hpp"
#include "contactforge/dual.hpp"
#include "contactforge/expr.hpp"
#include "contactforge/linalg.hpp"

namespace cforge {

using IndexTuple = std::vector<int>;

// parity of the permutation sorting idx; returns 0 for repeated indices
int sort_sign(IndexTuple& idx);

// all strictly increasing degree-k tuples in dimension n, lexicographic
std::vector<IndexTuple> increasing_tuples(int dim, int degree);

// Antisymmetric tensor value at a point: strictly increasing index tuples
// only, absent entries are zero. Used for both multivector and form values;
// the variance lives in the owning field.
template <class T>
struct PointTensor {
  int dim = 0;
  int degree = 0;
  std::map<IndexTuple, T> comp;

  T full(IndexTuple idx) const {
    int s = sort_sign(idx);
    if (s == 0) return T{};
    auto it = comp.find(idx);
    if (it == comp.end()) return T{};
    return s > 0 ? it->second : -it->second;
  }

  void add(IndexTuple idx, const T& value) {
    int s = sort_sign(idx);
    if (s == 0) return;
    auto& slot = comp[idx];
    slot = s > 0 ? slot + value : slot - value;
  }

  PointTensor& operator+=(const PointTensor& other) {
    for (const auto& [k, v] : other.comp) {
      auto& slot = comp[k];
      slot = slot + v;
    }
    return *this;
  }

  PointTensor scaled(const T& factor) const {
    PointTensor r{dim, degree, {}};
    for (const auto& [k, v] : comp) r.comp[k] = v * factor;
    return r;
  }

  double max_abs_primal() const {
    double m = 0.0;
    for (const auto& [k, v] : comp) m = std::max(m, std::abs(primal_of(v)));
    return m;
  }
};

// degree-2 value as a full antisymmetric matrix (doubles only)
Mat full_matrix(const PointTensor<double>& t);
PointTensor<double> from_full_matrix(const Mat& m);

enum class FieldKind { Multivector, Form };

// Tensor field with expression components on a fixed chart. Components are
// keyed by strictly increasing coordinate index tuples.
struct TensorField {
  ChartPtr chart;
  FieldKind kind = FieldKind::Multivector;
  int degree = 0;
  std::map<IndexTuple, Expr> comp;

  int dim() const { return chart->dim(); }

  void set(IndexTuple idx, Expr e);

  template <class T>
  PointTensor<T> value(std::span<const T> env) const {
    PointTensor<T> out{dim(), degree, {}};
    for (const auto& [idx, e] : comp) out.comp[idx] = eval<T>(e, chart->coords, env);
    return out;
  }

  PointTensor<double> at(std::span<const double> x) const { return value<double>(x); }
};

TensorField make_field(ChartPtr chart, FieldKind kind, int degree);

// degree-1 conveniences
TensorField make_vector_field(ChartPtr chart);
TensorField make_one_form(ChartPtr chart);
std::vector<double> vector_at(const TensorField& v, std::span<const double> x);
std::vector<double> covector_at(const TensorField& a, std::span<const double> x);

// Scalar field: expression bound to a chart.
struct ScalarField {
  ChartPtr chart;
  Expr expr;

  double at(std::span<const double> x) const { return eval<double>(expr, chart->coords, x); }
};

// (1,1)-tensor value at a point, e.g. a recursion operator.
struct MixedTensorPointValue {
  ChartPtr chart;
  std::vector<double> point;
  Mat matrix;
};

void require_same_chart(const TensorField& a, const TensorField& b);

}  // namespace cforge
