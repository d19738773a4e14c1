#include "contactforge/tensor.hpp"

#include <algorithm>

namespace cforge {

int sort_sign(IndexTuple& idx) {
  int sign = 1;
  // insertion sort, counting swaps; tuples have at most ~5 entries
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

std::vector<IndexTuple> increasing_tuples(int dim, int degree) {
  std::vector<IndexTuple> out;
  if (degree < 0 || degree > dim) return out;
  IndexTuple cur(degree);
  for (int i = 0; i < degree; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    if (degree == 0) break;
    int k = degree - 1;
    while (k >= 0 && cur[k] == dim - degree + k) --k;
    if (k < 0) break;
    ++cur[k];
    for (int j = k + 1; j < degree; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

Mat full_matrix(const PointTensor<double>& t) {
  if (t.degree != 2) throw Error(ErrKind::UnsupportedDegree, "full_matrix needs degree 2");
  Mat m(t.dim, t.dim);
  for (const auto& [idx, v] : t.comp) {
    m(idx[0], idx[1]) = v;
    m(idx[1], idx[0]) = -v;
  }
  return m;
}

PointTensor<double> from_full_matrix(const Mat& m) {
  PointTensor<double> t{m.rows, 2, {}};
  for (int i = 0; i < m.rows; ++i)
    for (int j = i + 1; j < m.cols; ++j)
      if (m(i, j) != 0.0) t.comp[{i, j}] = m(i, j);
  return t;
}

void TensorField::set(IndexTuple idx, Expr e) {
  for (int i : idx)
    if (i < 0 || i >= dim())
      throw Error(ErrKind::IndexOutOfRange, "component index out of range for chart '" +
                                                chart->name + "'");
  IndexTuple sorted = idx;
  int s = sort_sign(sorted);
  if (s == 0)
    throw Error(ErrKind::AntisymmetryViolation,
                "repeated index in an antisymmetric component");
  if (sorted != idx)
    throw Error(ErrKind::AntisymmetryViolation,
                "component indices must be strictly increasing");
  if (int(idx.size()) != degree)
    throw Error(ErrKind::IndexOutOfRange, "component arity does not match field degree");
  comp[std::move(sorted)] = std::move(e);
}

TensorField make_field(ChartPtr chart, FieldKind kind, int degree) {
  if (degree < 0 || degree > chart->dim())
    throw Error(ErrKind::DegreeOverflow, "field degree exceeds chart dimension");
  if (kind == FieldKind::Multivector && degree > 3)
    throw Error(ErrKind::UnsupportedDegree, "multivector fields are supported up to degree 3");
  TensorField f;
  f.chart = std::move(chart);
  f.kind = kind;
  f.degree = degree;
  return f;
}

TensorField make_vector_field(ChartPtr chart) {
  return make_field(std::move(chart), FieldKind::Multivector, 1);
}

TensorField make_one_form(ChartPtr chart) {
  return make_field(std::move(chart), FieldKind::Form, 1);
}

std::vector<double> vector_at(const TensorField& v, std::span<const double> x) {
  std::vector<double> out(v.dim(), 0.0);
  auto t = v.at(x);
  for (const auto& [idx, val] : t.comp) out[idx[0]] = val;
  return out;
}

std::vector<double> covector_at(const TensorField& a, std::span<const double> x) {
  return vector_at(a, x);
}

void require_same_chart(const TensorField& a, const TensorField& b) {
  if (a.chart.get() == b.chart.get()) return;
  if (a.chart && b.chart && a.chart->coords == b.chart->coords) return;
  throw Error(ErrKind::ChartMismatch, "fields live on different charts");
}

}  // namespace cforge
