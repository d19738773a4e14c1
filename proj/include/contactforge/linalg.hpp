#pragma once

#include <complex>
#include <vector>

#include "contactforge/errors.hpp"

namespace cforge {

// Row-major dense matrix. Problem sizes here never exceed a handful of
// rows, so everything below is written for clarity over blocking.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}

  double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }
  double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

Mat mat_mul(const Mat& a, const Mat& b);
std::vector<double> mat_vec(const Mat& a, const std::vector<double>& x);
Mat mat_transpose(const Mat& a);
double max_abs(const Mat& a);

// LU with partial pivoting. `singular` is set when a pivot falls below
// rel_tol times the largest entry of the input.
struct Lu {
  Mat lu;
  std::vector<int> perm;
  int sign = 1;
  bool singular = false;
  double det = 0.0;
};

Lu lu_factor(Mat m, double rel_tol = 1e-13);
std::vector<double> lu_solve(const Lu& f, std::vector<double> b);
Mat lu_inverse(const Lu& f);

// Singular values by one-sided Jacobi, descending.
std::vector<double> singular_values(Mat m);

// Numerical rank with threshold rel_tol * sigma_max.
int rank_of(const Mat& m, double rel_tol = 1e-8);

// Eigenvalues of a general real matrix: Householder reduction to Hessenberg
// form followed by Francis double-shift QR. Values only, unordered.
std::vector<std::complex<double>> eigenvalues(Mat m);

}  // namespace cforge
