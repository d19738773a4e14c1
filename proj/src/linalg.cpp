#include "contactforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cforge {

Mat mat_mul(const Mat& a, const Mat& b) {
  Mat r(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

std::vector<double> mat_vec(const Mat& a, const std::vector<double>& x) {
  std::vector<double> r(a.rows, 0.0);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r[i] += a(i, j) * x[j];
  return r;
}

Mat mat_transpose(const Mat& a) {
  Mat r(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r(j, i) = a(i, j);
  return r;
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.a) m = std::max(m, std::abs(v));
  return m;
}

Lu lu_factor(Mat m, double rel_tol) {
  const int n = m.rows;
  Lu f;
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  double scale = max_abs(m);
  double tol = rel_tol * (scale > 0 ? scale : 1.0);
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= tol) {
      f.singular = true;
      f.det = 0.0;
      f.lu = std::move(m);
      return f;
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    det *= m(k, k);
    for (int i = k + 1; i < n; ++i) {
      double mult = m(i, k) / m(k, k);
      m(i, k) = mult;
      for (int j = k + 1; j < n; ++j) m(i, j) -= mult * m(k, j);
    }
  }
  f.det = det * f.sign;
  f.lu = std::move(m);
  return f;
}

std::vector<double> lu_solve(const Lu& f, std::vector<double> b) {
  if (f.singular) throw Error(ErrKind::SingularSharp, "linear system is singular");
  const int n = f.lu.rows;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

Mat lu_inverse(const Lu& f) {
  const int n = f.lu.rows;
  Mat inv(n, n);
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    auto col = lu_solve(f, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

std::vector<double> singular_values(Mat m) {
  // one-sided Jacobi on columns; rows >= cols after optional transpose
  if (m.rows < m.cols) m = mat_transpose(m);
  const int rows = m.rows, cols = m.cols;
  const double eps = 1e-14;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < cols - 1; ++p)
      for (int q = p + 1; q < cols; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (int i = 0; i < rows; ++i) {
          alpha += m(i, p) * m(i, p);
          beta += m(i, q) * m(i, q);
          gamma += m(i, p) * m(i, q);
        }
        if (std::abs(gamma) <= eps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (int i = 0; i < rows; ++i) {
          double vp = m(i, p), vq = m(i, q);
          m(i, p) = c * vp - s * vq;
          m(i, q) = s * vp + c * vq;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sigma(cols);
  for (int j = 0; j < cols; ++j) {
    double s = 0;
    for (int i = 0; i < rows; ++i) s += m(i, j) * m(i, j);
    sigma[j] = std::sqrt(s);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

int rank_of(const Mat& m, double rel_tol) {
  if (m.rows == 0 || m.cols == 0) return 0;
  auto sigma = singular_values(m);
  if (sigma.empty() || sigma[0] == 0.0) return 0;
  double thresh = rel_tol * sigma[0];
  int r = 0;
  for (double s : sigma)
    if (s > thresh) ++r;
  return r;
}

// -- eigenvalues ---------------------------------------------------------

static void to_hessenberg(Mat& a) {
  const int n = a.rows;
  for (int k = 1; k < n - 1; ++k) {
    // Householder vector annihilating column k-1 below row k
    double scale = 0.0;
    for (int i = k; i < n; ++i) scale += std::abs(a(i, k - 1));
    if (scale == 0.0) continue;
    double h = 0.0;
    std::vector<double> v(n, 0.0);
    for (int i = k; i < n; ++i) {
      v[i] = a(i, k - 1) / scale;
      h += v[i] * v[i];
    }
    double g = v[k] >= 0 ? -std::sqrt(h) : std::sqrt(h);
    h -= v[k] * g;
    v[k] -= g;
    if (h == 0.0) continue;
    // A <- (I - v v^T / h) A (I - v v^T / h)
    for (int j = 0; j < n; ++j) {
      double f = 0.0;
      for (int i = k; i < n; ++i) f += v[i] * a(i, j);
      f /= h;
      for (int i = k; i < n; ++i) a(i, j) -= f * v[i];
    }
    for (int i = 0; i < n; ++i) {
      double f = 0.0;
      for (int j = k; j < n; ++j) f += a(i, j) * v[j];
      f /= h;
      for (int j = k; j < n; ++j) a(i, j) -= f * v[j];
    }
    a(k, k - 1) = scale * g;
    for (int i = k + 1; i < n; ++i) a(i, k - 1) = 0.0;
  }
}

static double sign_with(double magnitude, double sign_of) {
  return sign_of >= 0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix; classical
// deflation-driven sweep, eigenvalues only.
static std::vector<std::complex<double>> hqr(Mat& a) {
  const int n = a.rows;
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<std::complex<double>> out;
  out.reserve(n);

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  if (anorm == 0.0) {
    for (int i = 0; i < n; ++i) out.emplace_back(0.0, 0.0);
    return out;
  }

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = a(nn, nn);
      if (l == nn) {
        out.emplace_back(x + t, 0.0);
        --nn;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_with(z, p);
            out.emplace_back(x + z, 0.0);
            out.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
          } else {
            out.emplace_back(x + p, z);
            out.emplace_back(x + p, -z);
          }
          nn -= 2;
        } else {
          if (its == 30)
            throw Error(ErrKind::EigenSolverFailure, "QR iteration did not converge");
          double p = 0, q = 0, r = 0, z = 0;
          if (its == 10 || its == 20) {
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m;
          for (m = nn - 2; m >= l; --m) {
            z = a(m, m);
            double rr = x - z;
            double ss = y - z;
            p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - rr - ss;
            r = a(m + 2, m + 1);
            double sc = std::abs(p) + std::abs(q) + std::abs(r);
            p /= sc;
            q /= sc;
            r /= sc;
            if (m == l) break;
            double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            double v = std::abs(p) *
                       (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = k != nn - 1 ? a(k + 2, k - 1) : 0.0;
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            double yy = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              double pp = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                pp += r * a(k + 2, j);
                a(k + 2, j) -= pp * z;
              }
              a(k + 1, j) -= pp * yy;
              a(k, j) -= pp * x;
            }
            int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              double pp = x * a(i, k) + yy * a(i, k + 1);
              if (k != nn - 1) {
                pp += z * a(i, k + 2);
                a(i, k + 2) -= pp * r;
              }
              a(i, k + 1) -= pp * q;
              a(i, k) -= pp;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return out;
}

std::vector<std::complex<double>> eigenvalues(Mat m) {
  if (m.rows != m.cols) throw Error(ErrKind::EigenSolverFailure, "matrix is not square");
  const int n = m.rows;
  if (n == 0) return {};
  if (n == 1) return {{m(0, 0), 0.0}};
  to_hessenberg(m);
  return hqr(m);
}

}  // namespace cforge
