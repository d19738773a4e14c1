#include "contactforge/bihamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cforge {

static TensorField sum_fields(const TensorField& a, const TensorField& b) {
  require_same_chart(a, b);
  TensorField out = a;
  for (const auto& [idx, e] : b.comp) {
    auto it = out.comp.find(idx);
    if (it == out.comp.end())
      out.comp[idx] = e;
    else
      it->second = Expr::add(it->second, e);
  }
  return out;
}

CompatibilityReport poisson_compatibility(const TensorField& lambda, const TensorField& lambda1,
                                          const std::vector<std::vector<double>>& samples,
                                          const std::vector<Expr>& test_family, double tol) {
  CompatibilityReport rep;
  for (const auto& x : samples) {
    try {
      auto sn = schouten(lambda, lambda1, x);
      for (const auto& [idx, v] : sn.comp)
        rep.direct_residual = std::max(rep.direct_residual, std::abs(v));
      ++rep.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain) {
        ++rep.skipped;
        continue;
      }
      throw;
    }
  }
  rep.direct_ok = rep.samples_used > 0 && rep.direct_residual < tol;

  auto sum = poisson_structure(sum_fields(lambda, lambda1));
  auto sum_check = is_jacobi(sum, samples, test_family, tol);
  rep.cross_residual = std::max(sum_check.tensor_residual, sum_check.jacobiator_residual);
  rep.cross_ok = sum_check.pass();
  return rep;
}

CompatibilityReport jacobi_compatibility(const JacobiStructure& j, const JacobiStructure& j1,
                                         const std::vector<std::vector<double>>& samples,
                                         const std::vector<Expr>& test_family, double tol) {
  CompatibilityReport rep;
  JacobiStructure sum{sum_fields(j.lambda, j1.lambda), sum_fields(j.evec, j1.evec)};
  auto direct = is_jacobi(sum, samples, test_family, tol);
  rep.direct_residual = std::max(direct.tensor_residual, direct.jacobiator_residual);
  rep.direct_ok = direct.pass();
  rep.samples_used = direct.samples_used;
  rep.skipped = direct.skipped;

  // independent route: compatibility of the Poissonizations on the extended chart
  auto ext = radial_extension(j.lambda.chart);
  auto tilde = poissonize_on(ext, j);
  auto tilde1 = poissonize_on(ext, j1);
  const double radii[] = {0.5, 1.0, 2.0};
  std::vector<std::vector<double>> total_samples;
  total_samples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<double> t(samples[i]);
    t.push_back(radii[i % 3]);
    total_samples.push_back(std::move(t));
  }
  for (const auto& x : total_samples) {
    try {
      auto sn = schouten(tilde, tilde1, x);
      for (const auto& [idx, v] : sn.comp)
        rep.cross_residual = std::max(rep.cross_residual, std::abs(v));
    } catch (const Error& e) {
      if (e.kind() != ErrKind::Domain) throw;
    }
  }
  rep.cross_ok = rep.cross_residual < tol;
  return rep;
}

MixedTensorPointValue recursion_operator(const TensorField& lambda, const TensorField& lambda1,
                                         std::span<const double> x) {
  require_same_chart(lambda, lambda1);
  Mat p = full_matrix(lambda.at(x));
  Mat p1 = full_matrix(lambda1.at(x));
  auto f = lu_factor(p);
  if (f.singular)
    throw Error(ErrKind::SingularSharp,
                "base bivector has no inverse sharp map at the sample point");
  MixedTensorPointValue n;
  n.chart = lambda.chart;
  n.point.assign(x.begin(), x.end());
  n.matrix = mat_mul(p1, lu_inverse(f));
  return n;
}

EigenvalueClusters eigenvalue_clusters(const Mat& n, double cluster_rel_tol,
                                       double complex_tol) {
  EigenvalueClusters out;
  auto eigs = eigenvalues(n);
  double rho = 0.0;
  for (const auto& e : eigs) rho = std::max(rho, std::abs(e));
  double imag_tol = complex_tol * std::max(1.0, rho);
  std::vector<double> reals;
  for (const auto& e : eigs) {
    if (std::abs(e.imag()) <= imag_tol) {
      reals.push_back(e.real());
      out.discarded_imag = std::max(out.discarded_imag, std::abs(e.imag()));
    } else {
      out.nonreal.push_back(e);
    }
  }
  std::sort(reals.begin(), reals.end());
  double gap = cluster_rel_tol * (rho > 0 ? rho : 1.0);
  std::size_t i = 0;
  while (i < reals.size()) {
    std::size_t j = i + 1;
    double sum = reals[i];
    while (j < reals.size() && reals[j] - reals[j - 1] <= gap) {
      sum += reals[j];
      ++j;
    }
    out.clusters.emplace_back(sum / double(j - i), int(j - i));
    i = j;
  }
  return out;
}

// -- eigenvalue fields ---------------------------------------------------------

EigenFieldSet::EigenFieldSet(TensorField lambda, TensorField lambda1,
                             std::vector<double> base_point,
                             const std::vector<std::vector<double>>& probe_points,
                             double cluster_rel_tol, double complex_tol)
    : lambda_(std::move(lambda)),
      lambda1_(std::move(lambda1)),
      base_point_(std::move(base_point)),
      cluster_rel_tol_(cluster_rel_tol),
      complex_tol_(complex_tol) {
  base_values_ = distinct_at(base_point_);
  if (base_values_.empty())
    throw Error(ErrKind::EigenSolverFailure, "no real eigenvalues at the base point");
  std::vector<double> prev = base_values_;
  for (const auto& p : probe_points) {
    auto cur = distinct_at(p);
    if (cur.size() != prev.size())
      throw Error(ErrKind::TrackingAmbiguity,
                  "eigenvalue clusters merge or split along the probe path (" +
                      std::to_string(prev.size()) + " -> " + std::to_string(cur.size()) + ")");
    prev = std::move(cur);
  }
}

std::vector<double> EigenFieldSet::distinct_at(std::span<const double> x) const {
  auto n = recursion_operator(lambda_, lambda1_, x);
  auto cl = eigenvalue_clusters(n.matrix, cluster_rel_tol_, complex_tol_);
  if (!cl.nonreal.empty())
    throw Error(ErrKind::TrackingAmbiguity, "non-real eigenvalues while tracking");
  std::vector<double> vals;
  vals.reserve(cl.clusters.size());
  for (const auto& [v, m] : cl.clusters) vals.push_back(v);
  return vals;  // ascending by construction
}

double EigenFieldSet::value(int i, std::span<const double> x) const {
  auto vals = distinct_at(x);
  if (int(vals.size()) != count())
    throw Error(ErrKind::TrackingAmbiguity,
                "eigenvalue clusters merge near the evaluation point (" +
                    std::to_string(count()) + " tracked, " + std::to_string(vals.size()) +
                    " found)");
  return vals[i];
}

std::vector<double> EigenFieldSet::fd_grad(int i, std::span<const double> x, double h) const {
  return fd_gradient([this, i](std::span<const double> y) { return value(i, y); }, x, h);
}

PointFn EigenFieldSet::field(int i) const {
  EigenFieldSet copy = *this;
  return [copy, i](std::span<const double> x) { return copy.value(i, x); };
}

// -- involution ------------------------------------------------------------------

GradFn grad_fn(const ScalarField& f) {
  GradFn g;
  ScalarField copy = f;
  g.value = [copy](std::span<const double> x) { return copy.at(x); };
  g.grad = [copy](std::span<const double> x) { return gradient(copy.expr, *copy.chart, x); };
  return g;
}

GradFn grad_fn(const EigenFieldSet& fields, int i, double fd_h) {
  GradFn g;
  EigenFieldSet copy = fields;
  g.value = [copy, i](std::span<const double> x) { return copy.value(i, x); };
  g.grad = [copy, i, fd_h](std::span<const double> x) { return copy.fd_grad(i, x, fd_h); };
  return g;
}

BracketProvider provider(const TensorField& bivector) {
  BracketProvider p;
  TensorField copy = bivector;
  p.lambda_at = [copy](std::span<const double> x) { return copy.at(x); };
  int dim = bivector.dim();
  p.e_at = [dim](std::span<const double>) { return std::vector<double>(dim, 0.0); };
  return p;
}

BracketProvider provider(const JacobiStructure& j) {
  BracketProvider p;
  TensorField lam = j.lambda, ev = j.evec;
  p.lambda_at = [lam](std::span<const double> x) { return lam.at(x); };
  p.e_at = [ev](std::span<const double> x) { return vector_at(ev, x); };
  return p;
}

BracketProvider provider(const PointJacobi& j) {
  return BracketProvider{j.lambda_at, j.e_at};
}

InvolutionReport involution_check(const std::vector<GradFn>& functions,
                                  const BracketProvider& bracket,
                                  const std::vector<std::vector<double>>& samples) {
  InvolutionReport rep;
  for (const auto& x : samples) {
    try {
      auto lam = bracket.lambda_at(x);
      auto ev = bracket.e_at(x);
      double worst = 0.0;
      std::vector<double> values(functions.size());
      std::vector<std::vector<double>> grads(functions.size());
      for (std::size_t i = 0; i < functions.size(); ++i) {
        values[i] = functions[i].value(x);
        grads[i] = functions[i].grad(x);
      }
      for (std::size_t i = 0; i < functions.size(); ++i)
        for (std::size_t j = i + 1; j < functions.size(); ++j)
          worst = std::max(worst, std::abs(bracket_with_grads(lam, ev, values[i], grads[i],
                                                              values[j], grads[j])));
      if (worst > rep.residual) {
        rep.residual = worst;
        rep.worst_point.assign(x.begin(), x.end());
      }
      ++rep.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::TrackingAmbiguity ||
          e.kind() == ErrKind::SingularSharp) {
        ++rep.skipped;
        continue;
      }
      throw;
    }
  }
  return rep;
}

BiHamiltonianReport bihamiltonian_check(const TensorField& x_field, const TensorField& lambda,
                                        const Expr& h, const TensorField& lambda1,
                                        const Expr& h1,
                                        const std::vector<std::vector<double>>& samples) {
  require_same_chart(x_field, lambda);
  require_same_chart(lambda, lambda1);
  const auto& chart = *lambda.chart;
  BiHamiltonianReport rep;
  for (const auto& x : samples) {
    try {
      auto xv = vector_at(x_field, x);
      auto dh = gradient(h, chart, x);
      auto dh1 = gradient(h1, chart, x);
      auto s0 = sharp_value<double>(lambda.at(x), dh);
      auto s1 = sharp_value<double>(lambda1.at(x), dh1);
      for (std::size_t i = 0; i < xv.size(); ++i) {
        rep.residual_first = std::max(rep.residual_first, std::abs(s0[i] - xv[i]));
        rep.residual_second = std::max(rep.residual_second, std::abs(s1[i] - xv[i]));
      }
      ++rep.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain) {
        ++rep.skipped;
        continue;
      }
      throw;
    }
  }
  return rep;
}

KolmogorovReport kolmogorov_check(const ScalarField& h, const std::vector<int>& action_indices,
                                  const std::vector<std::vector<double>>& samples,
                                  double det_tol, double pass_fraction) {
  KolmogorovReport rep;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  int nonzero = 0;
  for (const auto& x : samples) {
    auto full = hessian(h.expr, *h.chart, x);
    const int k = int(action_indices.size());
    Mat block(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) block(i, j) = full(action_indices[i], action_indices[j]);
    auto f = lu_factor(block, 0.0);
    double d = std::abs(f.det);
    rep.min_abs_det = std::min(rep.min_abs_det, d);
    rep.max_abs_det = std::max(rep.max_abs_det, d);
    if (d > det_tol) ++nonzero;
    ++rep.samples_used;
  }
  if (rep.samples_used == 0) rep.min_abs_det = 0.0;
  rep.nonzero_fraction = rep.samples_used ? double(nonzero) / rep.samples_used : 0.0;
  rep.nondegenerate = rep.samples_used > 0 && rep.nonzero_fraction >= pass_fraction;
  return rep;
}

// Hessian of H in the eigenvalue variables at x: solve the local Jacobian
// system for dual directions, then central differences of the first
// derivatives along them.
static bool eigen_hessian_at(const ScalarField& h, const std::vector<GradFn>& fields,
                             std::span<const double> x, double fd_h, Mat& out) {
  const int nf = int(fields.size());
  const int dim = int(x.size());

  auto dual_directions = [&](std::span<const double> y,
                             std::vector<std::vector<double>>& dirs) -> bool {
    Mat jac(nf, dim);
    for (int i = 0; i < nf; ++i) {
      auto g = fields[i].grad(y);
      for (int j = 0; j < dim; ++j) jac(i, j) = g[j];
    }
    Mat m(nf, nf);
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nf; ++j) {
        double acc = 0;
        for (int k = 0; k < dim; ++k) acc += jac(i, k) * jac(j, k);
        m(i, j) = acc;
      }
    auto f = lu_factor(m, 1e-10);
    if (f.singular) return false;
    dirs.assign(nf, std::vector<double>(dim, 0.0));
    std::vector<double> e(nf, 0.0);
    for (int j = 0; j < nf; ++j) {
      e.assign(nf, 0.0);
      e[j] = 1.0;
      auto w = lu_solve(f, e);
      for (int k = 0; k < dim; ++k) {
        double acc = 0;
        for (int i = 0; i < nf; ++i) acc += jac(i, k) * w[i];
        dirs[j][k] = acc;
      }
    }
    return true;
  };

  auto first_partial = [&](int i, std::span<const double> y, double& value) -> bool {
    std::vector<std::vector<double>> dirs;
    if (!dual_directions(y, dirs)) return false;
    auto dh = gradient(h.expr, *h.chart, y);
    double acc = 0.0;
    for (int k = 0; k < dim; ++k) acc += dh[k] * dirs[i][k];
    value = acc;
    return true;
  };

  std::vector<std::vector<double>> dirs;
  if (!dual_directions(x, dirs)) return false;
  out = Mat(nf, nf);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) {
      std::vector<double> plus(x.begin(), x.end()), minus(x.begin(), x.end());
      for (int k = 0; k < dim; ++k) {
        plus[k] += fd_h * dirs[j][k];
        minus[k] -= fd_h * dirs[j][k];
      }
      double vp, vm;
      if (!first_partial(i, plus, vp) || !first_partial(i, minus, vm)) return false;
      out(i, j) = (vp - vm) / (2.0 * fd_h);
    }
  return true;
}

SeparabilityReport separability_residual(const ScalarField& h,
                                         const std::vector<GradFn>& eigen_fields,
                                         const std::vector<std::vector<double>>& samples,
                                         double fd_h) {
  SeparabilityReport rep;
  for (const auto& x : samples) {
    try {
      Mat hess;
      if (!eigen_hessian_at(h, eigen_fields, x, fd_h, hess)) {
        ++rep.skipped;
        continue;
      }
      for (int i = 0; i < hess.rows; ++i)
        for (int j = 0; j < hess.cols; ++j)
          if (i != j) rep.mixed_partial_max = std::max(rep.mixed_partial_max,
                                                       std::abs(hess(i, j)));
      ++rep.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::TrackingAmbiguity ||
          e.kind() == ErrKind::SingularSharp) {
        ++rep.skipped;
        continue;
      }
      throw;
    }
  }
  return rep;
}

// -- obstruction diagnostic ----------------------------------------------------------

static std::string degree_text(const HomogeneityResult& r) {
  if (r.degree) return std::to_string(*r.degree);
  return "not homogeneous";
}

NoGoVerdict nogo_diagnostic(const TensorField& lambda, const TensorField& lambda1,
                            const TensorField& delta, const ScalarField& h,
                            const std::vector<std::vector<double>>& samples,
                            double ad_tol, double fd_tol) {
  require_same_chart(lambda, lambda1);
  NoGoVerdict v;
  const auto& chart = *lambda.chart;
  v.half_dim = chart.dim() / 2;

  v.lambda_degree = homogeneity_degree(evaluable(lambda), delta, samples, -3, 3, ad_tol);
  v.lambda1_degree = homogeneity_degree(evaluable(lambda1), delta, samples, -3, 3, ad_tol);

  TensorField lam_copy = lambda, lam1_copy = lambda1;
  MatrixFn n_fn = [lam_copy, lam1_copy](std::span<const double> x) {
    return recursion_operator(lam_copy, lam1_copy, x).matrix;
  };
  v.recursion_degree = homogeneity_degree_matrix(n_fn, delta, samples, -3, 3, fd_tol);

  // Euler identity for the Hamiltonian
  for (const auto& x : samples) {
    auto dh = gradient(h.expr, chart, x);
    auto dv = vector_at(delta, x);
    double lie = 0.0;
    for (int i = 0; i < chart.dim(); ++i) lie += dv[i] * dh[i];
    v.euler_residual = std::max(v.euler_residual, std::abs(lie - h.at(x)));
  }
  v.hamiltonian_one_homogeneous = v.euler_residual < ad_tol;

  // tracked eigenvalue fields, base at the first sample
  std::vector<GradFn> eigen_fns;
  int tracked = 0;
  if (!samples.empty()) {
    try {
      std::vector<std::vector<double>> probes(samples.begin() + 1, samples.end());
      EigenFieldSet fields(lambda, lambda1, samples.front(), probes);
      tracked = fields.count();
      for (int i = 0; i < tracked; ++i) {
        eigen_fns.push_back(grad_fn(fields, i));
        try {
          v.eigen_degrees.push_back(
              homogeneity_degree_scalar_fn(fields.field(i), delta, samples, -3, 3, fd_tol));
        } catch (const Error& e) {
          if (e.kind() != ErrKind::TrackingAmbiguity) throw;
          ++v.eigen_tracking_failures;
          v.eigen_degrees.push_back(HomogeneityResult{});
        }
        for (const auto& x : samples) {
          try {
            auto dv = vector_at(delta, x);
            double lie = fd_directional(fields.field(i), x, dv);
            v.max_eigen_euler = std::max(v.max_eigen_euler, std::abs(lie));
          } catch (const Error& e) {
            if (e.kind() != ErrKind::TrackingAmbiguity) throw;
            ++v.eigen_tracking_failures;
          }
        }
      }
      // functional independence: rank of the FD gradients, strongest sample
      for (const auto& x : samples) {
        try {
          Mat g(tracked, chart.dim());
          for (int i = 0; i < tracked; ++i) {
            auto gi = fields.fd_grad(i, x);
            for (int j = 0; j < chart.dim(); ++j) g(i, j) = gi[j];
          }
          v.independent_count = std::max(v.independent_count, rank_of(g, 1e-6));
        } catch (const Error& e) {
          if (e.kind() != ErrKind::TrackingAmbiguity) throw;
          ++v.eigen_tracking_failures;
        }
      }
    } catch (const Error& e) {
      if (e.kind() != ErrKind::TrackingAmbiguity && e.kind() != ErrKind::SingularSharp) throw;
      ++v.eigen_tracking_failures;
    }
  }

  // Hessian evidence in eigenvalue variables, only meaningful with a full set
  if (tracked == v.half_dim && int(eigen_fns.size()) == tracked && tracked > 0) {
    KolmogorovReport hr;
    hr.min_abs_det = std::numeric_limits<double>::infinity();
    int nonzero = 0;
    for (const auto& x : samples) {
      Mat hess;
      try {
        if (!eigen_hessian_at(h, eigen_fns, x, 1e-4, hess)) continue;
      } catch (const Error&) {
        continue;
      }
      auto f = lu_factor(hess, 0.0);
      double d = std::abs(f.det);
      hr.min_abs_det = std::min(hr.min_abs_det, d);
      hr.max_abs_det = std::max(hr.max_abs_det, d);
      if (d > 1e-4) ++nonzero;
      ++hr.samples_used;
    }
    if (hr.samples_used > 0) {
      hr.nonzero_fraction = double(nonzero) / hr.samples_used;
      hr.nondegenerate = hr.nonzero_fraction >= 0.9;
      v.hessian = hr;
      v.hessian_evaluated = true;
    }
  }

  bool deg_minus_one = v.lambda1_degree.degree && *v.lambda1_degree.degree == -1;
  bool full_count = v.independent_count == v.half_dim;
  bool nd_holds = v.hessian_evaluated && v.hessian.nondegenerate;
  v.forbidden_conjunction =
      deg_minus_one && full_count && v.hamiltonian_one_homogeneous && nd_holds;

  std::ostringstream os;
  os << "second structure degree " << degree_text(v.lambda1_degree)
     << (deg_minus_one ? " (holds)" : " (clause fails)") << "; recursion operator degree "
     << degree_text(v.recursion_degree) << "; independent real eigenvalue count "
     << v.independent_count << "/" << v.half_dim << (full_count ? " (holds)" : " (clause fails)")
     << "; Hamiltonian 1-homogeneous: " << (v.hamiltonian_one_homogeneous ? "yes" : "no")
     << "; action Hessian nondegenerate: "
     << (v.hessian_evaluated ? (nd_holds ? "yes" : "no") : "not evaluated");
  os << " => forbidden conjunction " << (v.forbidden_conjunction ? "PRESENT" : "absent");
  v.verdict = os.str();
  return v;
}

}  // namespace cforge
