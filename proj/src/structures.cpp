#include "contactforge/structures.hpp"

#include <algorithm>
#include <cmath>

namespace cforge {

JacobiStructure poisson_structure(const TensorField& lambda) {
  JacobiStructure j;
  j.lambda = lambda;
  j.evec = make_vector_field(lambda.chart);
  return j;
}

double jacobi_bracket(const JacobiStructure& J, const Expr& f, const Expr& g,
                      std::span<const double> x) {
  return jacobi_bracket_value<double>(J, f, g, x);
}

double jacobi_bracket(const PointJacobi& J, const Expr& f, const Expr& g,
                      std::span<const double> x) {
  const auto& chart = *J.chart;
  auto df = gradient(f, chart, x);
  auto dg = gradient(g, chart, x);
  auto lam = J.lambda_at(x);
  auto e = J.e_at(x);
  double fv = eval<double>(f, chart.coords, x);
  double gv = eval<double>(g, chart.coords, x);
  double ef = 0.0, eg = 0.0;
  for (int i = 0; i < chart.dim(); ++i) {
    ef += e[i] * df[i];
    eg += e[i] * dg[i];
  }
  return bivector_pairing<double>(lam, dg, df) + fv * eg - gv * ef;
}

double bracket_with_grads(const PointTensor<double>& lam, const std::vector<double>& evec,
                          double av, std::span<const double> da, double bv,
                          std::span<const double> db) {
  double ea = 0.0, eb = 0.0;
  for (std::size_t i = 0; i < evec.size(); ++i) {
    ea += evec[i] * da[i];
    eb += evec[i] * db[i];
  }
  return bivector_pairing<double>(lam, db, da) + av * eb - bv * ea;
}

double jacobiator_residual(const JacobiStructure& J, const Expr& f, const Expr& g,
                           const Expr& h, std::span<const double> x) {
  const auto& coords = J.lambda.chart->coords;
  const int n = int(coords.size());
  auto env = seed_first_order(x);

  auto eval_d1 = [&](const Expr& e) {
    D1 v = eval<D1>(e, coords, env);
    v.d.resize(n, 0.0);
    return v;
  };
  D1 fv = eval_d1(f), gv = eval_d1(g), hv = eval_d1(h);
  D1 fg = jacobi_bracket_value<D1>(J, f, g, std::span<const D1>(env));
  D1 gh = jacobi_bracket_value<D1>(J, g, h, std::span<const D1>(env));
  D1 hf = jacobi_bracket_value<D1>(J, h, f, std::span<const D1>(env));
  fg.d.resize(n, 0.0);
  gh.d.resize(n, 0.0);
  hf.d.resize(n, 0.0);

  auto lam = J.lambda.at(x);
  auto evec = vector_at(J.evec, x);
  double total = bracket_with_grads(lam, evec, fg.v, fg.d, hv.v, hv.d) +
                 bracket_with_grads(lam, evec, gh.v, gh.d, fv.v, fv.d) +
                 bracket_with_grads(lam, evec, hf.v, hf.d, gv.v, gv.d);
  return std::abs(total);
}

std::vector<Expr> default_test_family(const Chart& chart) {
  std::vector<Expr> fam;
  for (const auto& c : chart.coords) fam.push_back(Expr::variable(c));
  for (int i = 0; i < chart.dim(); ++i)
    for (int j = i; j < chart.dim(); ++j)
      fam.push_back(Expr::mul(Expr::variable(chart.coords[i]),
                              Expr::variable(chart.coords[j])));
  return fam;
}

IsJacobiResult is_jacobi(const JacobiStructure& J,
                         const std::vector<std::vector<double>>& samples,
                         const std::vector<Expr>& test_family, double tensor_tol,
                         double jacobiator_tol) {
  IsJacobiResult r;
  for (const auto& x : samples) {
    try {
      auto lam_val = J.lambda.at(x);
      auto e_val = J.evec.at(x);
      auto sn = schouten(J.lambda, J.lambda, x);
      auto ew = wedge_value(e_val, lam_val).scaled(2.0);
      double res = 0.0;
      for (const auto& t : increasing_tuples(lam_val.dim, 3))
        res = std::max(res, std::abs(sn.full(t) - ew.full(t)));
      auto el = schouten(J.evec, J.lambda, x);
      for (const auto& [idx, v] : el.comp) res = std::max(res, std::abs(v));

      double jac = 0.0;
      for (std::size_t a = 0; a < test_family.size(); ++a)
        for (std::size_t b = a + 1; b < test_family.size(); ++b)
          for (std::size_t c = b + 1; c < test_family.size(); ++c)
            jac = std::max(jac, jacobiator_residual(J, test_family[a], test_family[b],
                                                    test_family[c], x));

      if (res > r.tensor_residual || jac > r.jacobiator_residual)
        r.worst_point.assign(x.begin(), x.end());
      r.tensor_residual = std::max(r.tensor_residual, res);
      r.jacobiator_residual = std::max(r.jacobiator_residual, jac);
      ++r.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain) {
        ++r.skipped;
        continue;
      }
      throw;
    }
  }
  r.tensor_ok = r.samples_used > 0 && r.tensor_residual < tensor_tol;
  r.oracle_ok = r.samples_used > 0 && r.jacobiator_residual < jacobiator_tol;
  return r;
}

// -- contact ---------------------------------------------------------------

double contact_volume(const ContactForm& c, std::span<const double> x) {
  const int dim = c.eta.dim();
  if (dim % 2 == 0)
    throw Error(ErrKind::ChartMismatch, "contact forms need an odd-dimensional chart");
  auto eta = c.eta.at(x);
  auto deta = exterior_derivative(c.eta, x);
  PointTensor<double> acc = eta;
  for (int i = 0; i < (dim - 1) / 2; ++i) acc = wedge_value(acc, deta);
  IndexTuple top(dim);
  for (int i = 0; i < dim; ++i) top[i] = i;
  return acc.full(top);
}

Mat contact_flat_matrix(const ContactForm& c, std::span<const double> x) {
  const int n = c.eta.dim();
  Mat d = full_matrix(exterior_derivative(c.eta, x));
  auto eta = covector_at(c.eta, x);
  Mat b(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) b(j, i) = d(i, j) + eta[i] * eta[j];
  return b;
}

std::vector<double> reeb(const ContactForm& c, std::span<const double> x) {
  Mat b = contact_flat_matrix(c, x);
  auto f = lu_factor(b);
  if (f.singular)
    throw Error(ErrKind::SingularFlat, "flat map is singular; form is not contact here");
  return lu_solve(f, covector_at(c.eta, x));
}

ContactVectorField contact_hamiltonian_vf(const ContactForm& c, const Expr& fexpr,
                                          std::span<const double> x) {
  const int n = c.eta.dim();
  const auto& chart = *c.eta.chart;
  Mat b = contact_flat_matrix(c, x);
  auto lu = lu_factor(b);
  if (lu.singular)
    throw Error(ErrKind::SingularFlat, "flat map is singular; form is not contact here");
  auto eta = covector_at(c.eta, x);
  auto r = lu_solve(lu, eta);

  auto df = gradient(fexpr, chart, x);
  double fv = eval<double>(fexpr, chart.coords, x);
  double rf = 0.0;
  for (int i = 0; i < n; ++i) rf += df[i] * r[i];

  std::vector<double> rhs(n);
  for (int j = 0; j < n; ++j) rhs[j] = df[j] - (rf + fv) * eta[j];
  auto xf = lu_solve(lu, rhs);

  // defining equations, checked on the way out
  double eta_xf = 0.0;
  for (int i = 0; i < n; ++i) eta_xf += eta[i] * xf[i];
  double residual = std::abs(eta_xf + fv);
  Mat d = full_matrix(exterior_derivative(c.eta, x));
  for (int j = 0; j < n; ++j) {
    double contr = 0.0;
    for (int i = 0; i < n; ++i) contr += xf[i] * d(i, j);
    residual = std::max(residual, std::abs(contr - (df[j] - rf * eta[j])));
  }
  return {std::move(xf), residual};
}

PointJacobi induced_jacobi(const ContactForm& c) {
  PointJacobi pj;
  pj.chart = c.eta.chart;
  TensorField eta_field = c.eta;
  pj.lambda_at = [eta_field](std::span<const double> x) {
    const int n = eta_field.dim();
    ContactForm cf{eta_field};
    Mat b = contact_flat_matrix(cf, x);
    auto lu = lu_factor(b);
    if (lu.singular)
      throw Error(ErrKind::SingularFlat, "flat map is singular; form is not contact here");
    auto eta = covector_at(eta_field, x);
    auto r = lu_solve(lu, eta);
    Mat d = full_matrix(exterior_derivative(eta_field, x));

    // basis covectors, Reeb component removed, pulled back through the flat map
    std::vector<std::vector<double>> y(n);
    for (int i = 0; i < n; ++i) {
      std::vector<double> alpha(n, 0.0);
      alpha[i] = 1.0;
      for (int j = 0; j < n; ++j) alpha[j] -= r[i] * eta[j];
      y[i] = lu_solve(lu, alpha);
    }
    PointTensor<double> lam{n, 2, {}};
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double v = 0.0;
        for (int a = 0; a < n; ++a)
          for (int bb = 0; bb < n; ++bb) v += y[i][a] * d(a, bb) * y[j][bb];
        if (v != 0.0) lam.comp[{i, j}] = v;
      }
    return lam;
  };
  pj.e_at = [eta_field](std::span<const double> x) {
    auto r = reeb(ContactForm{eta_field}, x);
    for (double& v : r) v = -v;
    return r;
  };
  return pj;
}

// -- exact symplectic --------------------------------------------------------

Mat symplectic_matrix(const ExactSymplectic& s, std::span<const double> x) {
  auto d = exterior_derivative(s.theta, x);
  Mat w = full_matrix(d);
  for (double& v : w.a) v = -v;
  return w;
}

std::vector<double> liouville_field(const ExactSymplectic& s, std::span<const double> x) {
  Mat w = symplectic_matrix(s, x);
  auto f = lu_factor(w);
  if (f.singular)
    throw Error(ErrKind::SingularSymplectic, "-d theta is degenerate at the sample point");
  return lu_solve(f, covector_at(s.theta, x));
}

std::vector<double> hamiltonian_vf_cov(const ExactSymplectic& s, std::span<const double> df,
                                       std::span<const double> x) {
  Mat w = symplectic_matrix(s, x);
  auto f = lu_factor(w);
  if (f.singular)
    throw Error(ErrKind::SingularSymplectic, "-d theta is degenerate at the sample point");
  std::vector<double> rhs(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) rhs[i] = -df[i];
  return lu_solve(f, std::move(rhs));
}

std::vector<double> hamiltonian_vf(const ExactSymplectic& s, const Expr& f,
                                   std::span<const double> x) {
  auto df = gradient(f, *s.theta.chart, x);
  return hamiltonian_vf_cov(s, df, x);
}

double poisson_bracket(const ExactSymplectic& s, const Expr& f, const Expr& g,
                       std::span<const double> x) {
  auto xf = hamiltonian_vf(s, f, x);
  auto dg = gradient(g, *s.theta.chart, x);
  double acc = 0.0;
  for (std::size_t i = 0; i < xf.size(); ++i) acc += dg[i] * xf[i];
  return acc;
}

// -- homogeneity ---------------------------------------------------------------

static HomogeneityResult pick_degree(const std::vector<std::vector<double>>& residuals,
                                     int k_min, double tol, double scale, int used,
                                     int skipped) {
  HomogeneityResult out;
  out.scale = scale;
  out.samples_used = used;
  out.skipped = skipped;
  if (used == 0) return out;
  for (std::size_t ik = 0; ik < residuals.size(); ++ik) {
    double worst = 0.0;
    for (double r : residuals[ik]) worst = std::max(worst, r);
    out.profile.emplace_back(k_min + int(ik), worst);
  }
  int hits = 0;
  for (const auto& [k, res] : out.profile)
    if (res < tol) {
      ++hits;
      out.degree = k;
    }
  if (hits != 1) out.degree.reset();
  return out;
}

HomogeneityResult homogeneity_degree(const EvaluableField& field, const TensorField& delta,
                                     const std::vector<std::vector<double>>& samples,
                                     int k_min, int k_max, double tol) {
  std::vector<std::vector<double>> residuals(k_max - k_min + 1);
  double scale = 0.0;
  int used = 0, skipped = 0;
  for (const auto& x : samples) {
    try {
      auto lie = lie_derivative(delta, field, x);
      auto val = field.value(x);
      scale = std::max(scale, val.max_abs_primal());
      for (int k = k_min; k <= k_max; ++k) {
        double res = 0.0;
        for (const auto& t : increasing_tuples(val.dim, val.degree))
          res = std::max(res, std::abs(lie.full(t) - double(k) * val.full(t)));
        residuals[k - k_min].push_back(res);
      }
      ++used;
    } catch (const Error& e) {
      if (e.kind() != ErrKind::Domain) throw;
      ++skipped;
    }
  }
  return pick_degree(residuals, k_min, tol, scale, used, skipped);
}

HomogeneityResult homogeneity_degree_matrix(const MatrixFn& n_fn, const TensorField& delta,
                                            const std::vector<std::vector<double>>& samples,
                                            int k_min, int k_max, double tol, double fd_h) {
  std::vector<std::vector<double>> residuals(k_max - k_min + 1);
  double scale = 0.0;
  int used = 0, skipped = 0;
  for (const auto& x : samples) {
    try {
    const int n = int(x.size());
    Mat nv = n_fn(x);
    auto dvg = field_valgrad(delta, x);
    std::vector<double> dv(n, 0.0);
    for (const auto& [idx, v] : dvg.value.comp) dv[idx[0]] = v;

    // Lie derivative of a (1,1) tensor, matrix partials by central differences
    Mat lie(n, n);
    std::vector<double> pt(x.begin(), x.end());
    for (int a = 0; a < n; ++a) {
      if (dv[a] == 0.0) continue;
      double step = fd_h * std::max(1.0, std::abs(x[a]));
      double saved = pt[a];
      pt[a] = saved + step;
      Mat np = n_fn(pt);
      pt[a] = saved - step;
      Mat nm = n_fn(pt);
      pt[a] = saved;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lie(i, j) += dv[a] * (np(i, j) - nm(i, j)) / (2 * step);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double corr = 0.0;
        for (int a = 0; a < n; ++a)
          corr += -dvg.grad[a].full({i}) * nv(a, j) + nv(i, a) * dvg.grad[j].full({a});
        lie(i, j) += corr;
      }
    scale = std::max(scale, max_abs(nv));
    for (int k = k_min; k <= k_max; ++k) {
      double res = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) res = std::max(res, std::abs(lie(i, j) - k * nv(i, j)));
      residuals[k - k_min].push_back(res);
    }
    ++used;
    } catch (const Error& e) {
      if (e.kind() != ErrKind::Domain && e.kind() != ErrKind::SingularSharp) throw;
      ++skipped;
    }
  }
  return pick_degree(residuals, k_min, tol, scale, used, skipped);
}

HomogeneityResult homogeneity_degree_scalar_fn(const PointFn& f, const TensorField& delta,
                                               const std::vector<std::vector<double>>& samples,
                                               int k_min, int k_max, double tol, double fd_h) {
  std::vector<std::vector<double>> residuals(k_max - k_min + 1);
  double scale = 0.0;
  int used = 0, skipped = 0;
  for (const auto& x : samples) {
    try {
      auto dv = vector_at(delta, x);
      double lie = fd_directional(f, x, dv, fd_h);
      double val = f(x);
      scale = std::max(scale, std::abs(val));
      for (int k = k_min; k <= k_max; ++k)
        residuals[k - k_min].push_back(std::abs(lie - k * val));
      ++used;
    } catch (const Error& e) {
      if (e.kind() != ErrKind::Domain && e.kind() != ErrKind::SingularSharp) throw;
      ++skipped;
    }
  }
  return pick_degree(residuals, k_min, tol, scale, used, skipped);
}

// -- integrability -------------------------------------------------------------

IntegrabilityReport verify_contact_integrable(const ContactForm& c, const Expr& h,
                                              const std::vector<Expr>& candidates,
                                              const std::vector<std::vector<double>>& samples,
                                              double tol, double rank_tol) {
  const int dim = c.eta.dim();
  if (dim % 2 == 0)
    throw Error(ErrKind::ChartMismatch, "contact systems need an odd-dimensional chart");
  const int n = (dim - 1) / 2;
  if (int(candidates.size()) != n + 1)
    throw Error(ErrKind::WrongCount, "expected " + std::to_string(n + 1) +
                                         " dissipated-quantity candidates, got " +
                                         std::to_string(candidates.size()));
  auto pj = induced_jacobi(c);
  const auto& chart = *c.eta.chart;

  IntegrabilityReport rep;
  rep.required_rank = n;
  rep.min_rank = int(candidates.size());
  for (const auto& x : samples) {
    try {
      for (const auto& f : candidates)
        rep.dissipation_residual =
            std::max(rep.dissipation_residual, std::abs(jacobi_bracket(pj, f, h, x)));
      for (std::size_t i = 0; i < candidates.size(); ++i)
        for (std::size_t j = i + 1; j < candidates.size(); ++j)
          rep.involution_residual = std::max(
              rep.involution_residual,
              std::abs(jacobi_bracket(pj, candidates[i], candidates[j], x)));
      Mat dmat(int(candidates.size()), dim);
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto g = gradient(candidates[i], chart, x);
        for (int j = 0; j < dim; ++j) dmat(int(i), j) = g[j];
      }
      rep.min_rank = std::min(rep.min_rank, rank_of(dmat, rank_tol));
      ++rep.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::SingularFlat) {
        ++rep.skipped;
        continue;
      }
      throw;
    }
  }
  rep.duplicate_warning = rep.min_rank < int(candidates.size());
  rep.pass = rep.samples_used > 0 && rep.dissipation_residual < tol &&
             rep.involution_residual < tol && rep.min_rank >= n;
  return rep;
}

IntegrabilityReport verify_homogeneous_integrable(
    const ExactSymplectic& s, const Expr& H, const TensorField& delta,
    const std::vector<Expr>& candidates, const std::vector<std::vector<double>>& samples,
    double tol, double rank_tol) {
  const int dim = s.theta.dim();
  if (dim % 2 != 0)
    throw Error(ErrKind::ChartMismatch, "exact symplectic charts are even-dimensional");
  const int n = dim / 2;
  if (int(candidates.size()) != n)
    throw Error(ErrKind::WrongCount, "expected " + std::to_string(n) +
                                         " first-integral candidates, got " +
                                         std::to_string(candidates.size()));
  const auto& chart = *s.theta.chart;

  IntegrabilityReport rep;
  rep.required_rank = n;
  rep.min_rank = n;
  auto one_homog_residual = [&](const Expr& f, std::span<const double> x) {
    auto dvg = vector_at(delta, x);
    auto df = gradient(f, chart, x);
    double lie = 0.0;
    for (int i = 0; i < dim; ++i) lie += dvg[i] * df[i];
    return std::abs(lie - eval<double>(f, chart.coords, x));
  };

  for (const auto& x : samples) {
    try {
      auto xh = hamiltonian_vf(s, H, x);
      for (const auto& f : candidates) {
        auto df = gradient(f, chart, x);
        double drift = 0.0;
        for (int i = 0; i < dim; ++i) drift += df[i] * xh[i];
        rep.dissipation_residual = std::max(rep.dissipation_residual, std::abs(drift));
        rep.homogeneity_residual =
            std::max(rep.homogeneity_residual, one_homog_residual(f, x));
      }
      rep.homogeneity_residual = std::max(rep.homogeneity_residual, one_homog_residual(H, x));
      for (std::size_t i = 0; i < candidates.size(); ++i)
        for (std::size_t j = i + 1; j < candidates.size(); ++j)
          rep.involution_residual =
              std::max(rep.involution_residual,
                       std::abs(poisson_bracket(s, candidates[i], candidates[j], x)));
      Mat dmat(int(candidates.size()), dim);
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto g = gradient(candidates[i], chart, x);
        for (int j = 0; j < dim; ++j) dmat(int(i), j) = g[j];
      }
      rep.min_rank = std::min(rep.min_rank, rank_of(dmat, rank_tol));
      ++rep.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::SingularSymplectic) {
        ++rep.skipped;
        continue;
      }
      throw;
    }
  }
  rep.duplicate_warning = rep.min_rank < int(candidates.size());
  rep.pass = rep.samples_used > 0 && rep.dissipation_residual < tol &&
             rep.involution_residual < tol && rep.homogeneity_residual < tol &&
             rep.min_rank >= n;
  return rep;
}

}  // namespace cforge
