#include "contactforge/symplectization.hpp"

#include <algorithm>
#include <cmath>

namespace cforge {

RadialExtension radial_extension(const ChartPtr& base) {
  RadialExtension ext;
  ext.radial = "r";
  while (base->has_coord(ext.radial)) {
    ext.radial += "_1";
    ext.renamed = true;
  }
  auto coords = base->coords;
  coords.push_back(ext.radial);
  auto positive = base->positive;
  positive.push_back(Expr::variable(ext.radial));
  ext.total = make_chart(base->name + "_sympl", std::move(coords), std::move(positive));
  ext.radial_index = base->dim();
  return ext;
}

TensorField poissonize_on(const RadialExtension& ext, const JacobiStructure& j) {
  TensorField out = make_field(ext.total, FieldKind::Multivector, 2);
  Expr r = Expr::variable(ext.radial);
  for (const auto& [idx, e] : j.lambda.comp) out.set(idx, Expr::neg(Expr::div(e, r)));
  for (const auto& [idx, e] : j.evec.comp) out.set({idx[0], ext.radial_index}, Expr::neg(e));
  return out;
}

SymplectizationLink symplectize(const ContactForm& c, const std::optional<Expr>& conformal) {
  const Chart& base = *c.eta.chart;
  if (base.dim() % 2 == 0)
    throw Error(ErrKind::ChartMismatch, "contact base charts are odd-dimensional");

  RadialExtension ext = radial_extension(c.eta.chart);
  SymplectizationLink link;
  link.base = c.eta.chart;
  link.eta = c.eta;
  link.radial = ext.radial;
  link.renamed = ext.renamed;
  if (conformal) {
    const ExprNode& n = conformal->node();
    bool trivial = n.op == ExprOp::Variable && (n.name == "r" || n.name == link.radial);
    if (!trivial)
      throw Error(ErrKind::UnsupportedConformalFactor,
                  "only the trivial conformal factor (the radial coordinate) is supported, got '" +
                      conformal->pretty() + "'");
  }
  link.conformal = Expr::variable(link.radial);
  link.total = ext.total;
  link.radial_index = ext.radial_index;

  link.theta = make_one_form(link.total);
  for (const auto& [idx, e] : c.eta.comp)
    link.theta.set(idx, Expr::mul(Expr::variable(link.radial), e));

  link.liouville = make_vector_field(link.total);
  link.liouville.set({link.radial_index}, Expr::variable(link.radial));
  return link;
}

Expr lift_function(const SymplectizationLink& link, const Expr& f) {
  return Expr::neg(Expr::mul(Expr::variable(link.radial), f));
}

TensorField pullback_field(const SymplectizationLink& link, const TensorField& f) {
  TensorField out = make_field(link.total, f.kind, f.degree);
  for (const auto& [idx, e] : f.comp) out.set(idx, e);
  return out;
}

ProjectionResult project_function(const SymplectizationLink& link, const Expr& F,
                                  int expected_degree,
                                  const std::vector<std::vector<double>>& total_samples,
                                  double tol) {
  if (expected_degree != 0 && expected_degree != 1)
    throw Error(ErrKind::NotHomogeneous, "projection expects degree 0 or 1");
  ScalarField sf{link.total, F};
  auto check = homogeneity_degree(evaluable_scalar(sf), link.liouville, total_samples, -3, 3, tol);
  if (!check.degree || *check.degree != expected_degree) {
    std::string found = check.degree ? std::to_string(*check.degree) : "none in [-3, 3]";
    throw Error(ErrKind::NotHomogeneous, "'" + F.pretty() + "' is not " +
                                             std::to_string(expected_degree) +
                                             "-homogeneous (detected degree: " + found + ")");
  }
  Expr at_one = F.substitute(link.radial, Expr::constant(1.0));
  ProjectionResult out{expected_degree == 1 ? Expr::neg(at_one) : at_one, check};
  return out;
}

TensorField poissonize(const SymplectizationLink& link, const JacobiStructure& j) {
  require_same_chart(j.lambda, link.eta);
  RadialExtension ext{link.total, link.radial, link.radial_index, link.renamed};
  return poissonize_on(ext, j);
}

PointTensor<double> poissonize_value(const SymplectizationLink& link, const PointJacobi& j,
                                     std::span<const double> total_x) {
  const int n_base = link.base->dim();
  std::vector<double> base_x(total_x.begin(), total_x.begin() + n_base);
  double r = total_x[link.radial_index];
  auto lam = j.lambda_at(base_x);
  auto e = j.e_at(base_x);
  PointTensor<double> out{n_base + 1, 2, {}};
  for (const auto& [idx, v] : lam.comp) out.comp[idx] = -v / r;
  for (int a = 0; a < n_base; ++a)
    if (e[a] != 0.0) out.comp[{a, link.radial_index}] = -e[a];
  return out;
}

static double lifted_pair_residual(const SymplectizationLink& link, const PointJacobi& pj,
                                   const ExactSymplectic& sympl, const Expr& f, const Expr& g,
                                   std::span<const double> x, bool against_poissonization) {
  Expr fl = lift_function(link, f);
  Expr gl = lift_function(link, g);
  double lhs = poisson_bracket(sympl, fl, gl, x);
  double rhs;
  if (against_poissonization) {
    // bracket of the pointwise Poissonization, same slot convention
    const auto& chart = *link.total;
    auto dF = gradient(fl, chart, x);
    auto dG = gradient(gl, chart, x);
    auto tilde = poissonize_value(link, pj, x);
    rhs = bivector_pairing<double>(tilde, dG, dF);
  } else {
    const int n_base = link.base->dim();
    std::vector<double> base_x(x.begin(), x.begin() + n_base);
    double r = x[link.radial_index];
    rhs = -r * jacobi_bracket(pj, f, g, base_x);
  }
  return std::abs(lhs - rhs);
}

static CorrespondenceReport run_pairs(const SymplectizationLink& link,
                                      const std::vector<std::pair<Expr, Expr>>& pairs,
                                      const std::vector<std::vector<double>>& samples,
                                      bool against_poissonization) {
  CorrespondenceReport rep;
  auto pj = induced_jacobi(ContactForm{link.eta});
  ExactSymplectic sympl{link.theta};
  for (const auto& x : samples) {
    try {
      double worst = 0.0;
      for (const auto& [f, g] : pairs)
        worst = std::max(worst,
                         lifted_pair_residual(link, pj, sympl, f, g, x, against_poissonization));
      if (worst > rep.residual) {
        rep.residual = worst;
        rep.worst_point.assign(x.begin(), x.end());
      }
      ++rep.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::SingularFlat ||
          e.kind() == ErrKind::SingularSymplectic) {
        ++rep.skipped;
        continue;
      }
      throw;
    }
  }
  return rep;
}

CorrespondenceReport bracket_correspondence(const SymplectizationLink& link,
                                            const std::vector<std::pair<Expr, Expr>>& pairs,
                                            const std::vector<std::vector<double>>& samples) {
  return run_pairs(link, pairs, samples, false);
}

CorrespondenceReport symplectization_consistency(
    const SymplectizationLink& link, const std::vector<std::pair<Expr, Expr>>& pairs,
    const std::vector<std::vector<double>>& samples) {
  return run_pairs(link, pairs, samples, true);
}

}  // namespace cforge
