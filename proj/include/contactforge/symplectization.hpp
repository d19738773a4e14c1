#pragma once

#include <optional>

#include "contactforge/structures.hpp"

namespace cforge {

// Trivial symplectisation of a contact chart: the base chart with a radial
// coordinate appended, the potential r * eta, and the radial Euler field.
struct SymplectizationLink {
  ChartPtr base;
  ChartPtr total;
  std::string radial;  // "r", renamed with a suffix if the base already uses it
  int radial_index = 0;
  bool renamed = false;
  TensorField eta;        // on the base chart
  TensorField theta;      // on the total chart
  TensorField liouville;  // r d/dr on the total chart
  Expr conformal;         // the radial coordinate itself
};

// Builds the link. A declared conformal factor other than the bare radial
// coordinate is accepted in scenario data but rejected here.
SymplectizationLink symplectize(const ContactForm& c,
                                const std::optional<Expr>& conformal = std::nullopt);

// Chart with a radial coordinate appended; shared by symplectisation and by
// the Poissonization of Jacobi structures that carry no contact form.
struct RadialExtension {
  ChartPtr total;
  std::string radial;
  int radial_index = 0;
  bool renamed = false;
};

RadialExtension radial_extension(const ChartPtr& base);

TensorField poissonize_on(const RadialExtension& ext, const JacobiStructure& j);

// f on the base chart -> -(r * f) on the total chart, exact rewrite.
Expr lift_function(const SymplectizationLink& link, const Expr& f);

// Base tensor re-expressed on the total chart (coordinate-wise copy).
TensorField pullback_field(const SymplectizationLink& link, const TensorField& f);

struct ProjectionResult {
  Expr projected;
  HomogeneityResult degree_check;
};

// Inverse of the lift on the r = 1 slice. `expected_degree` must be 0 or 1
// and is verified against the radial Euler field before substituting.
ProjectionResult project_function(const SymplectizationLink& link, const Expr& F,
                                  int expected_degree,
                                  const std::vector<std::vector<double>>& total_samples,
                                  double tol = 1e-8);

// Poisson bivector on the total chart encoding a Jacobi structure:
// components -Lambda^{ij}/r on base index pairs and -E^a on (a, r) slots.
// The sign of the Lambda block follows the project bracket convention
// (docs/conventions.md); its bracket then agrees with the one of -d theta.
TensorField poissonize(const SymplectizationLink& link, const JacobiStructure& j);

// Same bivector evaluated pointwise from a pointwise Jacobi structure.
PointTensor<double> poissonize_value(const SymplectizationLink& link, const PointJacobi& j,
                                     std::span<const double> total_x);

struct CorrespondenceReport {
  double residual = 0.0;
  int samples_used = 0;
  int skipped = 0;
  std::vector<double> worst_point;
};

// max |{f_lift, g_lift}_theta - (-r {f, g}_eta)| over samples and pairs; the
// base bracket runs through the pointwise induced structure.
CorrespondenceReport bracket_correspondence(const SymplectizationLink& link,
                                            const std::vector<std::pair<Expr, Expr>>& pairs,
                                            const std::vector<std::vector<double>>& samples);

// Dual-route consistency: the bracket of -d theta against the bracket of the
// pointwise Poissonization of the induced Jacobi structure, on lifted pairs.
CorrespondenceReport symplectization_consistency(
    const SymplectizationLink& link, const std::vector<std::pair<Expr, Expr>>& pairs,
    const std::vector<std::vector<double>>& samples);

}  // namespace cforge
