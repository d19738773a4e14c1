#pragma once

#include <optional>

#include "contactforge/tensor_ops.hpp"

namespace cforge {

// -- structure types -------------------------------------------------------

struct JacobiStructure {
  TensorField lambda;  // bivector
  TensorField evec;    // vector field E; identically zero for Poisson
};

JacobiStructure poisson_structure(const TensorField& lambda);

struct ContactForm {
  TensorField eta;  // one-form on an odd-dimensional chart
};

struct ExactSymplectic {
  TensorField theta;  // symplectic potential; the form is -d theta
};

// Jacobi structure known only pointwise (the one a contact form induces).
struct PointJacobi {
  ChartPtr chart;
  std::function<PointTensor<double>(std::span<const double>)> lambda_at;
  std::function<std::vector<double>(std::span<const double>)> e_at;
};

// -- scalar bracket --------------------------------------------------------

// Bracket of (Lambda, E): {f, g} = <dg, sharp_Lambda(df)> + f E(g) - g E(f).
// The bivector slot order is the project-wide calibrated convention
// (docs/conventions.md); with it the contact-induced structure reproduces
// X_f(g) + g R(f) exactly.
template <class T>
T jacobi_bracket_value(const JacobiStructure& J, const Expr& f, const Expr& g,
                       std::span<const T> env) {
  const auto& coords = J.lambda.chart->coords;
  const int n = int(coords.size());
  auto seeded = seed_over<T>(env);
  Dual<T> fv = eval<Dual<T>>(f, coords, seeded);
  Dual<T> gv = eval<Dual<T>>(g, coords, seeded);
  fv.d.resize(n, T{});
  gv.d.resize(n, T{});
  auto lam = J.lambda.value<T>(env);
  T acc = bivector_pairing<T>(lam, gv.d, fv.d);
  auto ev = J.evec.value<T>(env);
  T ef{}, eg{};
  for (const auto& [idx, v] : ev.comp) {
    ef = ef + v * fv.d[idx[0]];
    eg = eg + v * gv.d[idx[0]];
  }
  return acc + fv.v * eg - gv.v * ef;
}

double jacobi_bracket(const JacobiStructure& J, const Expr& f, const Expr& g,
                      std::span<const double> x);

double jacobi_bracket(const PointJacobi& J, const Expr& f, const Expr& g,
                      std::span<const double> x);

// Bracket from raw ingredients: values and gradients of both arguments plus
// the structure value at the point. Shared by the nested-dual Jacobiator and
// the finite-difference involution checks.
double bracket_with_grads(const PointTensor<double>& lam, const std::vector<double>& evec,
                          double av, std::span<const double> da, double bv,
                          std::span<const double> db);

// |{{f,g},h} + {{g,h},f} + {{h,f},g}| at x, inner brackets differentiated
// with nested duals.
double jacobiator_residual(const JacobiStructure& J, const Expr& f, const Expr& g,
                           const Expr& h, std::span<const double> x);

// -- axiom checks ------------------------------------------------------------

struct IsJacobiResult {
  double tensor_residual = 0.0;      // max over samples of the two tensor equations
  double jacobiator_residual = 0.0;  // max over samples and the test family
  bool tensor_ok = false;
  bool oracle_ok = false;
  int samples_used = 0;
  int skipped = 0;
  std::vector<double> worst_point;

  bool consistent() const { return tensor_ok == oracle_ok; }
  bool pass() const { return tensor_ok && oracle_ok; }
};

// Dual-route verification: the two structure-tensor equations against the
// Jacobi identity of the scalar bracket on a function family. Disagreement
// between the routes signals a convention bug and is reported loudly.
IsJacobiResult is_jacobi(const JacobiStructure& J,
                         const std::vector<std::vector<double>>& samples,
                         const std::vector<Expr>& test_family, double tensor_tol = 1e-9,
                         double jacobiator_tol = 1e-8);

std::vector<Expr> default_test_family(const Chart& chart);

// -- contact geometry --------------------------------------------------------

// eta wedge (d eta)^n, the single top-degree component.
double contact_volume(const ContactForm& c, std::span<const double> x);

// Flat map of a contact form: X -> i_X d eta + eta(X) eta, as a matrix.
Mat contact_flat_matrix(const ContactForm& c, std::span<const double> x);

// Unique R with eta(R) = 1 and i_R d eta = 0, by solving the flat map.
std::vector<double> reeb(const ContactForm& c, std::span<const double> x);

struct ContactVectorField {
  std::vector<double> value;
  double defining_residual;  // max violation of eta(X_f) = -f and i_X d eta = df - R(f) eta
};

ContactVectorField contact_hamiltonian_vf(const ContactForm& c, const Expr& f,
                                          std::span<const double> x);

// The Jacobi structure induced by a contact form, pointwise.
PointJacobi induced_jacobi(const ContactForm& c);

// -- exact symplectic --------------------------------------------------------

Mat symplectic_matrix(const ExactSymplectic& s, std::span<const double> x);  // of -d theta

// Unique Delta with i_Delta omega = -theta.
std::vector<double> liouville_field(const ExactSymplectic& s, std::span<const double> x);

// X_f solving i_{X_f} omega = df.
std::vector<double> hamiltonian_vf(const ExactSymplectic& s, const Expr& f,
                                   std::span<const double> x);
std::vector<double> hamiltonian_vf_cov(const ExactSymplectic& s, std::span<const double> df,
                                       std::span<const double> x);

// Poisson bracket of the symplectic structure: {F, G} = X_F(G).
double poisson_bracket(const ExactSymplectic& s, const Expr& f, const Expr& g,
                       std::span<const double> x);

// -- homogeneity ---------------------------------------------------------------

struct HomogeneityResult {
  std::optional<int> degree;
  std::vector<std::pair<int, double>> profile;  // residual per candidate degree
  double scale = 0.0;                           // largest component magnitude seen
  int samples_used = 0;
  int skipped = 0;  // domain violations at sample points
};

HomogeneityResult homogeneity_degree(const EvaluableField& field, const TensorField& delta,
                                     const std::vector<std::vector<double>>& samples,
                                     int k_min = -3, int k_max = 3, double tol = 1e-8);

// FD variants for objects known only pointwise.
using MatrixFn = std::function<Mat(std::span<const double>)>;

HomogeneityResult homogeneity_degree_matrix(const MatrixFn& n_fn, const TensorField& delta,
                                            const std::vector<std::vector<double>>& samples,
                                            int k_min = -3, int k_max = 3, double tol = 1e-6,
                                            double fd_h = 1e-5);

HomogeneityResult homogeneity_degree_scalar_fn(const PointFn& f, const TensorField& delta,
                                               const std::vector<std::vector<double>>& samples,
                                               int k_min = -3, int k_max = 3,
                                               double tol = 1e-6, double fd_h = 1e-5);

// -- integrability verdicts ------------------------------------------------------

struct IntegrabilityReport {
  double dissipation_residual = 0.0;  // max |{f_i, h}| (contact) or |X_H(f_i)| (symplectic)
  double involution_residual = 0.0;   // max pairwise bracket
  double homogeneity_residual = 0.0;  // symplectic case: 1-homogeneity of f_i and H
  int min_rank = 0;
  int required_rank = 0;
  bool duplicate_warning = false;
  int samples_used = 0;
  int skipped = 0;
  bool pass = false;
};

// n + 1 dissipated quantities in involution with rank >= n on a (2n+1)-chart.
IntegrabilityReport verify_contact_integrable(const ContactForm& c, const Expr& h,
                                              const std::vector<Expr>& candidates,
                                              const std::vector<std::vector<double>>& samples,
                                              double tol = 1e-9, double rank_tol = 1e-8);

// n first integrals of X_H, independent, in involution, 1-homogeneous.
IntegrabilityReport verify_homogeneous_integrable(
    const ExactSymplectic& s, const Expr& H, const TensorField& delta,
    const std::vector<Expr>& candidates, const std::vector<std::vector<double>>& samples,
    double tol = 1e-9, double rank_tol = 1e-8);

}  // namespace cforge
