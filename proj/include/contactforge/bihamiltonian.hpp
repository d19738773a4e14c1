#pragma once

#include <complex>

#include "contactforge/symplectization.hpp"

namespace cforge {

// -- compatibility -----------------------------------------------------------

struct CompatibilityReport {
  double direct_residual = 0.0;  // [Lambda, Lambda1] (Poisson) or sum tensor eqs (Jacobi)
  bool direct_ok = false;
  double cross_residual = 0.0;  // independent second route
  bool cross_ok = false;
  int samples_used = 0;
  int skipped = 0;

  bool consistent() const { return direct_ok == cross_ok; }
  bool pass() const { return direct_ok && cross_ok; }
};

// [Lambda, Lambda1] = 0 at samples, cross-checked against the Jacobi axioms
// of the sum. Route disagreement is an internal-consistency failure.
CompatibilityReport poisson_compatibility(const TensorField& lambda, const TensorField& lambda1,
                                          const std::vector<std::vector<double>>& samples,
                                          const std::vector<Expr>& test_family,
                                          double tol = 1e-9);

// Sum passes the Jacobi axioms, cross-checked through the Poissonizations
// on the symplectised chart.
CompatibilityReport jacobi_compatibility(const JacobiStructure& j, const JacobiStructure& j1,
                                         const std::vector<std::vector<double>>& samples,
                                         const std::vector<Expr>& test_family,
                                         double tol = 1e-9);

// -- recursion operator --------------------------------------------------------

// N = P1 * P^{-1} with P, P1 the full pairing matrices of the bivectors.
MixedTensorPointValue recursion_operator(const TensorField& lambda, const TensorField& lambda1,
                                         std::span<const double> x);

struct EigenvalueClusters {
  std::vector<double> point;
  std::vector<std::pair<double, int>> clusters;  // (value, multiplicity), ascending
  std::vector<std::complex<double>> nonreal;     // evidence against a real spectrum
  double discarded_imag = 0.0;                   // largest |imag| flattened to real
};

EigenvalueClusters eigenvalue_clusters(const Mat& n, double cluster_rel_tol = 1e-6,
                                       double complex_tol = 1e-8);

// -- tracked eigenvalue fields ----------------------------------------------------

// Eigenvalues of the recursion operator as pointwise scalar fields. Distinct
// values at the base point are continued by value matching; a change in the
// number of distinct clusters (two of them merging) raises TrackingAmbiguity
// rather than guessing through a crossing.
class EigenFieldSet {
 public:
  EigenFieldSet(TensorField lambda, TensorField lambda1, std::vector<double> base_point,
                const std::vector<std::vector<double>>& probe_points,
                double cluster_rel_tol = 1e-6, double complex_tol = 1e-8);

  int count() const { return int(base_values_.size()); }
  const std::vector<double>& base_values() const { return base_values_; }

  double value(int i, std::span<const double> x) const;
  std::vector<double> fd_grad(int i, std::span<const double> x, double h = 1e-5) const;
  PointFn field(int i) const;

  const ChartPtr& chart() const { return lambda_.chart; }

 private:
  std::vector<double> distinct_at(std::span<const double> x) const;

  TensorField lambda_, lambda1_;
  std::vector<double> base_point_;
  std::vector<double> base_values_;
  double cluster_rel_tol_, complex_tol_;
};

// -- involution ---------------------------------------------------------------

// A scalar function with a gradient, either exact (expressions) or finite
// difference (tracked eigenvalue fields).
struct GradFn {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> grad;
};

GradFn grad_fn(const ScalarField& f);
GradFn grad_fn(const EigenFieldSet& fields, int i, double fd_h = 1e-5);

// Structure argument for bracket evaluations that only need pointwise values.
struct BracketProvider {
  std::function<PointTensor<double>(std::span<const double>)> lambda_at;
  std::function<std::vector<double>(std::span<const double>)> e_at;
};

BracketProvider provider(const TensorField& bivector);
BracketProvider provider(const JacobiStructure& j);
BracketProvider provider(const PointJacobi& j);

struct InvolutionReport {
  double residual = 0.0;
  int samples_used = 0;
  int skipped = 0;
  std::vector<double> worst_point;
};

InvolutionReport involution_check(const std::vector<GradFn>& functions,
                                  const BracketProvider& bracket,
                                  const std::vector<std::vector<double>>& samples);

// -- bi-Hamiltonian vector field ----------------------------------------------------

struct BiHamiltonianReport {
  double residual_first = 0.0;   // sharp_Lambda(dh) vs X
  double residual_second = 0.0;  // sharp_Lambda1(dh1) vs X
  int samples_used = 0;
  int skipped = 0;
};

BiHamiltonianReport bihamiltonian_check(const TensorField& x_field, const TensorField& lambda,
                                        const Expr& h, const TensorField& lambda1,
                                        const Expr& h1,
                                        const std::vector<std::vector<double>>& samples);

// -- Hessian / separability diagnostics ------------------------------------------------

struct KolmogorovReport {
  double min_abs_det = 0.0;
  double max_abs_det = 0.0;
  double nonzero_fraction = 0.0;  // samples with |det| above threshold
  bool nondegenerate = false;
  int samples_used = 0;
};

// Determinant of the Hessian of H restricted to the declared action
// coordinates; nondegenerate when it clears det_tol on enough samples.
KolmogorovReport kolmogorov_check(const ScalarField& h, const std::vector<int>& action_indices,
                                  const std::vector<std::vector<double>>& samples,
                                  double det_tol = 1e-10, double pass_fraction = 0.9);

struct SeparabilityReport {
  double mixed_partial_max = 0.0;  // max |d^2 H / d lambda_i d lambda_j|, i != j
  int samples_used = 0;
  int skipped = 0;  // ill-conditioned local Jacobian systems
};

// Numeric evidence for H splitting as a sum of single-eigenvalue terms:
// re-expresses H in the eigenvalue variables through the local Jacobian
// system and measures mixed second partials. Diagnostic only.
SeparabilityReport separability_residual(const ScalarField& h,
                                         const std::vector<GradFn>& eigen_fields,
                                         const std::vector<std::vector<double>>& samples,
                                         double fd_h = 1e-4);

// -- obstruction diagnostic ------------------------------------------------------------

struct NoGoVerdict {
  HomogeneityResult lambda_degree;    // base structure
  HomogeneityResult lambda1_degree;   // second structure
  HomogeneityResult recursion_degree; // FD route on N
  std::vector<HomogeneityResult> eigen_degrees;
  double max_eigen_euler = 0.0;  // max |Delta(lambda_i)| when fields are 0-homogeneous
  double euler_residual = 0.0;   // max |Delta(H) - H|
  bool hamiltonian_one_homogeneous = false;
  KolmogorovReport hessian;      // in eigenvalue variables, when computable
  bool hessian_evaluated = false;
  int independent_count = 0;     // max over samples of the eigen-gradient rank
  int half_dim = 0;
  bool forbidden_conjunction = false;
  std::string verdict;
  int eigen_tracking_failures = 0;
};

// Records every measurable clause of the homogeneous bi-Hamiltonian
// obstruction: degrees of both structures and of N, eigenvalue degrees and
// independence, the Euler identity for H, and Hessian evidence. The
// forbidden conjunction (all obstruction hypotheses holding at once) marks
// the run internally inconsistent.
NoGoVerdict nogo_diagnostic(const TensorField& lambda, const TensorField& lambda1,
                            const TensorField& delta, const ScalarField& h,
                            const std::vector<std::vector<double>>& samples,
                            double ad_tol = 1e-8, double fd_tol = 1e-6);

}  // namespace cforge
