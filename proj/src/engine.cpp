#include "contactforge/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <semaphore>
#include <sstream>

#include "contactforge/bihamiltonian.hpp"
#include "contactforge/flows.hpp"

namespace cforge {

namespace {

std::map<std::string, double> default_tolerances() {
  return {
      {"tensor_eq", 1e-9},      {"jacobiator", 1e-8},    {"bracket", 1e-9},
      {"involution_fd", 1e-6},  {"contact_field", 1e-10}, {"eigen_golden", 1e-9},
      {"homogeneity", 1e-8},    {"homogeneity_fd", 1e-6}, {"euler", 1e-12},
      {"rank", 1e-8},           {"det", 1e-10},          {"nondegenerate", 1e-10},
      {"endpoint", 1e-8},       {"dissipation", 1e-8},   {"conservation", 1e-9},
      {"correspondence", 1e-9}, {"skip_fraction", 0.9},  {"cluster_rel", 1e-6},
      {"complex_tol", 1e-8},
  };
}

struct Tolerances {
  std::map<std::string, double> values;

  double get(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end())
      throw Error(ErrKind::Usage, "unknown tolerance '" + name + "'");
    return it->second;
  }
};

struct Params {
  const TaskDecl& task;

  const TomlValue* find(const std::string& key) const {
    for (const auto& [k, v] : task.params)
      if (k == key) return &v;
    return nullptr;
  }
  bool has(const std::string& key) const { return find(key) != nullptr; }
  std::string str(const std::string& key) const {
    const TomlValue* v = find(key);
    if (!v)
      throw Error(ErrKind::Parse,
                  "task '" + task.label + "' is missing parameter '" + key + "'");
    return v->as_string();
  }
  std::string str_or(const std::string& key, const std::string& fallback) const {
    const TomlValue* v = find(key);
    return v ? v->as_string() : fallback;
  }
  double num(const std::string& key, double fallback) const {
    const TomlValue* v = find(key);
    return v ? v->as_number() : fallback;
  }
  bool flag(const std::string& key, bool fallback) const {
    const TomlValue* v = find(key);
    return v ? v->as_bool() : fallback;
  }
  std::vector<std::string> str_list(const std::string& key) const {
    const TomlValue* v = find(key);
    if (!v)
      throw Error(ErrKind::Parse,
                  "task '" + task.label + "' is missing list parameter '" + key + "'");
    return v->as_string_array();
  }
};

struct Ctx {
  const Scenario& sc;
  const RunOptions& opt;
  Tolerances tol;
  std::vector<std::vector<double>> samples;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void apply_skip_rule(const Ctx& ctx, CheckRecord& rec) {
  int total = rec.samples_used + rec.skipped;
  if (total == 0) return;
  double frac = double(rec.samples_used) / total;
  if (frac < ctx.tol.get("skip_fraction") && rec.status == "pass") {
    rec.status = "fail";
    rec.details.emplace_back("skip_rule", "only " + fmt(frac * 100) +
                                              "% of samples were usable");
  }
}

JacobiStructure resolve_jacobi(const Scenario& sc, const StructureDecl& d) {
  if (d.kind == "poisson") return poisson_structure(sc.bivector_field(d.bivector));
  if (d.kind == "jacobi")
    return JacobiStructure{sc.bivector_field(d.bivector), sc.vector_field(d.vector)};
  throw Error(ErrKind::UnknownReference,
              "structure '" + d.name + "' does not define a bracket pair");
}

BracketProvider resolve_bracket(const Scenario& sc, const std::string& name) {
  const StructureDecl& d = sc.structure(name);
  if (d.kind == "poisson" || d.kind == "jacobi") return provider(resolve_jacobi(sc, d));
  if (d.kind == "contact") return provider(induced_jacobi(ContactForm{sc.one_form(d.oneform)}));
  throw Error(ErrKind::UnknownReference,
              "structure '" + name + "' carries no Jacobi bracket");
}

// -- structure verification ---------------------------------------------------

CheckRecord check_structure(const Ctx& ctx, const StructureDecl& d) {
  CheckRecord rec;
  rec.name = "structure/" + d.name;
  const Scenario& sc = ctx.sc;

  if (d.kind == "poisson" || d.kind == "jacobi") {
    auto j = resolve_jacobi(sc, d);
    auto fam = default_test_family(*sc.chart);
    auto r = is_jacobi(j, ctx.samples, fam, ctx.tol.get("tensor_eq"),
                       ctx.tol.get("jacobiator"));
    rec.residual = std::max(r.tensor_residual, r.jacobiator_residual);
    rec.tolerance = ctx.tol.get("tensor_eq");
    rec.samples_used = r.samples_used;
    rec.skipped = r.skipped;
    rec.worst_point = r.worst_point;
    rec.details.emplace_back("tensor_residual", fmt(r.tensor_residual));
    rec.details.emplace_back("jacobiator_residual", fmt(r.jacobiator_residual));
    if (!r.consistent()) {
      rec.status = "inconsistent";
      rec.details.emplace_back("note", "structure equations and bracket oracle disagree");
    } else {
      rec.status = r.pass() ? "pass" : "fail";
    }
  } else if (d.kind == "contact") {
    ContactForm c{sc.one_form(d.oneform)};
    double min_vol = std::numeric_limits<double>::infinity();
    double reeb_res = 0.0, induced_res = 0.0;
    PointJacobi pj = induced_jacobi(c);
    const StructureDecl* ind = d.induced.empty() ? nullptr : &sc.structure(d.induced);
    JacobiStructure declared;
    if (ind) declared = resolve_jacobi(sc, *ind);
    for (const auto& x : ctx.samples) {
      try {
        min_vol = std::min(min_vol, std::abs(contact_volume(c, x)));
        auto r = reeb(c, x);
        auto etav = covector_at(c.eta, x);
        double pairing_val = 0;
        for (int i = 0; i < sc.chart->dim(); ++i) pairing_val += etav[i] * r[i];
        reeb_res = std::max(reeb_res, std::abs(pairing_val - 1.0));
        auto dmat = full_matrix(exterior_derivative(c.eta, x));
        for (int j = 0; j < sc.chart->dim(); ++j) {
          double contr = 0;
          for (int i = 0; i < sc.chart->dim(); ++i) contr += r[i] * dmat(i, j);
          reeb_res = std::max(reeb_res, std::abs(contr));
        }
        if (ind) {
          auto lam = pj.lambda_at(x);
          auto lam_decl = declared.lambda.at(x);
          for (const auto& t : increasing_tuples(sc.chart->dim(), 2))
            induced_res = std::max(induced_res, std::abs(lam.full(t) - lam_decl.full(t)));
          auto e = pj.e_at(x);
          auto e_decl = vector_at(declared.evec, x);
          for (int i = 0; i < sc.chart->dim(); ++i)
            induced_res = std::max(induced_res, std::abs(e[i] - e_decl[i]));
        }
        ++rec.samples_used;
      } catch (const Error& e) {
        if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::SingularFlat) {
          ++rec.skipped;
          continue;
        }
        throw;
      }
    }
    rec.residual = std::max(reeb_res, induced_res);
    rec.tolerance = ctx.tol.get("contact_field");
    rec.details.emplace_back("min_contact_volume", fmt(min_vol));
    rec.details.emplace_back("reeb_residual", fmt(reeb_res));
    if (ind) rec.details.emplace_back("induced_vs_declared", fmt(induced_res));
    bool ok = rec.samples_used > 0 && min_vol > ctx.tol.get("nondegenerate") &&
              reeb_res < ctx.tol.get("contact_field") &&
              induced_res < ctx.tol.get("tensor_eq");
    rec.status = ok ? "pass" : "fail";
  } else if (d.kind == "exact_symplectic") {
    ExactSymplectic s{sc.one_form(d.oneform)};
    double min_det = std::numeric_limits<double>::infinity();
    double liouville_res = 0.0;
    const TensorField* declared = nullptr;
    for (const auto& sys : sc.systems)
      if (sys.structure == d.name && !sys.liouville.empty())
        declared = &sc.vector_field(sys.liouville);
    for (const auto& x : ctx.samples) {
      try {
        auto w = symplectic_matrix(s, x);
        min_det = std::min(min_det, std::abs(lu_factor(w, 0.0).det));
        auto lv = liouville_field(s, x);
        if (declared) {
          auto dv = vector_at(*declared, x);
          for (std::size_t i = 0; i < lv.size(); ++i)
            liouville_res = std::max(liouville_res, std::abs(lv[i] - dv[i]));
        }
        ++rec.samples_used;
      } catch (const Error& e) {
        if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::SingularSymplectic) {
          ++rec.skipped;
          continue;
        }
        throw;
      }
    }
    rec.residual = liouville_res;
    rec.tolerance = ctx.tol.get("contact_field");
    rec.details.emplace_back("min_symplectic_det", fmt(min_det));
    if (declared) rec.details.emplace_back("liouville_vs_declared", fmt(liouville_res));
    bool ok = rec.samples_used > 0 && min_det > ctx.tol.get("nondegenerate") &&
              liouville_res < ctx.tol.get("contact_field");
    rec.status = ok ? "pass" : "fail";
  } else {
    throw Error(ErrKind::UnknownReference, "unknown structure kind '" + d.kind + "'");
  }
  apply_skip_rule(ctx, rec);
  return rec;
}

// -- task handlers ---------------------------------------------------------------

CheckRecord task_compatibility(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  auto fam = default_test_family(*ctx.sc.chart);
  CompatibilityReport r;
  if (p.has("poisson")) {
    r = poisson_compatibility(ctx.sc.bivector_field(ctx.sc.structure(p.str("poisson")).bivector),
                              ctx.sc.bivector_field(ctx.sc.structure(p.str("poisson1")).bivector),
                              ctx.samples, fam, ctx.tol.get("tensor_eq"));
  } else {
    r = jacobi_compatibility(resolve_jacobi(ctx.sc, ctx.sc.structure(p.str("jacobi"))),
                             resolve_jacobi(ctx.sc, ctx.sc.structure(p.str("jacobi1"))),
                             ctx.samples, fam, ctx.tol.get("tensor_eq"));
  }
  rec.residual = r.direct_residual;
  rec.tolerance = ctx.tol.get("tensor_eq");
  rec.samples_used = r.samples_used;
  rec.skipped = r.skipped;
  rec.details.emplace_back("direct_residual", fmt(r.direct_residual));
  rec.details.emplace_back("cross_residual", fmt(r.cross_residual));
  bool expect_compatible = p.str_or("expect", "compatible") == "compatible";
  if (!r.consistent()) {
    rec.status = "inconsistent";
    rec.details.emplace_back("note", "direct and cross routes disagree");
  } else {
    rec.status = (r.pass() == expect_compatible) ? "pass" : "fail";
    rec.details.emplace_back("verdict", r.pass() ? "compatible" : "incompatible");
  }
  apply_skip_rule(ctx, rec);
  return rec;
}

CheckRecord task_recursion(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  const auto& lam = sc.bivector_field(sc.structure(p.str("poisson")).bivector);
  const auto& lam1 = sc.bivector_field(sc.structure(p.str("poisson1")).bivector);
  const int dim = sc.chart->dim();

  std::vector<Expr> expected;
  if (p.has("eigenvalues"))
    for (const auto& n : p.str_list("eigenvalues")) expected.push_back(sc.scalar(n));

  double golden_res = 0.0;
  bool mult_ok = true;
  int nonreal = 0;
  for (const auto& x : ctx.samples) {
    try {
      auto n = recursion_operator(lam, lam1, x);
      auto cl = eigenvalue_clusters(n.matrix, ctx.tol.get("cluster_rel"),
                                    ctx.tol.get("complex_tol"));
      nonreal += int(cl.nonreal.size());
      if (!expected.empty()) {
        int rep = dim / int(expected.size());
        std::vector<double> want;
        for (const auto& e : expected) {
          double v = eval<double>(e, sc.chart->coords, x);
          for (int k = 0; k < rep; ++k) want.push_back(v);
        }
        std::sort(want.begin(), want.end());
        std::vector<double> got;
        for (const auto& [v, m] : cl.clusters)
          for (int k = 0; k < m; ++k) got.push_back(v);
        if (got.size() != want.size()) {
          mult_ok = false;
        } else {
          for (std::size_t i = 0; i < got.size(); ++i) {
            double diff = std::abs(got[i] - want[i]);
            if (diff > golden_res) {
              golden_res = diff;
              rec.worst_point.assign(x.begin(), x.end());
            }
          }
        }
        if (int(cl.clusters.size()) == int(expected.size()))
          for (const auto& [v, m] : cl.clusters) mult_ok = mult_ok && (m == rep);
      }
      ++rec.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::SingularSharp) {
        ++rec.skipped;
        continue;
      }
      throw;
    }
  }

  // tracked fields: involution under both brackets and functional independence
  double inv0 = 0.0, inv1 = 0.0;
  int min_rank = 0;
  std::string tracking_note;
  if (!ctx.samples.empty()) {
    try {
      std::vector<std::vector<double>> probes(
          ctx.samples.begin() + 1,
          ctx.samples.begin() + std::min<std::size_t>(ctx.samples.size(), 7));
      EigenFieldSet fields(lam, lam1, ctx.samples.front(), probes,
                           ctx.tol.get("cluster_rel"), ctx.tol.get("complex_tol"));
      std::vector<GradFn> fns;
      for (int i = 0; i < fields.count(); ++i) fns.push_back(grad_fn(fields, i));
      inv0 = involution_check(fns, provider(lam), ctx.samples).residual;
      inv1 = involution_check(fns, provider(lam1), ctx.samples).residual;
      min_rank = fields.count();
      for (const auto& x : ctx.samples) {
        try {
          Mat g(fields.count(), dim);
          for (int i = 0; i < fields.count(); ++i) {
            auto gi = fields.fd_grad(i, x);
            for (int j = 0; j < dim; ++j) g(i, j) = gi[j];
          }
          min_rank = std::min(min_rank, rank_of(g, 1e-6));
        } catch (const Error& e) {
          if (e.kind() != ErrKind::TrackingAmbiguity) throw;
        }
      }
    } catch (const Error& e) {
      if (e.kind() != ErrKind::TrackingAmbiguity && e.kind() != ErrKind::SingularSharp) throw;
      tracking_note = e.what();
    }
  }

  rec.residual = golden_res;
  rec.tolerance = ctx.tol.get("eigen_golden");
  rec.details.emplace_back("eigen_golden_residual", fmt(golden_res));
  rec.details.emplace_back("multiplicities_match", mult_ok ? "yes" : "no");
  rec.details.emplace_back("nonreal_eigenvalues", std::to_string(nonreal));
  rec.details.emplace_back("tracked_involution_base", fmt(inv0));
  rec.details.emplace_back("tracked_involution_second", fmt(inv1));
  rec.details.emplace_back("independence_min_rank", std::to_string(min_rank));
  if (!tracking_note.empty()) rec.details.emplace_back("tracking", tracking_note);

  bool ok = rec.samples_used > 0 && golden_res < ctx.tol.get("eigen_golden") && mult_ok &&
            nonreal == 0 && inv0 < ctx.tol.get("involution_fd") &&
            inv1 < ctx.tol.get("involution_fd") && tracking_note.empty() &&
            (expected.empty() || min_rank == int(expected.size()));
  rec.status = ok ? "pass" : "fail";
  apply_skip_rule(ctx, rec);
  return rec;
}

CheckRecord task_involution(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  std::vector<GradFn> fns;
  for (const auto& n : p.str_list("functions"))
    fns.push_back(grad_fn(ScalarField{ctx.sc.chart, ctx.sc.scalar(n)}));
  auto bracket = resolve_bracket(ctx.sc, p.str("bracket"));
  auto r = involution_check(fns, bracket, ctx.samples);
  rec.residual = r.residual;
  rec.tolerance = ctx.tol.get("bracket");
  rec.samples_used = r.samples_used;
  rec.skipped = r.skipped;
  rec.worst_point = r.worst_point;
  rec.status = (r.samples_used > 0 && r.residual < rec.tolerance) ? "pass" : "fail";
  apply_skip_rule(ctx, rec);
  return rec;
}

CheckRecord task_bihamiltonian(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  auto r = bihamiltonian_check(sc.vector_field(p.str("field")),
                               sc.bivector_field(sc.structure(p.str("poisson")).bivector),
                               sc.scalar(p.str("hamiltonian")),
                               sc.bivector_field(sc.structure(p.str("poisson1")).bivector),
                               sc.scalar(p.str("hamiltonian1")), ctx.samples);
  rec.residual = std::max(r.residual_first, r.residual_second);
  rec.tolerance = ctx.tol.get("bracket");
  rec.samples_used = r.samples_used;
  rec.skipped = r.skipped;
  rec.details.emplace_back("residual_first", fmt(r.residual_first));
  rec.details.emplace_back("residual_second", fmt(r.residual_second));
  rec.status = (r.samples_used > 0 && rec.residual < rec.tolerance) ? "pass" : "fail";
  apply_skip_rule(ctx, rec);
  return rec;
}

CheckRecord task_integrable(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  const SystemDecl& sys = sc.system(p.str("system"));
  const StructureDecl& st = sc.structure(sys.structure);
  std::vector<Expr> candidates;
  for (const auto& n : sys.integrals) candidates.push_back(sc.scalar(n));

  IntegrabilityReport r;
  if (st.kind == "contact") {
    r = verify_contact_integrable(ContactForm{sc.one_form(st.oneform)},
                                  sc.scalar(sys.hamiltonian), candidates, ctx.samples,
                                  ctx.tol.get("bracket"), ctx.tol.get("rank"));
  } else if (st.kind == "exact_symplectic") {
    if (sys.liouville.empty())
      throw Error(ErrKind::UnknownReference,
                  "system '" + sys.name + "' needs a liouville field for this verdict");
    r = verify_homogeneous_integrable(ExactSymplectic{sc.one_form(st.oneform)},
                                      sc.scalar(sys.hamiltonian),
                                      sc.vector_field(sys.liouville), candidates, ctx.samples,
                                      ctx.tol.get("bracket"), ctx.tol.get("rank"));
  } else {
    throw Error(ErrKind::UnknownReference,
                "integrability verdicts need a contact or exact symplectic system");
  }
  rec.residual = std::max({r.dissipation_residual, r.involution_residual,
                           r.homogeneity_residual});
  rec.tolerance = ctx.tol.get("bracket");
  rec.samples_used = r.samples_used;
  rec.skipped = r.skipped;
  rec.details.emplace_back("conservation_residual", fmt(r.dissipation_residual));
  rec.details.emplace_back("involution_residual", fmt(r.involution_residual));
  if (st.kind == "exact_symplectic")
    rec.details.emplace_back("one_homogeneity_residual", fmt(r.homogeneity_residual));
  rec.details.emplace_back("rank", std::to_string(r.min_rank) + " (required >= " +
                                       std::to_string(r.required_rank) + ")");
  if (r.duplicate_warning)
    rec.details.emplace_back("warning", "candidate differentials are linearly dependent");
  rec.status = r.pass ? "pass" : "fail";
  apply_skip_rule(ctx, rec);
  return rec;
}

CheckRecord task_homogeneity(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  if (p.flag("self", false)) {
    rec.status = "skipped";
    rec.details.emplace_back("note", "degree of the scaling field along itself is not tested");
    return rec;
  }
  const auto& delta = sc.vector_field(p.str("liouville"));
  std::string object = p.str("object");

  HomogeneityResult r;
  bool fd_route = false;
  if (object == "omega") {
    r = homogeneity_degree(evaluable_d_of(sc.one_form(p.str("oneform")), -1.0), delta,
                           ctx.samples, -3, 3, ctx.tol.get("homogeneity"));
  } else if (object == "recursion") {
    const auto& lam = sc.bivector_field(sc.structure(p.str("poisson")).bivector);
    const auto& lam1 = sc.bivector_field(sc.structure(p.str("poisson1")).bivector);
    TensorField l = lam, l1 = lam1;
    MatrixFn n_fn = [l, l1](std::span<const double> x) {
      return recursion_operator(l, l1, x).matrix;
    };
    r = homogeneity_degree_matrix(n_fn, delta, ctx.samples, -3, 3,
                                  ctx.tol.get("homogeneity_fd"));
    fd_route = true;
  } else if (sc.oneforms.count(object)) {
    r = homogeneity_degree(evaluable(sc.one_form(object)), delta, ctx.samples, -3, 3,
                           ctx.tol.get("homogeneity"));
  } else if (sc.bivectors.count(object)) {
    r = homogeneity_degree(evaluable(sc.bivector_field(object)), delta, ctx.samples, -3, 3,
                           ctx.tol.get("homogeneity"));
  } else if (sc.vectors.count(object)) {
    r = homogeneity_degree(evaluable(sc.vector_field(object)), delta, ctx.samples, -3, 3,
                           ctx.tol.get("homogeneity"));
  } else {
    r = homogeneity_degree(evaluable_scalar(ScalarField{sc.chart, sc.scalar(object)}), delta,
                           ctx.samples, -3, 3, ctx.tol.get("homogeneity"));
  }

  rec.tolerance = ctx.tol.get(fd_route ? "homogeneity_fd" : "homogeneity");
  rec.samples_used = r.samples_used;
  rec.skipped = r.skipped;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [k, res] : r.profile)
    if (r.degree && k == *r.degree) best = res;
  rec.residual = r.degree ? best : 0.0;
  rec.details.emplace_back("degree", r.degree ? std::to_string(*r.degree) : "none");
  if (p.has("expect")) {
    int want = int(p.num("expect", 0));
    rec.status = (r.degree && *r.degree == want) ? "pass" : "fail";
    rec.details.emplace_back("expected", std::to_string(want));
  } else {
    rec.status = r.degree ? "pass" : "fail";
  }
  apply_skip_rule(ctx, rec);
  return rec;
}

CheckRecord task_kolmogorov(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  std::vector<int> idx;
  for (const auto& n : p.str_list("action")) idx.push_back(sc.chart->index_of(n));
  auto r = kolmogorov_check(ScalarField{sc.chart, sc.scalar(p.str("hamiltonian"))}, idx,
                            ctx.samples, ctx.tol.get("det"));
  rec.samples_used = r.samples_used;
  rec.residual = r.nondegenerate ? r.min_abs_det : r.max_abs_det;
  rec.tolerance = ctx.tol.get("det");
  rec.details.emplace_back("min_abs_det", fmt(r.min_abs_det));
  rec.details.emplace_back("max_abs_det", fmt(r.max_abs_det));
  rec.details.emplace_back("verdict", r.nondegenerate ? "nondegenerate" : "degenerate");
  if (p.has("expect")) {
    bool want_nd = p.str("expect") == "nondegenerate";
    rec.status = (r.nondegenerate == want_nd) ? "pass" : "fail";
  } else {
    rec.status = "pass";
  }
  return rec;
}

CheckRecord task_separability(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  std::vector<GradFn> fns;
  if (p.has("eigenvalues")) {
    for (const auto& n : p.str_list("eigenvalues"))
      fns.push_back(grad_fn(ScalarField{sc.chart, sc.scalar(n)}));
  } else {
    const auto& lam = sc.bivector_field(sc.structure(p.str("poisson")).bivector);
    const auto& lam1 = sc.bivector_field(sc.structure(p.str("poisson1")).bivector);
    EigenFieldSet fields(lam, lam1, ctx.samples.front(), {});
    for (int i = 0; i < fields.count(); ++i) fns.push_back(grad_fn(fields, i));
  }
  auto r = separability_residual(ScalarField{sc.chart, sc.scalar(p.str("hamiltonian"))}, fns,
                                 ctx.samples);
  rec.residual = r.mixed_partial_max;
  rec.samples_used = r.samples_used;
  rec.skipped = r.skipped;
  rec.details.emplace_back("mixed_partial_max", fmt(r.mixed_partial_max));
  rec.details.emplace_back("note", "diagnostic only; never gates a run");
  rec.status = r.samples_used > 0 ? "pass" : "skipped";
  return rec;
}

CheckRecord nogo_to_record(const Ctx& ctx, const NoGoVerdict& v) {
  CheckRecord rec;
  auto deg_str = [](const HomogeneityResult& h) {
    return h.degree ? std::to_string(*h.degree) : std::string("none");
  };
  rec.details.emplace_back("deg_base", deg_str(v.lambda_degree));
  rec.details.emplace_back("deg_second", deg_str(v.lambda1_degree));
  rec.details.emplace_back("deg_recursion", deg_str(v.recursion_degree));
  std::string eig;
  for (std::size_t i = 0; i < v.eigen_degrees.size(); ++i) {
    if (i) eig += ", ";
    eig += deg_str(v.eigen_degrees[i]);
  }
  rec.details.emplace_back("eigen_degrees", eig.empty() ? "none tracked" : eig);
  rec.details.emplace_back("euler_residual", fmt(v.euler_residual));
  rec.details.emplace_back("max_eigen_radial_derivative", fmt(v.max_eigen_euler));
  rec.details.emplace_back("independent_count", std::to_string(v.independent_count) + "/" +
                                                    std::to_string(v.half_dim));
  if (v.hessian_evaluated)
    rec.details.emplace_back("action_hessian",
                             v.hessian.nondegenerate ? "nondegenerate" : "degenerate");
  else
    rec.details.emplace_back("action_hessian", "not evaluated");
  rec.details.emplace_back("verdict", v.verdict);
  rec.residual = v.euler_residual;
  rec.tolerance = ctx.tol.get("euler");

  bool deg_minus_one = v.lambda1_degree.degree && *v.lambda1_degree.degree == -1;
  bool eigen_scale_broken = deg_minus_one && v.max_eigen_euler > ctx.tol.get("homogeneity_fd");
  if (v.forbidden_conjunction || eigen_scale_broken) {
    rec.status = "inconsistent";
    if (eigen_scale_broken)
      rec.details.emplace_back(
          "note", "a -1-homogeneous second structure forces radially constant eigenvalues");
  } else {
    rec.status = "pass";
  }
  return rec;
}

CheckRecord task_nogo(const Ctx& ctx, const Params& p) {
  const Scenario& sc = ctx.sc;
  if (p.has("contact")) {
    const StructureDecl& cd = sc.structure(p.str("contact"));
    ContactForm c{sc.one_form(cd.oneform)};
    auto link = symplectize(c);
    auto tilde = poissonize(link, resolve_jacobi(sc, sc.structure(p.str("jacobi"))));
    auto tilde1 = poissonize(link, resolve_jacobi(sc, sc.structure(p.str("jacobi1"))));
    ScalarField h{link.total, lift_function(link, sc.scalar(p.str("hamiltonian")))};
    auto total_samples =
        sample_points(*link.total, ctx.opt.samples, ctx.opt.seed, sc.sampling_box);
    auto v = nogo_diagnostic(tilde, tilde1, link.liouville, h, total_samples,
                             ctx.tol.get("homogeneity"), ctx.tol.get("homogeneity_fd"));
    auto rec = nogo_to_record(ctx, v);
    rec.samples_used = int(total_samples.size());
    return rec;
  }
  auto v = nogo_diagnostic(sc.bivector_field(sc.structure(p.str("poisson")).bivector),
                           sc.bivector_field(sc.structure(p.str("poisson1")).bivector),
                           sc.vector_field(p.str("liouville")),
                           ScalarField{sc.chart, sc.scalar(p.str("hamiltonian"))}, ctx.samples,
                           ctx.tol.get("homogeneity"), ctx.tol.get("homogeneity_fd"));
  auto rec = nogo_to_record(ctx, v);
  rec.samples_used = int(ctx.samples.size());
  return rec;
}

CheckRecord task_contact_field(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  const SystemDecl& sys = sc.system(p.str("system"));
  const StructureDecl& st = sc.structure(sys.structure);
  if (st.kind != "contact")
    throw Error(ErrKind::UnknownReference, "contact-field tasks need a contact system");
  ContactForm c{sc.one_form(st.oneform)};
  const Expr& h = sc.scalar(sys.hamiltonian);

  std::vector<Expr> expect_reeb, expect_field;
  if (p.has("expect_reeb"))
    for (const auto& s : p.str_list("expect_reeb")) expect_reeb.push_back(parse(s));
  if (p.has("expect_field"))
    for (const auto& s : p.str_list("expect_field")) expect_field.push_back(parse(s));

  double res = 0.0, defres = 0.0;
  for (const auto& x : ctx.samples) {
    try {
      if (!expect_reeb.empty()) {
        auto r = reeb(c, x);
        for (int i = 0; i < sc.chart->dim(); ++i)
          res = std::max(res,
                         std::abs(r[i] - eval<double>(expect_reeb[i], sc.chart->coords, x)));
      }
      auto v = contact_hamiltonian_vf(c, h, x);
      defres = std::max(defres, v.defining_residual);
      if (!expect_field.empty())
        for (int i = 0; i < sc.chart->dim(); ++i)
          res = std::max(
              res, std::abs(v.value[i] - eval<double>(expect_field[i], sc.chart->coords, x)));
      ++rec.samples_used;
    } catch (const Error& e) {
      if (e.kind() == ErrKind::Domain || e.kind() == ErrKind::SingularFlat) {
        ++rec.skipped;
        continue;
      }
      throw;
    }
  }
  rec.residual = std::max(res, defres);
  rec.tolerance = ctx.tol.get("contact_field");
  rec.details.emplace_back("golden_residual", fmt(res));
  rec.details.emplace_back("defining_residual", fmt(defres));
  rec.status =
      (rec.samples_used > 0 && rec.residual < rec.tolerance) ? "pass" : "fail";
  apply_skip_rule(ctx, rec);
  return rec;
}

CheckRecord task_symplectize(const Ctx& ctx, const Params& p) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  const StructureDecl& cd = sc.structure(p.str("contact"));
  ContactForm c{sc.one_form(cd.oneform)};
  auto link = symplectize(c);
  auto total_samples =
      sample_points(*link.total, ctx.opt.samples, ctx.opt.seed, sc.sampling_box);
  rec.samples_used = int(total_samples.size());
  if (link.renamed)
    rec.details.emplace_back("warning", "radial coordinate renamed to " + link.radial);

  double worst = 0.0;
  auto note = [&](const std::string& key, double v) {
    rec.details.emplace_back(key, fmt(v));
    worst = std::max(worst, v);
  };

  // Liouville field of the lifted potential is the radial Euler field
  ExactSymplectic sympl{link.theta};
  double liouville_res = 0.0;
  for (const auto& x : total_samples) {
    auto lv = liouville_field(sympl, x);
    auto want = vector_at(link.liouville, x);
    for (std::size_t i = 0; i < lv.size(); ++i)
      liouville_res = std::max(liouville_res, std::abs(lv[i] - want[i]));
  }
  note("liouville_residual", liouville_res);

  // lift golden and its 1-homogeneity
  double lift_res = 0.0;
  Expr lifted = lift_function(link, sc.scalar(p.str("hamiltonian")));
  if (p.has("expect_lift")) {
    Expr want = parse(p.str("expect_lift"));
    for (const auto& x : total_samples)
      lift_res = std::max(lift_res,
                          std::abs(eval<double>(lifted, link.total->coords, x) -
                                   eval<double>(want, link.total->coords, x)));
    note("lift_residual", lift_res);
  }
  auto lift_deg = homogeneity_degree(evaluable_scalar(ScalarField{link.total, lifted}),
                                     link.liouville, total_samples);
  bool lift_deg_ok = lift_deg.degree && *lift_deg.degree == 1;
  rec.details.emplace_back("lift_degree", lift_deg.degree ? std::to_string(*lift_deg.degree)
                                                          : "none");

  // projections: [expr on the total chart, degree, expected base expr]
  bool projections_ok = true;
  if (const TomlValue* v = p.find("projections")) {
    int idx = 0;
    for (const auto& triple : v->array) {
      auto parts = triple.as_string_array();
      if (parts.size() != 3)
        throw Error(ErrKind::Parse, "projections entries are [expr, degree, expected]");
      ++idx;
      std::string key = "projection_" + std::to_string(idx);
      try {
        auto pr = project_function(link, parse(parts[0]), int(std::stol(parts[1])),
                                   total_samples);
        Expr want = parse(parts[2]);
        double res = 0.0;
        for (const auto& bx : ctx.samples) {
          try {
            res = std::max(res, std::abs(eval<double>(pr.projected, sc.chart->coords, bx) -
                                         eval<double>(want, sc.chart->coords, bx)));
          } catch (const Error& e) {
            if (e.kind() != ErrKind::Domain) throw;
          }
        }
        note(key, res);
        projections_ok = projections_ok && res < ctx.tol.get("tensor_eq");
      } catch (const Error& e) {
        rec.details.emplace_back(key, std::string("error: ") + e.what());
        projections_ok = false;
      }
    }
  }

  // Poissonization contracts for the declared closed-form structure
  bool tilde_ok = true;
  if (p.has("jacobi")) {
    auto declared = resolve_jacobi(sc, sc.structure(p.str("jacobi")));
    auto tilde = poissonize(link, declared);
    auto fam = default_test_family(*link.total);
    auto axioms = is_jacobi(poisson_structure(tilde), total_samples, fam,
                            ctx.tol.get("tensor_eq"), ctx.tol.get("jacobiator"));
    note("poissonization_axioms", std::max(axioms.tensor_residual, axioms.jacobiator_residual));
    tilde_ok = axioms.pass() && axioms.consistent();
    auto hd = homogeneity_degree(evaluable(tilde), link.liouville, total_samples);
    rec.details.emplace_back("poissonization_degree",
                             hd.degree ? std::to_string(*hd.degree) : "none");
    tilde_ok = tilde_ok && hd.degree && *hd.degree == -1;
    // pointwise route from the induced structure agrees with the declared one
    auto pj = induced_jacobi(c);
    double agree = 0.0;
    for (const auto& x : total_samples) {
      auto a = poissonize_value(link, pj, x);
      auto b = tilde.at(x);
      for (const auto& t : increasing_tuples(link.total->dim(), 2))
        agree = std::max(agree, std::abs(a.full(t) - b.full(t)));
    }
    note("poissonization_pointwise_vs_declared", agree);
    tilde_ok = tilde_ok && agree < ctx.tol.get("tensor_eq");
  }

  // bracket correspondence and the dual-route consistency on random pairs
  int n_pairs = int(p.num("pairs", 10));
  Rng pair_rng(ctx.opt.seed ^ 0x636f727265ULL);  // fixed stream for pair draws
  std::vector<std::pair<Expr, Expr>> pairs;
  for (int i = 0; i < sc.chart->dim(); ++i)
    for (int j = i + 1; j < sc.chart->dim(); ++j)
      pairs.emplace_back(Expr::variable(sc.chart->coords[i]),
                         Expr::variable(sc.chart->coords[j]));
  auto random_poly = [&](Rng& rng) {
    Expr acc = Expr::constant(rng.uniform(-1.0, 1.0));
    for (int m = 0; m < 3; ++m) {
      Expr term = Expr::constant(rng.uniform(-1.5, 1.5));
      int deg = int(rng.next_below(3));
      for (int dd = 0; dd < deg; ++dd)
        term = Expr::mul(term,
                         Expr::variable(sc.chart->coords[rng.next_below(sc.chart->dim())]));
      acc = Expr::add(acc, term);
    }
    return acc;
  };
  for (int i = 0; i < n_pairs; ++i)
    pairs.emplace_back(random_poly(pair_rng), random_poly(pair_rng));
  auto corr = bracket_correspondence(link, pairs, total_samples);
  note("bracket_correspondence", corr.residual);
  auto cons = symplectization_consistency(link, pairs, total_samples);
  note("omega_vs_poissonization", cons.residual);

  rec.residual = worst;
  rec.tolerance = ctx.tol.get("correspondence");
  bool ok = liouville_res < ctx.tol.get("contact_field") &&
            lift_res < ctx.tol.get("tensor_eq") && lift_deg_ok && projections_ok && tilde_ok &&
            corr.residual < ctx.tol.get("correspondence") &&
            cons.residual < ctx.tol.get("correspondence");
  rec.status = ok ? "pass" : "fail";
  return rec;
}

CheckRecord task_flow(const Ctx& ctx, const Params& p, int flow_index) {
  CheckRecord rec;
  const Scenario& sc = ctx.sc;
  const SystemDecl& sys = sc.system(p.str("system"));
  const StructureDecl& st = sc.structure(sys.structure);
  const Expr& h = sc.scalar(sys.hamiltonian);

  VectorFieldFn vf;
  ContactForm cform{make_one_form(sc.chart)};
  if (st.kind == "contact") {
    cform = ContactForm{sc.one_form(st.oneform)};
    ContactForm cc = cform;
    Expr hc = h;
    vf = [cc, hc](std::span<const double> x) {
      return contact_hamiltonian_vf(cc, hc, x).value;
    };
  } else if (st.kind == "exact_symplectic") {
    ExactSymplectic s{sc.one_form(st.oneform)};
    Expr hc = h;
    vf = [s, hc](std::span<const double> x) { return hamiltonian_vf(s, hc, x); };
  } else {
    throw Error(ErrKind::UnknownReference, "flow tasks need a contact or symplectic system");
  }

  const TomlValue* start_v = p.find("start");
  if (!start_v) throw Error(ErrKind::Parse, "flow task needs a start point");
  std::vector<double> x0 = start_v->as_number_array();
  if (int(x0.size()) != sc.chart->dim())
    throw Error(ErrKind::Parse, "start point dimension does not match the chart");
  double t_end = p.num("t_end", 1.0);
  double dt = p.num("dt", 1e-3);

  auto traj = integrate(sc.chart, vf, x0, t_end, dt);
  rec.samples_used = int(traj.states.size());
  if (traj.truncated)
    rec.details.emplace_back("truncated_at", fmt(traj.exit_time));

  double worst = 0.0;
  bool ok = !traj.truncated;

  if (p.has("expect_endpoint")) {
    auto exprs = p.str_list("expect_endpoint");
    double res = 0.0;
    for (std::size_t i = 0; i < exprs.size(); ++i) {
      double want = eval<double>(parse(exprs[i]), std::vector<std::string>{},
                                 std::vector<double>{});
      res = std::max(res, std::abs(traj.states.back()[i] - want));
    }
    rec.details.emplace_back("endpoint_error", fmt(res));
    ok = ok && res < ctx.tol.get("endpoint");
    worst = std::max(worst, res);
  }

  if (p.has("conserve")) {
    double res = 0.0;
    for (const auto& n : p.str_list("conserve"))
      res = std::max(res, conservation_monitor(traj, sc.scalar(n)));
    rec.details.emplace_back("conservation_drift", fmt(res));
    ok = ok && res < ctx.tol.get("conservation");
    worst = std::max(worst, res);
  }

  if (p.has("dissipate")) {
    if (st.kind != "contact")
      throw Error(ErrKind::UnknownReference, "dissipation monitors need a contact system");
    double res = 0.0;
    bool all_dissipated = true;
    for (const auto& n : p.str_list("dissipate")) {
      auto r = dissipation_monitor(traj, cform, h, sc.scalar(n));
      all_dissipated = all_dissipated && r.dissipated;
      res = std::max(res, r.law_residual);
    }
    rec.details.emplace_back("dissipation_residual", fmt(res));
    ok = ok && all_dissipated && res < ctx.tol.get("dissipation");
    worst = std::max(worst, res);
  }

  if (p.has("drift")) {
    if (st.kind != "contact")
      throw Error(ErrKind::UnknownReference, "drift monitors need a contact system");
    for (const auto& n : p.str_list("drift")) {
      auto r = dissipation_monitor(traj, cform, h, sc.scalar(n));
      rec.details.emplace_back(
          "drift_" + n, (r.dissipated ? std::string("dissipated, ") : "not dissipated, ") +
                            "raw drift " + fmt(r.raw_drift));
    }
  }

  if (p.flag("order_check", false) && p.has("expect_endpoint")) {
    // fourth-order convergence, measured where truncation error dominates
    auto endpoint = [&](double step) {
      auto t = integrate(sc.chart, vf, x0, t_end, step);
      return t.states.back();
    };
    auto exprs = p.str_list("expect_endpoint");
    auto err_for = [&](double step) {
      auto end = endpoint(step);
      double e = 0.0;
      for (std::size_t i = 0; i < exprs.size(); ++i) {
        double want = eval<double>(parse(exprs[i]), std::vector<std::string>{},
                                   std::vector<double>{});
        e = std::max(e, std::abs(end[i] - want));
      }
      return e;
    };
    double ratio = err_for(t_end / 10.0) / err_for(t_end / 20.0);
    rec.details.emplace_back("rk4_halving_ratio", fmt(ratio));
    ok = ok && ratio > 12.0 && ratio < 20.0;
  }

  if (!ctx.opt.csv_path.empty()) {
    std::string path = ctx.opt.csv_path;
    if (flow_index > 0) path += "." + std::to_string(flow_index);
    std::ofstream out(path);
    out << trajectory_csv(traj);
    rec.details.emplace_back("csv", path);
  }

  rec.residual = worst;
  rec.tolerance = ctx.tol.get("endpoint");
  rec.status = ok ? "pass" : "fail";
  return rec;
}

CheckRecord run_task(const Ctx& ctx, const TaskDecl& t, int flow_index) {
  Params p{t};
  CheckRecord rec;
  try {
    if (t.check == "compatibility") rec = task_compatibility(ctx, p);
    else if (t.check == "recursion") rec = task_recursion(ctx, p);
    else if (t.check == "involution") rec = task_involution(ctx, p);
    else if (t.check == "bihamiltonian") rec = task_bihamiltonian(ctx, p);
    else if (t.check == "integrable") rec = task_integrable(ctx, p);
    else if (t.check == "homogeneity") rec = task_homogeneity(ctx, p);
    else if (t.check == "kolmogorov") rec = task_kolmogorov(ctx, p);
    else if (t.check == "separability") rec = task_separability(ctx, p);
    else if (t.check == "nogo") rec = task_nogo(ctx, p);
    else if (t.check == "contact-field") rec = task_contact_field(ctx, p);
    else if (t.check == "symplectize") rec = task_symplectize(ctx, p);
    else if (t.check == "flow") rec = task_flow(ctx, p, flow_index);
    else throw Error(ErrKind::Parse, "unknown task kind '" + t.check + "'");
  } catch (const Error& e) {
    rec.status = e.kind() == ErrKind::InternalInconsistency ? "inconsistent" : "fail";
    rec.details.emplace_back("error", e.what());
  }
  rec.name = t.label;
  return rec;
}

int thread_cap() {
  if (const char* env = std::getenv("CONTACTFORGE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return int(std::min(8u, hw ? hw : 1u));
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {
      "check-structure", "recursion", "involution", "integrable",
      "symplectize",     "nogo-report", "flow",     "all"};
  return cmds;
}

Report run_command(const Scenario& sc, const std::string& command, const RunOptions& opt) {
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw Error(ErrKind::Usage, "unknown command '" + command + "'");

  Ctx ctx{sc, opt, Tolerances{default_tolerances()}, {}};
  for (const auto& [k, v] : sc.tolerances) {
    if (!ctx.tol.values.count(k))
      throw Error(ErrKind::Usage, "unknown tolerance '" + k + "' in scenario");
    ctx.tol.values[k] = v;
  }
  for (const auto& [k, v] : opt.tol_overrides) {
    if (!ctx.tol.values.count(k)) throw Error(ErrKind::Usage, "unknown tolerance '" + k + "'");
    ctx.tol.values[k] = v;
  }
  ctx.samples = sample_points(*sc.chart, opt.samples, opt.seed, sc.sampling_box);

  std::map<std::string, std::vector<std::string>> command_tasks = {
      {"check-structure", {"contact-field"}},
      {"recursion", {"recursion", "compatibility", "bihamiltonian"}},
      {"involution", {"involution"}},
      {"integrable", {"integrable"}},
      {"symplectize", {"symplectize"}},
      {"nogo-report", {"nogo", "homogeneity", "kolmogorov", "separability"}},
      {"flow", {"flow"}},
  };

  std::vector<const TaskDecl*> selected;
  for (const auto& t : sc.tasks) {
    if (command == "all") {
      selected.push_back(&t);
    } else {
      const auto& kinds = command_tasks[command];
      if (std::find(kinds.begin(), kinds.end(), t.check) != kinds.end())
        selected.push_back(&t);
    }
  }

  Report rep;
  rep.scenario = sc.name;
  rep.seed = opt.seed;
  rep.samples = opt.samples;
  for (const auto& [k, v] : ctx.tol.values) rep.tolerances.emplace_back(k, v);

  // structure verification first, in declaration order
  std::vector<CheckRecord> structure_recs(sc.structures.size());
  std::vector<CheckRecord> task_recs(selected.size());
  {
    std::counting_semaphore<64> slots(thread_cap());
    std::vector<std::future<void>> futures;
    for (std::size_t i = 0; i < sc.structures.size(); ++i) {
      if (!sc.structures[i].verify) {
        structure_recs[i].name = "structure/" + sc.structures[i].name;
        structure_recs[i].status = "skipped";
        structure_recs[i].details.emplace_back("note", "verification deferred by the scenario");
        continue;
      }
      futures.push_back(std::async(std::launch::async, [&, i] {
        slots.acquire();
        try {
          structure_recs[i] = check_structure(ctx, sc.structures[i]);
        } catch (const Error& e) {
          structure_recs[i].name = "structure/" + sc.structures[i].name;
          structure_recs[i].status =
              e.kind() == ErrKind::InternalInconsistency ? "inconsistent" : "fail";
          structure_recs[i].details.emplace_back("error", e.what());
        }
        slots.release();
      }));
    }
    int flow_seen = 0;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      int flow_index = selected[i]->check == "flow" ? flow_seen++ : 0;
      futures.push_back(std::async(std::launch::async, [&, i, flow_index] {
        slots.acquire();
        task_recs[i] = run_task(ctx, *selected[i], flow_index);
        slots.release();
      }));
    }
    for (auto& f : futures) f.get();
  }
  for (auto& r : structure_recs) rep.checks.push_back(std::move(r));
  for (auto& r : task_recs) rep.checks.push_back(std::move(r));
  return rep;
}

}  // namespace cforge
