#include <cmath>

#include "doctest.h"
#include "test_support.hpp"

using namespace cforge;
using tf::E;

namespace {

// Independent oracle: the Darboux-coordinate contact Hamiltonian field of
// dz - p dq, straight from the textbook formula
// X_f = f_p d_q - (f_q + p f_z) d_p + (p f_p - f) d_z.
std::vector<double> darboux_vf(const Expr& f, const Chart& chart, std::span<const double> x) {
  auto df = gradient(f, chart, x);
  double fv = eval<double>(f, chart.coords, x);
  double p = x[1];
  return {df[1], -(df[0] + p * df[2]), p * df[1] - fv};
}

double darboux_bracket(const Expr& f, const Expr& g, const Chart& chart,
                       std::span<const double> x) {
  auto xf = darboux_vf(f, chart, x);
  auto dg = gradient(g, chart, x);
  double gv = eval<double>(g, chart.coords, x);
  // {f, g} = X_f(g) + g R(f) with R = d_z
  double acc = 0;
  for (int i = 0; i < 3; ++i) acc += xf[i] * dg[i];
  auto df = gradient(f, chart, x);
  return acc + gv * df[2];
}

JacobiStructure induced_structure(const ChartPtr& c) {
  return JacobiStructure{tf::lambda_eta(c), tf::e_eta(c)};
}

}  // namespace

TEST_CASE("contact bracket on coordinates") {
  auto chart = tf::chart_qpz();
  auto j = induced_structure(chart);
  Rng rng(111);
  for (int t = 0; t < 10; ++t) {
    auto x = tf::rand_point(rng, 3);
    CHECK(jacobi_bracket(j, E("q"), E("p"), x) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(jacobi_bracket(j, E("p"), E("p - z"), x) == doctest::Approx(0.0).epsilon(1e-14));
    Expr f = tf::rand_poly(rng, *chart, 3);
    CHECK(std::abs(jacobi_bracket(j, f, f, x)) < 1e-13);
  }
}

TEST_CASE("engine bracket equals the Darboux oracle") {
  auto chart = tf::chart_qpz();
  auto j = induced_structure(chart);
  Rng rng(222);
  for (int t = 0; t < 40; ++t) {
    Expr f = tf::rand_poly(rng, *chart, 3);
    Expr g = tf::rand_poly(rng, *chart, 3);
    auto x = tf::rand_point(rng, 3);
    double engine = jacobi_bracket(j, f, g, x);
    double oracle = darboux_bracket(f, g, *chart, x);
    CHECK(engine == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("bracket antisymmetry and the weak Leibniz rule") {
  auto chart = tf::chart_qpz();
  auto j = induced_structure(chart);
  Rng rng(333);
  for (int t = 0; t < 30; ++t) {
    Expr f = tf::rand_poly(rng, *chart, 3);
    Expr g = tf::rand_poly(rng, *chart, 3);
    Expr h = tf::rand_poly(rng, *chart, 3);
    auto x = tf::rand_point(rng, 3);
    CHECK(jacobi_bracket(j, f, g, x) ==
          doctest::Approx(-jacobi_bracket(j, g, f, x)).epsilon(1e-12));
    // {f, gh} = {f, g} h + {f, h} g + g h E(f)
    double lhs = jacobi_bracket(j, f, Expr::mul(g, h), x);
    double gv = eval<double>(g, chart->coords, x);
    double hv = eval<double>(h, chart->coords, x);
    auto df = gradient(f, *chart, x);
    double ef = -df[2];  // E = -d_z
    double rhs = jacobi_bracket(j, f, g, x) * hv + jacobi_bracket(j, f, h, x) * gv +
                 gv * hv * ef;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("jacobiator residuals") {
  auto bundle = tf::chart_bundle();
  auto can = poisson_structure(tf::lambda_canonical(bundle));
  Rng rng(444);
  for (int t = 0; t < 15; ++t) {
    auto x = tf::rand_point(rng, 4, 0.2, 2.0);
    Expr f = tf::rand_poly(rng, *bundle, 3);
    Expr g = tf::rand_poly(rng, *bundle, 3);
    Expr h = tf::rand_poly(rng, *bundle, 3);
    CHECK(jacobiator_residual(can, f, g, h, x) < 1e-10);
  }

  auto qpz = tf::chart_qpz();
  auto jc = induced_structure(qpz);
  std::vector<double> x0 = {0.7, -0.2, 1.1};
  CHECK(jacobiator_residual(jc, E("q"), E("p"), E("z"), x0) < 1e-12);

  // a bivector that fails the Jacobi identity, with a frozen nonzero witness
  auto xyz = make_chart("xyz", {"x", "y", "z"});
  auto bad = make_field(xyz, FieldKind::Multivector, 2);
  bad.set({0, 1}, E("y^2"));
  bad.set({1, 2}, E("x"));
  auto jbad = poisson_structure(bad);
  std::vector<double> w = {1.0, 1.0, 1.0};
  double res = jacobiator_residual(jbad, E("x"), E("y"), E("z"), w);
  CHECK(res > 0.5);  // oracle evaluates to 2xy at this point

  // a two-dimensional bivector is always Poisson
  auto xy = make_chart("xy", {"x", "y"});
  auto flat = make_field(xy, FieldKind::Multivector, 2);
  flat.set({0, 1}, E("x"));
  auto jflat = poisson_structure(flat);
  std::vector<double> p2 = {0.8, -0.6};
  CHECK(jacobiator_residual(jflat, E("x"), E("y"), E("x*y"), p2) < 1e-12);
}

TEST_CASE("is_jacobi dual-route verdicts") {
  Rng rng(555);
  auto bundle = tf::chart_bundle();
  auto samples = tf::rand_points(rng, 12, 4, 0.2, 2.0);
  auto fam = default_test_family(*bundle);

  auto can = poisson_structure(tf::lambda_canonical(bundle));
  auto r1 = is_jacobi(can, samples, fam);
  CHECK(r1.pass());
  CHECK(r1.consistent());

  auto qpz = tf::chart_qpz();
  auto qsamples = tf::rand_points(rng, 12, 3);
  auto jc = induced_structure(qpz);
  auto r2 = is_jacobi(jc, qsamples, default_test_family(*qpz));
  CHECK(r2.pass());
  CHECK(r2.consistent());

  // deliberately broken: perturb the canonical bivector
  auto broken = tf::lambda_canonical(bundle);
  broken.comp[{0, 1}] = E("x1");
  auto r3 = is_jacobi(poisson_structure(broken), samples, fam);
  CHECK_FALSE(r3.pass());
  CHECK(r3.consistent());
  CHECK(r3.tensor_residual > 1e-3);
  CHECK(r3.jacobiator_residual > 1e-3);
}

TEST_CASE("Reeb field by the flat-map solve") {
  auto chart = tf::chart_qpz();
  ContactForm c{tf::eta_canonical(chart)};
  Rng rng(666);
  for (int t = 0; t < 10; ++t) {
    auto x = tf::rand_point(rng, 3);
    auto r = reeb(c, x);
    CHECK(r[0] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(r[1] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(r[2] == doctest::Approx(1.0).epsilon(1e-13));
  }

  // doubled form halves the Reeb field
  auto eta2 = make_one_form(chart);
  eta2.set({0}, E("-2*p"));
  eta2.set({2}, E("2"));
  auto r2 = reeb(ContactForm{eta2}, std::vector<double>{0.3, 0.4, 0.5});
  CHECK(r2[2] == doctest::Approx(0.5).epsilon(1e-13));

  // angle-side chart: eta = d phi2 - lam d phi1 has Reeb d_{phi2}
  auto ac = tf::chart_angles();
  auto ra = reeb(ContactForm{tf::eta_angles(ac)}, std::vector<double>{0.2, 0.4, 1.3});
  CHECK(ra[0] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(ra[1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ra[2] == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("Reeb defining equations survive conformal rescaling") {
  auto chart = tf::chart_qpz();
  Rng rng(777);
  for (int t = 0; t < 10; ++t) {
    // eta' = e^u eta with a random polynomial u
    Expr u = tf::rand_poly(rng, *chart, 2);
    auto eta = make_one_form(chart);
    eta.set({0}, Expr::mul(Expr::call(Func::Exp, u), E("-p")));
    eta.set({2}, Expr::call(Func::Exp, u));
    ContactForm c{eta};
    auto x = tf::rand_point(rng, 3, -1.0, 1.0);
    auto r = reeb(c, x);
    auto etav = covector_at(eta, x);
    double pairing_val = 0;
    for (int i = 0; i < 3; ++i) pairing_val += etav[i] * r[i];
    CHECK(pairing_val == doctest::Approx(1.0).epsilon(1e-9));
    auto d = full_matrix(exterior_derivative(eta, x));
    for (int j = 0; j < 3; ++j) {
      double contr = 0;
      for (int i = 0; i < 3; ++i) contr += r[i] * d(i, j);
      CHECK(std::abs(contr) < 1e-9);
    }
  }
}

TEST_CASE("contact Hamiltonian fields") {
  auto chart = tf::chart_qpz();
  ContactForm c{tf::eta_canonical(chart)};

  auto v = contact_hamiltonian_vf(c, E("p - z"), std::vector<double>{0.0, 2.0, 5.0});
  CHECK(v.value[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(v.value[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(v.value[2] == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(v.defining_residual < 1e-10);

  // f = z gives -p d_p - z d_z
  std::vector<double> x = {0.4, 1.2, -0.7};
  auto vz = contact_hamiltonian_vf(c, E("z"), x);
  CHECK(vz.value[0] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(vz.value[1] == doctest::Approx(-x[1]).epsilon(1e-13));
  CHECK(vz.value[2] == doctest::Approx(-x[2]).epsilon(1e-13));

  // engine field equals the Darboux oracle on random data
  Rng rng(888);
  for (int t = 0; t < 25; ++t) {
    Expr f = tf::rand_poly(rng, *chart, 3);
    auto pt = tf::rand_point(rng, 3);
    auto got = contact_hamiltonian_vf(c, f, pt);
    auto want = darboux_vf(f, *chart, pt);
    for (int i = 0; i < 3; ++i)
      CHECK(got.value[i] == doctest::Approx(want[i]).epsilon(1e-10));
    CHECK(got.defining_residual < 1e-10);
  }

  // angle-side chart: h = lam - 1 flows along d_{phi1} + d_{phi2}
  auto ac = tf::chart_angles();
  ContactForm cb{tf::eta_angles(ac)};
  auto vb = contact_hamiltonian_vf(cb, E("lam - 1"), std::vector<double>{0.3, 0.9, 1.7});
  CHECK(vb.value[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vb.value[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vb.value[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("induced Jacobi structure of the canonical contact form") {
  auto chart = tf::chart_qpz();
  ContactForm c{tf::eta_canonical(chart)};
  auto pj = induced_jacobi(c);
  Rng rng(999);
  for (int t = 0; t < 10; ++t) {
    auto x = tf::rand_point(rng, 3);
    auto lam = pj.lambda_at(x);
    CHECK(lam.full({0, 1}) == doctest::Approx(1.0).epsilon(1e-12));   // d_q ^ d_p
    CHECK(lam.full({1, 2}) == doctest::Approx(-x[1]).epsilon(1e-12));  // p d_z ^ d_p
    CHECK(std::abs(lam.full({0, 2})) < 1e-12);
    auto e = pj.e_at(x);
    CHECK(e[2] == doctest::Approx(-1.0).epsilon(1e-12));

    // the kernel direction is annihilated: Lambda(eta, .) = 0
    auto etav = covector_at(c.eta, x);
    auto sharp_eta = sharp_value<double>(lam, etav);
    for (double v : sharp_eta) CHECK(std::abs(v) < 1e-11);

    // {1, g} = E(g)
    Expr g = tf::rand_poly(rng, *chart, 3);
    auto dg = gradient(g, *chart, x);
    CHECK(jacobi_bracket(pj, E("1"), g, x) == doctest::Approx(-dg[2]).epsilon(1e-10));

    // full contract: pointwise bracket equals the Darboux bracket
    Expr f = tf::rand_poly(rng, *chart, 3);
    CHECK(jacobi_bracket(pj, f, g, x) ==
          doctest::Approx(darboux_bracket(f, g, *chart, x)).epsilon(1e-9));
  }
}

TEST_CASE("Liouville fields") {
  auto bundle = tf::chart_bundle();
  ExactSymplectic s{tf::theta_bundle(bundle)};
  std::vector<double> x = {0.5, 2.0, 0.7, 1.5};
  auto lv = liouville_field(s, x);
  CHECK(lv[0] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(lv[1] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(lv[2] == doctest::Approx(x[2]).epsilon(1e-13));
  CHECK(lv[3] == doctest::Approx(x[3]).epsilon(1e-13));

  // theta = r dz - r p dq has Liouville field r d_r
  auto total = make_chart("t", {"q", "p", "z", "r"}, {E("r")});
  auto theta = make_one_form(total);
  theta.set({0}, E("-r*p"));
  theta.set({2}, E("r"));
  std::vector<double> y = {0.3, -0.8, 1.1, 1.7};
  auto lv2 = liouville_field(ExactSymplectic{theta}, y);
  CHECK(lv2[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lv2[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lv2[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lv2[3] == doctest::Approx(y[3]).epsilon(1e-12));

  // action-angle potential lam_i d phi^i
  auto aa = make_chart("aa", {"phi1", "phi2", "l1", "l2"});
  auto th = make_one_form(aa);
  th.set({0}, E("l1"));
  th.set({1}, E("l2"));
  std::vector<double> z = {0.1, 0.2, 0.7, 3.0};
  auto lv3 = liouville_field(ExactSymplectic{th}, z);
  CHECK(lv3[2] == doctest::Approx(z[2]).epsilon(1e-13));
  CHECK(lv3[3] == doctest::Approx(z[3]).epsilon(1e-13));
  CHECK(std::abs(lv3[0]) < 1e-13);
  CHECK(std::abs(lv3[1]) < 1e-13);
}

TEST_CASE("symplectic Hamiltonian fields") {
  auto bundle = tf::chart_bundle();
  ExactSymplectic s{tf::theta_bundle(bundle)};
  std::vector<double> x = {0.5, 2.0, 0.7, 1.5};
  auto xh = hamiltonian_vf(s, E("p1 + p2*x2"), x);
  CHECK(xh[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(xh[1] == doctest::Approx(x[1]).epsilon(1e-13));
  CHECK(xh[2] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(xh[3] == doctest::Approx(-x[3]).epsilon(1e-13));

  auto zero = hamiltonian_vf(s, E("4.2"), x);
  for (double v : zero) CHECK(v == doctest::Approx(0.0));

  // the lifted Hamiltonian of the contact example: solve forces the radial
  // component -r, and the base projection is the contact field (1, p, z)
  auto total = make_chart("t", {"q", "p", "z", "r"}, {E("r")});
  auto theta = make_one_form(total);
  theta.set({0}, E("-r*p"));
  theta.set({2}, E("r"));
  std::vector<double> y = {0.6, -0.4, 1.2, 1.9};
  auto xl = hamiltonian_vf(ExactSymplectic{theta}, E("r*z - r*p"), y);
  CHECK(xl[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(xl[1] == doctest::Approx(y[1]).epsilon(1e-12));
  CHECK(xl[2] == doctest::Approx(y[2]).epsilon(1e-12));
  CHECK(xl[3] == doctest::Approx(-y[3]).epsilon(1e-12));
}

TEST_CASE("restriction of the lifted field reproduces the Darboux formula") {
  auto total = make_chart("t", {"q", "p", "z", "r"}, {E("r")});
  auto theta = make_one_form(total);
  theta.set({0}, E("-r*p"));
  theta.set({2}, E("r"));
  ExactSymplectic s{theta};
  auto base = tf::chart_qpz();
  Rng rng(1212);
  for (int t = 0; t < 20; ++t) {
    Expr f = tf::rand_poly(rng, *base, 3);
    auto bx = tf::rand_point(rng, 3);
    std::vector<double> y = {bx[0], bx[1], bx[2], 1.0};  // restrict to r = 1
    Expr lifted = Expr::neg(Expr::mul(E("r"), f));
    auto xl = hamiltonian_vf(s, lifted, y);
    auto want = darboux_vf(f, *base, bx);
    for (int i = 0; i < 3; ++i) CHECK(xl[i] == doctest::Approx(want[i]).epsilon(1e-10));
  }
}

TEST_CASE("homogeneity detection") {
  auto bundle = tf::chart_bundle();
  auto delta = tf::euler_field_bundle(bundle);
  Rng rng(1313);
  auto samples = tf::rand_points(rng, 10, 4, 0.2, 2.0);

  auto theta = tf::theta_bundle(bundle);
  auto h1 = homogeneity_degree(evaluable(theta), delta, samples);
  REQUIRE(h1.degree.has_value());
  CHECK(*h1.degree == 1);

  auto lam1 = tf::lambda_second(bundle);
  auto h0 = homogeneity_degree(evaluable(lam1), delta, samples);
  REQUIRE(h0.degree.has_value());
  CHECK(*h0.degree == 0);

  auto omega = evaluable_d_of(theta, -1.0);
  auto hw = homogeneity_degree(omega, delta, samples);
  REQUIRE(hw.degree.has_value());
  CHECK(*hw.degree == 1);

  // the canonical bivector is -1-homogeneous along the fibre Euler field
  auto lam = tf::lambda_canonical(bundle);
  auto hm = homogeneity_degree(evaluable(lam), delta, samples);
  REQUIRE(hm.degree.has_value());
  CHECK(*hm.degree == -1);

  // r^2 is 2-homogeneous, hence rejected for degrees outside the range check
  auto total = make_chart("t", {"q", "p", "z", "r"}, {E("r")});
  auto dr = make_vector_field(total);
  dr.set({3}, E("r"));
  auto tsamples = tf::rand_points(rng, 8, 4, 0.3, 2.0);
  auto h2 = homogeneity_degree(evaluable_scalar(ScalarField{total, E("r^2")}), dr, tsamples);
  REQUIRE(h2.degree.has_value());
  CHECK(*h2.degree == 2);
}

TEST_CASE("contact integrability verdicts") {
  auto chart = tf::chart_qpz();
  ContactForm c{tf::eta_canonical(chart)};
  Rng rng(1414);
  auto samples = tf::rand_points(rng, 16, 3);

  auto good = verify_contact_integrable(c, E("p - z"), {E("p"), E("-z")}, samples);
  CHECK(good.pass);
  CHECK(good.min_rank == 2);

  auto bad = verify_contact_integrable(c, E("p - z"), {E("p"), E("q")}, samples);
  CHECK_FALSE(bad.pass);
  CHECK(bad.dissipation_residual > 0.1);

  // duplicates: involution and dissipation fine, rank collapses to 1
  auto dup = verify_contact_integrable(c, E("p - z"), {E("p"), E("p")}, samples);
  CHECK(dup.min_rank == 1);
  CHECK(dup.duplicate_warning);
  CHECK(dup.pass);  // rank >= n = 1 still holds

  CHECK_THROWS_AS(verify_contact_integrable(c, E("p - z"), {E("p")}, samples), Error);
}

TEST_CASE("homogeneous integrability verdicts") {
  auto bundle = tf::chart_bundle();
  ExactSymplectic s{tf::theta_bundle(bundle)};
  auto delta = tf::euler_field_bundle(bundle);
  Rng rng(1515);
  auto samples = tf::rand_points(rng, 16, 4, 0.2, 2.0);

  auto good = verify_homogeneous_integrable(s, E("p1 + p2*x2"), delta,
                                            {E("p1"), E("p2*x2")}, samples);
  CHECK(good.pass);
  CHECK(good.min_rank == 2);

  // x1 is 0-homogeneous: the homogeneity clause must fail
  auto bad = verify_homogeneous_integrable(s, E("p1 + p2*x2"), delta, {E("p1"), E("x1")},
                                           samples);
  CHECK_FALSE(bad.pass);
  CHECK(bad.homogeneity_residual > 0.1);
}
