#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gricci/io.hpp>
#include <gricci/verify.hpp>

using namespace gricci;

TEST_CASE("expression parsing") {
  Expr e = Expr::parse("1 + 2*x - y^2 + exp(-x*y)/2");
  CHECK(e.eval(0, 0) == doctest::Approx(1.5));
  CHECK(e.eval(1, 2) == doctest::Approx(1 + 2 - 4 + std::exp(-2.0) / 2));
  CHECK_FALSE(e.is_constant());
  CHECK(Expr::parse("3.5").is_constant());
  CHECK(Expr().eval(7, 9) == 1.0);
  CHECK_THROWS_AS(Expr::parse("1 + "), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("z"), std::invalid_argument);
}

TEST_CASE("test form factories and validation") {
  auto a = TestForm::bump_one_form({0.5, 0, 0}, 2.0, 3.0);
  CHECK(a.degree == 1);
  // dx pairing: eval1 on e_x at the center is the amplitude
  CHECK(a.eval1({0.5, 0, 0}, {1, 0, 0}).real() == doctest::Approx(3.0));
  CHECK(std::abs(a.eval1({0.5, 0, 0}, {0, 0, 1})) < 1e-15);
  CHECK(std::abs(a.eval1({2.6, 0, 0}, {1, 0, 0})) == 0.0);  // outside support
  auto box = a.support();
  CHECK(box.min().x() == doctest::Approx(-1.5));
  CHECK(box.max().x() == doctest::Approx(2.5));
  CHECK_THROWS_AS(validate_form(TestForm::bump_one_form({0, 0, 0}, -1.0)),
                  std::invalid_argument);
}

TEST_CASE("lemma_rhs is symmetric and factorizes through the boundary pairing") {
  auto a = TestForm::bump_one_form({0, 0, 0}, 1.0);
  auto b = TestForm::bump_one_form({0.3, 0.1, 0}, 0.8, 2.0);
  Expr l1 = Expr::constant(1.0), l2 = Expr::constant(2.0);
  double ab = lemma_rhs(a, b, l1, l2);
  double ba = lemma_rhs(b, a, l1, l2);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
  // constant ratio: rhs = -(log(l1/l2)/2pi) * pairing
  double pairing = boundary_pairing(a, b);
  CHECK(ab == doctest::Approx(std::log(2.0) / (2 * M_PI) * pairing).epsilon(1e-8));
  // identical profiles: zero
  CHECK(lemma_rhs(a, b, l2, l2) == 0.0);
}

TEST_CASE("lemma_lhs is deterministic and thread-count independent") {
  auto a = TestForm::bump_one_form({0, 0, 0}, 1.0);
  MCOptions o1;
  o1.n = 50000;
  o1.seed = 5;
  o1.threads = 1;
  MCOptions o4 = o1;
  o4.threads = 4;
  Expr l1 = Expr::constant(1.0), l2 = Expr::constant(2.0);
  auto r1 = lemma_lhs(a, a, l1, l2, 1e-3, o1);
  auto r4 = lemma_lhs(a, a, l1, l2, 1e-3, o4);
  CHECK(r1.value == r4.value);
  CHECK(r1.std_error == r4.std_error);
  MCOptions o2 = o1;
  o2.seed = 6;
  auto r2 = lemma_lhs(a, a, l1, l2, 1e-3, o2);
  CHECK(r1.value != r2.value);
}

TEST_CASE("lemma_lhs matches lemma_rhs at moderate sample count") {
  auto a = TestForm::bump_one_form({0, 0, 0}, 1.0);
  Expr l1 = Expr::constant(1.0), l2 = Expr::constant(2.0);
  MCOptions o;
  o.n = 400000;
  o.seed = 1;
  auto est = lemma_lhs(a, a, l1, l2, 1e-3, o);
  double ref = lemma_rhs(a, a, l1, l2);
  CHECK(std::abs(est.value.real() - ref) < 4 * est.std_error + 0.02 * std::abs(ref));
  CHECK(std::abs(est.value.imag()) < 4 * est.std_error);
}

TEST_CASE("lemma_lhs is linear in the forms") {
  auto a = TestForm::bump_one_form({0, 0, 0}, 1.0);
  auto a3 = TestForm::bump_one_form({0, 0, 0}, 1.0, 3.0);
  Expr l1 = Expr::constant(1.0), l2 = Expr::constant(2.0);
  MCOptions o;
  o.n = 50000;
  o.seed = 2;
  auto r1 = lemma_lhs(a, a, l1, l2, 1e-3, o);
  auto r3 = lemma_lhs(a3, a, l1, l2, 1e-3, o);
  // same stream, scaled integrand: exact factor 3
  CHECK(std::abs(r3.value - 3.0 * r1.value) < 1e-12);
}

TEST_CASE("identical cutoff profiles give an exact zero estimate") {
  auto a = TestForm::bump_one_form({0, 0, 0}, 1.0);
  Expr l = Expr::parse("1 + x^2");
  MCOptions o;
  o.n = 1000;
  auto est = lemma_lhs(a, a, l, Expr::parse("1 + x*x"), 1e-3, o);
  CHECK(est.value == std::complex<double>(0, 0));
  CHECK(est.std_error == 0.0);
}

TEST_CASE("degenerate degree pair is consistent with zero") {
  auto f = TestForm::bump_zero_form({0, 0, 0}, 1.0);
  auto w = TestForm::bump_two_form({0.1, 0, 0}, 1.0);
  Expr l1 = Expr::constant(1.0), l2 = Expr::constant(2.0);
  MCOptions o;
  o.n = 200000;
  o.seed = 3;
  auto est = lemma_lhs(f, w, l1, l2, 1e-3, o);
  CHECK(std::abs(est.value) < 3 * est.std_error + 1e-12);
  CHECK(lemma_rhs(f, w, l1, l2) == 0.0);
  CHECK_THROWS_AS(lemma_lhs(f, f, l1, l2, 1e-3, o), std::invalid_argument);
}

TEST_CASE("courant estimate matches the quadrature reference") {
  auto a = TestForm::bump_two_form({0, 0, 0}, 1.0);
  Expr l1 = Expr::constant(1.0), l2 = Expr::constant(2.0);
  MCOptions o;
  o.n = 300000;
  o.seed = 4;
  auto est = courant_lhs(a, l1, l2, 1e-3, o);
  auto ref = courant_rhs(a, l1, l2);
  CHECK(std::abs(ref.real()) < 1e-10);  // purely imaginary for a real 2-form
  CHECK(std::abs(est.value.imag() - ref.imag()) <
        4 * est.std_error + 0.02 * std::abs(ref.imag()));
}

TEST_CASE("budget truncation reports the achieved sample count") {
  auto a = TestForm::bump_one_form({0, 0, 0}, 1.0);
  Expr l1 = Expr::constant(1.0), l2 = Expr::constant(2.0);
  MCOptions o;
  o.n = 400000000;
  o.seed = 1;
  o.budget_seconds = 0.2;
  auto est = lemma_lhs(a, a, l1, l2, 1e-3, o);
  CHECK(est.n_samples > 0);
  CHECK(est.n_samples < o.n);
  CHECK(est.std_error > 0);
}

TEST_CASE("convergence_scan input validation") {
  auto a = TestForm::bump_one_form({0, 0, 0}, 1.0);
  MCOptions o;
  o.n = 1000;
  std::vector<double> eps{0.01, 0.02, 0.04, 0.08};
  CHECK_THROWS_AS(convergence_scan(6, {a}, eps, o), std::invalid_argument);
  CHECK_THROWS_AS(convergence_scan(2, {a}, eps, o), std::invalid_argument);
  CHECK_THROWS_AS(convergence_scan(2, {a, a}, {0.01, 0.02}, o), std::invalid_argument);
  CHECK_THROWS_AS(convergence_scan(3, {a, a, TestForm::bump_two_form({0, 0, 0}, 1.0)},
                                   eps, o),
                  std::invalid_argument);
}

TEST_CASE("json records and round trips") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0.25, -3.5, 1e-17;
  CHECK((matrix_from_json(matrix_to_json(m)) - m).cwiseAbs().maxCoeff() == 0.0);

  MCEstimate est;
  est.value = {0.5, -0.25};
  est.std_error = 1e-3;
  est.n_samples = 100;
  est.seed = 7;
  std::string j = estimate_to_json(est);
  CHECK(j.find("0.5") != std::string::npos);
  CHECK(j.find("\"seed\":7") != std::string::npos);

  CHECK(params_hash("abc") == params_hash("abc"));
  CHECK(params_hash("abc") != params_hash("abd"));

  std::string man = make_manifest("verify-lemma", "{\"n\":1}", 7, 0.5);
  CHECK(man.find("verify-lemma") != std::string::npos);
  CHECK(man.find("params_hash") != std::string::npos);
}
