#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gricci/algebra.hpp>
#include <gricci/rng.hpp>

using namespace gricci;

namespace {

// independent Jacobi oracle on raised first index:
// sum_e ( c^e_ab c_ecd-type cyclic combination ) via direct loops
double jacobi_residual_oracle(const QuadraticLieAlgebra& alg) {
  int n = alg.dim();
  const Eigen::MatrixXd& ti = alg.pairing_inverse();
  auto bracket = [&](int a, int b, int c) {  // c_ab^c = c_abe t^ec
    double s = 0;
    for (int e = 0; e < n; ++e) s += alg.c(a, b, e) * ti(e, c);
    return s;
  };
  double worst = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0;
          for (int e = 0; e < n; ++e)
            s += bracket(a, b, e) * bracket(e, c, d) + bracket(b, c, e) * bracket(e, a, d) +
                 bracket(c, a, e) * bracket(e, b, d);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

}  // namespace

TEST_CASE("preset algebras validate") {
  for (const char* name : {"su2", "su2_double", "abelian:2,2", "abelian:3,0"}) {
    auto alg = preset_algebra(name);
    auto rep = validate_algebra(alg);
    CAPTURE(name);
    CHECK(rep.pass);
    CHECK(jacobi_residual_oracle(alg) < 1e-12);
  }
}

TEST_CASE("su2 structure") {
  auto alg = su2_algebra();
  CHECK(alg.dim() == 3);
  CHECK(alg.signature() == std::pair<int, int>{0, 3});
  // lowered structure constants are the epsilon tensor; the raised
  // bracket picks up the sign of eta = -I
  CHECK(alg.c(0, 1, 2) == doctest::Approx(1.0));
  CHECK(alg.c(1, 0, 2) == doctest::Approx(-1.0));
  CHECK(alg.c(0, 0, 0) == 0.0);
}

TEST_CASE("su2_double block structure") {
  auto alg = su2_double_algebra();
  CHECK(alg.dim() == 6);
  CHECK(alg.signature() == std::pair<int, int>{3, 3});
  // no cross-block structure constants
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 3; c < 6; ++c) {
        CHECK(alg.c(a, b, c) == 0.0);
        CHECK(alg.c(a, c, b) == 0.0);
      }
}

TEST_CASE("level scales pairing but not the bracket") {
  auto a1 = su2_double_algebra(1.0);
  auto a2 = su2_double_algebra(2.5);
  CHECK((a2.pairing() - 2.5 * a1.pairing()).cwiseAbs().maxCoeff() < 1e-14);
  // raised bracket unchanged: c'_abc = 2.5 c_abc, t'^ce = t^ce/2.5
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      CHECK(a2.c(a, b, (b + 1) % 6) == doctest::Approx(2.5 * a1.c(a, b, (b + 1) % 6)));
}

TEST_CASE("invalid algebras are rejected") {
  Eigen::MatrixXd sing = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(QuadraticLieAlgebra(sing, std::vector<double>(8, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(QuadraticLieAlgebra(Eigen::MatrixXd::Identity(2, 2),
                                      std::vector<double>(7, 0.0)),
                  std::invalid_argument);
  // non-antisymmetric structure constants fail validation
  std::vector<double> c(27, 0.0);
  c[(0 * 3 + 1) * 3 + 2] = 1.0;  // c_012 without the antisymmetric partners
  auto alg = QuadraticLieAlgebra(-Eigen::MatrixXd::Identity(3, 3), c);
  CHECK_FALSE(validate_algebra(alg).pass);
}

TEST_CASE("canonical metric is an involution with positive eta tau") {
  for (const char* name : {"su2", "su2_double", "abelian:2,3"}) {
    auto alg = preset_algebra(name);
    auto m = canonical_metric(alg);
    CAPTURE(name);
    CHECK((m.tau() * m.tau() - Eigen::MatrixXd::Identity(alg.dim(), alg.dim()))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    Eigen::MatrixXd et = alg.pairing() * m.tau();
    CHECK((et - et.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(et);
    CHECK(es.eigenvalues().minCoeff() > 0);
  }
}

TEST_CASE("random metric properties and determinism") {
  auto alg = su2_double_algebra();
  auto m1 = random_metric(alg, 42);
  auto m2 = random_metric(alg, 42);
  CHECK((m1.tau() - m2.tau()).cwiseAbs().maxCoeff() == 0.0);
  auto m3 = random_metric(alg, 43);
  CHECK((m1.tau() - m3.tau()).cwiseAbs().maxCoeff() > 1e-3);
  auto res = metric_from_involution(alg, m1.tau());
  CHECK(res.report.pass);
  CHECK(res.report.rank_plus == 3);
}

TEST_CASE("projectors split the identity") {
  auto alg = su2_double_algebra();
  auto m = random_metric(alg, 5);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(6, 6);
  CHECK((m.pplus() + m.pminus() - I).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((m.pplus() * m.pplus() - m.pplus()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((m.pplus() * m.pminus()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((m.tau() * m.pplus() - m.pplus()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("metric_from_involution rejects bad involutions") {
  auto alg = su2_double_algebra();
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(6, 6) * 1.5;
  auto res = metric_from_involution(alg, bad);
  CHECK_FALSE(res.metric.has_value());
  CHECK_FALSE(res.report.violations.empty());
  // tau = -I is an involution but eta tau is not positive for split eta
  auto res2 = metric_from_involution(alg, Eigen::MatrixXd::Identity(6, 6));
  CHECK_FALSE(res2.metric.has_value());
}

TEST_CASE("split inverse pairing sums exactly") {
  auto alg = su2_double_algebra();
  auto m = random_metric(alg, 9);
  auto sp = split_inverse(alg, m);
  CHECK((sp.tplus + sp.tminus - sp.t).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sp.t - alg.pairing_inverse()).cwiseAbs().maxCoeff() < 1e-13);
  // tplus has range in V+: Pi- tplus = 0
  CHECK((m.pminus() * sp.tplus).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.pplus() * sp.tminus).cwiseAbs().maxCoeff() < 1e-12);
  // symmetric parts
  CHECK((sp.tplus - sp.tplus.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pairing orthogonal transport preserves validation") {
  auto alg = su2_double_algebra();
  Eigen::MatrixXd g = random_pairing_orthogonal(alg, 21);
  CHECK((g.transpose() * alg.pairing() * g - alg.pairing()).cwiseAbs().maxCoeff() < 1e-10);
  auto moved = transform_algebra(alg, g);
  CHECK(validate_algebra(moved).pass);
}
