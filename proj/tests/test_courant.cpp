#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gricci/courant.hpp>
#include <gricci/flow.hpp>
#include <gricci/rng.hpp>

using namespace gricci;

namespace {

// Exact Courant algebroid over R^w with H-flux: fiber spanned by
// (e_1..e_w, f^1..f^w), <e_i, f^j> = delta, anchor rho(e_i) = d/dx_i,
// c(e_i,e_j,e_k) = H_ijk.
CourantData h_flux_data(int w, const std::vector<Polynomial>& H) {
  int n = 2 * w;
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < w; ++i) {
    eta(i, w + i) = 1.0;
    eta(w + i, i) = 1.0;
  }
  std::vector<Polynomial> c(static_cast<size_t>(n) * n * n, Polynomial::constant(w, 0.0));
  auto set = [&](int a, int b, int d, const Polynomial& p) {
    c[(a * n + b) * n + d] = p;
  };
  // H[(i*w+j)*w+k] holds H_ijk for i<j<k; fill all signed permutations
  for (int i = 0; i < w; ++i)
    for (int j = i + 1; j < w; ++j)
      for (int k = j + 1; k < w; ++k) {
        const Polynomial& p = H[(i * w + j) * w + k];
        if (p.is_zero()) continue;
        Polynomial m = p * (-1.0);
        set(i, j, k, p); set(j, k, i, p); set(k, i, j, p);
        set(j, i, k, m); set(i, k, j, m); set(k, j, i, m);
      }
  std::vector<Polynomial> rho(static_cast<size_t>(w) * n, Polynomial::constant(w, 0.0));
  for (int i = 0; i < w; ++i) rho[i * n + i] = Polynomial::constant(w, 1.0);
  return CourantData(w, eta, c, rho);
}

std::vector<Eigen::VectorXd> sample_points(int w, int count) {
  RandomStream rng(31, 0);
  std::vector<Eigen::VectorXd> pts;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x(w);
    for (int i = 0; i < w; ++i) x[i] = rng.next_normal();
    pts.push_back(x);
  }
  return pts;
}

// naive oracle for the rho-loop: vertex order at x is (loop, +leaf, -leaf)
Eigen::MatrixXd rho_loop_oracle(const CourantData& cd, const Eigen::VectorXd& x,
                                const GeneralizedMetric& m, EdgeSign sign) {
  int n = cd.fiber_dim(), w = cd.base_dim();
  Eigen::MatrixXd tplus = m.pplus() * cd.fiber_pairing_inverse();
  Eigen::MatrixXd tminus = cd.fiber_pairing_inverse() - tplus;
  const Eigen::MatrixXd& tloop = sign == EdgeSign::plus ? tplus : tminus;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B) {
      double s = 0;
      for (int i = 0; i < w; ++i)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
              for (int d = 0; d < n; ++d)
                s += cd.c(a, b, c).derivative(i).eval(x) * tplus(b, A) * tminus(c, B) *
                     tloop(a, d) * cd.rho(i, d).eval(x);
      out(A, B) = s;
    }
  return out;
}

}  // namespace

TEST_CASE("lift of a quadratic Lie algebra satisfies the master equation") {
  for (const char* name : {"su2", "su2_double", "abelian:2,2"}) {
    auto alg = preset_algebra(name);
    auto cd = CourantData::from_algebra(alg, 2);
    CAPTURE(name);
    CHECK(master_equation_residual(cd, sample_points(2, 6)) < 1e-12);
  }
}

TEST_CASE("constant H-flux satisfies the master equation") {
  int w = 3;
  std::vector<Polynomial> H(w * w * w, Polynomial::constant(w, 0.0));
  H[(0 * w + 1) * w + 2] = Polynomial::constant(w, 1.7);
  auto cd = h_flux_data(w, H);
  CHECK(master_equation_residual(cd, sample_points(w, 6)) < 1e-12);
}

TEST_CASE("closed non-constant H-flux satisfies the master equation") {
  // w = 4, H = x4 dx1^dx2^dx3 + x3 dx1^dx2^dx4:
  // (dH)_1234 = d3 H_124 - d4 H_123 = 1 - 1 = 0
  int w = 4;
  std::vector<Polynomial> H(w * w * w, Polynomial::constant(w, 0.0));
  H[(0 * w + 1) * w + 2] = Polynomial::variable(w, 3);
  H[(0 * w + 1) * w + 3] = Polynomial::variable(w, 2);
  auto cd = h_flux_data(w, H);
  CHECK(master_equation_residual(cd, sample_points(w, 6)) < 1e-12);
}

TEST_CASE("non-closed H-flux violates the master equation") {
  int w = 4;
  std::vector<Polynomial> H(w * w * w, Polynomial::constant(w, 0.0));
  H[(0 * w + 1) * w + 2] = Polynomial::variable(w, 3);  // dH = dx4^dx1^dx2^dx3
  auto cd = h_flux_data(w, H);
  CHECK(master_equation_residual(cd, sample_points(w, 6)) > 1e-3);
}

TEST_CASE("corrupted structure constants are detected") {
  auto alg = su2_double_algebra();
  auto cd = CourantData::from_algebra(alg, 2);
  int n = alg.dim();
  std::vector<Polynomial> c(static_cast<size_t>(n) * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d)
        c[(a * n + b) * n + d] = Polynomial::constant(2, alg.c(a, b, d));
  // plant a cross-block component c_{013}: the contraction of the new
  // orbit against the (3,4,5) epsilon breaks Jacobi
  for (auto [a, b, d] : {std::tuple{0, 1, 3}, {1, 3, 0}, {3, 0, 1}})
    c[(a * n + b) * n + d] = Polynomial::constant(2, 0.5);
  for (auto [a, b, d] : {std::tuple{1, 0, 3}, {3, 1, 0}, {0, 3, 1}})
    c[(a * n + b) * n + d] = Polynomial::constant(2, -0.5);
  std::vector<Polynomial> rho(static_cast<size_t>(2) * n, Polynomial::constant(2, 0.0));
  CourantData bad(2, alg.pairing(), c, rho);
  CHECK(master_equation_residual(cd, sample_points(2, 6)) < 1e-12);
  CHECK(master_equation_residual(bad, sample_points(2, 6)) > 1e-3);
}

TEST_CASE("courant_t_dprime reduces to t_d for lifted algebras") {
  auto alg = su2_double_algebra();
  auto cd = CourantData::from_algebra(alg, 3);
  auto m = random_metric(alg, 12);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
  Eigen::MatrixXd a = courant_t_dprime(cd, x, m);
  Eigen::MatrixXd b = t_d(alg, m);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rho-loop contraction matches the nested-loop oracle") {
  int w = 3;
  std::vector<Polynomial> H(w * w * w, Polynomial::constant(w, 0.0));
  Polynomial p = Polynomial::constant(w, 0.8) + Polynomial::variable(w, 0) * 0.5 +
                 Polynomial::variable(w, 2) * Polynomial::variable(w, 1) * 0.25;
  H[(0 * w + 1) * w + 2] = p;
  auto cd = h_flux_data(w, H);
  auto alg_like = QuadraticLieAlgebra(cd.fiber_pairing(),
                                      std::vector<double>(6 * 6 * 6, 0.0));
  auto m = random_metric(alg_like, 4);
  Eigen::VectorXd x(w);
  x << 0.3, -0.7, 1.1;
  for (EdgeSign sign : {EdgeSign::plus, EdgeSign::minus}) {
    TensorFactor t = contract_courant(rho_loop_diagram(sign), cd, x, m);
    Eigen::MatrixXd oracle = rho_loop_oracle(cd, x, m, sign);
    double worst = 0;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        worst = std::max(worst, std::abs(t.at({a, b}) - oracle(a, b)));
    CHECK(worst < 1e-12 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("courant_t_dprime is the weighted diagram sum") {
  int w = 3;
  std::vector<Polynomial> H(w * w * w, Polynomial::constant(w, 0.0));
  H[(0 * w + 1) * w + 2] = Polynomial::constant(w, 1.0) + Polynomial::variable(w, 1);
  auto cd = h_flux_data(w, H);
  auto alg_like = QuadraticLieAlgebra(cd.fiber_pairing(),
                                      std::vector<double>(6 * 6 * 6, 0.0));
  auto m = random_metric(alg_like, 8);
  Eigen::VectorXd x(w);
  x << -0.2, 0.4, 0.9;
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(6, 6);
  for (const auto& wg : ggric_diagrams()) {
    TensorFactor t = contract_courant(wg.graph, cd, x, m);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) total(a, b) += wg.coefficient.value() * t.at({a, b});
  }
  CHECK((total - courant_t_dprime(cd, x, m)).cwiseAbs().maxCoeff() < 1e-13);
}
