#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gricci/diagrams.hpp>
#include <gricci/io.hpp>
#include <gricci/rng.hpp>

using namespace gricci;

namespace {

// naive nested-loop oracles written from the diagram pictures

double theta_oracle(const QuadraticLieAlgebra& alg, const GeneralizedMetric& m) {
  auto sp = split_inverse(alg, m);
  int n = alg.dim();
  double s = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e)
            for (int f = 0; f < n; ++f)
              s += alg.c(a, b, c) * alg.c(d, e, f) * sp.tplus(a, d) * sp.tplus(b, e) *
                   sp.tplus(c, f);
  return s;
}

// eye: x-vertex order (+loop, leaf, -loop), y-vertex order (leaf, +loop, -loop);
// plus leaf on x through t+, minus leaf on y through t-
Eigen::MatrixXd eye_oracle(const QuadraticLieAlgebra& alg, const GeneralizedMetric& m) {
  auto sp = split_inverse(alg, m);
  int n = alg.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B) {
      double s = 0;
      for (int p = 0; p < n; ++p)
        for (int l = 0; l < n; ++l)
          for (int q = 0; q < n; ++q)
            for (int lp = 0; lp < n; ++lp)
              for (int pp = 0; pp < n; ++pp)
                for (int qp = 0; qp < n; ++qp)
                  s += alg.c(p, l, q) * alg.c(lp, pp, qp) * sp.tplus(l, A) *
                       sp.tminus(lp, B) * sp.tplus(p, pp) * sp.tminus(q, qp);
      out(A, B) = s;
    }
  return out;
}

QuadraticLieAlgebra random_algebra(int n, std::uint64_t seed) {
  // random totally antisymmetric c on a split pairing; Jacobi not needed
  // for contraction identities
  RandomStream rng(seed, 0);
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) eta(i, i) = i < (n + 1) / 2 ? 1.0 : -1.0;
  std::vector<double> c(static_cast<size_t>(n) * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int d = b + 1; d < n; ++d) {
        double v = rng.next_normal();
        c[(a * n + b) * n + d] = v;
        c[(b * n + d) * n + a] = v;
        c[(d * n + a) * n + b] = v;
        c[(b * n + a) * n + d] = -v;
        c[(a * n + d) * n + b] = -v;
        c[(d * n + b) * n + a] = -v;
      }
  return QuadraticLieAlgebra(eta, c);
}

}  // namespace

#include <gricci/rng.hpp>

TEST_CASE("preset graphs validate") {
  for (const char* name : {"theta", "eye", "rho_loop_plus", "rho_loop_minus"})
    CHECK(validate_graph(preset_graph(name)).pass);
  CHECK_THROWS_AS(preset_graph("nope"), std::invalid_argument);
}

TEST_CASE("automorphism counts") {
  CHECK(automorphism_count(theta_graph(), false) == 12);
  CHECK(automorphism_count(eye_diagram(), true) == 1);  // signs distinguish the loops
  SignedGraph unsigned_eye = eye_diagram();
  for (auto& e : unsigned_eye.edges) e.sign = EdgeSign::plus;
  for (auto& v : unsigned_eye.vertices)
    if (v.kind == VertexKind::leaf) v.leaf_kind = LeafKind::plus;
  CHECK(automorphism_count(unsigned_eye, true) == 2);
}

TEST_CASE("theta contraction matches the nested-loop oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    int n = 3 + static_cast<int>(seed % 4);
    auto alg = random_algebra(n, seed);
    auto m = random_metric(alg, seed + 100);
    TensorFactor t = contract(theta_graph(), alg, m);
    REQUIRE(t.data.size() == 1);
    CHECK(t.data[0] == doctest::Approx(theta_oracle(alg, m)).epsilon(1e-12));
  }
}

TEST_CASE("eye contraction matches the nested-loop oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    int n = 3 + static_cast<int>(seed % 4);
    auto alg = random_algebra(n, seed * 7);
    auto m = random_metric(alg, seed);
    TensorFactor t = contract(eye_diagram(), alg, m);
    Eigen::MatrixXd oracle = eye_oracle(alg, m);
    double worst = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        worst = std::max(worst, std::abs(t.at({a, b}) - oracle(a, b)));
    CHECK(worst < 1e-12 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("contract rejects dotted and rho content") {
  auto alg = su2_double_algebra();
  auto m = canonical_metric(alg);
  CHECK_THROWS_AS(contract(rho_loop_diagram(EdgeSign::plus), alg, m),
                  std::invalid_argument);
}

TEST_CASE("eye leaf slots live in the projector ranges") {
  auto alg = su2_double_algebra();
  auto m = random_metric(alg, 3);
  TensorFactor t = contract(eye_diagram(), alg, m);
  int n = alg.dim();
  Eigen::MatrixXd T(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) T(a, b) = t.at({a, b});
  CHECK((T - m.pplus() * T * m.pminus().transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ggric diagram list") {
  auto list = ggric_diagrams();
  REQUIRE(list.size() == 3);
  CHECK(list[0].coefficient.value() == 1.0);
  CHECK(list[1].coefficient.value() == 0.5);
  CHECK(list[2].coefficient.value() == -0.5);
  CHECK_FALSE(list[0].graph.has_dotted());
  CHECK(list[1].graph.has_dotted());
}

TEST_CASE("graph json round trip") {
  for (const char* name : {"theta", "eye", "rho_loop_plus"}) {
    SignedGraph g = preset_graph(name);
    SignedGraph back = graph_from_json(graph_to_json(g));
    CAPTURE(name);
    CHECK(graph_to_json(back) == graph_to_json(g));
    CHECK(validate_graph(back).pass);
    CHECK(automorphism_count(back, true) == automorphism_count(g, true));
  }
}

TEST_CASE("validate_graph flags broken graphs") {
  SignedGraph g = theta_graph();
  g.edges[0].h2 = 99;
  CHECK_FALSE(validate_graph(g).pass);
  SignedGraph h = eye_diagram();
  h.vertices[0].order.pop_back();  // c-vertex no longer trivalent
  CHECK_FALSE(validate_graph(h).pass);
}
