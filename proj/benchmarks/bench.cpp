#include <benchmark/benchmark.h>

#include <gricci/flow.hpp>
#include <gricci/verify.hpp>

using namespace gricci;

static void BM_contract_eye(benchmark::State& state) {
  auto alg = su2_double_algebra();
  auto m = random_metric(alg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(contract(eye_diagram(), alg, m));
}
BENCHMARK(BM_contract_eye);

static void BM_flow_step_rkmk4(benchmark::State& state) {
  auto alg = su2_double_algebra();
  auto st = make_flow_state(alg, random_metric(alg, 1));
  for (auto _ : state) benchmark::DoNotOptimize(flow_step(alg, st, 0.01));
}
BENCHMARK(BM_flow_step_rkmk4);

static void BM_courant_t_dprime(benchmark::State& state) {
  auto alg = su2_double_algebra();
  auto cd = CourantData::from_algebra(alg, 3);
  auto m = random_metric(alg, 1);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
  for (auto _ : state) benchmark::DoNotOptimize(courant_t_dprime(cd, x, m));
}
BENCHMARK(BM_courant_t_dprime);

static void BM_eval_p0(benchmark::State& state) {
  ConfigPoint cfg{Model::halfspace, {0.3, -0.2, 0.7}, {1.1, 0.5, 0.4}};
  Eigen::Vector3d v1(0.2, -0.5, 0.3), v2(-0.1, 0.4, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(eval_p0(cfg, v1, v2));
}
BENCHMARK(BM_eval_p0);

static void BM_endpoint_jet(benchmark::State& state) {
  ConfigPoint cfg{Model::halfspace, {0.3, -0.2, 0.7}, {1.1, 0.5, 0.4}};
  for (auto _ : state) benchmark::DoNotOptimize(endpoint_jet(cfg));
}
BENCHMARK(BM_endpoint_jet);

static void BM_lemma_lhs_10k(benchmark::State& state) {
  auto a = TestForm::bump_one_form({0, 0, 0}, 1.0);
  Expr l1 = Expr::constant(1.0), l2 = Expr::constant(2.0);
  MCOptions o;
  o.n = 10000;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lemma_lhs(a, a, l1, l2, 1e-3, o));
}
BENCHMARK(BM_lemma_lhs_10k);

BENCHMARK_MAIN();
