#include "gricci/flow.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace gricci {

namespace {

Eigen::MatrixXd tensor_to_matrix(const TensorFactor& t, int n) {
  Eigen::MatrixXd m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = t.data[a * n + b];
  return m;
}

struct MetricAccess {
  static GeneralizedMetric rebuild(const QuadraticLieAlgebra& alg,
                                   const Eigen::MatrixXd& tau, double tol) {
    MetricResult res = metric_from_involution(alg, tau, tol);
    if (!res.metric) throw std::runtime_error("flow: metric invariants violated");
    return *res.metric;
  }
};

}  // namespace

Eigen::MatrixXd t_d(const QuadraticLieAlgebra& alg, const GeneralizedMetric& metric) {
  TensorFactor t = contract(eye_diagram(), alg, metric);
  return tensor_to_matrix(t, alg.dim());
}

Eigen::MatrixXd generalized_ricci(const QuadraticLieAlgebra& alg,
                                  const GeneralizedMetric& metric) {
  return -t_d(alg, metric);
}

Eigen::MatrixXd beta_operator(const QuadraticLieAlgebra& alg,
                              const GeneralizedMetric& metric) {
  Eigen::MatrixXd T = t_d(alg, metric);
  Eigen::MatrixXd Btensor = (T - T.transpose()) / (2.0 * M_PI);
  // operator via <B v, w> = <B, v (x) w>
  return -Btensor * alg.pairing();
}

FlowState make_flow_state(const QuadraticLieAlgebra& alg,
                          const GeneralizedMetric& metric, double s) {
  FlowState st{s, metric, t_d(alg, metric).norm()};
  return st;
}

namespace {

Eigen::MatrixXd comm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a * b - b * a;
}

// truncated dexpinv: v - [u,v]/2 + [u,[u,v]]/12; enough commutator depth
// for a 4th order method
Eigen::MatrixXd dexpinv(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  Eigen::MatrixXd uv = comm(u, v);
  return v - 0.5 * uv + comm(u, uv) / 12.0;
}

}  // namespace

FlowState flow_step(const QuadraticLieAlgebra& alg, const FlowState& state,
                    double ds, const FlowOptions& opts) {
  if (ds == 0) throw std::invalid_argument("flow_step: ds must be nonzero");
  if (!(opts.hbar > 0)) throw std::invalid_argument("flow_step: hbar must be positive");

  const Eigen::MatrixXd tau0 = state.metric.tau();

  auto vector_field = [&](const Eigen::MatrixXd& tau) -> Eigen::MatrixXd {
    MetricResult res = metric_from_involution(alg, tau, 1e-6);
    if (!res.metric) throw std::runtime_error("flow_step: stage left the metric manifold");
    return opts.direction * opts.hbar * beta_operator(alg, *res.metric);
  };

  double h = ds;
  while (true) {
    Eigen::MatrixXd omega;
    if (opts.method == StepMethod::lie_euler) {
      omega = h * vector_field(tau0);
    } else {
      auto stage_tau = [&](const Eigen::MatrixXd& theta) {
        Eigen::MatrixXd e = theta.exp();
        return Eigen::MatrixXd(e * tau0 * e.inverse());
      };
      Eigen::MatrixXd k1 = vector_field(tau0);
      Eigen::MatrixXd th2 = 0.5 * h * k1;
      Eigen::MatrixXd k2 = dexpinv(th2, vector_field(stage_tau(th2)));
      Eigen::MatrixXd th3 = 0.5 * h * k2;
      Eigen::MatrixXd k3 = dexpinv(th3, vector_field(stage_tau(th3)));
      Eigen::MatrixXd th4 = h * k3;
      Eigen::MatrixXd k4 = dexpinv(th4, vector_field(stage_tau(th4)));
      omega = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Eigen::MatrixXd e = omega.exp();
    Eigen::MatrixXd tau1 = e * tau0 * e.inverse();

    MetricResult res = metric_from_involution(alg, tau1, opts.tol);
    if (res.metric) {
      FlowState out{state.s + h, *res.metric, t_d(alg, *res.metric).norm()};
      return out;
    }
    h *= 0.5;
    if (std::abs(h) < opts.ds_floor)
      throw std::runtime_error("flow_step: step size underflow");
  }
}

FlowTrajectory integrate_flow(const QuadraticLieAlgebra& alg,
                              const GeneralizedMetric& metric0, double s0,
                              double s1, double ds0, const FlowOptions& opts) {
  FlowTrajectory traj;
  if (!(ds0 > 0)) throw std::invalid_argument("integrate_flow: ds0 must be positive");
  double dir = (s1 >= s0) ? 1.0 : -1.0;
  FlowState st = make_flow_state(alg, metric0, s0);
  traj.states.push_back(st);
  try {
    while (dir * (s1 - st.s) > 1e-14) {
      double h = dir * std::min(ds0, dir * (s1 - st.s));
      st = flow_step(alg, st, h, opts);
      traj.states.push_back(st);
    }
  } catch (const std::runtime_error& e) {
    traj.truncated = true;
    traj.diagnostic = e.what();
  }
  return traj;
}

Eigen::MatrixXd courant_t_dprime(const CourantData& cdata, const Eigen::VectorXd& x,
                                 const GeneralizedMetric& metric) {
  const int n = cdata.fiber_dim();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (const WeightedGraph& wg : ggric_diagrams()) {
    TensorFactor t = contract_courant(wg.graph, cdata, x, metric);
    total += wg.coefficient.value() * tensor_to_matrix(t, n);
  }
  return total;
}

}  // namespace gricci
