#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gricci/algebra.hpp"
#include "gricci/courant.hpp"
#include "gricci/diagrams.hpp"

namespace gricci {

/// T_D: the eye-diagram tensor factor reshaped to an n x n matrix with
/// raised indices, supported on the V+ (x) V- block.
Eigen::MatrixXd t_d(const QuadraticLieAlgebra& alg, const GeneralizedMetric& metric);

/// -T_D, the generalized Ricci tensor of the generalized metric.
Eigen::MatrixXd generalized_ricci(const QuadraticLieAlgebra& alg,
                                  const GeneralizedMetric& metric);

/// The beta operator B = (1/2pi)(T_D - T_D^op) viewed as an operator on g
/// via <B v, w> = <B, v (x) w>. Satisfies eta B + B^T eta = 0 and swaps
/// V+ and V-.
Eigen::MatrixXd beta_operator(const QuadraticLieAlgebra& alg,
                              const GeneralizedMetric& metric);

struct FlowState {
  double s = 0;  // log-scale parameter
  GeneralizedMetric metric;
  double residual = 0;  // Frobenius norm of T_D
};

FlowState make_flow_state(const QuadraticLieAlgebra& alg,
                          const GeneralizedMetric& metric, double s = 0);

enum class StepMethod { lie_euler, rkmk4 };

struct FlowOptions {
  double hbar = 1.0;
  double direction = 1.0;   // sign of the flow ODE d tau/ds = dir*[hbar B, tau]
  double tol = 1e-10;       // metric invariant tolerance for step acceptance
  double ds_floor = 1e-12;
  StepMethod method = StepMethod::rkmk4;
};

/// One structure-preserving step of d tau/ds = [hbar B(tau), tau]: the
/// update is a conjugation tau -> exp(X) tau exp(-X) by a
/// pairing-orthogonal exponential, so the metric invariants survive to
/// roundoff. Rejects and halves ds if validation fails, down to ds_floor.
FlowState flow_step(const QuadraticLieAlgebra& alg, const FlowState& state,
                    double ds, const FlowOptions& opts = {});

struct FlowTrajectory {
  std::vector<FlowState> states;
  bool truncated = false;
  std::string diagnostic;
};

FlowTrajectory integrate_flow(const QuadraticLieAlgebra& alg,
                              const GeneralizedMetric& metric0, double s0,
                              double s1, double ds0,
                              const FlowOptions& opts = {});

/// The Courant replacement T_{D'}: the coefficient-weighted sum of the
/// eye and the two rho-loop diagram contractions at the base point x.
/// Reduces exactly to t_d when rho = 0 and c is constant.
Eigen::MatrixXd courant_t_dprime(const CourantData& cdata, const Eigen::VectorXd& x,
                                 const GeneralizedMetric& metric);

}  // namespace gricci
