#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gricci/algebra.hpp"
#include "gricci/diagrams.hpp"
#include "gricci/poly.hpp"

namespace gricci {

/// Polynomial component data of a degree-3 Hamiltonian
/// C = (1/6) c_abc(x) A^a A^b A^c + rho^i_a(x) p_i A^a
/// on W (+) V[1] (+) W*[2]: a fiber pairing on V, the antisymmetric
/// c_abc(x), and the anchor components rho^i_a(x). Component degrees are
/// bounded so derivatives and the master-equation expansion are exact.
class CourantData {
 public:
  CourantData(int base_dim, Eigen::MatrixXd fiber_pairing,
              std::vector<Polynomial> c_poly, std::vector<Polynomial> rho_poly);

  /// Lift of a quadratic Lie algebra: constant c, rho = 0.
  static CourantData from_algebra(const QuadraticLieAlgebra& alg, int base_dim);

  int base_dim() const { return base_dim_; }
  int fiber_dim() const { return fiber_dim_; }
  const Eigen::MatrixXd& fiber_pairing() const { return eta_; }
  const Eigen::MatrixXd& fiber_pairing_inverse() const { return eta_inv_; }

  const Polynomial& c(int a, int b, int cc) const {
    return c_poly_[(a * fiber_dim_ + b) * fiber_dim_ + cc];
  }
  const Polynomial& rho(int i, int a) const { return rho_poly_[i * fiber_dim_ + a]; }

  /// Constant-coefficient Lie algebra at a point (only valid when rho = 0
  /// and c is constant; used for reduction checks).
  QuadraticLieAlgebra algebra_at(const Eigen::VectorXd& x) const;

  static constexpr int kMaxDegree = 4;

 private:
  int base_dim_, fiber_dim_;
  Eigen::MatrixXd eta_, eta_inv_;
  std::vector<Polynomial> c_poly_;   // fiber^3, lowered, antisymmetric
  std::vector<Polynomial> rho_poly_; // base x fiber
};

/// Contraction of a Courant graph at a point x of the base: each c-vertex
/// contributes the derivative of c_abc for every incoming dotted line,
/// each rho-vertex the derivative of rho^i_a, dotted edges contract
/// W-indices through the identity, solid edges through t+/t-.
TensorFactor contract_courant(const SignedGraph& g, const CourantData& cdata,
                              const Eigen::VectorXd& x,
                              const GeneralizedMetric& metric);

/// Expands {C,C} with the graded Poisson brackets {x^i,p_j} = delta,
/// {A^a,A^b} = t^{ab} and reports the max absolute value of the resulting
/// coefficient polynomials over the sample points.
double master_equation_residual(const CourantData& cdata,
                                const std::vector<Eigen::VectorXd>& sample_points);

}  // namespace gricci
