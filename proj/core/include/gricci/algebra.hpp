#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gricci {

/// Quadratic Lie algebra: a Lie algebra with a non-degenerate invariant
/// symmetric pairing. Structure constants are stored fully lowered,
/// c[a][b][c] = <[e_a,e_b], e_c>, so total antisymmetry is a storable
/// invariant; indices are raised through the inverse pairing at
/// contraction time.
class QuadraticLieAlgebra {
 public:
  /// Throws std::invalid_argument if eta is numerically singular or the
  /// dimensions are inconsistent.
  QuadraticLieAlgebra(Eigen::MatrixXd eta, std::vector<double> c_lowered);

  int dim() const { return n_; }
  const Eigen::MatrixXd& pairing() const { return eta_; }
  const Eigen::MatrixXd& pairing_inverse() const { return eta_inv_; }
  double pairing_condition() const { return cond_; }

  double c(int a, int b, int cc) const { return c_[(a * n_ + b) * n_ + cc]; }
  const std::vector<double>& structure() const { return c_; }

  /// Signature (p, q) of the pairing: counts of positive and negative
  /// eigenvalues.
  std::pair<int, int> signature() const;

 private:
  int n_;
  Eigen::MatrixXd eta_, eta_inv_;
  double cond_;
  std::vector<double> c_;
};

struct ValidationReport {
  double antisym_first = 0;   // max |c_abc + c_bac|
  double antisym_last = 0;    // max |c_abc + c_acb|
  double jacobi = 0;          // max Jacobi residual
  double pairing_condition = 0;
  double tolerance = 0;
  bool pass = false;
};

ValidationReport validate_algebra(const QuadraticLieAlgebra& alg,
                                  double tol = 1e-10);

/// Presets. Names accepted by the string form: "abelian:p,q", "su2",
/// "su2_double". `level` scales the pairing (and the lowered structure
/// constants with it, so the underlying bracket is unchanged).
QuadraticLieAlgebra abelian_algebra(int p, int q, double level = 1.0);
QuadraticLieAlgebra su2_algebra(double level = 1.0);
QuadraticLieAlgebra su2_double_algebra(double level = 1.0);
QuadraticLieAlgebra preset_algebra(const std::string& name, double level = 1.0);

/// Generalized metric, stored as the pairing-symmetric involution tau
/// whose +1/-1 eigenspaces are V+/V-. Immutable after construction.
class GeneralizedMetric {
 public:
  const Eigen::MatrixXd& tau() const { return tau_; }
  const Eigen::MatrixXd& pplus() const { return pplus_; }
  const Eigen::MatrixXd& pminus() const { return pminus_; }
  int rank_plus() const { return rank_plus_; }

 private:
  GeneralizedMetric(Eigen::MatrixXd tau, int rank_plus);
  Eigen::MatrixXd tau_, pplus_, pminus_;
  int rank_plus_;
  friend struct MetricFactory;
};

struct MetricReport {
  double involution = 0;      // ||tau^2 - I||_inf
  double pairing_symmetry = 0;  // ||eta tau - tau^T eta||_inf
  double positivity_margin = 0;  // min eigenvalue of eta*tau
  int rank_plus = -1;
  bool pass = false;
  std::vector<std::string> violations;
};

struct MetricResult {
  std::optional<GeneralizedMetric> metric;
  MetricReport report;
};

MetricResult metric_from_involution(const QuadraticLieAlgebra& alg,
                                    const Eigen::MatrixXd& tau,
                                    double tol = 1e-10);

/// Canonical diagonal metric: tau with <tau.,.> = |eta| in an eigenbasis
/// of eta. For a diagonal signature pairing this is diag(+1 on the
/// positive part, -1 on the negative part).
GeneralizedMetric canonical_metric(const QuadraticLieAlgebra& alg);

/// Deterministic random metric: conjugates the canonical diagonal tau by
/// exp(A) with A a seeded random eta-antisymmetric matrix.
GeneralizedMetric random_metric(const QuadraticLieAlgebra& alg,
                                std::uint64_t seed, double spread = 0.5);

/// The split inverse pairing t = t+ + t-. tminus is constructed as
/// eta^{-1} - tplus so the sum is exact.
struct SplitInversePairing {
  Eigen::MatrixXd t;       // eta^{-1}
  Eigen::MatrixXd tplus;   // range in V+
  Eigen::MatrixXd tminus;  // range in V-
};

SplitInversePairing split_inverse(const QuadraticLieAlgebra& alg,
                                  const GeneralizedMetric& metric);

/// exp of a random eta-antisymmetric matrix: a pairing-orthogonal
/// transformation, g^T eta g = eta. Used for sampling and for
/// equivariance tests.
Eigen::MatrixXd random_pairing_orthogonal(const QuadraticLieAlgebra& alg,
                                          std::uint64_t seed,
                                          double spread = 0.5);

/// Transports an algebra along a pairing-orthogonal map g:
/// eta' = eta (by orthogonality), c'_{abc} = c(g^{-1}.,g^{-1}.,g^{-1}.)
/// expressed on the same basis. Used for equivariance tests.
QuadraticLieAlgebra transform_algebra(const QuadraticLieAlgebra& alg,
                                      const Eigen::MatrixXd& g);

}  // namespace gricci
