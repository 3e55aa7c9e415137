#include "gricci/algebra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>

#include "gricci/rng.hpp"

namespace gricci {

QuadraticLieAlgebra::QuadraticLieAlgebra(Eigen::MatrixXd eta,
                                         std::vector<double> c_lowered)
    : n_(static_cast<int>(eta.rows())), eta_(std::move(eta)), c_(std::move(c_lowered)) {
  if (n_ < 1 || eta_.cols() != n_)
    throw std::invalid_argument("pairing matrix must be square, dim >= 1");
  if (static_cast<int>(c_.size()) != n_ * n_ * n_)
    throw std::invalid_argument("structure constant array must have dim^3 entries");
  if ((eta_ - eta_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + eta_.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("pairing matrix eta is not symmetric");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(eta_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smin = svd.singularValues()(n_ - 1);
  double smax = svd.singularValues()(0);
  cond_ = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(smin > smax * 1e-12))
    throw std::invalid_argument("pairing matrix eta is numerically singular");
  eta_inv_ = eta_.inverse();
}

std::pair<int, int> QuadraticLieAlgebra::signature() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(eta_);
  int p = 0, q = 0;
  for (int i = 0; i < n_; ++i) (es.eigenvalues()(i) > 0 ? p : q)++;
  return {p, q};
}

ValidationReport validate_algebra(const QuadraticLieAlgebra& alg, double tol) {
  const int n = alg.dim();
  ValidationReport rep;
  rep.tolerance = tol;
  rep.pairing_condition = alg.pairing_condition();

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        rep.antisym_first = std::max(rep.antisym_first,
                                     std::abs(alg.c(a, b, c) + alg.c(b, a, c)));
        rep.antisym_last = std::max(rep.antisym_last,
                                    std::abs(alg.c(a, b, c) + alg.c(a, c, b)));
      }

  // C^d_{ab} = sum_e c_{abe} (eta^{-1})^{ed}
  const Eigen::MatrixXd& ti = alg.pairing_inverse();
  std::vector<double> C(static_cast<size_t>(n) * n * n, 0.0);
  auto Cr = [&](int a, int b, int d) -> double& { return C[(a * n + b) * n + d]; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        double s = 0;
        for (int e = 0; e < n; ++e) s += alg.c(a, b, e) * ti(e, d);
        Cr(a, b, d) = s;
      }

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int f = 0; f < n; ++f) {
          double s = 0;
          for (int e = 0; e < n; ++e)
            s += Cr(a, b, e) * Cr(e, c, f) + Cr(b, c, e) * Cr(e, a, f) +
                 Cr(c, a, e) * Cr(e, b, f);
          rep.jacobi = std::max(rep.jacobi, std::abs(s));
        }

  rep.pass = rep.antisym_first <= tol && rep.antisym_last <= tol && rep.jacobi <= tol;
  return rep;
}

QuadraticLieAlgebra abelian_algebra(int p, int q, double level) {
  if (p < 0 || q < 0 || p + q < 1)
    throw std::invalid_argument("abelian preset needs p,q >= 0 and p+q >= 1");
  int n = p + q;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = (i < p) ? level : -level;
  return QuadraticLieAlgebra(d.asDiagonal(),
                             std::vector<double>(static_cast<size_t>(n) * n * n, 0.0));
}

namespace {
double epsilon3(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  // parity of the permutation (a,b,c) of (0,1,2)
  return ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
}
}  // namespace

QuadraticLieAlgebra su2_algebra(double level) {
  Eigen::MatrixXd eta = -level * Eigen::MatrixXd::Identity(3, 3);
  std::vector<double> c(27, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc) c[(a * 3 + b) * 3 + cc] = level * epsilon3(a, b, cc);
  return QuadraticLieAlgebra(eta, c);
}

QuadraticLieAlgebra su2_double_algebra(double level) {
  // g = gbar_0 (+) g_0 with the pairing +K on the first block, -K on the
  // second (K the su(2) form). Both blocks close as subalgebras.
  int n = 6;
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < 3; ++i) {
    eta(i, i) = level;
    eta(3 + i, 3 + i) = -level;
  }
  std::vector<double> c(static_cast<size_t>(n) * n * n, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc) {
        double e = epsilon3(a, b, cc);
        c[(a * n + b) * n + cc] = level * e;          // pairing +K block
        c[((3 + a) * n + 3 + b) * n + 3 + cc] = -level * e;  // pairing -K block
      }
  return QuadraticLieAlgebra(eta, c);
}

QuadraticLieAlgebra preset_algebra(const std::string& name, double level) {
  if (name == "su2") return su2_algebra(level);
  if (name == "su2_double") return su2_double_algebra(level);
  if (name.rfind("abelian:", 0) == 0) {
    int p = 0, q = 0;
    if (std::sscanf(name.c_str() + 8, "%d,%d", &p, &q) != 2)
      throw std::invalid_argument("bad abelian preset, expected abelian:p,q");
    return abelian_algebra(p, q, level);
  }
  throw std::invalid_argument("unknown algebra preset: " + name);
}

GeneralizedMetric::GeneralizedMetric(Eigen::MatrixXd tau, int rank_plus)
    : tau_(std::move(tau)), rank_plus_(rank_plus) {
  int n = static_cast<int>(tau_.rows());
  pplus_ = 0.5 * (Eigen::MatrixXd::Identity(n, n) + tau_);
  pminus_ = 0.5 * (Eigen::MatrixXd::Identity(n, n) - tau_);
}

struct MetricFactory {
  static GeneralizedMetric make(Eigen::MatrixXd tau, int rank_plus) {
    return GeneralizedMetric(std::move(tau), rank_plus);
  }
};

MetricResult metric_from_involution(const QuadraticLieAlgebra& alg,
                                    const Eigen::MatrixXd& tau, double tol) {
  MetricResult res;
  MetricReport& rep = res.report;
  const int n = alg.dim();
  if (tau.rows() != n || tau.cols() != n) {
    rep.violations.push_back("tau has wrong dimensions");
    return res;
  }
  const Eigen::MatrixXd& eta = alg.pairing();
  Eigen::MatrixXd tau2 = tau * tau;
  rep.involution = (tau2 - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  Eigen::MatrixXd g = eta * tau;
  rep.pairing_symmetry = (g - g.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
  rep.positivity_margin = es.eigenvalues().minCoeff();

  // eigenvalues of tau cluster at +/-1 once the other invariants hold
  int rank_plus = 0;
  {
    Eigen::EigenSolver<Eigen::MatrixXd> et(tau);
    for (int i = 0; i < n; ++i)
      if (et.eigenvalues()(i).real() > 0) ++rank_plus;
  }
  rep.rank_plus = rank_plus;

  if (rep.involution > tol) rep.violations.push_back("tau^2 != I");
  if (rep.pairing_symmetry > tol) rep.violations.push_back("eta tau != tau^T eta");
  if (!(rep.positivity_margin > 0)) rep.violations.push_back("<tau.,.> not positive definite");
  int p = alg.signature().first;
  if (rep.violations.empty() && rank_plus != p)
    rep.violations.push_back("rank of Pi+ does not match the pairing signature");

  rep.pass = rep.violations.empty();
  if (rep.pass) res.metric = MetricFactory::make(tau, rank_plus);
  return res;
}

GeneralizedMetric canonical_metric(const QuadraticLieAlgebra& alg) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(alg.pairing());
  const int n = alg.dim();
  Eigen::VectorXd s(n);
  int p = 0;
  for (int i = 0; i < n; ++i) {
    s(i) = es.eigenvalues()(i) > 0 ? 1.0 : -1.0;
    if (s(i) > 0) ++p;
  }
  Eigen::MatrixXd tau = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
  return MetricFactory::make(tau, p);
}

Eigen::MatrixXd random_pairing_orthogonal(const QuadraticLieAlgebra& alg,
                                          std::uint64_t seed, double spread) {
  const int n = alg.dim();
  RandomStream rs(seed, 0x6f72746857ULL);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = spread * rs.next_normal();
      S(i, j) = v;
      S(j, i) = -v;
    }
  // A = eta^{-1} S is eta-antisymmetric, so exp(A) preserves eta
  Eigen::MatrixXd A = alg.pairing_inverse() * S;
  return A.exp();
}

GeneralizedMetric random_metric(const QuadraticLieAlgebra& alg,
                                std::uint64_t seed, double spread) {
  GeneralizedMetric tau0 = canonical_metric(alg);
  Eigen::MatrixXd g = random_pairing_orthogonal(alg, seed, spread);
  Eigen::MatrixXd tau = g * tau0.tau() * g.inverse();
  MetricResult res = metric_from_involution(alg, tau, 1e-8);
  if (!res.metric)
    throw std::runtime_error("random_metric produced an invalid involution");
  return *res.metric;
}

SplitInversePairing split_inverse(const QuadraticLieAlgebra& alg,
                                  const GeneralizedMetric& metric) {
  SplitInversePairing s;
  s.t = alg.pairing_inverse();
  // Pi+ eta^{-1} = Pi+ eta^{-1} Pi+^T since eta^{-1} Pi+^T = Pi+ eta^{-1}
  s.tplus = metric.pplus() * s.t;
  s.tminus = s.t - s.tplus;
  return s;
}

QuadraticLieAlgebra transform_algebra(const QuadraticLieAlgebra& alg,
                                      const Eigen::MatrixXd& g) {
  const int n = alg.dim();
  Eigen::MatrixXd gi = g.inverse();
  std::vector<double> c(static_cast<size_t>(n) * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc) {
        double s = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              s += alg.c(i, j, k) * gi(i, a) * gi(j, b) * gi(k, cc);
        c[(a * n + b) * n + cc] = s;
      }
  return QuadraticLieAlgebra(alg.pairing(), std::move(c));
}

}  // namespace gricci
