#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "gricci/expr.hpp"
#include "gricci/forms.hpp"
#include "gricci/geometry.hpp"

namespace gricci {

struct MCEstimate {
  std::complex<double> value{0, 0};
  double std_error = 0;
  long long n_samples = 0;
  std::uint64_t seed = 0;
  double wall_time = 0;  // seconds
};

struct MCOptions {
  long long n = 1'000'000;
  std::uint64_t seed = 1;
  int threads = 0;           // 0 = hardware concurrency
  double budget_seconds = 0; // 0 = unlimited; else stop after the deadline
};

/// The cutoff-difference integral I over Conf_2(H^3): the loop of one P0
/// and one P0bar against the cutoff difference Theta_{eps l1} -
/// Theta_{eps l2}, with test-form legs p1*alpha, p2*beta. Importance
/// sampling in the (z, u, t1, t2) chart, |u| log-uniform in the cutoff
/// shell. Returns exact 0 when l1 == l2.
MCEstimate lemma_lhs(const TestForm& alpha, const TestForm& beta, const Expr& ell1,
                     const Expr& ell2, double epsilon, const MCOptions& opts);

/// Deterministic reference: -(1/2pi) integral over the boundary plane of
/// log(l1/l2) times the pointwise pairing of the dz/dzbar parts of alpha
/// and beta. Zero unless both forms have degree 1.
double lemma_rhs(const TestForm& alpha, const TestForm& beta, const Expr& ell1,
                 const Expr& ell2, double rel_tol = 1e-8);

/// Boundary pairing integral of alpha wedge *beta (dz/dzbar parts), used
/// for factorization cross-checks.
double boundary_pairing(const TestForm& alpha, const TestForm& beta,
                        double rel_tol = 1e-8);

/// The P0 P1 variant J with a degree-2 test form at the second point.
MCEstimate courant_lhs(const TestForm& alpha, const Expr& ell1, const Expr& ell2,
                       double epsilon, const MCOptions& opts);

/// Deterministic reference -(1/4 pi i) integral of log(l1/l2) alpha over
/// the boundary plane.
std::complex<double> courant_rhs(const TestForm& alpha, const Expr& ell1,
                                 const Expr& ell2, double rel_tol = 1e-8);

struct ScanPoint {
  double epsilon = 0;  // representative scale of the shell
  MCEstimate delta;    // tube-excision difference of the loop integral
};

struct ScanResult {
  std::vector<ScanPoint> points;
  double slope = 0;     // least-squares slope of log|delta| vs log eps
  double slope_ci = 0;  // 1-sigma fit uncertainty
};

/// Scaling scan for the n-vertex propagator loop: for adjacent epsilons
/// on a geometric grid, Monte-Carlo the integral over the configurations
/// excised at the larger but not the smaller scale (all points within
/// epsilon of a common boundary point), then fit the slope. Forms must
/// have degrees summing to n_vertices.
ScanResult convergence_scan(int n_vertices, const std::vector<TestForm>& forms,
                            const std::vector<double>& epsilons,
                            const MCOptions& opts);

}  // namespace gricci
