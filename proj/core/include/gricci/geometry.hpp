#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <stdexcept>

#include "gricci/dual.hpp"
#include "gricci/expr.hpp"

namespace gricci {

enum class Model { ball, halfspace };

/// A point of Conf_2: two distinct interior points of the ball or the
/// upper half space.
struct ConfigPoint {
  Model model = Model::halfspace;
  Eigen::Vector3d q1, q2;  // halfspace: (x, y, h), h > 0; ball: |q| < 1
};

void validate_config(const ConfigPoint& cfg);

/// Boundary point of the half space, projectively: finite z or infinity.
struct BoundaryPoint {
  std::complex<double> z{0, 0};
  bool infinite = false;
};

// ---------------------------------------------------------------------------
// Templated kernels (double or Dual scalars)
// ---------------------------------------------------------------------------

template <typename T>
struct Vec3T {
  T x{}, y{}, z{};
};

template <typename T>
struct CplxT {
  T re{}, im{};
  CplxT() = default;
  CplxT(T r, T i) : re(r), im(i) {}
  friend CplxT operator+(const CplxT& a, const CplxT& b) { return {a.re + b.re, a.im + b.im}; }
  friend CplxT operator-(const CplxT& a, const CplxT& b) { return {a.re - b.re, a.im - b.im}; }
  friend CplxT operator*(const CplxT& a, const CplxT& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend CplxT operator/(const CplxT& a, const CplxT& b) {
    T n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
};

/// Cayley-type inversion exchanging the unit ball and the upper half
/// space: q -> -e3 + 2 (q + e3) / |q + e3|^2. Involutive; the ball
/// boundary point -e3 corresponds to infinity.
template <typename T>
Vec3T<T> ball_halfspace_inversion(const Vec3T<T>& q) {
  T px = q.x, py = q.y, pz = q.z + T(1);
  T n2 = px * px + py * py + pz * pz;
  return {T(2) * px / n2, T(2) * py / n2, T(2) * pz / n2 - T(1)};
}

/// Boundary endpoints of the hyperbolic geodesic through q1, q2 in the
/// upper half space, z1 on the q1 side. Requires a non-vertical geodesic
/// (decided on the primal values).
template <typename T>
void halfspace_endpoints(const Vec3T<T>& q1, const Vec3T<T>& q2, CplxT<T>& z1,
                         CplxT<T>& z2) {
  T dx = q2.x - q1.x, dy = q2.y - q1.y;
  T dist2 = dx * dx + dy * dy;
  T dist = sqrt(dist2);
  // chord coordinates: s measured from q1's projection along e = d/|d|
  T s2 = dist;
  T s0 = (s2 * s2 + q2.z * q2.z - q1.z * q1.z) / (T(2) * s2);
  T radius = sqrt(s0 * s0 + q1.z * q1.z);
  T ex = dx / dist, ey = dy / dist;
  T sa = s0 - radius, sb = s0 + radius;
  z1 = {q1.x + sa * ex, q1.y + sa * ey};
  z2 = {q1.x + sb * ex, q1.y + sb * ey};
}

inline bool geodesic_is_vertical(const Eigen::Vector3d& q1, const Eigen::Vector3d& q2) {
  double scale = std::max({1.0, q1.norm(), q2.norm()});
  return std::hypot(q2.x() - q1.x(), q2.y() - q1.y()) < 1e-13 * scale;
}

/// Unit tangent vector at q1 to the geodesic through q1 and q2, pointing
/// away from q2 (i.e. toward the q1-side endpoint z1).
template <typename T>
Vec3T<T> geodesic_unit_tangent_away(const Vec3T<T>& q1, const Vec3T<T>& q2) {
  T dx = q2.x - q1.x, dy = q2.y - q1.y;
  T dist = sqrt(dx * dx + dy * dy);
  T s2 = dist;
  T s0 = (s2 * s2 + q2.z * q2.z - q1.z * q1.z) / (T(2) * s2);
  T radius = sqrt(s0 * s0 + q1.z * q1.z);
  T ex = dx / dist, ey = dy / dist;
  // toward q2 the tangent is (h1 e, s0)/radius; flip it
  T tx = -q1.z * ex / radius, ty = -q1.z * ey / radius, tz = -s0 / radius;
  return {tx, ty, tz};
}

// ---------------------------------------------------------------------------
// Endpoints, propagator forms
// ---------------------------------------------------------------------------

struct GeodesicEndpoints {
  Model model = Model::halfspace;
  BoundaryPoint z1, z2;          // halfspace representation
  Eigen::Vector3d s1, s2;        // ball representation (unit vectors)
};

GeodesicEndpoints geodesic_endpoints(const ConfigPoint& cfg);

/// Tangent vector to Conf_2: a perturbation of q1 and of q2.
struct ConfTangent {
  Eigen::Vector3d dq1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d dq2 = Eigen::Vector3d::Zero();
};

/// P0 = r^* omega / 2 pi i evaluated on two tangent vectors of Conf_2,
/// by exact forward-mode differentiation of the endpoint map.
std::complex<double> eval_p0_full(const ConfigPoint& cfg, const ConfTangent& v,
                                  const ConfTangent& w);

/// Convenience: P0 on (v1 at q1, v2 at q2).
std::complex<double> eval_p0(const ConfigPoint& cfg, const Eigen::Vector3d& v1,
                             const Eigen::Vector3d& v2);

std::complex<double> eval_p0bar_full(const ConfigPoint& cfg, const ConfTangent& v,
                                     const ConfTangent& w);
std::complex<double> eval_p0bar(const ConfigPoint& cfg, const Eigen::Vector3d& v1,
                                const Eigen::Vector3d& v2);

/// P1 = r1^* omega_{S^2} / 4 pi on the upper half space; r1 is the unit
/// tangent at q1, oriented so that the boundary chart expression
/// (1/4 pi i)(du/u - dubar/ubar) dt1 is reproduced. Rejects ball input.
double eval_p1_full(const ConfigPoint& cfg, const ConfTangent& v, const ConfTangent& w);
double eval_p1(const ConfigPoint& cfg, const Eigen::Vector3d& v1,
               const Eigen::Vector3d& v2);

/// Endpoint chart values with derivatives along the six ambient
/// coordinates (q1x, q1y, q1h, q2x, q2y, q2h). Each endpoint is reported
/// in the z chart or, when near infinity, the inverted chart w = 1/z.
struct EndpointJet {
  std::complex<double> zeta1, zeta2;
  bool inv1 = false, inv2 = false;
  std::array<std::complex<double>, 6> dzeta1{}, dzeta2{};
};

EndpointJet endpoint_jet(const ConfigPoint& cfg);

/// Scalar K with P0 = K dzeta1 ^ dzeta2 in the jet's chart pair
/// (the 1/2 pi i and the inverted-chart sign are folded in).
std::complex<double> p0_chart_factor(const EndpointJet& jet);

/// r1 (unit tangent at q1 away from q2, halfspace) with its derivative
/// matrix along the six ambient coordinates.
struct TangentJet {
  Eigen::Vector3d r1;
  Eigen::Matrix<double, 3, 6> d;
};

TangentJet r1_jet(const ConfigPoint& cfg);

// ---------------------------------------------------------------------------
// Half-space configuration chart
// ---------------------------------------------------------------------------

/// Coordinates (z, u, t1, t2) on Conf_2(H^3): endpoints z and z+u,
/// vertical projections z + t_i u, heights |u| sqrt(t_i (1 - t_i)).
struct HalfspaceCoords {
  std::complex<double> z{0, 0}, u{0, 0};
  double t1 = 0, t2 = 0;
  bool vertical = false;          // distinguished chart: z is the foot,
  double h1 = 0, h2 = 0;          // heights stored explicitly
};

HalfspaceCoords to_halfspace_coords(const ConfigPoint& cfg);
ConfigPoint from_halfspace_coords(const HalfspaceCoords& hc);

// ---------------------------------------------------------------------------
// Cutoff
// ---------------------------------------------------------------------------

struct CutoffSpec {
  Expr ell;          // positive function of the boundary chart (x, y)
  double epsilon = 1e-3;
};

/// Theta_l: 0 iff the boundary distance is at most
/// epsilon (l(z1) + l(z2)) / 2. Spherical distance for the ball,
/// Euclidean for the half space.
int cutoff_theta(const CutoffSpec& spec, Model model, const BoundaryPoint& z1,
                 const BoundaryPoint& z2);

/// Checks strict positivity of the cutoff profile on a sampled grid.
bool cutoff_positive(const CutoffSpec& spec, double extent = 10.0, int grid = 41);

// ---------------------------------------------------------------------------
// Hyperbolic isometries (for tests and equivariance checks)
// ---------------------------------------------------------------------------

/// Orientation-preserving isometry of H^3, an SL(2,C) element acting via
/// quaternions: q -> (a q + b)(c q + d)^{-1}.
struct Mobius {
  std::complex<double> a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};
};

Eigen::Vector3d mobius_apply(const Mobius& g, const Eigen::Vector3d& q);
BoundaryPoint mobius_apply_boundary(const Mobius& g, const BoundaryPoint& z);
/// Pushforward of a tangent vector at q.
Eigen::Vector3d mobius_push(const Mobius& g, const Eigen::Vector3d& q,
                            const Eigen::Vector3d& v);
Mobius random_mobius(std::uint64_t seed, double spread = 0.6);

/// Isometry of the ball model conjugated from the half space.
Eigen::Vector3d ball_isometry_apply(const Mobius& g, const Eigen::Vector3d& q);
Eigen::Vector3d ball_isometry_push(const Mobius& g, const Eigen::Vector3d& q,
                                   const Eigen::Vector3d& v);

}  // namespace gricci
