#include "gricci/geometry.hpp"

#include <cmath>

#include "gricci/rng.hpp"

namespace gricci {

void validate_config(const ConfigPoint& cfg) {
  if ((cfg.q1 - cfg.q2).norm() <= 0)
    throw std::invalid_argument("config: q1 and q2 must be distinct");
  if (cfg.model == Model::ball) {
    if (cfg.q1.norm() >= 1 || cfg.q2.norm() >= 1)
      throw std::invalid_argument("config: ball points must satisfy |q| < 1");
  } else {
    if (cfg.q1.z() <= 0 || cfg.q2.z() <= 0)
      throw std::invalid_argument("config: halfspace points must have h > 0");
  }
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

template <typename T>
CplxT<T> conj(const CplxT<T>& a) {
  return {a.re, -a.im};
}

/// Chart data for the two geodesic endpoints. Each endpoint is reported
/// either in the z chart or in the inverted chart w = 1/z; the formulas
///   z1 = c1 - h1^2 d / D1,   w1 = -conj(d) / (D2 - c2 conj(d)),
///   z2 = c2 + h2^2 d / D2,   w2 =  conj(d) / (D1 + c1 conj(d)),
/// with d = c2 - c1, A_i = (|d|^2 + h_j^2 - h_i^2)/2, B_i = sqrt(A_i^2 +
/// h_i^2 |d|^2), D_i = A_i + B_i, are smooth through vertical
/// configurations (where one endpoint passes through infinity).
template <typename T>
struct Charts {
  CplxT<T> zeta1, zeta2;
  bool inv1 = false, inv2 = false;
};

template <typename T>
Charts<T> endpoint_charts(const Vec3T<T>& q1, const Vec3T<T>& q2) {
  CplxT<T> c1{q1.x, q1.y}, c2{q2.x, q2.y};
  CplxT<T> d = c2 - c1;
  CplxT<T> db = conj(d);
  T d2 = d.re * d.re + d.im * d.im;
  T h1sq = q1.z * q1.z, h2sq = q2.z * q2.z;
  T A1 = (d2 + h2sq - h1sq) / T(2);
  T A2 = (d2 + h1sq - h2sq) / T(2);
  T D1 = A1 + sqrt(A1 * A1 + h1sq * d2);
  T D2 = A2 + sqrt(A2 * A2 + h2sq * d2);

  Charts<T> ch;
  ch.inv1 = value_of(D1) < 0.1 * value_of(D2);
  ch.inv2 = value_of(D2) < 0.1 * value_of(D1);
  if (ch.inv1) {
    CplxT<T> den = CplxT<T>(D2, T(0)) - c2 * db;
    ch.zeta1 = CplxT<T>(-db.re, -db.im) / den;
  } else {
    ch.zeta1 = c1 - CplxT<T>(h1sq, T(0)) * d / CplxT<T>(D1, T(0));
  }
  if (ch.inv2) {
    CplxT<T> den = CplxT<T>(D1, T(0)) + c1 * db;
    ch.zeta2 = db / den;
  } else {
    ch.zeta2 = c2 + CplxT<T>(h2sq, T(0)) * d / CplxT<T>(D2, T(0));
  }
  return ch;
}

using D2d = Dual<2>;

Vec3T<D2d> seed_point(const Eigen::Vector3d& q, const Eigen::Vector3d& dv,
                      const Eigen::Vector3d& dw) {
  Vec3T<D2d> p;
  p.x.v = q.x(); p.x.d = {dv.x(), dw.x()};
  p.y.v = q.y(); p.y.d = {dv.y(), dw.y()};
  p.z.v = q.z(); p.z.d = {dv.z(), dw.z()};
  return p;
}

std::complex<double> primal(const CplxT<D2d>& z) { return {z.re.v, z.im.v}; }
std::complex<double> slot(const CplxT<D2d>& z, int i) { return {z.re.d[i], z.im.d[i]}; }

BoundaryPoint chart_to_boundary(std::complex<double> zeta, bool inverted) {
  BoundaryPoint b;
  if (!inverted) {
    b.z = zeta;
    return b;
  }
  if (std::abs(zeta) < 1e-300) {
    b.infinite = true;
    return b;
  }
  b.z = 1.0 / zeta;
  return b;
}

Eigen::Vector3d boundary_to_sphere(const BoundaryPoint& b) {
  if (b.infinite) return {0, 0, -1};
  double x = b.z.real(), y = b.z.imag();
  double n2 = x * x + y * y + 1.0;
  return {2 * x / n2, 2 * y / n2, 2.0 / n2 - 1.0};
}

}  // namespace

GeodesicEndpoints geodesic_endpoints(const ConfigPoint& cfg) {
  validate_config(cfg);
  Vec3T<double> q1{cfg.q1.x(), cfg.q1.y(), cfg.q1.z()};
  Vec3T<double> q2{cfg.q2.x(), cfg.q2.y(), cfg.q2.z()};
  if (cfg.model == Model::ball) {
    q1 = ball_halfspace_inversion(q1);
    q2 = ball_halfspace_inversion(q2);
  }
  Charts<double> ch = endpoint_charts(q1, q2);
  GeodesicEndpoints out;
  out.model = cfg.model;
  out.z1 = chart_to_boundary({ch.zeta1.re, ch.zeta1.im}, ch.inv1);
  out.z2 = chart_to_boundary({ch.zeta2.re, ch.zeta2.im}, ch.inv2);
  out.s1 = boundary_to_sphere(out.z1);
  out.s2 = boundary_to_sphere(out.z2);
  return out;
}

std::complex<double> eval_p0_full(const ConfigPoint& cfg, const ConfTangent& v,
                                  const ConfTangent& w) {
  validate_config(cfg);
  Vec3T<D2d> q1 = seed_point(cfg.q1, v.dq1, w.dq1);
  Vec3T<D2d> q2 = seed_point(cfg.q2, v.dq2, w.dq2);
  if (cfg.model == Model::ball) {
    q1 = ball_halfspace_inversion(q1);
    q2 = ball_halfspace_inversion(q2);
  }
  Charts<D2d> ch = endpoint_charts(q1, q2);
  std::complex<double> z1 = primal(ch.zeta1), z2 = primal(ch.zeta2);

  // omega in the four chart combinations; the inverted chart contributes
  // a sign: omega = -dw1 dz2/(1 - w1 z2)^2 etc.
  std::complex<double> den;
  double sign = 1.0;
  if (!ch.inv1 && !ch.inv2) {
    den = z1 - z2;
  } else if (ch.inv1 && !ch.inv2) {
    den = 1.0 - z1 * z2;
    sign = -1.0;
  } else if (!ch.inv1 && ch.inv2) {
    den = z1 * z2 - 1.0;
    sign = -1.0;
  } else {
    den = z1 - z2;
  }
  if (std::abs(den) < 1e-150)
    throw std::runtime_error("eval_p0: coincident geodesic endpoints");

  std::complex<double> area =
      slot(ch.zeta1, 0) * slot(ch.zeta2, 1) - slot(ch.zeta1, 1) * slot(ch.zeta2, 0);
  std::complex<double> i2pi(0.0, kTwoPi);
  return sign * area / (den * den) / i2pi;
}

std::complex<double> eval_p0(const ConfigPoint& cfg, const Eigen::Vector3d& v1,
                             const Eigen::Vector3d& v2) {
  ConfTangent v, w;
  v.dq1 = v1;
  w.dq2 = v2;
  return eval_p0_full(cfg, v, w);
}

std::complex<double> eval_p0bar_full(const ConfigPoint& cfg, const ConfTangent& v,
                                     const ConfTangent& w) {
  return std::conj(eval_p0_full(cfg, v, w));
}

std::complex<double> eval_p0bar(const ConfigPoint& cfg, const Eigen::Vector3d& v1,
                                const Eigen::Vector3d& v2) {
  return std::conj(eval_p0(cfg, v1, v2));
}

double eval_p1_full(const ConfigPoint& cfg, const ConfTangent& v, const ConfTangent& w) {
  if (cfg.model != Model::halfspace)
    throw std::invalid_argument("eval_p1: halfspace model only");
  validate_config(cfg);
  Vec3T<D2d> q1 = seed_point(cfg.q1, v.dq1, w.dq1);
  Vec3T<D2d> q2 = seed_point(cfg.q2, v.dq2, w.dq2);

  // r1 = (-h1 dx / B1, -h1 dy / B1, -A1 / B1): the unit tangent at q1
  // pointing away from q2, smooth through vertical configurations
  D2d dx = q2.x - q1.x, dy = q2.y - q1.y;
  D2d d2 = dx * dx + dy * dy;
  D2d A1 = (d2 + q2.z * q2.z - q1.z * q1.z) / D2d(2);
  D2d B1 = sqrt(A1 * A1 + q1.z * q1.z * d2);
  D2d rx = -q1.z * dx / B1, ry = -q1.z * dy / B1, rz = -A1 / B1;

  Eigen::Vector3d n(rx.v, ry.v, rz.v);
  Eigen::Vector3d a(rx.d[0], ry.d[0], rz.d[0]);
  Eigen::Vector3d b(rx.d[1], ry.d[1], rz.d[1]);
  return n.dot(a.cross(b)) / (2.0 * kTwoPi);
}

double eval_p1(const ConfigPoint& cfg, const Eigen::Vector3d& v1,
               const Eigen::Vector3d& v2) {
  ConfTangent v, w;
  v.dq1 = v1;
  w.dq2 = v2;
  return eval_p1_full(cfg, v, w);
}

EndpointJet endpoint_jet(const ConfigPoint& cfg) {
  validate_config(cfg);
  using D6 = Dual<6>;
  Vec3T<D6> q1, q2;
  q1.x = D6::seed(cfg.q1.x(), 0);
  q1.y = D6::seed(cfg.q1.y(), 1);
  q1.z = D6::seed(cfg.q1.z(), 2);
  q2.x = D6::seed(cfg.q2.x(), 3);
  q2.y = D6::seed(cfg.q2.y(), 4);
  q2.z = D6::seed(cfg.q2.z(), 5);
  if (cfg.model == Model::ball) {
    q1 = ball_halfspace_inversion(q1);
    q2 = ball_halfspace_inversion(q2);
  }
  Charts<D6> ch = endpoint_charts(q1, q2);
  EndpointJet jet;
  jet.zeta1 = {ch.zeta1.re.v, ch.zeta1.im.v};
  jet.zeta2 = {ch.zeta2.re.v, ch.zeta2.im.v};
  jet.inv1 = ch.inv1;
  jet.inv2 = ch.inv2;
  for (int k = 0; k < 6; ++k) {
    jet.dzeta1[k] = {ch.zeta1.re.d[k], ch.zeta1.im.d[k]};
    jet.dzeta2[k] = {ch.zeta2.re.d[k], ch.zeta2.im.d[k]};
  }
  return jet;
}

std::complex<double> p0_chart_factor(const EndpointJet& jet) {
  std::complex<double> den;
  double sign = 1.0;
  if (!jet.inv1 && !jet.inv2) {
    den = jet.zeta1 - jet.zeta2;
  } else if (jet.inv1 && !jet.inv2) {
    den = 1.0 - jet.zeta1 * jet.zeta2;
    sign = -1.0;
  } else if (!jet.inv1 && jet.inv2) {
    den = jet.zeta1 * jet.zeta2 - 1.0;
    sign = -1.0;
  } else {
    den = jet.zeta1 - jet.zeta2;
  }
  if (std::abs(den) < 1e-150)
    throw std::runtime_error("p0_chart_factor: coincident geodesic endpoints");
  return sign / (den * den) / std::complex<double>(0.0, kTwoPi);
}

TangentJet r1_jet(const ConfigPoint& cfg) {
  if (cfg.model != Model::halfspace)
    throw std::invalid_argument("r1_jet: halfspace model only");
  validate_config(cfg);
  using D6 = Dual<6>;
  D6 x1 = D6::seed(cfg.q1.x(), 0), y1 = D6::seed(cfg.q1.y(), 1),
     h1 = D6::seed(cfg.q1.z(), 2);
  D6 x2 = D6::seed(cfg.q2.x(), 3), y2 = D6::seed(cfg.q2.y(), 4),
     h2 = D6::seed(cfg.q2.z(), 5);
  D6 dx = x2 - x1, dy = y2 - y1;
  D6 d2 = dx * dx + dy * dy;
  D6 A1 = (d2 + h2 * h2 - h1 * h1) / D6(2);
  D6 B1 = sqrt(A1 * A1 + h1 * h1 * d2);
  D6 rx = -h1 * dx / B1, ry = -h1 * dy / B1, rz = -A1 / B1;
  TangentJet jet;
  jet.r1 = {rx.v, ry.v, rz.v};
  for (int k = 0; k < 6; ++k) {
    jet.d(0, k) = rx.d[k];
    jet.d(1, k) = ry.d[k];
    jet.d(2, k) = rz.d[k];
  }
  return jet;
}

HalfspaceCoords to_halfspace_coords(const ConfigPoint& cfg) {
  if (cfg.model != Model::halfspace)
    throw std::invalid_argument("to_halfspace_coords: halfspace model only");
  validate_config(cfg);
  HalfspaceCoords hc;
  hc.h1 = cfg.q1.z();
  hc.h2 = cfg.q2.z();
  if (geodesic_is_vertical(cfg.q1, cfg.q2)) {
    hc.vertical = true;
    hc.z = {cfg.q1.x(), cfg.q1.y()};
    hc.u = 0;
    hc.t1 = 0;
    hc.t2 = 1;
    return hc;
  }
  GeodesicEndpoints ep = geodesic_endpoints(cfg);
  std::complex<double> z1 = ep.z1.z, z2 = ep.z2.z;
  std::complex<double> u = z2 - z1;
  double u2 = std::norm(u);
  std::complex<double> c1(cfg.q1.x(), cfg.q1.y()), c2(cfg.q2.x(), cfg.q2.y());
  hc.z = z1;
  hc.u = u;
  hc.t1 = ((c1 - z1) * std::conj(u)).real() / u2;
  hc.t2 = ((c2 - z1) * std::conj(u)).real() / u2;
  return hc;
}

ConfigPoint from_halfspace_coords(const HalfspaceCoords& hc) {
  ConfigPoint cfg;
  cfg.model = Model::halfspace;
  if (hc.vertical) {
    if (!(hc.h1 > 0) || !(hc.h2 > 0) || hc.h1 == hc.h2)
      throw std::invalid_argument("halfspace coords: vertical chart needs distinct positive heights");
    cfg.q1 = {hc.z.real(), hc.z.imag(), hc.h1};
    cfg.q2 = {hc.z.real(), hc.z.imag(), hc.h2};
    return cfg;
  }
  if (hc.u == 0.0) throw std::invalid_argument("halfspace coords: u must be nonzero");
  if (!(0 < hc.t1 && hc.t1 < hc.t2 && hc.t2 < 1))
    throw std::invalid_argument("halfspace coords: need 0 < t1 < t2 < 1");
  double au = std::abs(hc.u);
  for (int i = 0; i < 2; ++i) {
    double t = i == 0 ? hc.t1 : hc.t2;
    std::complex<double> c = hc.z + t * hc.u;
    double h = au * std::sqrt(t * (1 - t));
    (i == 0 ? cfg.q1 : cfg.q2) = Eigen::Vector3d(c.real(), c.imag(), h);
  }
  return cfg;
}

namespace {

double ell_at(const Expr& ell, const BoundaryPoint& b) {
  if (b.infinite) {
    if (!ell.is_constant())
      throw std::invalid_argument("cutoff: non-constant profile at the point at infinity");
    return ell.eval(0, 0);
  }
  return ell.eval(b.z.real(), b.z.imag());
}

}  // namespace

int cutoff_theta(const CutoffSpec& spec, Model model, const BoundaryPoint& z1,
                 const BoundaryPoint& z2) {
  double l1 = ell_at(spec.ell, z1), l2 = ell_at(spec.ell, z2);
  double d;
  if (model == Model::halfspace) {
    if (z1.infinite && z2.infinite)
      d = 0;
    else if (z1.infinite || z2.infinite)
      return 1;
    else
      d = std::abs(z1.z - z2.z);
  } else {
    Eigen::Vector3d a = boundary_to_sphere(z1), b = boundary_to_sphere(z2);
    d = std::atan2(a.cross(b).norm(), a.dot(b));
  }
  return d <= 0.5 * spec.epsilon * (l1 + l2) ? 0 : 1;
}

bool cutoff_positive(const CutoffSpec& spec, double extent, int grid) {
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      double x = -extent + 2 * extent * i / (grid - 1);
      double y = -extent + 2 * extent * j / (grid - 1);
      if (!(spec.ell.eval(x, y) > 0)) return false;
    }
  return spec.epsilon > 0;
}

// ---------------------------------------------------------------------------
// Isometries
// ---------------------------------------------------------------------------

namespace {

// quaternion w + x i + y j + z k; a point of H^3 is (Re z) + (Im z) i + h j
template <typename T>
struct QuatT {
  T w{}, x{}, y{}, z{};
  friend QuatT operator+(const QuatT& a, const QuatT& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend QuatT operator*(const QuatT& a, const QuatT& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  QuatT inverse() const {
    T n = w * w + x * x + y * y + z * z;
    return {w / n, -x / n, -y / n, -z / n};
  }
};

template <typename T>
QuatT<T> quat_of(std::complex<double> c) {
  return {T(c.real()), T(c.imag()), T(0), T(0)};
}

template <typename T>
Vec3T<T> mobius_apply_t(const Mobius& g, const Vec3T<T>& p) {
  QuatT<T> q{p.x, p.y, p.z, T(0)};
  QuatT<T> num = quat_of<T>(g.a) * q + quat_of<T>(g.b);
  QuatT<T> den = quat_of<T>(g.c) * q + quat_of<T>(g.d);
  QuatT<T> r = num * den.inverse();
  return {r.w, r.x, r.y};
}

}  // namespace

Eigen::Vector3d mobius_apply(const Mobius& g, const Eigen::Vector3d& q) {
  Vec3T<double> r = mobius_apply_t(g, Vec3T<double>{q.x(), q.y(), q.z()});
  return {r.x, r.y, r.z};
}

BoundaryPoint mobius_apply_boundary(const Mobius& g, const BoundaryPoint& p) {
  BoundaryPoint out;
  if (p.infinite) {
    if (std::abs(g.c) < 1e-300) {
      out.infinite = true;
    } else {
      out.z = g.a / g.c;
    }
    return out;
  }
  std::complex<double> den = g.c * p.z + g.d;
  if (std::abs(den) < 1e-300) {
    out.infinite = true;
    return out;
  }
  out.z = (g.a * p.z + g.b) / den;
  return out;
}

Eigen::Vector3d mobius_push(const Mobius& g, const Eigen::Vector3d& q,
                            const Eigen::Vector3d& v) {
  Vec3T<Dual<1>> p;
  p.x = Dual<1>(q.x()); p.x.d[0] = v.x();
  p.y = Dual<1>(q.y()); p.y.d[0] = v.y();
  p.z = Dual<1>(q.z()); p.z.d[0] = v.z();
  Vec3T<Dual<1>> r = mobius_apply_t(g, p);
  return {r.x.d[0], r.y.d[0], r.z.d[0]};
}

Mobius random_mobius(std::uint64_t seed, double spread) {
  RandomStream rng(seed, 0x6d6f6269);
  while (true) {
    auto cnum = [&] {
      return std::complex<double>(spread * rng.next_normal(), spread * rng.next_normal());
    };
    Mobius g;
    g.a = 1.0 + cnum();
    g.b = cnum();
    g.c = cnum();
    g.d = 1.0 + cnum();
    std::complex<double> det = g.a * g.d - g.b * g.c;
    if (std::abs(det) < 0.05) continue;
    std::complex<double> s = std::sqrt(det);
    g.a /= s; g.b /= s; g.c /= s; g.d /= s;
    return g;
  }
}

Eigen::Vector3d ball_isometry_apply(const Mobius& g, const Eigen::Vector3d& q) {
  Vec3T<double> p{q.x(), q.y(), q.z()};
  Vec3T<double> r = ball_halfspace_inversion(mobius_apply_t(g, ball_halfspace_inversion(p)));
  return {r.x, r.y, r.z};
}

Eigen::Vector3d ball_isometry_push(const Mobius& g, const Eigen::Vector3d& q,
                                   const Eigen::Vector3d& v) {
  Vec3T<Dual<1>> p;
  p.x = Dual<1>(q.x()); p.x.d[0] = v.x();
  p.y = Dual<1>(q.y()); p.y.d[0] = v.y();
  p.z = Dual<1>(q.z()); p.z.d[0] = v.z();
  Vec3T<Dual<1>> r =
      ball_halfspace_inversion(mobius_apply_t(g, ball_halfspace_inversion(p)));
  return {r.x.d[0], r.y.d[0], r.z.d[0]};
}

}  // namespace gricci
