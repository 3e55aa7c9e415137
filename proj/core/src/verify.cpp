#include "gricci/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "gricci/dual.hpp"
#include "gricci/quadrature.hpp"
#include "gricci/rng.hpp"

namespace gricci {

namespace {

using Cd = std::complex<double>;

// Orientation constant of Conf_2(H^3) relative to the chart basis order
// (Re z, Im z, Re u, Im u, t1, t2): fixed once by matching the sign of
// the constant-ratio cutoff case against lemma_rhs, locked by a test.
constexpr double kConfOrientation = 1.0;

constexpr long long kBlock = 4096;

// ---------------------------------------------------------------------------
// Deterministic threaded MC driver: per-sample counter-based streams,
// per-block partial sums reduced in fixed order.
// ---------------------------------------------------------------------------

MCEstimate run_mc(const MCOptions& opts, const std::function<Cd(std::uint64_t)>& sample) {
  auto t0 = std::chrono::steady_clock::now();
  if (opts.n <= 0) throw std::invalid_argument("mc: sample count must be positive");
  long long nblocks = (opts.n + kBlock - 1) / kBlock;
  std::vector<Cd> block_sum(nblocks, Cd(0, 0));
  std::vector<double> block_sq(nblocks, 0.0);
  std::vector<char> block_done(nblocks, 0);
  std::atomic<long long> next{0};

  int nt = opts.threads > 0 ? opts.threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  if (nt < 1) nt = 1;

  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  auto worker = [&] {
    while (true) {
      long long b = next.fetch_add(1);
      if (b >= nblocks) break;
      if (opts.budget_seconds > 0 && b > 0 && elapsed() > opts.budget_seconds) break;
      long long lo = b * kBlock, hi = std::min(opts.n, (b + 1) * kBlock);
      Cd s(0, 0);
      double q = 0;
      for (long long i = lo; i < hi; ++i) {
        Cd v = sample(static_cast<std::uint64_t>(i));
        s += v;
        q += std::norm(v);
      }
      block_sum[b] = s;
      block_sq[b] = q;
      block_done[b] = 1;
    }
  };

  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  Cd total(0, 0);
  double sq = 0;
  long long n = 0;
  for (long long b = 0; b < nblocks; ++b) {
    if (!block_done[b]) break;
    total += block_sum[b];
    sq += block_sq[b];
    n += std::min(opts.n, (b + 1) * kBlock) - b * kBlock;
  }
  MCEstimate est;
  est.seed = opts.seed;
  est.n_samples = n;
  est.wall_time = elapsed();
  if (n > 0) {
    est.value = total / static_cast<double>(n);
    double var = std::max(0.0, sq / n - std::norm(est.value));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Form row pieces: every test form is a sum of decomposable pieces
// scale * row_1 ^ ... ^ row_deg, rows expressed in chart coordinates via
// the chart Jacobian J (3 x m) of its base point.
// ---------------------------------------------------------------------------

struct Piece {
  Cd scale{1, 0};
  std::vector<std::vector<Cd>> rows;
};

std::vector<Cd> frame_row(const Eigen::Matrix<double, 3, Eigen::Dynamic>& J, Cd cx,
                          Cd cy, Cd ch) {
  std::vector<Cd> row(J.cols());
  for (int k = 0; k < J.cols(); ++k)
    row[k] = cx * J(0, k) + cy * J(1, k) + ch * J(2, k);
  return row;
}

std::vector<Piece> form_pieces(const TestForm& form, const Eigen::Vector3d& q,
                               const Eigen::Matrix<double, 3, Eigen::Dynamic>& J) {
  std::vector<Piece> pieces;
  if (form.degree == 0) {
    Piece p;
    p.scale = form.eval0(q);
    pieces.push_back(std::move(p));
    return pieces;
  }
  if (form.degree == 1) {
    Piece p;
    std::vector<Cd> row(J.cols());
    for (int k = 0; k < J.cols(); ++k)
      row[k] = form.eval1(q, J.col(k));
    p.rows.push_back(std::move(row));
    pieces.push_back(std::move(p));
    return pieces;
  }
  // degree 2: dz^dzbar, dz^dh, dzbar^dh pieces
  auto dz = [&] { return frame_row(J, Cd(1, 0), Cd(0, 1), Cd(0, 0)); };
  auto dzb = [&] { return frame_row(J, Cd(1, 0), Cd(0, -1), Cd(0, 0)); };
  auto dh = [&] { return frame_row(J, Cd(0, 0), Cd(0, 0), Cd(1, 0)); };
  if (!form.cpm.is_zero()) {
    Piece p;
    p.scale = form.cpm.eval(q);
    p.rows = {dz(), dzb()};
    pieces.push_back(std::move(p));
  }
  if (!form.cph.is_zero()) {
    Piece p;
    p.scale = form.cph.eval(q);
    p.rows = {dz(), dh()};
    pieces.push_back(std::move(p));
  }
  if (!form.cmh.is_zero()) {
    Piece p;
    p.scale = form.cmh.eval(q);
    p.rows = {dzb(), dh()};
    pieces.push_back(std::move(p));
  }
  if (pieces.empty()) pieces.push_back(Piece{Cd(0, 0), {}});
  return pieces;
}

/// Sum over piece choices of scale products times the determinant of the
/// fixed rows stacked with the chosen form rows.
Cd piece_determinant(const std::vector<std::vector<Cd>>& fixed_rows,
                     const std::vector<std::vector<Piece>>& form_pieces_list, int dim) {
  Cd total(0, 0);
  std::vector<std::size_t> choice(form_pieces_list.size(), 0);
  while (true) {
    Cd scale(1, 0);
    int nrows = static_cast<int>(fixed_rows.size());
    for (std::size_t i = 0; i < choice.size(); ++i) {
      const Piece& p = form_pieces_list[i][choice[i]];
      scale *= p.scale;
      nrows += static_cast<int>(p.rows.size());
    }
    if (scale != Cd(0, 0)) {
      if (nrows != dim)
        throw std::logic_error("piece_determinant: row count does not match dimension");
      Eigen::MatrixXcd m(dim, dim);
      int r = 0;
      for (const auto& row : fixed_rows) {
        for (int k = 0; k < dim; ++k) m(r, k) = row[k];
        ++r;
      }
      for (std::size_t i = 0; i < choice.size(); ++i)
        for (const auto& row : form_pieces_list[i][choice[i]].rows) {
          for (int k = 0; k < dim; ++k) m(r, k) = row[k];
          ++r;
        }
      // normalize rows so the LU pivots stay in range; subnormal rows would
      // otherwise make |pivot|^2 underflow and produce 0/0 inside the solver
      double mags = 1.0;
      bool zero_row = false;
      for (int rr = 0; rr < dim; ++rr) {
        double mr = m.row(rr).cwiseAbs().maxCoeff();
        if (mr == 0.0) {
          zero_row = true;
          break;
        }
        m.row(rr) /= mr;
        mags *= mr;
      }
      if (!zero_row) total += scale * mags * m.determinant();
    }
    std::size_t j = 0;
    for (; j < choice.size(); ++j) {
      if (++choice[j] < form_pieces_list[j].size()) break;
      choice[j] = 0;
    }
    if (j == choice.size()) break;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Shell sampler in the (z, u, t1, t2) chart
// ---------------------------------------------------------------------------

struct GridRange {
  double lo = 0, hi = 0;
};

GridRange expr_range(const Expr& e, double x0, double x1, double y0, double y1,
                     int grid = 41) {
  GridRange r{std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      double v = e.eval(x0 + (x1 - x0) * i / (grid - 1), y0 + (y1 - y0) * j / (grid - 1));
      if (!(v > 0)) throw std::invalid_argument("cutoff profile must be positive");
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  return r;
}

bool exprs_identical(const Expr& a, const Expr& b, double x0, double x1, double y0,
                     double y1, int grid = 41) {
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      double x = x0 + (x1 - x0) * i / (grid - 1);
      double y = y0 + (y1 - y0) * j / (grid - 1);
      double va = a.eval(x, y), vb = b.eval(x, y);
      if (std::abs(va - vb) > 1e-14 * std::max({1.0, std::abs(va), std::abs(vb)}))
        return false;
    }
  return true;
}

struct ShellSample {
  ConfigPoint cfg;
  int delta_theta = 0;      // Theta_{eps l1} - Theta_{eps l2}
  double weight = 0;        // 1 / pdf
  Eigen::Matrix<double, 3, Eigen::Dynamic> j1, j2;  // chart Jacobians (3 x 6)
};

struct ShellSampler {
  double x0, x1, y0, y1;    // z box
  double rmin, rmax;        // |u| shell
  double log_ratio;
  CutoffSpec spec1, spec2;

  ShellSampler(const Eigen::AlignedBox3d& support, const Expr& ell1, const Expr& ell2,
               double epsilon) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    double margin = 0;
    x0 = support.min().x();
    x1 = support.max().x();
    y0 = support.min().y();
    y1 = support.max().y();
    GridRange r1 = expr_range(ell1, x0 - 1, x1 + 1, y0 - 1, y1 + 1);
    GridRange r2 = expr_range(ell2, x0 - 1, x1 + 1, y0 - 1, y1 + 1);
    rmin = 0.999 * epsilon * std::min(r1.lo, r2.lo);
    rmax = 1.001 * epsilon * std::max(r1.hi, r2.hi);
    log_ratio = std::log(rmax / rmin);
    margin = 2 * rmax;
    x0 -= margin; x1 += margin; y0 -= margin; y1 += margin;
    spec1 = CutoffSpec{ell1, epsilon};
    spec2 = CutoffSpec{ell2, epsilon};
  }

  bool draw(RandomStream& rng, ShellSample& out) const {
    double zx = x0 + (x1 - x0) * rng.next_double();
    double zy = y0 + (y1 - y0) * rng.next_double();
    double r = rmin * std::exp(log_ratio * rng.next_double());
    double phi = 2 * M_PI * rng.next_double();
    double ux = r * std::cos(phi), uy = r * std::sin(phi);
    double ta = rng.next_double_pos(), tb = rng.next_double_pos();
    if (ta == tb) return false;
    double t1 = std::min(ta, tb), t2 = std::max(ta, tb);
    if (t1 >= 1.0 || t2 >= 1.0) return false;

    BoundaryPoint b1{{zx, zy}, false}, b2{{zx + ux, zy + uy}, false};
    out.delta_theta = cutoff_theta(spec1, Model::halfspace, b1, b2) -
                      cutoff_theta(spec2, Model::halfspace, b1, b2);
    if (out.delta_theta == 0) return false;

    using D6 = Dual<6>;
    D6 dzx = D6::seed(zx, 0), dzy = D6::seed(zy, 1);
    D6 dux = D6::seed(ux, 2), duy = D6::seed(uy, 3);
    D6 dt1 = D6::seed(t1, 4), dt2 = D6::seed(t2, 5);
    D6 au = sqrt(dux * dux + duy * duy);
    D6 q1x = dzx + dt1 * dux, q1y = dzy + dt1 * duy;
    D6 q1h = au * sqrt(dt1 * (D6(1) - dt1));
    D6 q2x = dzx + dt2 * dux, q2y = dzy + dt2 * duy;
    D6 q2h = au * sqrt(dt2 * (D6(1) - dt2));

    out.cfg.model = Model::halfspace;
    out.cfg.q1 = {q1x.v, q1y.v, q1h.v};
    out.cfg.q2 = {q2x.v, q2y.v, q2h.v};
    out.j1.resize(3, 6);
    out.j2.resize(3, 6);
    for (int k = 0; k < 6; ++k) {
      out.j1(0, k) = q1x.d[k];
      out.j1(1, k) = q1y.d[k];
      out.j1(2, k) = q1h.d[k];
      out.j2(0, k) = q2x.d[k];
      out.j2(1, k) = q2y.d[k];
      out.j2(2, k) = q2h.d[k];
    }
    // pdf = (1/area) * 1/(2 pi L r^2) * 2 (ordered t pair)
    out.weight = (x1 - x0) * (y1 - y0) * 2 * M_PI * log_ratio * r * r / 2.0;
    return true;
  }
};

std::vector<Cd> chart_gradient(const std::array<Cd, 6>& ambient,
                               const Eigen::Matrix<double, 3, Eigen::Dynamic>& j1,
                               const Eigen::Matrix<double, 3, Eigen::Dynamic>& j2) {
  std::vector<Cd> g(6, Cd(0, 0));
  for (int k = 0; k < 6; ++k) {
    for (int m = 0; m < 3; ++m) {
      g[k] += ambient[m] * j1(m, k);
      g[k] += ambient[3 + m] * j2(m, k);
    }
  }
  return g;
}

std::vector<Cd> conj_row(const std::vector<Cd>& r) {
  std::vector<Cd> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = std::conj(r[i]);
  return out;
}

std::vector<Cd> scale_row(const std::vector<Cd>& r, Cd s) {
  std::vector<Cd> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = s * r[i];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lemma integrals
// ---------------------------------------------------------------------------

MCEstimate lemma_lhs(const TestForm& alpha, const TestForm& beta, const Expr& ell1,
                     const Expr& ell2, double epsilon, const MCOptions& opts) {
  validate_form(alpha);
  validate_form(beta);
  if (alpha.degree + beta.degree != 2)
    throw std::invalid_argument("lemma_lhs: form degrees must sum to 2");
  Eigen::AlignedBox3d support = alpha.support();
  support.extend(beta.support());
  if (exprs_identical(ell1, ell2, support.min().x() - 1, support.max().x() + 1,
                      support.min().y() - 1, support.max().y() + 1)) {
    MCEstimate est;
    est.seed = opts.seed;
    est.n_samples = opts.n;
    return est;  // zero-measure difference region
  }
  ShellSampler sampler(support, ell1, ell2, epsilon);

  auto sample = [&](std::uint64_t idx) -> Cd {
    RandomStream rng(opts.seed, idx);
    ShellSample s;
    if (!sampler.draw(rng, s)) return Cd(0, 0);
    EndpointJet jet = endpoint_jet(s.cfg);
    Cd kf = p0_chart_factor(jet);
    std::vector<Cd> g1 = chart_gradient(jet.dzeta1, s.j1, s.j2);
    std::vector<Cd> g2 = chart_gradient(jet.dzeta2, s.j1, s.j2);
    std::vector<std::vector<Cd>> fixed;
    fixed.push_back(g1);
    fixed.push_back(scale_row(g2, kf));
    fixed.push_back(conj_row(g1));
    fixed.push_back(scale_row(conj_row(g2), std::conj(kf)));
    std::vector<std::vector<Piece>> pieces;
    pieces.push_back(form_pieces(alpha, s.cfg.q1, s.j1));
    pieces.push_back(form_pieces(beta, s.cfg.q2, s.j2));
    Cd det = piece_determinant(fixed, pieces, 6);
    return kConfOrientation * static_cast<double>(s.delta_theta) * det * s.weight;
  };
  return run_mc(opts, sample);
}

double lemma_rhs(const TestForm& alpha, const TestForm& beta, const Expr& ell1,
                 const Expr& ell2, double rel_tol) {
  validate_form(alpha);
  validate_form(beta);
  if (alpha.degree != 1 || beta.degree != 1) return 0.0;
  Eigen::AlignedBox3d sa = alpha.support(), sb = beta.support();
  Eigen::AlignedBox3d box = sa.intersection(sb);
  if (box.isEmpty()) return 0.0;
  auto integrand = [&](double x, double y) -> Cd {
    Eigen::Vector3d q(x, y, 0.0);
    Cd ap = alpha.aplus.eval(q), am = alpha.aminus.eval(q);
    Cd bp = beta.aplus.eval(q), bm = beta.aminus.eval(q);
    double l1 = ell1.eval(x, y), l2 = ell2.eval(x, y);
    return -std::log(l1 / l2) / (2 * M_PI) * 2.0 * (ap * bm + am * bp);
  };
  Cd crude = adaptive_quad_2d(integrand, box.min().x(), box.max().x(), box.min().y(),
                              box.max().y(), 1e-5);
  double abs_tol = std::max(1e-13, rel_tol * std::abs(crude));
  Cd value = adaptive_quad_2d(integrand, box.min().x(), box.max().x(), box.min().y(),
                              box.max().y(), abs_tol);
  return value.real();
}

double boundary_pairing(const TestForm& alpha, const TestForm& beta, double rel_tol) {
  validate_form(alpha);
  validate_form(beta);
  if (alpha.degree != 1 || beta.degree != 1) return 0.0;
  Eigen::AlignedBox3d box = alpha.support().intersection(beta.support());
  if (box.isEmpty()) return 0.0;
  auto integrand = [&](double x, double y) -> Cd {
    Eigen::Vector3d q(x, y, 0.0);
    Cd ap = alpha.aplus.eval(q), am = alpha.aminus.eval(q);
    Cd bp = beta.aplus.eval(q), bm = beta.aminus.eval(q);
    return 2.0 * (ap * bm + am * bp);
  };
  Cd crude = adaptive_quad_2d(integrand, box.min().x(), box.max().x(), box.min().y(),
                              box.max().y(), 1e-5);
  double abs_tol = std::max(1e-13, rel_tol * std::abs(crude));
  return adaptive_quad_2d(integrand, box.min().x(), box.max().x(), box.min().y(),
                          box.max().y(), abs_tol)
      .real();
}

MCEstimate courant_lhs(const TestForm& alpha, const Expr& ell1, const Expr& ell2,
                       double epsilon, const MCOptions& opts) {
  validate_form(alpha);
  if (alpha.degree != 2)
    throw std::invalid_argument("courant_lhs: alpha must have degree 2");
  Eigen::AlignedBox3d support = alpha.support();
  if (exprs_identical(ell1, ell2, support.min().x() - 1, support.max().x() + 1,
                      support.min().y() - 1, support.max().y() + 1)) {
    MCEstimate est;
    est.seed = opts.seed;
    est.n_samples = opts.n;
    return est;
  }
  ShellSampler sampler(support, ell1, ell2, epsilon);

  auto sample = [&](std::uint64_t idx) -> Cd {
    RandomStream rng(opts.seed, idx);
    ShellSample s;
    if (!sampler.draw(rng, s)) return Cd(0, 0);
    EndpointJet jet = endpoint_jet(s.cfg);
    Cd kf = p0_chart_factor(jet);
    std::vector<Cd> g1 = chart_gradient(jet.dzeta1, s.j1, s.j2);
    std::vector<Cd> g2 = chart_gradient(jet.dzeta2, s.j1, s.j2);

    // P1 = (1/4pi)(e . dr1) ^ (f . dr1) for any oriented orthonormal
    // frame (e, f, n) with n = r1
    TangentJet tj = r1_jet(s.cfg);
    Eigen::Vector3d n = tj.r1;
    Eigen::Vector3d e = std::abs(n.z()) < 0.9 ? Eigen::Vector3d(0, 0, 1).cross(n)
                                              : Eigen::Vector3d(1, 0, 0).cross(n);
    e.normalize();
    Eigen::Vector3d f = n.cross(e);
    Eigen::Matrix<double, 1, 6> de = e.transpose() * tj.d;
    Eigen::Matrix<double, 1, 6> df = f.transpose() * tj.d;
    std::array<Cd, 6> de_a, df_a;
    for (int k = 0; k < 6; ++k) {
      de_a[k] = de(0, k);
      df_a[k] = df(0, k);
    }
    std::vector<Cd> re = chart_gradient(de_a, s.j1, s.j2);
    std::vector<Cd> rf = chart_gradient(df_a, s.j1, s.j2);

    std::vector<std::vector<Cd>> fixed;
    fixed.push_back(g1);
    fixed.push_back(scale_row(g2, kf));
    fixed.push_back(re);
    fixed.push_back(scale_row(rf, Cd(1.0 / (4 * M_PI), 0)));
    std::vector<std::vector<Piece>> pieces;
    pieces.push_back(form_pieces(alpha, s.cfg.q2, s.j2));
    Cd det = piece_determinant(fixed, pieces, 6);
    return kConfOrientation * static_cast<double>(s.delta_theta) * det * s.weight;
  };
  return run_mc(opts, sample);
}

std::complex<double> courant_rhs(const TestForm& alpha, const Expr& ell1,
                                 const Expr& ell2, double rel_tol) {
  validate_form(alpha);
  if (alpha.degree != 2)
    throw std::invalid_argument("courant_rhs: alpha must have degree 2");
  Eigen::AlignedBox3d box = alpha.support();
  static const Eigen::Vector3d ex(1, 0, 0), ey(0, 1, 0);
  auto integrand = [&](double x, double y) -> Cd {
    Eigen::Vector3d q(x, y, 0.0);
    double l1 = ell1.eval(x, y), l2 = ell2.eval(x, y);
    return std::log(l1 / l2) * alpha.eval2(q, ex, ey);
  };
  Cd crude = adaptive_quad_2d(integrand, box.min().x(), box.max().x(), box.min().y(),
                              box.max().y(), 1e-5);
  double abs_tol = std::max(1e-13, rel_tol * std::abs(crude));
  Cd value = adaptive_quad_2d(integrand, box.min().x(), box.max().x(), box.min().y(),
                              box.max().y(), abs_tol);
  return -value / (Cd(0, 1) * 4.0 * M_PI);
}

// ---------------------------------------------------------------------------
// Convergence scan
// ---------------------------------------------------------------------------

namespace {

bool disks_have_common_point(const std::vector<Eigen::Vector3d>& disks) {
  // disks: (cx, cy, r); intersection of closed disks is nonempty iff some
  // center or some pairwise circle-intersection point lies in all of them
  const double tol = 1e-12;
  auto inside_all = [&](double px, double py) {
    for (const auto& d : disks) {
      double dx = px - d.x(), dy = py - d.y();
      if (dx * dx + dy * dy > d.z() * d.z() + tol) return false;
    }
    return true;
  };
  for (const auto& d : disks)
    if (inside_all(d.x(), d.y())) return true;
  int n = static_cast<int>(disks.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double dx = disks[j].x() - disks[i].x(), dy = disks[j].y() - disks[i].y();
      double d2 = dx * dx + dy * dy;
      double d = std::sqrt(d2);
      double r1 = disks[i].z(), r2 = disks[j].z();
      if (d > r1 + r2 || d < std::abs(r1 - r2) || d == 0) continue;
      double a = (d2 + r1 * r1 - r2 * r2) / (2 * d);
      double h2 = r1 * r1 - a * a;
      if (h2 < 0) continue;
      double h = std::sqrt(h2);
      double mx = disks[i].x() + a * dx / d, my = disks[i].y() + a * dy / d;
      if (inside_all(mx - h * dy / d, my + h * dx / d)) return true;
      if (inside_all(mx + h * dy / d, my - h * dx / d)) return true;
    }
  return false;
}

bool in_tube(const std::vector<Eigen::Vector3d>& points, double eps) {
  std::vector<Eigen::Vector3d> disks;
  disks.reserve(points.size());
  for (const auto& q : points) {
    if (q.z() > eps) return false;
    disks.emplace_back(q.x(), q.y(), std::sqrt(eps * eps - q.z() * q.z()));
  }
  return disks_have_common_point(disks);
}

}  // namespace

ScanResult convergence_scan(int n_vertices, const std::vector<TestForm>& forms,
                            const std::vector<double>& epsilons,
                            const MCOptions& opts) {
  if (n_vertices < 2 || n_vertices > 5)
    throw std::invalid_argument("convergence_scan: n_vertices must be in 2..5");
  if (static_cast<int>(forms.size()) != n_vertices)
    throw std::invalid_argument("convergence_scan: one form per vertex");
  int deg_sum = 0;
  for (const auto& f : forms) {
    validate_form(f);
    deg_sum += f.degree;
  }
  if (deg_sum != n_vertices)
    throw std::invalid_argument("convergence_scan: form degrees must sum to n_vertices");
  if (epsilons.size() < 4)
    throw std::invalid_argument("convergence_scan: need at least 4 epsilons for a fit");
  std::vector<double> eps = epsilons;
  std::sort(eps.begin(), eps.end());

  const int n = n_vertices;
  const int dim = 3 * n;
  Eigen::AlignedBox3d support = forms[0].support();
  for (const auto& f : forms) support.extend(f.support());

  ScanResult result;
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
    double ea = eps[k], eb = eps[k + 1];
    // fixed box and a k-independent random stream: adjacent pairs see the
    // same dimensionless configurations (dilation invariance), so their MC
    // fluctuations are correlated and largely cancel in the slope fit
    double margin = 2 * eps.back();
    double x0 = support.min().x() - margin, x1 = support.max().x() + margin;
    double y0 = support.min().y() - margin, y1 = support.max().y() + margin;
    double area = (x1 - x0) * (y1 - y0);
    // log-radial chain proposal: the loop integrand carries a 1/r^2
    // propagator singularity on every edge, so uniform sampling has
    // divergent variance; edge lengths drawn with density ~ 1/r tame it.
    // Configurations with an edge below rmin are excised (O(rmin) bias).
    const double rmin = 1e-5 * eb, rmax = 4 * eb;
    const double edge_c = 1.0 / (4 * M_PI * std::log(rmax / rmin));

    auto sample = [&, ea, eb, x0, x1, y0, y1, area, rmin, rmax,
                   edge_c](std::uint64_t idx) -> Cd {
      RandomStream rng(opts.seed, idx);
      int root = static_cast<int>(rng.next_double() * n);
      if (root >= n) root = n - 1;
      std::vector<Eigen::Vector3d> q(n);
      q[root] = {x0 + (x1 - x0) * rng.next_double(), y0 + (y1 - y0) * rng.next_double(),
                 eb * rng.next_double_pos()};
      for (int s = 1; s < n; ++s) {
        int v = (root + s) % n;
        double nx = rng.next_normal(), ny = rng.next_normal(), nz = rng.next_normal();
        double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (norm == 0) return Cd(0, 0);
        double rad = rmin * std::pow(rmax / rmin, rng.next_double());
        q[v] = q[(root + s - 1) % n] + rad / norm * Eigen::Vector3d(nx, ny, nz);
        if (q[v].z() <= 0) return Cd(0, 0);
      }
      if (!in_tube(q, eb) || in_tube(q, ea)) return Cd(0, 0);
      std::vector<double> edge_len(n);
      for (int i = 0; i < n; ++i) {
        edge_len[i] = (q[i] - q[(i + 1) % n]).norm();
        if (edge_len[i] < rmin) return Cd(0, 0);
      }
      // mixture density over the n cyclic chains (chain rooted at j uses
      // every loop edge except (j-1, j))
      double dens = 0;
      for (int j = 0; j < n; ++j) {
        if (q[j].x() < x0 || q[j].x() > x1 || q[j].y() < y0 || q[j].y() > y1 ||
            q[j].z() > eb)
          continue;
        double pj = 1.0 / (area * eb);
        for (int i = 0; i < n; ++i) {
          if (i == (j + n - 1) % n) continue;
          double r = edge_len[i];
          if (r > rmax) {
            pj = 0;
            break;
          }
          pj *= edge_c / (r * r * r);
        }
        dens += pj;
      }
      dens /= n;
      if (!(dens > 0)) return Cd(0, 0);
      double weight = 1.0 / dens;

      // loop of propagators: P0 on edges (i, i+1), P0bar on the closing edge
      std::vector<std::vector<Cd>> fixed;
      for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        ConfigPoint cfg;
        cfg.model = Model::halfspace;
        cfg.q1 = q[i];
        cfg.q2 = q[j];
        EndpointJet jet = endpoint_jet(cfg);
        Cd kf = p0_chart_factor(jet);
        std::vector<Cd> g1(dim, Cd(0, 0)), g2(dim, Cd(0, 0));
        for (int m = 0; m < 3; ++m) {
          g1[3 * i + m] += jet.dzeta1[m];
          g1[3 * j + m] += jet.dzeta1[3 + m];
          g2[3 * i + m] += jet.dzeta2[m];
          g2[3 * j + m] += jet.dzeta2[3 + m];
        }
        bool closing = (i == n - 1) && n > 1;
        if (closing) {
          fixed.push_back(conj_row(g1));
          fixed.push_back(scale_row(conj_row(g2), std::conj(kf)));
        } else {
          fixed.push_back(g1);
          fixed.push_back(scale_row(g2, kf));
        }
      }
      std::vector<std::vector<Piece>> pieces;
      for (int i = 0; i < n; ++i) {
        Eigen::Matrix<double, 3, Eigen::Dynamic> J =
            Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, dim);
        for (int m = 0; m < 3; ++m) J(m, 3 * i + m) = 1.0;
        pieces.push_back(form_pieces(forms[i], q[i], J));
      }
      Cd det = piece_determinant(fixed, pieces, dim);
      return det * weight;
    };

    ScanPoint pt;
    pt.epsilon = std::sqrt(ea * eb);
    pt.delta = run_mc(opts, sample);
    result.points.push_back(pt);
  }

  // least-squares slope of log|delta| vs log eps
  int m = static_cast<int>(result.points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : result.points) {
    double mag = std::abs(p.delta.value);
    if (!(mag > 0)) continue;
    double x = std::log(p.epsilon), y = std::log(mag);
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 3) throw std::runtime_error("convergence_scan: too few usable points");
  double denom = used * sxx - sx * sx;
  result.slope = (used * sxy - sx * sy) / denom;
  double intercept = (sy - result.slope * sx) / used;
  double ss = 0;
  for (auto [x, y] : pts) {
    double r = y - (intercept + result.slope * x);
    ss += r * r;
  }
  if (used > 2)
    result.slope_ci = std::sqrt(ss / (used - 2) / (sxx - sx * sx / used));
  (void)m;
  return result;
}

}  // namespace gricci
