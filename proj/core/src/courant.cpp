#include "gricci/courant.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>

namespace gricci {

CourantData::CourantData(int base_dim, Eigen::MatrixXd fiber_pairing,
                         std::vector<Polynomial> c_poly,
                         std::vector<Polynomial> rho_poly)
    : base_dim_(base_dim),
      fiber_dim_(static_cast<int>(fiber_pairing.rows())),
      eta_(std::move(fiber_pairing)),
      c_poly_(std::move(c_poly)),
      rho_poly_(std::move(rho_poly)) {
  if (base_dim_ < 1) throw std::invalid_argument("CourantData: base_dim must be >= 1");
  if (fiber_dim_ < 1 || eta_.cols() != fiber_dim_)
    throw std::invalid_argument("CourantData: fiber pairing must be square");
  if (fiber_dim_ > 31) throw std::invalid_argument("CourantData: fiber dimension too large");
  size_t nc = static_cast<size_t>(fiber_dim_) * fiber_dim_ * fiber_dim_;
  if (c_poly_.size() != nc)
    throw std::invalid_argument("CourantData: c_poly must have fiber_dim^3 entries");
  if (rho_poly_.size() != static_cast<size_t>(base_dim_) * fiber_dim_)
    throw std::invalid_argument("CourantData: rho_poly must have base_dim*fiber_dim entries");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(eta_);
  if (svd.singularValues()(fiber_dim_ - 1) <= svd.singularValues()(0) * 1e-12)
    throw std::invalid_argument("CourantData: fiber pairing is singular");
  eta_inv_ = eta_.inverse();

  // antisymmetry must hold coefficient-wise, degrees bounded
  for (int a = 0; a < fiber_dim_; ++a)
    for (int b = 0; b < fiber_dim_; ++b)
      for (int cc = 0; cc < fiber_dim_; ++cc) {
        const Polynomial& p = c(a, b, cc);
        if (p.nvars() != base_dim_ && !p.is_zero())
          throw std::invalid_argument("CourantData: c_poly has wrong variable count");
        if (p.degree() > kMaxDegree)
          throw std::invalid_argument("CourantData: c_poly degree exceeds bound");
        if ((p + c(b, a, cc)).max_abs_coeff() > 1e-14 ||
            (p + c(a, cc, b)).max_abs_coeff() > 1e-14)
          throw std::invalid_argument("CourantData: c_poly is not totally antisymmetric");
      }
  for (const Polynomial& p : rho_poly_)
    if (p.degree() > kMaxDegree)
      throw std::invalid_argument("CourantData: rho_poly degree exceeds bound");
}

CourantData CourantData::from_algebra(const QuadraticLieAlgebra& alg, int base_dim) {
  int n = alg.dim();
  std::vector<Polynomial> c(static_cast<size_t>(n) * n * n, Polynomial(base_dim));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        c[(a * n + b) * n + cc] = Polynomial::constant(base_dim, alg.c(a, b, cc));
  std::vector<Polynomial> rho(static_cast<size_t>(base_dim) * n, Polynomial(base_dim));
  return CourantData(base_dim, alg.pairing(), std::move(c), std::move(rho));
}

QuadraticLieAlgebra CourantData::algebra_at(const Eigen::VectorXd& x) const {
  int n = fiber_dim_;
  std::vector<double> c0(static_cast<size_t>(n) * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc) c0[(a * n + b) * n + cc] = c(a, b, cc).eval(x);
  return QuadraticLieAlgebra(eta_, std::move(c0));
}

namespace {

// dotted multi-index tables: combos enumerated lexicographically, w^m each
size_t combo_count(int w, int m) {
  size_t r = 1;
  for (int i = 0; i < m; ++i) r *= w;
  return r;
}

Polynomial multi_derivative(Polynomial p, const std::vector<int>& vars) {
  for (int v : vars) p = p.derivative(v);
  return p;
}

}  // namespace

TensorFactor contract_courant(const SignedGraph& g, const CourantData& cdata,
                              const Eigen::VectorXd& x,
                              const GeneralizedMetric& metric) {
  GraphReport rep = validate_graph(g);
  if (!rep.pass)
    throw std::invalid_argument("contract_courant: invalid graph: " + rep.violations.front());

  const int n = cdata.fiber_dim();
  const int w = cdata.base_dim();
  if (x.size() != w) throw std::invalid_argument("contract_courant: x has wrong dimension");

  // split inverse fiber pairing through the metric projectors
  Eigen::MatrixXd tplus = metric.pplus() * cdata.fiber_pairing_inverse();
  Eigen::MatrixXd tminus = cdata.fiber_pairing_inverse() - tplus;

  // per-vertex derivative tables
  struct VertexTable {
    int m = 0;                  // number of incoming dotted lines
    std::vector<double> vals;   // c: [combo][a][b][c]; rho: [combo][i][a]
  };
  std::vector<VertexTable> tables(g.vertices.size());
  for (size_t vi = 0; vi < g.vertices.size(); ++vi) {
    const auto& v = g.vertices[vi];
    if (v.kind == VertexKind::leaf) continue;
    VertexTable& tb = tables[vi];
    tb.m = static_cast<int>(v.dotted_in.size());
    size_t combos = combo_count(w, tb.m);
    std::vector<int> dv(tb.m, 0);
    if (v.kind == VertexKind::c_vertex) {
      tb.vals.assign(combos * n * n * n, 0.0);
      for (size_t cm = 0; cm < combos; ++cm) {
        size_t rem = cm;
        for (int k = 0; k < tb.m; ++k) { dv[k] = static_cast<int>(rem % w); rem /= w; }
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int cc = 0; cc < n; ++cc)
              tb.vals[((cm * n + a) * n + b) * n + cc] =
                  multi_derivative(cdata.c(a, b, cc), dv).eval(x);
      }
    } else {
      tb.vals.assign(combos * w * n, 0.0);
      for (size_t cm = 0; cm < combos; ++cm) {
        size_t rem = cm;
        for (int k = 0; k < tb.m; ++k) { dv[k] = static_cast<int>(rem % w); rem /= w; }
        for (int i = 0; i < w; ++i)
          for (int a = 0; a < n; ++a)
            tb.vals[(cm * w + i) * n + a] = multi_derivative(cdata.rho(i, a), dv).eval(x);
      }
    }
  }

  TensorFactor out;
  for (int lv : g.leaves)
    out.dims.push_back(g.vertices[lv].leaf_kind == LeafKind::dotted ? w : n);
  size_t total = 1;
  for (int d : out.dims) total *= d;
  out.data.assign(std::max<size_t>(total, 1), 0.0);

  std::vector<int> fidx(g.half_edge_count(), -1);  // fiber index per solid half-edge
  std::vector<int> widx(g.half_edge_count(), -1);  // W index per dotted half-edge

  auto vertex_product = [&]() -> double {
    double prod = 1.0;
    for (size_t vi = 0; vi < g.vertices.size(); ++vi) {
      const auto& v = g.vertices[vi];
      if (v.kind == VertexKind::leaf) continue;
      const VertexTable& tb = tables[vi];
      size_t cm = 0;
      for (int k = tb.m - 1; k >= 0; --k) cm = cm * w + widx[v.dotted_in[k]];
      if (v.kind == VertexKind::c_vertex) {
        prod *= tb.vals[((cm * n + fidx[v.order[0]]) * n + fidx[v.order[1]]) * n +
                        fidx[v.order[2]]];
      } else {
        prod *= tb.vals[(cm * w + widx[v.dotted_out[0]]) * n + fidx[v.order[0]]];
      }
      if (prod == 0.0) return 0.0;
    }
    return prod;
  };

  std::function<void(size_t, double)> rec = [&](size_t ei, double wgt) {
    if (ei == g.edges.size()) {
      double prod = vertex_product();
      if (prod == 0.0) return;
      std::vector<int> li;
      li.reserve(g.leaves.size());
      for (int lv : g.leaves) {
        const auto& v = g.vertices[lv];
        if (v.leaf_kind == LeafKind::dotted) {
          int h = v.dotted_in.empty() ? v.dotted_out[0] : v.dotted_in[0];
          li.push_back(widx[h]);
        } else {
          li.push_back(fidx[v.order[0]]);
        }
      }
      out.at(li) += wgt * prod;
      return;
    }
    const auto& e = g.edges[ei];
    if (e.dotted) {
      for (int k = 0; k < w; ++k) {
        widx[e.h1] = k;
        widx[e.h2] = k;
        rec(ei + 1, wgt);
      }
    } else {
      const Eigen::MatrixXd& t = e.sign == EdgeSign::plus ? tplus : tminus;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double tij = t(i, j);
          if (tij == 0.0) continue;
          fidx[e.h1] = i;
          fidx[e.h2] = j;
          rec(ei + 1, wgt * tij);
        }
    }
  };
  rec(0, 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Graded Poisson algebra on W (+) V[1] (+) W*[2]
// ---------------------------------------------------------------------------

namespace {

struct GKey {
  std::uint32_t amask = 0;
  std::vector<int> pexp;
  bool operator<(const GKey& o) const {
    if (amask != o.amask) return amask < o.amask;
    return pexp < o.pexp;
  }
};

// sign of sorting A^S A^T into ascending order; 0 if they overlap
int merge_sign(std::uint32_t S, std::uint32_t T) {
  if (S & T) return 0;
  int inv = 0;
  for (std::uint32_t t = T; t;) {
    int b = std::countr_zero(t);
    t &= t - 1;
    inv += std::popcount(S >> (b + 1));
  }
  return (inv & 1) ? -1 : 1;
}

// left derivative sign: (-1)^{#elements of S below a}
int left_deriv_sign(std::uint32_t S, int a) {
  return (std::popcount(S & ((1u << a) - 1)) & 1) ? -1 : 1;
}

struct GradedPoly {
  int w = 0;
  std::map<GKey, Polynomial> terms;

  void add(const GKey& k, const Polynomial& p) {
    if (p.is_zero()) return;
    auto it = terms.find(k);
    if (it == terms.end())
      terms.emplace(k, p);
    else {
      it->second = it->second + p;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
};

// {f,g} = sum_i (dx_i f)(dp_i g) - (dp_i f)(dx_i g)
//       + (-1)^{|f|+1} sum_ab t^ab (dL_a f)(dL_b g)
GradedPoly bracket(const GradedPoly& f, const GradedPoly& g,
                   const Eigen::MatrixXd& t, int fiber_dim) {
  GradedPoly out;
  out.w = f.w;
  const int w = f.w;
  for (const auto& [k1, p1] : f.terms) {
    int deg1 = std::popcount(k1.amask);
    for (const auto& [k2, p2] : g.terms) {
      // x-p part
      for (int i = 0; i < w; ++i) {
        if (k2.pexp[i] > 0) {
          Polynomial dx1 = p1.derivative(i);
          if (!dx1.is_zero()) {
            int s = merge_sign(k1.amask, k2.amask);
            if (s != 0) {
              GKey k;
              k.amask = k1.amask | k2.amask;
              k.pexp = k1.pexp;
              for (int j = 0; j < w; ++j) k.pexp[j] += k2.pexp[j];
              k.pexp[i] -= 1;
              out.add(k, dx1 * p2 * (s * k2.pexp[i]));
            }
          }
        }
        if (k1.pexp[i] > 0) {
          Polynomial dx2 = p2.derivative(i);
          if (!dx2.is_zero()) {
            int s = merge_sign(k1.amask, k2.amask);
            if (s != 0) {
              GKey k;
              k.amask = k1.amask | k2.amask;
              k.pexp = k1.pexp;
              for (int j = 0; j < w; ++j) k.pexp[j] += k2.pexp[j];
              k.pexp[i] -= 1;
              out.add(k, p1 * dx2 * (-s * k1.pexp[i]));
            }
          }
        }
      }
      // A part
      int outer = (deg1 & 1) ? 1 : -1;  // (-1)^{|f|+1}
      for (int a = 0; a < fiber_dim; ++a) {
        if (!(k1.amask & (1u << a))) continue;
        std::uint32_t S1 = k1.amask & ~(1u << a);
        int sa = left_deriv_sign(k1.amask, a);
        for (int b = 0; b < fiber_dim; ++b) {
          if (!(k2.amask & (1u << b))) continue;
          double tab = t(a, b);
          if (tab == 0.0) continue;
          std::uint32_t S2 = k2.amask & ~(1u << b);
          int sb = left_deriv_sign(k2.amask, b);
          int s = merge_sign(S1, S2);
          if (s == 0) continue;
          GKey k;
          k.amask = S1 | S2;
          k.pexp = k1.pexp;
          for (int j = 0; j < w; ++j) k.pexp[j] += k2.pexp[j];
          out.add(k, p1 * p2 * (outer * sa * sb * s * tab));
        }
      }
    }
  }
  return out;
}

}  // namespace

double master_equation_residual(const CourantData& cdata,
                                const std::vector<Eigen::VectorXd>& sample_points) {
  const int n = cdata.fiber_dim();
  const int w = cdata.base_dim();

  GradedPoly C;
  C.w = w;
  // cubic part: sum_{a<b<c} c_abc(x) A^a A^b A^c
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int cc = b + 1; cc < n; ++cc) {
        GKey k;
        k.amask = (1u << a) | (1u << b) | (1u << cc);
        k.pexp.assign(w, 0);
        C.add(k, cdata.c(a, b, cc));
      }
  // anchor part: rho^i_a(x) p_i A^a
  for (int i = 0; i < w; ++i)
    for (int a = 0; a < n; ++a) {
      GKey k;
      k.amask = 1u << a;
      k.pexp.assign(w, 0);
      k.pexp[i] = 1;
      C.add(k, cdata.rho(i, a));
    }

  GradedPoly CC = bracket(C, C, cdata.fiber_pairing_inverse(), n);

  double residual = 0;
  for (const auto& [k, p] : CC.terms)
    for (const Eigen::VectorXd& x : sample_points)
      residual = std::max(residual, std::abs(p.eval(x)));
  return residual;
}

}  // namespace gricci
