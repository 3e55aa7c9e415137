#include "gricci/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gricci {

bool SignedGraph::has_dotted() const {
  for (const auto& e : edges)
    if (e.dotted) return true;
  return false;
}

GraphReport validate_graph(const SignedGraph& g) {
  GraphReport rep;
  auto fail = [&](const std::string& msg) { rep.violations.push_back(msg); };

  const int nh = g.half_edge_count();
  std::vector<int> edge_of(nh, -1);
  for (size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    for (int h : {e.h1, e.h2}) {
      if (h < 0 || h >= nh) {
        fail("edge references unknown half-edge");
        continue;
      }
      if (edge_of[h] != -1) fail("half-edge used by two edges");
      edge_of[h] = static_cast<int>(ei);
    }
    if (e.h1 >= 0 && e.h2 >= 0 && g.half_edge_vertex[e.h1] == g.half_edge_vertex[e.h2])
      fail("tadpole: edge joins two half-edges of the same vertex");
  }
  for (int h = 0; h < nh; ++h)
    if (edge_of[h] == -1) fail("dangling half-edge");

  auto owns = [&](const std::vector<int>& list, int h) {
    return std::find(list.begin(), list.end(), h) != list.end();
  };

  std::set<int> listed_leaves(g.leaves.begin(), g.leaves.end());
  for (size_t vi = 0; vi < g.vertices.size(); ++vi) {
    const auto& v = g.vertices[vi];
    for (int h : v.order)
      if (h < 0 || h >= nh || g.half_edge_vertex[h] != static_cast<int>(vi))
        fail("cyclic order references a foreign half-edge");
    switch (v.kind) {
      case VertexKind::c_vertex:
        if (v.order.size() != 3) fail("c-vertex must have exactly 3 solid half-edges");
        if (!v.dotted_out.empty()) fail("c-vertex cannot emit dotted edges");
        break;
      case VertexKind::rho_vertex:
        if (v.order.size() != 1) fail("rho-vertex must have exactly 1 solid half-edge");
        if (v.dotted_out.size() != 1) fail("rho-vertex must have exactly 1 outgoing dotted half-edge");
        break;
      case VertexKind::leaf:
        if (!listed_leaves.count(static_cast<int>(vi))) fail("leaf vertex missing from leaf order");
        if (v.leaf_kind == LeafKind::dotted) {
          if (!v.order.empty()) fail("dotted leaf cannot carry solid half-edges");
          if (v.dotted_in.size() + v.dotted_out.size() != 1) fail("dotted leaf must have exactly 1 dotted half-edge");
        } else {
          if (v.order.size() != 1) fail("signed leaf must have exactly 1 solid half-edge");
          if (!v.dotted_in.empty() || !v.dotted_out.empty()) fail("signed leaf cannot carry dotted half-edges");
        }
        break;
    }
  }
  for (int lv : g.leaves) {
    if (lv < 0 || lv >= static_cast<int>(g.vertices.size()) ||
        g.vertices[lv].kind != VertexKind::leaf)
      fail("leaf order references a non-leaf vertex");
  }

  for (const auto& e : g.edges) {
    if (e.h1 < 0 || e.h2 < 0 || e.h1 >= nh || e.h2 >= nh) continue;
    const auto& v1 = g.vertices[g.half_edge_vertex[e.h1]];
    const auto& v2 = g.vertices[g.half_edge_vertex[e.h2]];
    if (e.dotted) {
      bool tail_ok = owns(v1.dotted_out, e.h1);
      bool head_ok = owns(v2.dotted_in, e.h2);
      if (!tail_ok || !head_ok) fail("dotted edge not wired tail(out) -> head(in)");
    } else {
      if (!owns(v1.order, e.h1) || !owns(v2.order, e.h2))
        fail("solid edge attached to a non-solid half-edge");
      // a leaf's edge sign must match the leaf's declared sign
      for (const auto* v : {&v1, &v2}) {
        if (v->kind == VertexKind::leaf) {
          LeafKind want = e.sign == EdgeSign::plus ? LeafKind::plus : LeafKind::minus;
          if (v->leaf_kind != want) fail("leaf sign disagrees with its edge sign");
        }
      }
    }
  }

  rep.pass = rep.violations.empty();
  return rep;
}

namespace {

struct EdgeKey {
  int va, vb;       // for solid: sorted; for dotted: tail, head
  bool dotted;
  int sign;         // -1 for dotted
  bool operator<(const EdgeKey& o) const {
    return std::tie(va, vb, dotted, sign) < std::tie(o.va, o.vb, o.dotted, o.sign);
  }
  bool operator==(const EdgeKey& o) const {
    return std::tie(va, vb, dotted, sign) == std::tie(o.va, o.vb, o.dotted, o.sign);
  }
};

EdgeKey edge_key(const SignedGraph& g, const SignedGraph::Edge& e,
                 const std::vector<int>& sigma) {
  int a = sigma[g.half_edge_vertex[e.h1]];
  int b = sigma[g.half_edge_vertex[e.h2]];
  if (e.dotted) return {a, b, true, -1};
  if (a > b) std::swap(a, b);
  return {a, b, false, e.sign == EdgeSign::plus ? 1 : 0};
}

long factorial(long m) {
  long r = 1;
  for (long i = 2; i <= m; ++i) r *= i;
  return r;
}

}  // namespace

long automorphism_count(const SignedGraph& g, bool fix_leaves) {
  GraphReport rep = validate_graph(g);
  if (!rep.pass) throw std::invalid_argument("automorphism_count: invalid graph: " + rep.violations.front());
  if (g.half_edge_count() > 12)
    throw std::invalid_argument("automorphism_count: graph exceeds the 12 half-edge limit");

  const int nv = static_cast<int>(g.vertices.size());

  // vertex classes; vertices may only map within their class
  auto vclass = [&](int v) -> int {
    const auto& vert = g.vertices[v];
    if (vert.kind == VertexKind::leaf) {
      if (fix_leaves) return 100 + v;  // singleton class
      return 10 + static_cast<int>(vert.leaf_kind);
    }
    // degree profile keeps the search small; it is automorphism-invariant
    return static_cast<int>(vert.kind) * 1000 +
           static_cast<int>(vert.dotted_in.size()) * 10 +
           static_cast<int>(vert.dotted_out.size());
  };

  std::map<int, std::vector<int>> classes;
  for (int v = 0; v < nv; ++v) classes[vclass(v)].push_back(v);

  // reference edge multiset under identity
  std::map<EdgeKey, long> id_groups;
  std::vector<int> ident(nv);
  std::iota(ident.begin(), ident.end(), 0);
  for (const auto& e : g.edges) id_groups[edge_key(g, e, ident)]++;

  long count = 0;
  std::vector<int> sigma(nv, -1);

  // enumerate per-class permutations by backtracking
  std::vector<std::pair<std::vector<int>, std::vector<int>>> perms;  // (members, current image perm)
  for (auto& [key, members] : classes) {
    std::vector<int> p = members;
    perms.push_back({members, p});
  }

  std::function<void(size_t)> rec = [&](size_t ci) {
    if (ci == perms.size()) {
      std::map<EdgeKey, long> groups;
      for (const auto& e : g.edges) groups[edge_key(g, e, sigma)]++;
      if (groups != id_groups) return;
      long ways = 1;
      for (auto& [k, m] : groups) ways *= factorial(m);
      count += ways;
      return;
    }
    auto& [members, p] = perms[ci];
    std::sort(p.begin(), p.end());
    do {
      for (size_t i = 0; i < members.size(); ++i) sigma[members[i]] = p[i];
      rec(ci + 1);
    } while (std::next_permutation(p.begin(), p.end()));
  };
  rec(0);
  return count;
}

double& TensorFactor::at(const std::vector<int>& idx) {
  size_t off = 0;
  for (size_t k = 0; k < dims.size(); ++k) off = off * dims[k] + idx[k];
  return data[off];
}

double TensorFactor::at(const std::vector<int>& idx) const {
  return const_cast<TensorFactor*>(this)->at(idx);
}

double TensorFactor::max_abs() const {
  double m = 0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

TensorFactor contract(const SignedGraph& g, const QuadraticLieAlgebra& alg,
                      const GeneralizedMetric& metric) {
  GraphReport rep = validate_graph(g);
  if (!rep.pass) throw std::invalid_argument("contract: invalid graph: " + rep.violations.front());
  if (g.has_dotted())
    throw std::invalid_argument("contract: graph has dotted content, use contract_courant");
  for (const auto& v : g.vertices)
    if (v.kind == VertexKind::rho_vertex)
      throw std::invalid_argument("contract: graph has rho-vertices, use contract_courant");

  const int n = alg.dim();
  SplitInversePairing sp = split_inverse(alg, metric);

  TensorFactor out;
  out.dims.assign(g.leaves.size(), n);
  size_t total = 1;
  for (int d : out.dims) total *= d;
  out.data.assign(std::max<size_t>(total, 1), 0.0);

  std::vector<int> idx(g.half_edge_count(), -1);
  std::vector<int> leaf_he;
  for (int lv : g.leaves) leaf_he.push_back(g.vertices[lv].order.at(0));

  // fixed lexicographic enumeration over per-edge index pairs
  std::function<void(size_t, double)> rec = [&](size_t ei, double w) {
    if (ei == g.edges.size()) {
      double prod = w;
      for (const auto& v : g.vertices) {
        if (v.kind != VertexKind::c_vertex) continue;
        prod *= alg.c(idx[v.order[0]], idx[v.order[1]], idx[v.order[2]]);
        if (prod == 0.0) return;
      }
      std::vector<int> li(leaf_he.size());
      for (size_t k = 0; k < leaf_he.size(); ++k) li[k] = idx[leaf_he[k]];
      out.at(li) += prod;
      return;
    }
    const auto& e = g.edges[ei];
    const Eigen::MatrixXd& t = e.sign == EdgeSign::plus ? sp.tplus : sp.tminus;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double tij = t(i, j);
        if (tij == 0.0) continue;
        idx[e.h1] = i;
        idx[e.h2] = j;
        rec(ei + 1, w * tij);
      }
  };
  rec(0, 1.0);
  return out;
}

namespace {

int add_vertex(SignedGraph& g, VertexKind kind, LeafKind lk = LeafKind::plus) {
  SignedGraph::Vertex v;
  v.kind = kind;
  v.leaf_kind = lk;
  g.vertices.push_back(v);
  return static_cast<int>(g.vertices.size()) - 1;
}

int solid_he(SignedGraph& g, int vertex) {
  int h = g.new_half_edge(vertex);
  g.vertices[vertex].order.push_back(h);
  return h;
}

void add_solid_edge(SignedGraph& g, int h1, int h2, EdgeSign s) {
  g.edges.push_back({h1, h2, false, s});
}

}  // namespace

SignedGraph theta_graph() {
  SignedGraph g;
  int x = add_vertex(g, VertexKind::c_vertex);
  int y = add_vertex(g, VertexKind::c_vertex);
  for (int k = 0; k < 3; ++k) {
    int hx = solid_he(g, x);
    int hy = solid_he(g, y);
    add_solid_edge(g, hx, hy, EdgeSign::plus);
  }
  return g;
}

SignedGraph eye_diagram() {
  SignedGraph g;
  int x = add_vertex(g, VertexKind::c_vertex);
  int y = add_vertex(g, VertexKind::c_vertex);
  int l1 = add_vertex(g, VertexKind::leaf, LeafKind::plus);
  int l2 = add_vertex(g, VertexKind::leaf, LeafKind::minus);
  g.leaves = {l1, l2};

  int hx_p = solid_he(g, x);
  int hx_leaf = solid_he(g, x);
  int hx_m = solid_he(g, x);  // anticlockwise at x: (+loop, leaf, -loop)

  int hy_leaf = solid_he(g, y);
  int hy_p = solid_he(g, y);
  int hy_m = solid_he(g, y);  // anticlockwise at y: (leaf, +loop, -loop)

  int hl1 = solid_he(g, l1);
  int hl2 = solid_he(g, l2);

  add_solid_edge(g, hx_leaf, hl1, EdgeSign::plus);
  add_solid_edge(g, hx_p, hy_p, EdgeSign::plus);
  add_solid_edge(g, hx_m, hy_m, EdgeSign::minus);
  add_solid_edge(g, hy_leaf, hl2, EdgeSign::minus);
  return g;
}

SignedGraph rho_loop_diagram(EdgeSign loop_sign) {
  SignedGraph g;
  int x = add_vertex(g, VertexKind::c_vertex);
  int r = add_vertex(g, VertexKind::rho_vertex);
  int l1 = add_vertex(g, VertexKind::leaf, LeafKind::plus);
  int l2 = add_vertex(g, VertexKind::leaf, LeafKind::minus);
  g.leaves = {l1, l2};

  int hx_loop = solid_he(g, x);
  int hx_l1 = solid_he(g, x);
  int hx_l2 = solid_he(g, x);  // anticlockwise at x: (loop, +leaf, -leaf)
  int hx_din = g.new_half_edge(x);
  g.vertices[x].dotted_in.push_back(hx_din);

  int hr_solid = solid_he(g, r);
  int hr_dout = g.new_half_edge(r);
  g.vertices[r].dotted_out.push_back(hr_dout);

  int hl1 = solid_he(g, l1);
  int hl2 = solid_he(g, l2);

  add_solid_edge(g, hx_l1, hl1, EdgeSign::plus);
  add_solid_edge(g, hx_l2, hl2, EdgeSign::minus);
  add_solid_edge(g, hx_loop, hr_solid, loop_sign);
  g.edges.push_back({hr_dout, hx_din, true, EdgeSign::plus});
  return g;
}

std::vector<WeightedGraph> ggric_diagrams() {
  std::vector<WeightedGraph> out;
  out.push_back({{1, 1}, eye_diagram()});
  out.push_back({{1, 2}, rho_loop_diagram(EdgeSign::plus)});
  out.push_back({{-1, 2}, rho_loop_diagram(EdgeSign::minus)});
  return out;
}

SignedGraph preset_graph(const std::string& name) {
  if (name == "theta") return theta_graph();
  if (name == "eye") return eye_diagram();
  if (name == "rho_loop_plus") return rho_loop_diagram(EdgeSign::plus);
  if (name == "rho_loop_minus") return rho_loop_diagram(EdgeSign::minus);
  throw std::invalid_argument("unknown graph preset: " + name);
}

}  // namespace gricci
