#pragma once

#include <string>
#include <vector>

#include "gricci/algebra.hpp"

namespace gricci {

enum class EdgeSign { plus, minus };
enum class VertexKind { c_vertex, rho_vertex, leaf };
enum class LeafKind { plus, minus, dotted };

/// Trivalent diagram with signed solid edges, directed dotted edges,
/// external leaves, and a stored cyclic order of the solid half-edges at
/// each internal vertex. The cyclic order fixes the sign of the tensor
/// factor; graphs shipped as presets hard-code the anticlockwise order
/// of the drawings they come from.
struct SignedGraph {
  struct Vertex {
    VertexKind kind = VertexKind::c_vertex;
    LeafKind leaf_kind = LeafKind::plus;  // meaningful for leaves only
    std::vector<int> order;               // solid half-edges, cyclic order
    std::vector<int> dotted_in;           // incoming dotted half-edges
    std::vector<int> dotted_out;          // outgoing dotted half-edges
  };
  struct Edge {
    int h1 = -1, h2 = -1;  // for dotted edges h1 is the tail, h2 the head
    bool dotted = false;
    EdgeSign sign = EdgeSign::plus;
  };

  std::vector<Vertex> vertices;
  std::vector<int> half_edge_vertex;  // half-edge id -> vertex id
  std::vector<Edge> edges;
  std::vector<int> leaves;  // vertex ids of leaves, in leaf-slot order

  int new_half_edge(int vertex) {
    half_edge_vertex.push_back(vertex);
    return static_cast<int>(half_edge_vertex.size()) - 1;
  }
  int half_edge_count() const { return static_cast<int>(half_edge_vertex.size()); }
  bool has_dotted() const;
};

struct GraphReport {
  bool pass = false;
  std::vector<std::string> violations;
};

GraphReport validate_graph(const SignedGraph& g);

/// Exact count of kind-, sign-, and incidence-preserving automorphisms
/// (pairs of a vertex bijection and an edge bijection). With fix_leaves
/// the leaves are fixed pointwise (Aut_0); otherwise leaves may be
/// permuted within equal leaf kinds. Brute force; throws if the graph
/// has more than 12 half-edges.
long automorphism_count(const SignedGraph& g, bool fix_leaves);

/// Multi-index tensor with one slot per leaf, in leaf order.
struct TensorFactor {
  std::vector<int> dims;
  std::vector<double> data;

  double& at(const std::vector<int>& idx);
  double at(const std::vector<int>& idx) const;
  double max_abs() const;
};

/// The Lie algebra factor T_Gamma of a pure Chern-Simons graph: t+ on
/// every (+)-edge, t- on every (-)-edge, c on every vertex, contracted.
/// Leaf slots are raised and projected through t+/t- according to the
/// leaf sign, so a plus-slot lies in range(Pi+). Rejects graphs with
/// dotted content.
TensorFactor contract(const SignedGraph& g, const QuadraticLieAlgebra& alg,
                      const GeneralizedMetric& metric);

/// Canonical graphs.
SignedGraph theta_graph();
SignedGraph eye_diagram();
SignedGraph rho_loop_diagram(EdgeSign loop_sign);

struct Rational {
  long num = 0, den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct WeightedGraph {
  Rational coefficient;
  SignedGraph graph;
};

/// The three diagrams of the Courant 1-loop divergence, with their
/// coefficients (1, +1/2, -1/2).
std::vector<WeightedGraph> ggric_diagrams();

SignedGraph preset_graph(const std::string& name);

}  // namespace gricci
