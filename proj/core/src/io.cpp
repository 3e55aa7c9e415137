#include "gricci/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gricci {

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_unjson(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("matrix json: expected a non-empty array of rows");
  Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  Eigen::Index nc = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != nc)
      throw std::invalid_argument("matrix json: ragged rows");
    for (Eigen::Index j = 0; j < nc; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

const char* vertex_kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::c_vertex: return "c";
    case VertexKind::rho_vertex: return "rho";
    case VertexKind::leaf: return "leaf";
  }
  return "?";
}

VertexKind vertex_kind_of(const std::string& s) {
  if (s == "c") return VertexKind::c_vertex;
  if (s == "rho") return VertexKind::rho_vertex;
  if (s == "leaf") return VertexKind::leaf;
  throw std::invalid_argument("graph json: unknown vertex kind '" + s + "'");
}

const char* leaf_kind_name(LeafKind k) {
  switch (k) {
    case LeafKind::plus: return "plus";
    case LeafKind::minus: return "minus";
    case LeafKind::dotted: return "dotted";
  }
  return "?";
}

LeafKind leaf_kind_of(const std::string& s) {
  if (s == "plus") return LeafKind::plus;
  if (s == "minus") return LeafKind::minus;
  if (s == "dotted") return LeafKind::dotted;
  throw std::invalid_argument("graph json: unknown leaf kind '" + s + "'");
}

}  // namespace

std::string matrix_to_json(const Eigen::MatrixXd& m) { return matrix_json(m).dump(); }

Eigen::MatrixXd matrix_from_json(const std::string& text) {
  return matrix_unjson(json::parse(text));
}

std::string graph_to_json(const SignedGraph& g) {
  json j;
  j["vertices"] = json::array();
  for (const auto& v : g.vertices) {
    json jv;
    jv["kind"] = vertex_kind_name(v.kind);
    if (v.kind == VertexKind::leaf) jv["leaf_kind"] = leaf_kind_name(v.leaf_kind);
    jv["order"] = v.order;
    if (!v.dotted_in.empty()) jv["dotted_in"] = v.dotted_in;
    if (!v.dotted_out.empty()) jv["dotted_out"] = v.dotted_out;
    j["vertices"].push_back(std::move(jv));
  }
  j["half_edge_vertex"] = g.half_edge_vertex;
  j["edges"] = json::array();
  for (const auto& e : g.edges) {
    json je;
    je["h1"] = e.h1;
    je["h2"] = e.h2;
    je["dotted"] = e.dotted;
    if (!e.dotted) je["sign"] = e.sign == EdgeSign::plus ? "plus" : "minus";
    j["edges"].push_back(std::move(je));
  }
  j["leaves"] = g.leaves;
  return j.dump();
}

SignedGraph graph_from_json(const std::string& text) {
  json j = json::parse(text);
  SignedGraph g;
  for (const auto& jv : j.at("vertices")) {
    SignedGraph::Vertex v;
    v.kind = vertex_kind_of(jv.at("kind").get<std::string>());
    if (jv.contains("leaf_kind"))
      v.leaf_kind = leaf_kind_of(jv.at("leaf_kind").get<std::string>());
    v.order = jv.value("order", std::vector<int>{});
    v.dotted_in = jv.value("dotted_in", std::vector<int>{});
    v.dotted_out = jv.value("dotted_out", std::vector<int>{});
    g.vertices.push_back(std::move(v));
  }
  g.half_edge_vertex = j.at("half_edge_vertex").get<std::vector<int>>();
  for (const auto& je : j.at("edges")) {
    SignedGraph::Edge e;
    e.h1 = je.at("h1").get<int>();
    e.h2 = je.at("h2").get<int>();
    e.dotted = je.value("dotted", false);
    if (!e.dotted)
      e.sign = je.at("sign").get<std::string>() == "plus" ? EdgeSign::plus
                                                          : EdgeSign::minus;
    g.edges.push_back(e);
  }
  g.leaves = j.at("leaves").get<std::vector<int>>();
  return g;
}

std::string estimate_to_json(const MCEstimate& est) {
  json j;
  j["value_re"] = est.value.real();
  j["value_im"] = est.value.imag();
  j["stderr"] = est.std_error;
  j["n"] = est.n_samples;
  j["seed"] = est.seed;
  j["wall_time"] = est.wall_time;
  return j.dump();
}

std::string scan_to_json(const ScanResult& scan) {
  json j;
  j["slope"] = scan.slope;
  j["slope_ci"] = scan.slope_ci;
  j["points"] = json::array();
  for (const auto& p : scan.points) {
    json jp;
    jp["epsilon"] = p.epsilon;
    jp["value_re"] = p.delta.value.real();
    jp["value_im"] = p.delta.value.imag();
    jp["stderr"] = p.delta.std_error;
    jp["n"] = p.delta.n_samples;
    j["points"].push_back(std::move(jp));
  }
  return j.dump();
}

std::string trajectory_to_csv(const FlowTrajectory& traj) {
  std::ostringstream out;
  out.precision(17);
  int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().metric.tau().rows());
  out << "s,residual";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out << ",tau_" << i << "_" << j;
  out << "\n";
  for (const auto& st : traj.states) {
    out << st.s << "," << st.residual;
    const Eigen::MatrixXd& tau = st.metric.tau();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out << "," << tau(i, j);
    out << "\n";
  }
  return out.str();
}

std::string params_hash(const std::string& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : params) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string make_manifest(const std::string& command, const std::string& params_json,
                          std::uint64_t seed, double wall_time) {
  json j;
  j["command"] = command;
  j["params"] = json::parse(params_json);
  j["params_hash"] = params_hash(params_json);
  j["seed"] = seed;
  j["wall_time"] = wall_time;
  j["version"] = "0.1.0";
  return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gricci
