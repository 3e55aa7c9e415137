#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "gricci/courant.hpp"
#include "gricci/flow.hpp"
#include "gricci/io.hpp"
#include "gricci/rng.hpp"
#include "gricci/verify.hpp"

using namespace gricci;
using nlohmann::json;

namespace {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Named setters so a JSON config file can fill any flag that was not
/// given on the command line; unknown keys are rejected.
struct ConfigBinding {
  CLI::App* app = nullptr;
  std::map<std::string, std::function<void(const json&)>> setters;

  template <typename T>
  void bind(const std::string& name, CLI::Option* opt, T* target) {
    setters[name] = [opt, target](const json& v) {
      if (opt->count() > 0) return;  // command line wins
      *target = v.get<T>();
    };
  }

  void apply(const std::string& path) {
    json cfg = json::parse(read_file(path));
    if (!cfg.is_object())
      throw ValidationError("config file must contain a JSON object");
    for (auto& [key, value] : cfg.items()) {
      auto it = setters.find(key);
      if (it == setters.end())
        throw ValidationError("config file: unknown key '" + key + "'");
      it->second(value);
    }
  }
};

int default_threads() {
  if (const char* env = std::getenv("GRICCI_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 0;  // hardware concurrency
}

QuadraticLieAlgebra make_algebra(const std::string& preset, double level) {
  try {
    return preset_algebra(preset, level);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

GeneralizedMetric make_metric(const QuadraticLieAlgebra& alg, const std::string& spec) {
  if (spec == "canonical" || spec == "subalgebra") return canonical_metric(alg);
  if (spec.rfind("random", 0) == 0) {
    std::uint64_t seed = 1;
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
      std::string rest = spec.substr(colon + 1);
      if (rest.rfind("seed=", 0) == 0) rest = rest.substr(5);
      seed = std::strtoull(rest.c_str(), nullptr, 10);
    }
    return random_metric(alg, seed);
  }
  // otherwise a file holding the involution matrix
  Eigen::MatrixXd tau;
  try {
    tau = matrix_from_json(read_file(spec));
  } catch (const std::exception& e) {
    throw ValidationError(std::string("metric spec '") + spec + "': " + e.what());
  }
  MetricResult res = metric_from_involution(alg, tau);
  if (!res.metric) {
    std::string msg = "metric validation failed:";
    for (const auto& v : res.report.violations) msg += " " + v;
    throw ValidationError(msg);
  }
  return *res.metric;
}

/// "one:cx,cy,ch,radius,amp" etc.; degree keyword then numbers.
TestForm make_form(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::vector<double> v;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::atof(tok.c_str()));
  }
  while (v.size() < 3) v.push_back(0.0);
  if (v.size() < 4) v.push_back(1.0);
  if (v.size() < 5) v.push_back(1.0);
  Eigen::Vector3d c(v[0], v[1], v[2]);
  if (kind == "one") return TestForm::bump_one_form(c, v[3], v[4]);
  if (kind == "zero") return TestForm::bump_zero_form(c, v[3], v[4]);
  if (kind == "two") return TestForm::bump_two_form(c, v[3], v[4]);
  if (kind == "dh") return TestForm::bump_dh_form(c, v[3], v[4]);
  if (kind == "vertical") return TestForm::bump_vertical_two_form(c, v[3], v[4]);
  throw ValidationError("unknown form spec '" + spec + "'");
}

Expr make_expr(const std::string& text) {
  try {
    return Expr::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("cutoff profile '") + text + "': " + e.what());
  }
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& params, std::uint64_t seed, double wall_time) {
  std::filesystem::create_directories(out_dir);
  std::string path = out_dir + "/" + command + "_manifest.json";
  write_file(path, make_manifest(command, params.dump(), seed, wall_time));
}

void print_matrix(const Eigen::MatrixXd& m) { std::cout << matrix_to_json(m) << "\n"; }

struct CommonOpts {
  std::string out = ".";
  std::string config;
  int threads = default_threads();
};

void add_common(CLI::App* cmd, CommonOpts& c, ConfigBinding& cb) {
  cb.app = cmd;
  cb.bind("out", cmd->add_option("--out", c.out, "Output directory for manifests and files"),
          &c.out);
  cmd->add_option("--config", c.config, "JSON config file; command-line flags win");
  cb.bind("threads", cmd->add_option("--threads", c.threads, "Worker threads (0 = all)"),
          &c.threads);
}

json estimate_record(const std::string& op, const json& params, const MCEstimate& est,
                     double epsilon) {
  json rec;
  rec["op"] = op;
  rec["params_hash"] = params_hash(params.dump());
  rec["value"] = {est.value.real(), est.value.imag()};
  rec["stderr"] = est.std_error;
  rec["n"] = est.n_samples;
  rec["seed"] = est.seed;
  rec["epsilon"] = epsilon;
  return rec;
}

int run(int argc, char** argv) {
  CLI::App app{"Generalized Ricci flow and propagator verification toolkit"};
  app.require_subcommand(1);

  // --- ricci / beta ---------------------------------------------------
  struct {
    CommonOpts common;
    std::string preset = "su2_double", metric = "canonical";
    double level = 1.0;
  } alg_opts[2];
  ConfigBinding alg_cb[2];
  CLI::App* cmds[2] = {app.add_subcommand("ricci", "Print the generalized Ricci tensor"),
                       app.add_subcommand("beta", "Print the beta operator")};
  for (int i = 0; i < 2; ++i) {
    auto& o = alg_opts[i];
    auto& cb = alg_cb[i];
    add_common(cmds[i], o.common, cb);
    cb.bind("preset", cmds[i]->add_option("--preset", o.preset, "Algebra preset"), &o.preset);
    cb.bind("metric", cmds[i]->add_option("--metric", o.metric, "canonical | random:seed=N | tau file"),
            &o.metric);
    cb.bind("level", cmds[i]->add_option("--level", o.level, "Pairing level multiplier"), &o.level);
  }

  // --- flow -----------------------------------------------------------
  struct {
    CommonOpts common;
    std::string preset = "su2_double", metric = "random:seed=1", span = "0:1";
    std::string method = "rkmk4";
    double level = 1.0, ds = 0.01, hbar = 1.0, direction = 1.0;
  } flow_o;
  ConfigBinding flow_cb;
  CLI::App* flow_cmd = app.add_subcommand("flow", "Integrate the 1-loop RG flow");
  add_common(flow_cmd, flow_o.common, flow_cb);
  flow_cb.bind("preset", flow_cmd->add_option("--preset", flow_o.preset), &flow_o.preset);
  flow_cb.bind("metric", flow_cmd->add_option("--metric", flow_o.metric), &flow_o.metric);
  flow_cb.bind("level", flow_cmd->add_option("--level", flow_o.level), &flow_o.level);
  flow_cb.bind("s", flow_cmd->add_option("--s", flow_o.span, "Flow interval a:b"), &flow_o.span);
  flow_cb.bind("ds", flow_cmd->add_option("--ds", flow_o.ds, "Initial step"), &flow_o.ds);
  flow_cb.bind("hbar", flow_cmd->add_option("--hbar", flow_o.hbar), &flow_o.hbar);
  flow_cb.bind("direction", flow_cmd->add_option("--direction", flow_o.direction), &flow_o.direction);
  flow_cb.bind("method", flow_cmd->add_option("--method", flow_o.method, "rkmk4 | lie_euler"),
               &flow_o.method);

  // --- courant-ricci / master-check ----------------------------------
  struct {
    CommonOpts common;
    std::string preset = "su2_double", metric = "canonical";
    double level = 1.0;
    int base_dim = 2;
  } cr_o, mc_o;
  ConfigBinding cr_cb, mc_cb;
  CLI::App* cr_cmd = app.add_subcommand("courant-ricci", "Courant replacement of the Ricci tensor");
  CLI::App* mc_cmd = app.add_subcommand("master-check", "Master equation residual of the lifted data");
  for (auto [cmd, o, cb] : {std::tuple{cr_cmd, &cr_o, &cr_cb}, std::tuple{mc_cmd, &mc_o, &mc_cb}}) {
    add_common(cmd, o->common, *cb);
    cb->bind("preset", cmd->add_option("--preset", o->preset), &o->preset);
    cb->bind("level", cmd->add_option("--level", o->level), &o->level);
    cb->bind("base-dim", cmd->add_option("--base-dim", o->base_dim), &o->base_dim);
    if (cmd == cr_cmd)
      cb->bind("metric", cmd->add_option("--metric", o->metric), &o->metric);
  }

  // --- verify-lemma / verify-courant ----------------------------------
  struct {
    CommonOpts common;
    std::string alpha = "one:0,0,0,1,1", beta = "one:0,0,0,1,1";
    std::string l1 = "1", l2 = "2";
    double epsilon = 1e-3, n = 1e6, budget = 0;
    std::uint64_t seed = 1;
  } vl_o, vc_o;
  ConfigBinding vl_cb, vc_cb;
  CLI::App* vl_cmd = app.add_subcommand("verify-lemma", "Monte-Carlo the divergence coefficient");
  CLI::App* vc_cmd = app.add_subcommand("verify-courant", "Monte-Carlo the Courant prefactor");
  for (auto [cmd, o, cb] : {std::tuple{vl_cmd, &vl_o, &vl_cb}, std::tuple{vc_cmd, &vc_o, &vc_cb}}) {
    add_common(cmd, o->common, *cb);
    cb->bind("alpha", cmd->add_option("--alpha", o->alpha, "Test form spec kind:cx,cy,ch,r,amp"),
             &o->alpha);
    if (cmd == vl_cmd)
      cb->bind("beta", cmd->add_option("--beta", o->beta), &o->beta);
    cb->bind("l1", cmd->add_option("--l1", o->l1, "Cutoff profile l1(x,y)"), &o->l1);
    cb->bind("l2", cmd->add_option("--l2", o->l2, "Cutoff profile l2(x,y)"), &o->l2);
    cb->bind("epsilon", cmd->add_option("--epsilon", o->epsilon), &o->epsilon);
    cb->bind("n", cmd->add_option("--n", o->n, "Sample count"), &o->n);
    cb->bind("seed", cmd->add_option("--seed", o->seed), &o->seed);
    cb->bind("budget", cmd->add_option("--budget", o->budget, "Wall-time cap in seconds"),
             &o->budget);
  }

  // --- scan-convergence ----------------------------------------------
  struct {
    CommonOpts common;
    int vertices = 3;
    double n = 500000, eps0 = 0.005, ratio = 1.7;
    int count = 6;
    std::uint64_t seed = 1;
  } sc_o;
  ConfigBinding sc_cb;
  CLI::App* sc_cmd = app.add_subcommand("scan-convergence", "Fit the loop convergence exponent");
  add_common(sc_cmd, sc_o.common, sc_cb);
  sc_cb.bind("vertices", sc_cmd->add_option("--vertices", sc_o.vertices, "Loop length 2..5"),
             &sc_o.vertices);
  sc_cb.bind("n", sc_cmd->add_option("--n", sc_o.n), &sc_o.n);
  sc_cb.bind("eps0", sc_cmd->add_option("--eps0", sc_o.eps0, "Smallest epsilon"), &sc_o.eps0);
  sc_cb.bind("ratio", sc_cmd->add_option("--ratio", sc_o.ratio, "Geometric grid ratio"), &sc_o.ratio);
  sc_cb.bind("count", sc_cmd->add_option("--count", sc_o.count, "Grid size"), &sc_o.count);
  sc_cb.bind("seed", sc_cmd->add_option("--seed", sc_o.seed), &sc_o.seed);

  // --- diagram --------------------------------------------------------
  struct {
    CommonOpts common;
    std::string graph = "theta", preset = "su2_double", metric = "canonical";
    double level = 1.0;
    bool do_contract = false;
  } dg_o;
  ConfigBinding dg_cb;
  CLI::App* dg_cmd = app.add_subcommand("diagram", "Diagram automorphisms and contraction");
  add_common(dg_cmd, dg_o.common, dg_cb);
  dg_cb.bind("graph", dg_cmd->add_option("--graph", dg_o.graph, "theta | eye | rho_loop:± | JSON file"),
             &dg_o.graph);
  dg_cb.bind("preset", dg_cmd->add_option("--preset", dg_o.preset), &dg_o.preset);
  dg_cb.bind("metric", dg_cmd->add_option("--metric", dg_o.metric), &dg_o.metric);
  dg_cb.bind("level", dg_cmd->add_option("--level", dg_o.level), &dg_o.level);
  dg_cmd->add_flag("--contract", dg_o.do_contract, "Also contract against an algebra+metric");

  // --- validate -------------------------------------------------------
  struct {
    CommonOpts common;
    std::string preset = "su2_double", metric, graph;
    double level = 1.0;
  } va_o;
  ConfigBinding va_cb;
  CLI::App* va_cmd = app.add_subcommand("validate", "Validate an algebra, metric, or graph");
  add_common(va_cmd, va_o.common, va_cb);
  va_cb.bind("preset", va_cmd->add_option("--preset", va_o.preset), &va_o.preset);
  va_cb.bind("metric", va_cmd->add_option("--metric", va_o.metric), &va_o.metric);
  va_cb.bind("graph", va_cmd->add_option("--graph", va_o.graph), &va_o.graph);
  va_cb.bind("level", va_cmd->add_option("--level", va_o.level), &va_o.level);

  CLI11_PARSE(app, argc, argv);

  auto t0 = std::chrono::steady_clock::now();
  auto wall = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  auto apply_config = [](const CommonOpts& c, ConfigBinding& cb) {
    if (!c.config.empty()) cb.apply(c.config);
  };

  for (int i = 0; i < 2; ++i)
    if (cmds[i]->parsed()) {
      auto& o = alg_opts[i];
      apply_config(o.common, alg_cb[i]);
      auto alg = make_algebra(o.preset, o.level);
      auto metric = make_metric(alg, o.metric);
      Eigen::MatrixXd m = i == 0 ? generalized_ricci(alg, metric) : beta_operator(alg, metric);
      print_matrix(m);
      json params = {{"preset", o.preset}, {"metric", o.metric}, {"level", o.level}};
      write_manifest(o.common.out, i == 0 ? "ricci" : "beta", params, 0, wall());
      return 0;
    }

  if (flow_cmd->parsed()) {
    auto& o = flow_o;
    apply_config(o.common, flow_cb);
    auto alg = make_algebra(o.preset, o.level);
    auto metric = make_metric(alg, o.metric);
    auto colon = o.span.find(':');
    if (colon == std::string::npos)
      throw ValidationError("--s expects an interval a:b");
    double s0 = std::atof(o.span.substr(0, colon).c_str());
    double s1 = std::atof(o.span.substr(colon + 1).c_str());
    FlowOptions fo;
    fo.hbar = o.hbar;
    fo.direction = o.direction;
    if (o.method == "lie_euler") fo.method = StepMethod::lie_euler;
    else if (o.method != "rkmk4") throw ValidationError("unknown method '" + o.method + "'");
    FlowTrajectory traj = integrate_flow(alg, metric, s0, s1, o.ds, fo);
    std::filesystem::create_directories(o.common.out);
    write_file(o.common.out + "/flow_trajectory.csv", trajectory_to_csv(traj));
    json params = {{"preset", o.preset}, {"metric", o.metric}, {"level", o.level},
                   {"s", o.span},        {"ds", o.ds},         {"hbar", o.hbar},
                   {"direction", o.direction}, {"method", o.method}};
    write_manifest(o.common.out, "flow", params, 0, wall());
    std::cout << "steps=" << traj.states.size()
              << " final_residual=" << traj.states.back().residual << "\n";
    if (traj.truncated) throw NumericError("flow step underflow: " + traj.diagnostic);
    return 0;
  }

  if (cr_cmd->parsed()) {
    auto& o = cr_o;
    apply_config(o.common, cr_cb);
    auto alg = make_algebra(o.preset, o.level);
    auto metric = make_metric(alg, o.metric);
    auto cdata = CourantData::from_algebra(alg, o.base_dim);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(o.base_dim);
    print_matrix(-courant_t_dprime(cdata, x, metric));
    json params = {{"preset", o.preset}, {"metric", o.metric}, {"level", o.level},
                   {"base-dim", o.base_dim}};
    write_manifest(o.common.out, "courant-ricci", params, 0, wall());
    return 0;
  }

  if (mc_cmd->parsed()) {
    auto& o = mc_o;
    apply_config(o.common, mc_cb);
    auto alg = make_algebra(o.preset, o.level);
    auto cdata = CourantData::from_algebra(alg, o.base_dim);
    std::vector<Eigen::VectorXd> pts;
    RandomStream rng(17, 0);
    for (int k = 0; k < 8; ++k) {
      Eigen::VectorXd x(o.base_dim);
      for (int i = 0; i < o.base_dim; ++i) x[i] = rng.next_normal();
      pts.push_back(x);
    }
    double res = master_equation_residual(cdata, pts);
    json rec = {{"op", "master-check"}, {"residual", res}, {"pass", res <= 1e-10}};
    std::cout << rec.dump() << "\n";
    json params = {{"preset", o.preset}, {"level", o.level}, {"base-dim", o.base_dim}};
    write_manifest(o.common.out, "master-check", params, 0, wall());
    return 0;
  }

  if (vl_cmd->parsed() || vc_cmd->parsed()) {
    bool lemma = vl_cmd->parsed();
    auto& o = lemma ? vl_o : vc_o;
    apply_config(o.common, lemma ? vl_cb : vc_cb);
    TestForm alpha = make_form(o.alpha);
    Expr l1 = make_expr(o.l1), l2 = make_expr(o.l2);
    MCOptions mopts;
    mopts.n = static_cast<long long>(o.n);
    mopts.seed = o.seed;
    mopts.threads = o.common.threads;
    mopts.budget_seconds = o.budget;
    MCEstimate est;
    json rec;
    if (lemma) {
      TestForm beta = make_form(o.beta);
      est = lemma_lhs(alpha, beta, l1, l2, o.epsilon, mopts);
      rec = estimate_record("verify-lemma", json{{"alpha", o.alpha}, {"beta", o.beta},
                                                 {"l1", o.l1}, {"l2", o.l2},
                                                 {"epsilon", o.epsilon}},
                            est, o.epsilon);
      rec["reference"] = lemma_rhs(alpha, beta, l1, l2);
    } else {
      est = courant_lhs(alpha, l1, l2, o.epsilon, mopts);
      rec = estimate_record("verify-courant", json{{"alpha", o.alpha}, {"l1", o.l1},
                                                   {"l2", o.l2}, {"epsilon", o.epsilon}},
                            est, o.epsilon);
      auto ref = courant_rhs(alpha, l1, l2);
      rec["reference"] = {ref.real(), ref.imag()};
    }
    std::cout << rec.dump() << "\n";
    json params = {{"alpha", o.alpha}, {"l1", o.l1}, {"l2", o.l2},
                   {"epsilon", o.epsilon}, {"n", o.n}, {"seed", o.seed}};
    if (lemma) params["beta"] = o.beta;
    write_manifest(o.common.out, lemma ? "verify-lemma" : "verify-courant", params, o.seed,
                   wall());
    if (est.n_samples < mopts.n)
      throw NumericError("budget exceeded: " + std::to_string(est.n_samples) + " of " +
                         std::to_string(mopts.n) + " samples done");
    return 0;
  }

  if (sc_cmd->parsed()) {
    auto& o = sc_o;
    apply_config(o.common, sc_cb);
    if (o.vertices < 2 || o.vertices > 5)
      throw ValidationError("--vertices must be in 2..5");
    std::vector<TestForm> forms(o.vertices, TestForm::bump_one_form({0, 0, 0}, 1.0));
    std::vector<double> eps;
    for (int k = 0; k < o.count; ++k) eps.push_back(o.eps0 * std::pow(o.ratio, k));
    MCOptions mopts;
    mopts.n = static_cast<long long>(o.n);
    mopts.seed = o.seed;
    mopts.threads = o.common.threads;
    ScanResult scan = convergence_scan(o.vertices, forms, eps, mopts);
    std::cout << scan_to_json(scan) << "\n";
    json params = {{"vertices", o.vertices}, {"n", o.n}, {"eps0", o.eps0},
                   {"ratio", o.ratio}, {"count", o.count}, {"seed", o.seed}};
    write_manifest(o.common.out, "scan-convergence", params, o.seed, wall());
    return 0;
  }

  if (dg_cmd->parsed()) {
    auto& o = dg_o;
    apply_config(o.common, dg_cb);
    SignedGraph g;
    try {
      g = preset_graph(o.graph);
    } catch (const std::invalid_argument&) {
      try {
        g = graph_from_json(read_file(o.graph));
      } catch (const std::exception& e) {
        throw ValidationError(std::string("graph spec '") + o.graph + "': " + e.what());
      }
    }
    auto rep = validate_graph(g);
    if (!rep.pass) {
      std::string msg = "graph validation failed:";
      for (const auto& v : rep.violations) msg += " " + v;
      throw ValidationError(msg);
    }
    json rec = {{"op", "diagram"},
                {"aut", automorphism_count(g, false)},
                {"aut_fixed_leaves", automorphism_count(g, true)}};
    if (o.do_contract) {
      auto alg = make_algebra(o.preset, o.level);
      auto metric = make_metric(alg, o.metric);
      TensorFactor t = contract(g, alg, metric);
      rec["contraction_max_abs"] = t.max_abs();
    }
    std::cout << rec.dump() << "\n";
    json params = {{"graph", o.graph}, {"contract", o.do_contract}};
    write_manifest(o.common.out, "diagram", params, 0, wall());
    return 0;
  }

  if (va_cmd->parsed()) {
    auto& o = va_o;
    apply_config(o.common, va_cb);
    json rec;
    rec["op"] = "validate";
    bool ok = true;
    if (!o.graph.empty()) {
      SignedGraph g;
      try {
        g = preset_graph(o.graph);
      } catch (const std::invalid_argument&) {
        g = graph_from_json(read_file(o.graph));
      }
      auto rep = validate_graph(g);
      rec["graph_pass"] = rep.pass;
      rec["graph_violations"] = rep.violations;
      ok = ok && rep.pass;
    } else {
      auto alg = make_algebra(o.preset, o.level);
      auto rep = validate_algebra(alg);
      rec["algebra_pass"] = rep.pass;
      rec["jacobi"] = rep.jacobi;
      rec["antisym"] = std::max(rep.antisym_first, rep.antisym_last);
      rec["pairing_condition"] = rep.pairing_condition;
      ok = ok && rep.pass;
      if (!o.metric.empty()) {
        if (o.metric == "canonical" || o.metric == "subalgebra" ||
            o.metric.rfind("random", 0) == 0) {
          make_metric(alg, o.metric);  // throws on failure
          rec["metric_pass"] = true;
        } else {
          Eigen::MatrixXd tau = matrix_from_json(read_file(o.metric));
          MetricResult res = metric_from_involution(alg, tau);
          rec["metric_pass"] = res.report.pass;
          rec["metric_violations"] = res.report.violations;
          ok = ok && res.report.pass;
        }
      }
    }
    std::cout << rec.dump() << "\n";
    json params = {{"preset", o.preset}, {"metric", o.metric}, {"graph", o.graph}};
    write_manifest(o.common.out, "validate", params, 0, wall());
    if (!ok) throw ValidationError("validation failed");
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "numeric"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
}
