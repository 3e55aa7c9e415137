#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <gricci/io.hpp>

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(GRICCI_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunResult r;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / "gricci_cli_test";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("ricci at the subalgebra splitting prints zero") {
  auto d = temp_dir();
  auto r = run_cli("ricci --preset su2_double --metric subalgebra --out " + d.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("[[") == 0);
  Eigen::MatrixXd m = gricci::matrix_from_json(r.out);
  CHECK(m.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::filesystem::exists(d / "ricci_manifest.json"));
}

TEST_CASE("flow on an abelian algebra writes a constant trajectory") {
  auto d = temp_dir();
  auto r = run_cli("flow --preset abelian:2,2 --metric random:seed=7 --s 0:1 --out " +
                   d.string());
  CHECK(r.code == 0);
  std::string csv = gricci::read_file((d / "flow_trajectory.csv").string());
  CHECK(csv.rfind("s,residual,tau_0_0", 0) == 0);
  // first and last data rows identical except the s column
  auto first = csv.find('\n') + 1;
  std::string row1 = csv.substr(first, csv.find('\n', first) - first);
  auto last = csv.rfind('\n', csv.size() - 2) + 1;
  std::string rowN = csv.substr(last, csv.size() - 1 - last);
  CHECK(row1.substr(row1.find(',')) == rowN.substr(rowN.find(',')));
}

TEST_CASE("verify-lemma emits a json record and is reproducible") {
  auto d = temp_dir();
  std::string args = "verify-lemma --n 20000 --seed 3 --out " + d.string();
  auto r1 = run_cli(args);
  auto r2 = run_cli(args);
  CHECK(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out.find("\"op\":\"verify-lemma\"") != std::string::npos);
  CHECK(r1.out.find("\"stderr\":") != std::string::npos);
  CHECK(r1.out.find("\"reference\":") != std::string::npos);
}

TEST_CASE("diagram reports automorphism counts") {
  auto d = temp_dir();
  auto r = run_cli("diagram --graph theta --out " + d.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("\"aut\":12") != std::string::npos);
}

TEST_CASE("validation failures exit 1 with json on stderr") {
  auto d = temp_dir();
  auto r = run_cli("validate --preset nonsense --out " + d.string());
  CHECK(r.code == 1);
  CHECK(r.out.find("\"error\":\"validation\"") != std::string::npos);
  auto r2 = run_cli("flow --preset su2 --metric canonical --s oops --out " + d.string());
  CHECK(r2.code == 1);
}

TEST_CASE("budget overrun exits 2 after reporting the partial estimate") {
  auto d = temp_dir();
  auto r = run_cli("verify-lemma --n 400000000 --budget 0.5 --out " + d.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("\"op\":\"verify-lemma\"") != std::string::npos);
  CHECK(r.out.find("budget exceeded") != std::string::npos);
}

TEST_CASE("config file fills defaults, unknown keys rejected") {
  auto d = temp_dir();
  gricci::write_file((d / "cfg.json").string(), "{\"n\": 20000, \"seed\": 3}");
  auto direct = run_cli("verify-lemma --n 20000 --seed 3 --out " + d.string());
  auto via_cfg = run_cli("verify-lemma --config " + (d / "cfg.json").string() +
                         " --out " + d.string());
  CHECK(via_cfg.code == 0);
  CHECK(via_cfg.out == direct.out);
  gricci::write_file((d / "bad.json").string(), "{\"frobnicate\": 1}");
  auto bad = run_cli("verify-lemma --config " + (d / "bad.json").string() + " --out " +
                     d.string());
  CHECK(bad.code == 1);
}
