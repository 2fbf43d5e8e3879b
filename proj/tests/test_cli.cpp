#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the installed binary: exit codes, report files, and
// bit-identical replay in reference mode.

namespace {

const std::string kBin = BMOLAB_CLI_PATH;

std::string tmp_dir(const std::string& tag) {
  const std::string base = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp");
  const std::string dir = base + "/bmolab_cli_" + tag;
  if (std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) != 0) FAIL("cannot prepare " + dir);
  return dir;
}

int run(const std::string& args) {
  const int rc = std::system((kBin + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

} // namespace

TEST_CASE("cli: norm on a constant field and deterministic replay") {
  const std::string dir = tmp_dir("norm");
  write_file(dir + "/cfg.ini",
             "[field]\n"
             "catalog = constant\n"
             "dim = 2\n"
             "resolution_exp = 4\n"
             "c_re = 2\n");
  REQUIRE(run("norm --config " + dir + "/cfg.ini --out " + dir + "/a") == 0);
  REQUIRE(run("norm --config " + dir + "/cfg.ini --out " + dir + "/b") == 0);
  const std::string a = slurp(dir + "/a/norm_report.csv");
  REQUIRE(a == slurp(dir + "/b/norm_report.csv"));
  REQUIRE(slurp(dir + "/a/norm_report.json") == slurp(dir + "/b/norm_report.json"));
  REQUIRE(a.find("total,,,2,,") != std::string::npos);
}

TEST_CASE("cli: seeded random field norm replays byte for byte") {
  const std::string dir = tmp_dir("rand");
  write_file(dir + "/cfg.ini",
             "[run]\n"
             "seed = 7\n"
             "[field]\n"
             "catalog = random_piecewise\n"
             "dim = 2\n"
             "resolution_exp = 5\n");
  REQUIRE(run("norm --config " + dir + "/cfg.ini --out " + dir + "/a") == 0);
  REQUIRE(run("norm --config " + dir + "/cfg.ini --out " + dir + "/b") == 0);
  REQUIRE(slurp(dir + "/a/norm_report.csv") == slurp(dir + "/b/norm_report.csv"));
}

TEST_CASE("cli: config errors exit 2") {
  const std::string dir = tmp_dir("bad");
  write_file(dir + "/cfg.ini", "[field]\ncatalog = no_such_thing\n");
  REQUIRE(run("norm --config " + dir + "/cfg.ini --out " + dir) == 2);
  REQUIRE(run("norm --config " + dir + "/missing.ini --out " + dir) == 2);
}

TEST_CASE("cli: require-exact flags heuristic scales with exit 3") {
  const std::string dir = tmp_dir("exact");
  // m=7 checkerboard: fine scales exceed the BB candidate threshold
  write_file(dir + "/cfg.ini",
             "[field]\n"
             "catalog = checkerboard_eta\n"
             "dim = 2\n"
             "resolution_exp = 7\n");
  REQUIRE(run("norm --config " + dir + "/cfg.ini --out " + dir + "/x --require-exact") == 3);
}

TEST_CASE("cli: verify suite pass and failure exit codes") {
  const std::string dir = tmp_dir("verify");
  write_file(dir + "/cfg.ini", "[verify]\nquick = 1\n");
  REQUIRE(run("verify n1-identity --config " + dir + "/cfg.ini --out " + dir) == 0);
  const std::string report = slurp(dir + "/verify_n1-identity.txt");
  REQUIRE(report.find("pass: true") != std::string::npos);
  // an absurd tolerance forces a [FAIL] exit of 1 on the calibration suite
  REQUIRE(run("verify uniform-average --config " + dir + "/cfg.ini --out " + dir + " --tolerance 1e-9") == 1);
  REQUIRE(run("verify no-such-suite --out " + dir) == 2); // unknown suite is a config error

}

TEST_CASE("cli: sweep produces csv, json, svg with the caveat recorded") {
  const std::string dir = tmp_dir("sweep");
  write_file(dir + "/cfg.ini",
             "[sweep]\n"
             "shape = axis_rect\n"
             "w = 0.5\n"
             "h = 0.5\n"
             "resolution_exp = 7\n"
             "k_lo = 2\n"
             "k_hi = 4\n");
  REQUIRE(run("sweep --config " + dir + "/cfg.ini --out " + dir) == 0);
  const std::string csv = slurp(dir + "/sweep.csv");
  REQUIRE(csv.find("# caveat: axis-parallel") != std::string::npos);
  REQUIRE(csv.find("k,epsilon,value,target,rel_error,method,optimal") != std::string::npos);
  REQUIRE(slurp(dir + "/sweep.svg").find("<svg") == 0);
  REQUIRE(slurp(dir + "/sweep.json").find("per_k") != std::string::npos);
}

TEST_CASE("cli: classify writes the verdict files") {
  const std::string dir = tmp_dir("classify");
  write_file(dir + "/cfg.ini",
             "[g]\n"
             "kind = affine\n"
             "alpha_re = 2\n"
             "beta_im = 1\n");
  REQUIRE(run("classify --config " + dir + "/cfg.ini --out " + dir) == 0);
  const std::string csv = slurp(dir + "/verdict.csv");
  REQUIRE(csv.find("affine") != std::string::npos);
  const std::string json = slurp(dir + "/verdict.json");
  REQUIRE(json.find("\"bc_rn_to_bc_rn\": false") != std::string::npos); // g(0) = i
  REQUIRE(json.find("\"continuous_on_b\": true") != std::string::npos);
}

TEST_CASE("cli: superpose logs the 1-Lipschitz bound for abs over eta") {
  const std::string dir = tmp_dir("superpose");
  write_file(dir + "/cfg.ini",
             "[field]\n"
             "catalog = checkerboard_eta\n"
             "dim = 2\n"
             "resolution_exp = 5\n"
             "[g]\n"
             "kind = abs\n");
  REQUIRE(run("superpose --config " + dir + "/cfg.ini --out " + dir) == 0);
  const std::string csv = slurp(dir + "/superpose.csv");
  REQUIRE(csv.find("bound,lipschitz") != std::string::npos);
  const std::string json = slurp(dir + "/superpose.json");
  REQUIRE(json.find("\"holds\": true") != std::string::npos);
}
