#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "gadd/config.hpp"
#include "gadd/errors.hpp"
#include "gadd/external_model.hpp"
#include "gadd/io.hpp"
#include "gadd/sensitivity.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace gadd;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gadd-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int gadd_cli(const std::string& args, const fs::path& log) {
  return run(std::string(GADD_CLI_PATH) + " " + args + " 2> '" + log.string() + "'");
}

const char* kCase2 = R"(schema = 1
[covariance]
dimension = 3
correlations = [[1, 2, 0.2], [1, 3, 0.2], [2, 3, 0.2]]
[model]
kind = "quadratic_symmetric"
parameters = [2, 1, 2, 1, 2, 1]
[truncation]
S = 2
m = 2
[sampling]
count = 200
seed = 3
)";

ExternalModelSpec shell_model(const std::string& command, double timeout = 5.0) {
  ExternalModelSpec s;
  s.command = command;
  s.timeout_seconds = timeout;
  return s;
}

}  // namespace

TEST_CASE("TOML subset parsing") {
  const auto j = parse_toml_subset(R"(
# comment
schema = 1
[a]
s = "x # not a comment"
b = true
f = -1.5e-3
n = [[1, 2, 0.5],
     [2, 3, -0.25]]   # trailing
)");
  CHECK(j["schema"] == 1);
  CHECK(j["a"]["s"] == "x # not a comment");
  CHECK(j["a"]["b"] == true);
  CHECK(j["a"]["f"].get<double>() == doctest::Approx(-1.5e-3));
  CHECK(j["a"]["n"][1][2].get<double>() == -0.25);

  try {
    (void)parse_toml_subset("schema = 1\n[a]\nx = [1, 2\n\ny = = 3\n");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_toml_subset("x = 'unterminated\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_subset("[a]\nx = 1\n[a]\ny = 2\n"), ConfigError);
}

TEST_CASE("config validation") {
  auto base = parse_toml_subset(kCase2);
  const RunConfig c = parse_config(base);
  CHECK(c.dimension == 3);
  CHECK(c.covariance(0, 2) == doctest::Approx(0.2));
  CHECK(c.sample_count == 200);
  CHECK(c.solve_options().quadrature_points == 3);

  auto unknown = base;
  unknown["truncation"]["M"] = 2;
  try {
    (void)parse_config(unknown);
    FAIL("expected an unknown-key error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("truncation.M") != std::string::npos);
  }
  auto no_schema = base;
  no_schema.erase("schema");
  CHECK_THROWS_AS(parse_config(no_schema), ConfigError);
  auto wrong_schema = base;
  wrong_schema["schema"] = 2;
  CHECK_THROWS_AS(parse_config(wrong_schema), ConfigError);
  auto even = base;
  even["quadrature"] = {{"points", 4}};
  CHECK_THROWS_AS(parse_config(even), ConfigError);
  auto bad_rho = base;
  bad_rho["covariance"]["correlations"] = {{1, 2, 1.5}};
  CHECK_THROWS(parse_config(bad_rho));
}

TEST_CASE("JSON and TOML configs agree") {
  const RunConfig t = load_config(fs::path(GADD_CONFIG_DIR) / "case2.toml");
  const RunConfig j = load_config(fs::path(GADD_CONFIG_DIR) / "case2.json");
  CHECK(t.dimension == j.dimension);
  CHECK((t.covariance - j.covariance).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.model.kind == j.model.kind);
  CHECK(t.model.quadratic == j.model.quadratic);
  CHECK(t.max_subset_size == j.max_subset_size);
  CHECK(t.max_degree == j.max_degree);
}

TEST_CASE("expansion round-trip gives identical indices") {
  PolynomialModel y(testing::case_polynomial());
  const auto e = assemble_and_solve(y, testing::case_measure(4), SolveOptions{});
  const auto back = expansion_from_json(nlohmann::json::parse(expansion_to_json(e).dump()));
  CHECK(back.constant() == e.constant());
  CHECK((back.coefficients() - e.coefficients()).cwiseAbs().maxCoeff() == 0.0);
  const auto a = indices(e);
  const auto b = indices(back);
  REQUIRE(a.subsets.size() == b.subsets.size());
  for (std::size_t k = 0; k < a.subsets.size(); ++k) {
    CHECK(a.subsets[k].variance_driven == b.subsets[k].variance_driven);
    CHECK(a.subsets[k].covariance_driven == b.subsets[k].covariance_driven);
  }
  auto broken = expansion_to_json(e);
  broken["coefficients"][0]["index"] = {9, 9, 9};
  CHECK_THROWS_AS(expansion_from_json(broken), ConfigError);
}

TEST_CASE("external model over the line protocol") {
  const std::string server = std::string(GADD_POLYSERVER_PATH) + " --quadratic 2,1,2,1,2,1";
  ExternalModel ext(3, shell_model(server));
  PolynomialModel ref(testing::case_polynomial());
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  Eigen::MatrixXd pts(3, 40);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i) = z(rng);
  const Eigen::VectorXd got = ext.evaluate_batch(pts);
  const Eigen::VectorXd want = ref.evaluate_batch(pts);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ext.evaluations() == 40);

  auto spec = shell_model(server);
  spec.pool = 3;
  ExternalModel pooled(3, spec);
  CHECK(pooled.pool_size() == 3);
  CHECK((pooled.evaluate_batch(pts) - got).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("malformed replies are quoted") {
  try {
    ExternalModel bad(2, shell_model("while read l; do echo 'nan-ish value'; done"));
    FAIL("expected a protocol error");
  } catch (const ModelProtocolError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("nan-ish value") != std::string::npos);
    CHECK(msg.find("handshake") != std::string::npos);
  }
  CHECK_THROWS_AS(ExternalModel(2, shell_model("while read l; do echo inf; done")), ModelProtocolError);
  CHECK_THROWS_AS(ExternalModel(2, shell_model("while read l; do echo 1 2; done")), ModelProtocolError);
}

TEST_CASE("timeouts and restarts") {
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(ExternalModel(1, shell_model("sleep 10", 0.3)), ModelProtocolError);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));

  // answers exactly once, then exits
  const std::string once = "read l; echo 1.5";
  ExternalModel fragile(1, shell_model(once));
  CHECK_THROWS_AS(fragile(Eigen::VectorXd::Ones(1)), ModelProtocolError);

  auto spec = shell_model(once);
  spec.restart_on_failure = true;
  ExternalModel revived(1, spec);
  CHECK(revived(Eigen::VectorXd::Ones(1)) == 1.5);
  CHECK(revived(Eigen::VectorXd::Ones(1)) == 1.5);
}

TEST_CASE("CLI exit codes") {
  const fs::path dir = scratch("exit");
  const fs::path log = dir / "log.txt";
  CHECK(gadd_cli("", log) == 2);
  CHECK(gadd_cli("decompose --config " + (dir / "missing.toml").string(), log) == 2);

  write_file(dir / "unknown.toml", std::string(kCase2) + "[output]\ndirectory = \"x\"\nformat = \"csv\"\n");
  CHECK(gadd_cli("decompose --config " + (dir / "unknown.toml").string(), log) == 2);
  CHECK(read_file(log).find("output.format") != std::string::npos);

  write_file(dir / "flat.toml", R"(schema = 1
[covariance]
dimension = 2
correlations = [[1, 2, 0.3]]
[model]
kind = "additive_linear"
coefficients = [0, 0]
constant = 4
)");
  CHECK(gadd_cli("sensitivity --config " + (dir / "flat.toml").string() + " --out " + (dir / "flat").string(), log) == 4);

  write_file(dir / "bad.toml", R"(schema = 1
[covariance]
dimension = 2
correlations = [[1, 2, 0.3]]
[model]
kind = "external"
command = "while read l; do echo oops; done"
)");
  CHECK(gadd_cli("decompose --config " + (dir / "bad.toml").string() + " --out " + (dir / "bad").string(), log) == 3);
  CHECK(read_file(log).find("\"oops\"") != std::string::npos);

  write_file(dir / "notpd.toml", R"(schema = 1
[covariance]
dimension = 2
matrix = [[1, 2], [2, 1]]
[model]
kind = "additive_linear"
coefficients = [1, 1]
)");
  CHECK(gadd_cli("decompose --config " + (dir / "notpd.toml").string() + " --out " + (dir / "notpd").string(), log) == 2);
}

TEST_CASE("CLI runs are reproducible") {
  const fs::path dir = scratch("repro");
  const fs::path log = dir / "log.txt";
  write_file(dir / "run.toml", kCase2);
  const std::string cfg = " --config " + (dir / "run.toml").string();
  for (const char* sub : {"decompose", "sensitivity", "sample"}) {
    REQUIRE(gadd_cli(std::string(sub) + cfg + " --out " + (dir / "a").string(), log) == 0);
    REQUIRE(gadd_cli(std::string(sub) + cfg + " --out " + (dir / "b").string(), log) == 0);
  }
  for (const char* f : {"expansion.json", "components.csv", "sensitivity.json", "indices.csv", "effects.csv",
                        "samples.csv", "summary.json"})
    CHECK_MESSAGE(read_file(dir / "a" / f) == read_file(dir / "b" / f), f);
  CHECK_FALSE(read_file(dir / "a" / "samples.csv").empty());

  REQUIRE(gadd_cli(std::string("sample") + cfg + " --seed 99 --out " + (dir / "c").string(), log) == 0);
  CHECK(read_file(dir / "a" / "samples.csv") != read_file(dir / "c" / "samples.csv"));

  // GADD_OUT_DIR is honoured and --out wins over it
  REQUIRE(run("GADD_OUT_DIR='" + (dir / "env").string() + "' " + GADD_CLI_PATH + " decompose" + cfg + " 2> /dev/null") == 0);
  CHECK(fs::exists(dir / "env" / "expansion.json"));
  REQUIRE(run("GADD_OUT_DIR='" + (dir / "env2").string() + "' " + GADD_CLI_PATH + " decompose" + cfg + " --out " +
              (dir / "flag").string() + " 2> /dev/null") == 0);
  CHECK(fs::exists(dir / "flag" / "expansion.json"));
  CHECK_FALSE(fs::exists(dir / "env2"));
}

TEST_CASE("classical flag agrees with the generalized run on a diagonal covariance") {
  const fs::path dir = scratch("classical");
  const fs::path log = dir / "log.txt";
  write_file(dir / "diag.toml", R"(schema = 1
[covariance]
dimension = 3
matrix = [[1.5, 0, 0], [0, 0.5, 0], [0, 0, 2]]
[model]
kind = "quadratic_symmetric"
parameters = [2, 1, 2, 1, 2, 1]
)");
  const std::string cfg = " --config " + (dir / "diag.toml").string();
  REQUIRE(gadd_cli("decompose" + cfg + " --out " + (dir / "g").string(), log) == 0);
  REQUIRE(gadd_cli("decompose --classical" + cfg + " --out " + (dir / "c").string(), log) == 0);
  const auto g = load_expansion(dir / "g" / "expansion.json");
  const auto c = load_expansion(dir / "c" / "expansion.json");
  CHECK(c.diagnostics().classical);
  CHECK((g.coefficients() - c.coefficients()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(g.constant() == doctest::Approx(c.constant()).epsilon(1e-12));
}

TEST_CASE("twenty-variable black box logs 801 evaluations per integral") {
  const fs::path dir = scratch("n20");
  const fs::path log = dir / "log.txt";
  std::string terms = "[";
  for (int i = 0; i < 20; ++i) {
    std::string e;
    for (int k = 0; k < 20; ++k) e += std::string(", ") + (k == i ? "2" : (k == (i + 1) % 20 ? "1" : "0"));
    terms += std::string(i ? ",\n  " : "") + "[" + std::to_string(0.1 * (i + 1)) + e + "]";
  }
  terms += "]";
  write_file(dir / "n20.toml", "schema = 1\n[covariance]\ndimension = 20\ncorrelations = [[1, 2, 0.3], [5, 9, -0.2], [19, 20, 0.5]]\n"
                               "[model]\nkind = \"polynomial\"\nterms = " + terms +
                               "\n[truncation]\nS = 2\nm = 2\n[quadrature]\nmethod = \"reduction\"\npoints = 3\n");
  REQUIRE(gadd_cli("decompose --config " + (dir / "n20.toml").string() + " --out " + (dir / "out").string(), log) == 0);
  std::istringstream in(read_file(log));
  std::string line;
  int plans = 0;
  bool all_801 = true;
  while (std::getline(in, line)) {
    if (line.find("integral plan") == std::string::npos) continue;
    ++plans;
    all_801 = all_801 && line.find(": 801 model evaluations") != std::string::npos;
  }
  CHECK(plans > 0);
  CHECK(all_801);
}
