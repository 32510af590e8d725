// Serves a builtin polynomial model over the line protocol on stdin/stdout.
//
//   gadd_polyserver --quadratic 2,1,2,1,2,1
//   gadd_polyserver --config run.toml        (its [model] table must name a builtin)

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gadd/config.hpp"
#include "gadd/errors.hpp"
#include "gadd/external_model.hpp"
#include "gadd/model.hpp"

using namespace gadd;

int main(int argc, char** argv) {
  CLI::App app{"line-protocol server for builtin models"};
  std::string config;
  std::vector<double> quadratic;
  auto* c = app.add_option("--config", config, "config whose [model] table names a builtin model");
  auto* q = app.add_option("--quadratic", quadratic, "a0,a1,b0,b1,c0,c1 of the symmetric quadratic")->delimiter(',');
  c->excludes(q);
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<Model> model;
  try {
    if (!config.empty()) {
      const RunConfig rc = load_config(config);
      if (rc.model.kind == "external") throw ConfigError("the served model must be a builtin");
      model = make_model(rc.model, rc.dimension);
    } else {
      ModelSpec spec;
      spec.kind = "quadratic_symmetric";
      if (!quadratic.empty()) {
        if (quadratic.size() != 6) throw ConfigError("--quadratic takes six numbers");
        std::copy(quadratic.begin(), quadratic.end(), spec.quadratic.begin());
      }
      model = make_model(spec, 3);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "gadd_polyserver: %s\n", e.what());
    return 2;
  }

  const int n = model->dimension();
  std::string line;
  Eigen::VectorXd x(n);
  while (std::getline(std::cin, line)) {
    std::istringstream in(line);
    int k = 0;
    double v = 0.0;
    while (k < n && in >> v) x(k++) = v;
    std::string rest;
    if (k != n || (in >> rest)) {
      std::fprintf(stderr, "gadd_polyserver: expected %d numbers, got \"%s\"\n", n, line.c_str());
      return 3;
    }
    std::printf("%.17g\n", (*model)(x));
    std::fflush(stdout);
  }
  return 0;
}
