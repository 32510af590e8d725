// gadd: generalized ADD of a response with correlated Gaussian inputs.
//
//   gadd decompose   --config run.toml [--classical] [--out dir] [--seed n]
//   gadd sensitivity --config run.toml ...
//   gadd sample      --config run.toml ...
//
// Environment: GADD_OUT_DIR overrides the output directory (a --out flag wins over it),
// GADD_PARALLEL sets the external-model process pool width.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gadd/config.hpp"
#include "gadd/errors.hpp"
#include "gadd/expansion.hpp"
#include "gadd/external_model.hpp"
#include "gadd/io.hpp"
#include "gadd/measure.hpp"
#include "gadd/sensitivity.hpp"

namespace fs = std::filesystem;
using namespace gadd;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kProtocol = 3, kDegenerate = 4, kNumerical = 5 };

struct Flags {
  std::string config;
  bool classical = false;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void log(const std::string& msg) { std::fprintf(stderr, "gadd: %s\n", msg.c_str()); }

RunConfig resolve(const Flags& f) {
  RunConfig c = load_config(f.config);
  if (const char* env = std::getenv("GADD_OUT_DIR"); env && *env) c.output_directory = env;
  if (!f.out.empty()) c.output_directory = f.out;
  if (f.seed) c.seed = *f.seed;
  if (const char* env = std::getenv("GADD_PARALLEL"); env && *env) {
    char* end = nullptr;
    const long k = std::strtol(env, &end, 10);
    if (*end != '\0' || k < 1) throw ConfigError("GADD_PARALLEL must be a positive integer, got '" + std::string(env) + "'");
    c.model.external.pool = static_cast<int>(k);
  }
  fs::create_directories(c.output_directory);
  return c;
}

std::ofstream open_output(const RunConfig& c, const char* name) {
  const fs::path p = c.output_directory / name;
  std::ofstream out(p);
  if (!out) throw ResourceError("cannot write '" + p.string() + "'");
  log("writing " + p.string());
  return out;
}

AddExpansion compute(const RunConfig& c, const Flags& f, Model& model) {
  const SolveOptions opts = c.solve_options();
  const GaussianMeasure measure = validate_covariance(c.covariance);
  if (f.classical && !measure.is_diagonal())
    log("warning: --classical ignores the off-diagonal covariance entries");
  AddExpansion e = f.classical ? classical_add(model, c.covariance.diagonal(), opts)
                               : assemble_and_solve(model, measure, opts);
  const auto& d = e.diagnostics();
  for (std::size_t k = 0; k < d.plan_evaluations.size(); ++k)
    log("integral plan " + std::to_string(k + 1) + "/" + std::to_string(d.plan_evaluations.size()) + ": " +
        std::to_string(d.plan_evaluations[k]) + " model evaluations");
  if (!d.plan_evaluations.empty()) log("total model evaluations: " + std::to_string(d.model_evaluations));
  log("S=" + std::to_string(e.max_subset_size()) + " m=" + std::to_string(e.max_degree()) + ", " +
      std::to_string(e.basis().size()) + " basis functions, condition estimate " + format_real(d.condition_estimate));
  return e;
}

AddExpansion obtain(const RunConfig& c, const Flags& f, std::unique_ptr<Model>& model) {
  if (!c.expansion_path.empty()) {
    log("reusing expansion " + c.expansion_path.string());
    return load_expansion(c.expansion_path);
  }
  model = make_model(c.model, c.dimension);
  return compute(c, f, *model);
}

int cmd_decompose(const Flags& f) {
  const RunConfig c = resolve(f);
  auto model = make_model(c.model, c.dimension);
  const AddExpansion e = compute(c, f, *model);
  save_expansion(e, c.output_directory / "expansion.json");
  log("writing " + (c.output_directory / "expansion.json").string());
  auto out = open_output(c, "components.csv");
  write_components_csv(e, out);
  return kOk;
}

int cmd_sensitivity(const Flags& f) {
  const RunConfig c = resolve(f);
  std::unique_ptr<Model> model;
  const AddExpansion e = obtain(c, f, model);
  SensitivityReport r = indices(e);
  r.dimensions = effective_dimensions(r, c.threshold);
  const VarianceBreakdown vb = variance(e);
  std::optional<AdaptiveSelection> sel;
  if (c.adaptive) {
    if (!model) model = make_model(c.model, c.dimension);
    AdaptiveOptions a;
    a.epsilon1 = c.adaptive->epsilon1;
    a.epsilon2 = c.adaptive->epsilon2;
    a.max_order = c.adaptive->max_order;
    a.solve = c.solve_options();
    sel = adaptive_select(*model, e.basis().measure(), a);
    log("adaptive selection retained " + std::to_string(sel->retained.size()) + " components");
  }
  {
    auto out = open_output(c, "sensitivity.json");
    out << report_to_json(r, vb, sel ? &*sel : nullptr).dump(2) << '\n';
  }
  {
    auto out = open_output(c, "indices.csv");
    write_indices_csv(r, out);
  }
  auto out = open_output(c, "effects.csv");
  write_effects_csv(r, out);
  return kOk;
}

int cmd_sample(const Flags& f) {
  const RunConfig c = resolve(f);
  std::unique_ptr<Model> model;
  const AddExpansion e = obtain(c, f, model);
  const GaussianMeasure& measure = e.basis().measure();
  const Eigen::MatrixXd x = sample(measure, c.sample_count, c.seed);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y(i) = evaluate_surrogate(e, x.row(i).transpose());
  const SampleSummary s = summarize(y, c.histogram_bins);
  log(std::to_string(s.count) + " surrogate samples, seed " + std::to_string(c.seed));
  {
    auto out = open_output(c, "samples.csv");
    write_samples_csv(x, y, out);
  }
  auto out = open_output(c, "summary.json");
  out << summary_to_json(s).dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized ANOVA dimensional decomposition for correlated Gaussian inputs"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "run configuration (TOML subset or .json)")->required();
    sub->add_flag("--classical", flags.classical, "classical ADD under the product of the marginals");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "sampling seed");
  };
  auto* dec = app.add_subcommand("decompose", "write expansion.json and components.csv");
  auto* sen = app.add_subcommand("sensitivity", "write sensitivity.json, indices.csv and effects.csv");
  auto* smp = app.add_subcommand("sample", "write samples.csv and summary.json");
  for (auto* s : {dec, sen, smp}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*dec) return cmd_decompose(flags);
    if (*sen) return cmd_sensitivity(flags);
    return cmd_sample(flags);
  } catch (const ConfigError& e) {
    log(std::string("config error: ") + e.what());
    return kConfig;
  } catch (const ModelProtocolError& e) {
    log(std::string("model protocol error: ") + e.what());
    return kProtocol;
  } catch (const DegenerateResponseError& e) {
    log(std::string("degenerate response: ") + e.what());
    return kDegenerate;
  } catch (const DomainError& e) {
    log(std::string("invalid input: ") + e.what());
    return kConfig;
  } catch (const NumericalError& e) {
    log(std::string("numerical failure: ") + e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kFailure;
  }
}
