#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "gadd/expansion.hpp"

namespace gadd {

inline constexpr int kConfigSchema = 1;

struct ExternalModelSpec {
  std::string command;
  double timeout_seconds = 30.0;
  bool restart_on_failure = false;
  int pool = 1;
};

struct ModelSpec {
  std::string kind;  // quadratic_symmetric | additive_linear | polynomial | external
  std::array<double, 6> quadratic{2.0, 1.0, 2.0, 1.0, 2.0, 1.0};  // a0 a1 b0 b1 c0 c1
  std::vector<double> coefficients;
  double constant = 0.0;
  std::vector<std::pair<double, std::vector<int>>> terms;
  ExternalModelSpec external;
};

struct AdaptiveSpec {
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  int max_order = 4;
};

struct RunConfig {
  int dimension = 0;
  Eigen::MatrixXd covariance;
  ModelSpec model;
  int max_subset_size = 2;
  int max_degree = 2;
  IntegrationMethod method = IntegrationMethod::Auto;
  int quadrature_points = 0;  // 0: smallest odd n >= m + 1
  int reduction_order = 2;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  int histogram_bins = 50;
  double threshold = 0.99;
  std::optional<AdaptiveSpec> adaptive;
  std::filesystem::path output_directory = "gadd-out";
  std::filesystem::path expansion_path;  // reuse a saved expansion when set

  [[nodiscard]] SolveOptions solve_options() const;
};

/// Flat-table TOML subset: [table] headers, key = value with strings, numbers, booleans and
/// (nested, possibly multi-line) arrays, '#' comments. Throws ConfigError with the line number.
nlohmann::json parse_toml_subset(std::string_view text);

/// Validates the schema and every key. Relative paths are kept as given (resolved against the working directory).
RunConfig parse_config(const nlohmann::json& doc);

/// `.json` files are read as JSON, anything else as the TOML subset.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace gadd
