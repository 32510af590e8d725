#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "gadd/expansion.hpp"
#include "gadd/sensitivity.hpp"

namespace gadd {

inline constexpr int kExpansionSchema = 1;

/// 17 significant digits, '.' separator.
std::string format_real(double v);

nlohmann::json expansion_to_json(const AddExpansion& expansion);
/// Rebuilds the basis from the stored covariance and truncation; coefficients are matched by (u, j).
AddExpansion expansion_from_json(const nlohmann::json& doc);
void save_expansion(const AddExpansion& expansion, const std::filesystem::path& path);
AddExpansion load_expansion(const std::filesystem::path& path);

/// One row per monomial of every component (constant first): subset,exponents,coefficient.
void write_components_csv(const AddExpansion& expansion, std::ostream& out);

nlohmann::json report_to_json(const SensitivityReport& report, const VarianceBreakdown& breakdown,
                              const AdaptiveSelection* adaptive = nullptr);
/// subset,variance_driven,covariance_driven,total with a closing "sum" row.
void write_indices_csv(const SensitivityReport& report, std::ostream& out);
/// variable,total_effect,rank,tied.
void write_effects_csv(const SensitivityReport& report, std::ostream& out);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_dev = 0.0;
  double mean_std_error = 0.0;
  double variance_std_error = 0.0;  // sqrt((m4 - s^4) / n)
  double min = 0.0;
  double max = 0.0;
  std::vector<double> bin_edges;
  std::vector<std::size_t> bin_counts;
};

SampleSummary summarize(const Eigen::VectorXd& y, int bins);
nlohmann::json summary_to_json(const SampleSummary& summary);

/// Header index,x1..xN,y then one row per draw.
void write_samples_csv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::ostream& out);

}  // namespace gadd
