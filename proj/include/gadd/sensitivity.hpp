#pragma once

#include <map>
#include <optional>
#include <vector>

#include "gadd/expansion.hpp"
#include "gadd/measure.hpp"

namespace gadd {

class Model;

/// E[y_u y_v] for one unordered pair of non-nested components, under the joint marginal f_{u∪v}.
struct CovarianceTerm {
  VariableSubset u;
  VariableSubset v;
  double value = 0.0;
};

struct VarianceBreakdown {
  double variance_sum = 0.0;    // Σ_u E[y_u²]
  double covariance_sum = 0.0;  // Σ_{u⊄v⊄u} E[y_u y_v], ordered pairs
  double total = 0.0;           // σ²
  std::map<VariableSubset, double> second_moments;
  std::vector<CovarianceTerm> pairs;  // each unordered pair once
};

struct SubsetIndices {
  VariableSubset subset;
  double variance_driven = 0.0;    // S_{u,v}
  double covariance_driven = 0.0;  // S_{u,c}
  double total = 0.0;              // S_u
};

struct TotalEffect {
  int variable = 0;  // 0-based
  double value = 0.0;
  int rank = 0;  // 1 = most important; tied variables share a rank
  bool tied = false;
};

struct EffectiveDimensions {
  double threshold = 0.99;
  int superposition = 0;
  int truncation = 0;
  bool superposition_saturated = false;
  bool truncation_saturated = false;
};

struct SensitivityReport {
  int dimension = 0;
  int max_subset_size = 0;
  int max_degree = 0;
  double mean = 0.0;
  double variance = 0.0;
  /// Every subset with 1 <= |u| <= S, canonical order; subsets without basis members carry zeros.
  std::vector<SubsetIndices> subsets;
  std::vector<TotalEffect> effects;
  std::optional<EffectiveDimensions> dimensions;

  [[nodiscard]] const SubsetIndices* find(const VariableSubset& u) const;
  [[nodiscard]] double variance_driven_sum() const;
  [[nodiscard]] double covariance_driven_sum() const;
};

inline constexpr double kTieTolerance = 1e-9;
inline constexpr double kDegenerateVarianceTolerance = 1e-12;

/// μ = y_∅.
double mean(const AddExpansion& expansion);

/// σ² from the component functions; expectations under the joint marginals of `measure`.
VarianceBreakdown variance(const AddExpansion& expansion, const GaussianMeasure& measure);
inline VarianceBreakdown variance(const AddExpansion& expansion) { return variance(expansion, expansion.basis().measure()); }

/// Triplets (S_{u,v}, S_{u,c}, S_u) plus total effects; throws DegenerateResponseError when σ² ≈ 0.
SensitivityReport indices(const AddExpansion& expansion, const GaussianMeasure& measure);
inline SensitivityReport indices(const AddExpansion& expansion) { return indices(expansion, expansion.basis().measure()); }

/// Σ_{v ≠ u} E[y_u y_v] / σ², nested v included.
double unreduced_correlative_index(const AddExpansion& expansion, const GaussianMeasure& measure, const VariableSubset& u);

/// S̄_i = Σ_{u ∋ i} S_u with descending ranks; values within kTieTolerance (relative) tie.
std::vector<TotalEffect> total_effects(const SensitivityReport& report);

/// Smallest S with |1 − Σ_{1≤|u|≤S} S_u| <= 1 − p (superposition) and |1 − Σ_{u⊆{1..S}} S_u| <= 1 − p
/// (truncation). Reports N with the saturation flag when no S qualifies.
EffectiveDimensions effective_dimensions(const SensitivityReport& report, double p);

struct AdaptiveOptions {
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  int max_order = 4;        // m_max
  int max_subset_size = 0;  // 0: min(N, m_max)
  SolveOptions solve{};     // truncation fields are overridden per sweep
};

struct RetainedComponent {
  VariableSubset subset;
  int order = 0;        // m_u
  double index = 0.0;   // S̃_{u, m_u}
};

struct AdaptiveSelection {
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  std::vector<RetainedComponent> retained;
  /// S̃_{u,m} for m = 1..m_max (index m-1).
  std::map<VariableSubset, std::vector<double>> history;
};

AdaptiveSelection adaptive_select(Model& model, const GaussianMeasure& measure, const AdaptiveOptions& options);

}  // namespace gadd
