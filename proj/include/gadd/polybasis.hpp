#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gadd/measure.hpp"
#include "gadd/polynomial.hpp"

namespace gadd {

struct BasisOptions {
  int max_degree = 10;
  int max_subset_size = 6;
  /// Hierarchical-orthogonality check; members above this are repaired.
  double hierarchy_tolerance = 1e-8;
  double mean_tolerance = 1e-10;
};

/// Measure-consistent orthonormal polynomial ψ_{u,j} over x_u.
struct BasisFunction {
  VariableSubset subset;
  MultiIndex index;
  PolynomialD poly;
  double norm_check = 1.0;  // E[ψ²] under f_u after normalization
  bool repaired = false;    // needed the hierarchical-orthogonality fallback

  template <typename Derived>
  [[nodiscard]] double operator()(const Eigen::MatrixBase<Derived>& x_u) const {
    return poly.evaluate(x_u);
  }
};

/// Nested basis {ψ_{u,j} : 1 <= |u| <= S, all j_k >= 1, |j| <= m} in canonical order
/// (|u|, u lexicographic, |j|, j descending-lexicographic). Members of one subset are contiguous.
class BasisSet {
 public:
  BasisSet(GaussianMeasure measure, int max_subset_size, int max_degree, std::vector<BasisFunction> functions);

  [[nodiscard]] const GaussianMeasure& measure() const { return measure_; }
  [[nodiscard]] int dimension() const { return measure_.dimension(); }
  [[nodiscard]] int max_subset_size() const { return max_subset_size_; }
  [[nodiscard]] int max_degree() const { return max_degree_; }

  [[nodiscard]] std::size_t size() const { return functions_.size(); }
  [[nodiscard]] const BasisFunction& operator[](std::size_t k) const { return functions_[k]; }
  [[nodiscard]] const std::vector<BasisFunction>& functions() const { return functions_; }
  [[nodiscard]] auto begin() const { return functions_.begin(); }
  [[nodiscard]] auto end() const { return functions_.end(); }

  [[nodiscard]] std::optional<std::size_t> find(const VariableSubset& u, const MultiIndex& j) const;
  /// Subsets that own at least one member, canonical order.
  [[nodiscard]] const std::vector<VariableSubset>& subsets() const { return subsets_; }
  /// Half-open [first, last) range of the members over u (empty range if u owns none).
  [[nodiscard]] std::pair<std::size_t, std::size_t> range(const VariableSubset& u) const;
  [[nodiscard]] std::size_t repaired_count() const;

 private:
  GaussianMeasure measure_;
  int max_subset_size_;
  int max_degree_;
  std::vector<BasisFunction> functions_;
  std::vector<VariableSubset> subsets_;
  std::vector<std::pair<std::size_t, std::size_t>> ranges_;
};

/// ψ̃_{u,j} = (-1)^{|j|} φ_u⁻¹ ∂^j φ_u, by the recurrence p ← ∂_k p − p·(Σ_u⁻¹ x)_k.
PolynomialD hermite_raw(const MarginalMeasure& m, const MultiIndex& j, int max_degree = BasisOptions{}.max_degree);

/// Scales `raw` to unit norm under f_u (divides by the square root of ⟨raw, raw⟩).
BasisFunction orthonormalize(const PolynomialD& raw, const MarginalMeasure& m, MultiIndex index = {});

BasisSet build_basis(const GaussianMeasure& measure, int max_subset_size, int max_degree,
                     const BasisOptions& options = {});

/// Number of admissible (u, j) pairs, by enumeration.
std::size_t basis_size(int dimension, int max_subset_size, int max_degree);

}  // namespace gadd
