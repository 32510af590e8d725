#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "gadd/subset.hpp"

namespace gadd {

/// Zero-mean multivariate Gaussian N(0, Σ). Immutable; construct through validate_covariance().
class GaussianMeasure {
 public:
  [[nodiscard]] int dimension() const { return static_cast<int>(covariance_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& covariance() const { return covariance_; }
  /// Lower-triangular L with L Lᵀ = Σ.
  [[nodiscard]] const Eigen::MatrixXd& cholesky() const { return cholesky_; }
  [[nodiscard]] bool is_diagonal() const;

 private:
  friend GaussianMeasure validate_covariance(const Eigen::MatrixXd& covariance);
  GaussianMeasure(Eigen::MatrixXd covariance, Eigen::MatrixXd cholesky)
      : covariance_(std::move(covariance)), cholesky_(std::move(cholesky)) {}

  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd cholesky_;
};

/// Principal-submatrix measure of X_u.
struct MarginalMeasure {
  VariableSubset subset;
  Eigen::MatrixXd covariance;
};

/// Smallest admissible Cholesky pivot, relative to the largest diagonal entry.
inline constexpr double kPivotTolerance = 1e-10;
inline constexpr double kSymmetryTolerance = 1e-12;

/// Cholesky factor with an explicit pivot check; throws NumericalError naming the failing pivot.
Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& spd);

GaussianMeasure validate_covariance(const Eigen::MatrixXd& covariance);

/// Unit variances plus 1-based (i, j, ρ_ij) entries; unspecified pairs are uncorrelated.
GaussianMeasure measure_from_correlations(int dimension, const std::vector<std::tuple<int, int, double>>& rho);

MarginalMeasure marginal(const GaussianMeasure& measure, const VariableSubset& u);

/// `count` draws as rows of a count×N matrix. Draw r uses Philox blocks keyed on (seed, r), so the
/// sequence for a given seed does not depend on how many draws are requested.
Eigen::MatrixXd sample(const GaussianMeasure& measure, std::size_t count, std::uint64_t seed);

}  // namespace gadd
