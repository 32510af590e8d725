#include "gadd/measure.hpp"

#include <cmath>
#include <string>

#include "gadd/errors.hpp"
#include "gadd/philox.hpp"

namespace gadd {

bool GaussianMeasure::is_diagonal() const {
  for (Eigen::Index i = 0; i < covariance_.rows(); ++i)
    for (Eigen::Index j = 0; j < covariance_.cols(); ++j)
      if (i != j && covariance_(i, j) != 0.0) return false;
  return true;
}

Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& spd) {
  const Eigen::Index n = spd.rows();
  const double scale = n > 0 ? spd.diagonal().maxCoeff() : 1.0;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = spd(j, j) - L.row(j).head(j).squaredNorm();
    if (!(pivot > kPivotTolerance * scale))
      throw NumericalError("covariance is not positive definite: Cholesky pivot " + std::to_string(j + 1) +
                           " = " + std::to_string(pivot));
    L(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i)
      L(i, j) = (spd(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return L;
}

GaussianMeasure validate_covariance(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() < 1)
    throw DomainError("covariance must be a non-empty square matrix");
  const double scale = covariance.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < covariance.rows(); ++i)
    for (Eigen::Index j = i + 1; j < covariance.cols(); ++j)
      if (std::abs(covariance(i, j) - covariance(j, i)) > kSymmetryTolerance * scale)
        throw DomainError("covariance is not symmetric at (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ")");
  Eigen::MatrixXd sym = 0.5 * (covariance + covariance.transpose());
  Eigen::MatrixXd L = checked_cholesky(sym);
  return GaussianMeasure(std::move(sym), std::move(L));
}

GaussianMeasure measure_from_correlations(int dimension, const std::vector<std::tuple<int, int, double>>& rho) {
  if (dimension < 1) throw DomainError("dimension must be >= 1");
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(dimension, dimension);
  for (const auto& [i, j, r] : rho) {
    if (i < 1 || j < 1 || i > dimension || j > dimension || i == j)
      throw DomainError("correlation entry (" + std::to_string(i) + "," + std::to_string(j) + ") is invalid");
    cov(i - 1, j - 1) = r;
    cov(j - 1, i - 1) = r;
  }
  return validate_covariance(cov);
}

MarginalMeasure marginal(const GaussianMeasure& measure, const VariableSubset& u) {
  if (u.empty()) throw DomainError("marginal over the empty subset");
  u.check_range(measure.dimension());
  const auto k = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = measure.covariance()(u[a], u[b]);
  return {u, std::move(sub)};
}

Eigen::MatrixXd sample(const GaussianMeasure& measure, std::size_t count, std::uint64_t seed) {
  const int n = measure.dimension();
  const std::uint64_t blocks_per_draw = (static_cast<std::uint64_t>(n) + 1) / 2;
  const Philox4x32 rng(seed);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), n);
  Eigen::VectorXd z(n);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::uint64_t b = 0; b < blocks_per_draw; ++b) {
      const auto pair = rng.normal_pair(r * blocks_per_draw + b);
      z(static_cast<Eigen::Index>(2 * b)) = pair[0];
      if (static_cast<int>(2 * b + 1) < n) z(static_cast<Eigen::Index>(2 * b + 1)) = pair[1];
    }
    out.row(static_cast<Eigen::Index>(r)) = (measure.cholesky() * z).transpose();
  }
  return out;
}

}  // namespace gadd
