#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gadd/measure.hpp"
#include "gadd/model.hpp"
#include "gadd/polynomial.hpp"

namespace gadd::testing {

inline constexpr std::array<std::array<double, 3>, 4> kCaseCorrelations{{
    {0.0, 0.0, 0.0},
    {0.2, 0.2, 0.2},
    {0.2, 0.4, 0.8},
    {-0.2, 0.4, -0.8},
}};

inline constexpr std::array<double, 6> kQuadraticParameters{2.0, 1.0, 2.0, 1.0, 2.0, 1.0};

inline GaussianMeasure case_measure(int c) {
  const auto& r = kCaseCorrelations[static_cast<std::size_t>(c - 1)];
  return measure_from_correlations(3, {{1, 2, r[0]}, {1, 3, r[1]}, {2, 3, r[2]}});
}

inline PolynomialD case_polynomial() { return quadratic_symmetric(kQuadraticParameters); }

/// A Aᵀ + 0.3 I with A uniform in [-1, 1]; rescaled to unit diagonal when `correlation` is set.
inline Eigen::MatrixXd random_covariance(int n, std::mt19937_64& rng, bool correlation = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  Eigen::MatrixXd s = a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
  if (correlation) {
    const Eigen::VectorXd d = s.diagonal().cwiseSqrt().cwiseInverse();
    s = d.asDiagonal() * s * d.asDiagonal();
  }
  return 0.5 * (s + s.transpose());
}

inline Eigen::MatrixXd random_diagonal(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 2.0);
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = u(rng);
  return d.asDiagonal();
}

/// Random sparse polynomial over N variables; at most `max_vars` variables per term, total degree <= degree.
inline PolynomialD random_polynomial(int n, int degree, int max_vars, int terms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> var(0, n - 1);
  std::vector<std::pair<double, std::vector<int>>> out;
  out.push_back({coef(rng), std::vector<int>(static_cast<std::size_t>(n), 0)});
  for (int t = 0; t < terms; ++t) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    const int k = std::uniform_int_distribution<int>(1, max_vars)(rng);
    int budget = std::uniform_int_distribution<int>(1, degree)(rng);
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < k && static_cast<int>(chosen.size()) < n) {
      const int v = var(rng);
      if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) chosen.push_back(v);
    }
    for (int v : chosen) {
      if (budget == 0) break;
      const int d = std::uniform_int_distribution<int>(1, budget)(rng);
      e[static_cast<std::size_t>(v)] = d;
      budget -= d;
    }
    out.push_back({coef(rng), e});
  }
  return polynomial_from_terms(n, out);
}

}  // namespace gadd::testing
