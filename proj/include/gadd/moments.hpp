#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gadd/errors.hpp"
#include "gadd/measure.hpp"
#include "gadd/polynomial.hpp"

namespace gadd {

inline constexpr int kDefaultMomentDegreeCap = 32;

/// Exact moments E[X^α] of N(0, Σ) by the Isserlis recursion
///   E[X^α] = Σ_j (α - e_i)_j Σ_ij E[X^(α - e_i - e_j)],  i = first nonzero entry of α,
/// which sums over Wick pairings of the multiset {i^α_i}. Results are memoized by exponent pattern.
/// One engine per covariance; not shared across threads.
template <typename Scalar>
class MomentEngine {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit MomentEngine(Matrix covariance, int degree_cap = kDefaultMomentDegreeCap)
      : cov_(std::move(covariance)), cap_(degree_cap) {}

  [[nodiscard]] Eigen::Index dimension() const { return cov_.rows(); }
  [[nodiscard]] const Matrix& covariance() const { return cov_; }

  Scalar moment(const MultiIndex& alpha) {
    if (static_cast<Eigen::Index>(alpha.size()) != cov_.rows())
      throw DomainError("moment index length " + std::to_string(alpha.size()) + " does not match covariance size " +
                        std::to_string(cov_.rows()));
    const int total = alpha.total();
    if (total > cap_)
      throw ResourceError("moment of total degree " + std::to_string(total) + " exceeds cap " + std::to_string(cap_));
    if (total % 2 != 0) return Scalar(0);
    std::vector<int> a = alpha.degrees();
    return recurse(a);
  }

  Scalar expectation(const Polynomial<Scalar>& p) {
    Scalar sum(0);
    for (const auto& [e, c] : p.terms()) sum += c * moment(e);
    return sum;
  }

  [[nodiscard]] std::size_t memo_size() const { return memo_.size(); }

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
      return h;
    }
  };

  Scalar recurse(std::vector<int>& a) {
    int total = 0;
    std::size_t first = a.size();
    for (std::size_t k = 0; k < a.size(); ++k) {
      total += a[k];
      if (a[k] != 0 && first == a.size()) first = k;
    }
    if (total == 0) return Scalar(1);
    if (total % 2 != 0) return Scalar(0);
    if (auto it = memo_.find(a); it != memo_.end()) return it->second;
    const std::vector<int> key = a;
    Scalar sum(0);
    a[first] -= 1;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] == 0) continue;
      const Scalar sij = cov_(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(j));
      if (sij == Scalar(0)) continue;
      const int mult = a[j];
      a[j] -= 1;
      sum += Scalar(mult) * sij * recurse(a);
      a[j] += 1;
    }
    a[first] += 1;
    memo_.emplace(key, sum);
    return sum;
  }

  Matrix cov_;
  int cap_;
  std::unordered_map<std::vector<int>, Scalar, VecHash> memo_;
};

/// E[X_u^α] under the marginal N(0, Σ_u).
double gaussian_moment(const MarginalMeasure& m, const MultiIndex& alpha, int degree_cap = kDefaultMomentDegreeCap);

/// ⟨g, h⟩ = E[g(X_w) h(X_w)] under N(0, Σ_w); subsets of g and h must lie in w.
double inner_product(const PolynomialD& g, const PolynomialD& h, const MarginalMeasure& w);

/// α-moment under f_a ⊗ f_b (a, b disjoint); α aligned with a ∪ b.
double product_measure_moment(const MarginalMeasure& a, const MarginalMeasure& b, const MultiIndex& alpha);

/// Lazily built moment engines for every marginal of one measure, plus expectations under
/// products of marginals. Not thread-safe; use one per task.
class MomentCache {
 public:
  explicit MomentCache(const GaussianMeasure& measure, int degree_cap = kDefaultMomentDegreeCap)
      : measure_(measure), cap_(degree_cap) {}

  [[nodiscard]] const GaussianMeasure& measure() const { return measure_; }

  MomentEngine<double>& engine(const VariableSubset& u);

  /// E[p] under the joint marginal f_w, w = p.subset().
  double expect_joint(const PolynomialD& p);

  /// E[p] under ⊗_b f_{blocks[b]}; the blocks must partition p.subset().
  double expect_product(const PolynomialD& p, const std::vector<VariableSubset>& blocks);

 private:
  GaussianMeasure measure_;
  int cap_;
  std::map<VariableSubset, std::unique_ptr<MomentEngine<double>>> engines_;
};

}  // namespace gadd
