#include "gadd/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "gadd/errors.hpp"
#include "gadd/moments.hpp"

namespace gadd {

BasisSet::BasisSet(GaussianMeasure measure, int max_subset_size, int max_degree, std::vector<BasisFunction> functions)
    : measure_(std::move(measure)),
      max_subset_size_(max_subset_size),
      max_degree_(max_degree),
      functions_(std::move(functions)) {
  for (std::size_t k = 0; k < functions_.size(); ++k) {
    if (subsets_.empty() || subsets_.back() != functions_[k].subset) {
      subsets_.push_back(functions_[k].subset);
      ranges_.emplace_back(k, k + 1);
    } else {
      ranges_.back().second = k + 1;
    }
  }
}

std::optional<std::size_t> BasisSet::find(const VariableSubset& u, const MultiIndex& j) const {
  auto [first, last] = range(u);
  for (std::size_t k = first; k < last; ++k)
    if (functions_[k].index == j) return k;
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> BasisSet::range(const VariableSubset& u) const {
  auto it = std::lower_bound(subsets_.begin(), subsets_.end(), u);
  if (it == subsets_.end() || *it != u) return {0, 0};
  return ranges_[static_cast<std::size_t>(it - subsets_.begin())];
}

std::size_t BasisSet::repaired_count() const {
  return static_cast<std::size_t>(std::count_if(functions_.begin(), functions_.end(),
                                                [](const BasisFunction& f) { return f.repaired; }));
}

PolynomialD hermite_raw(const MarginalMeasure& m, const MultiIndex& j, int max_degree) {
  const VariableSubset& u = m.subset;
  if (j.size() != u.size()) throw DomainError("multi-index length does not match subset " + u.to_string());
  if (j.total() > max_degree)
    throw ResourceError("basis degree " + std::to_string(j.total()) + " exceeds cap " + std::to_string(max_degree));
  const auto n = static_cast<Eigen::Index>(u.size());
  const Eigen::MatrixXd precision = m.covariance.llt().solve(Eigen::MatrixXd::Identity(n, n));

  // (Σ_u⁻¹ x)_k as linear polynomials
  std::vector<PolynomialD> linear;
  linear.reserve(u.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    PolynomialD l(u);
    for (Eigen::Index q = 0; q < n; ++q) {
      MultiIndex e = MultiIndex::zeros(u.size());
      e[static_cast<std::size_t>(q)] = 1;
      l.add_term(e, precision(k, q));
    }
    linear.push_back(std::move(l));
  }

  PolynomialD p = PolynomialD::constant(u, 1.0);
  for (std::size_t k = 0; k < u.size(); ++k)
    for (int d = 0; d < j[k]; ++d) p = p.derivative(k) - p * linear[k];
  if (j.total() % 2 != 0) p *= -1.0;
  return p;
}

BasisFunction orthonormalize(const PolynomialD& raw, const MarginalMeasure& m, MultiIndex index) {
  MomentEngine<double> engine(m.covariance);
  const PolynomialD lifted = raw.lift(m.subset);
  const double sq = engine.expectation(lifted * lifted);
  if (!(sq > 0.0) || !std::isfinite(sq))
    throw NumericalError("non-positive norm " + std::to_string(sq) + " while normalizing a basis function over " +
                         m.subset.to_string());
  BasisFunction f{m.subset, std::move(index), lifted * (1.0 / std::sqrt(sq)), 1.0, false};
  f.norm_check = engine.expectation(f.poly * f.poly);
  return f;
}

namespace {

// Removes from f the f_u-orthogonal projection onto span(others), then renormalizes.
void project_out(BasisFunction& f, const std::vector<PolynomialD>& others, MomentEngine<double>& engine) {
  const auto k = static_cast<Eigen::Index>(others.size());
  Eigen::MatrixXd gram(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    rhs(a) = engine.expectation(f.poly * others[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b <= a; ++b)
      gram(a, b) = gram(b, a) = engine.expectation(others[static_cast<std::size_t>(a)] * others[static_cast<std::size_t>(b)]);
  }
  const Eigen::VectorXd c = gram.ldlt().solve(rhs);
  for (Eigen::Index a = 0; a < k; ++a) f.poly -= others[static_cast<std::size_t>(a)] * c(a);
  const double sq = engine.expectation(f.poly * f.poly);
  if (!(sq > 0.0)) throw NumericalError("basis function over " + f.subset.to_string() + " vanished during repair");
  f.poly *= 1.0 / std::sqrt(sq);
  f.norm_check = engine.expectation(f.poly * f.poly);
}

}  // namespace

BasisSet build_basis(const GaussianMeasure& measure, int max_subset_size, int max_degree, const BasisOptions& options) {
  const int n = measure.dimension();
  if (max_subset_size < 1 || max_subset_size > n)
    throw DomainError("truncation S must satisfy 1 <= S <= N (S=" + std::to_string(max_subset_size) +
                      ", N=" + std::to_string(n) + ")");
  if (max_degree < 1) throw DomainError("truncation m must be >= 1");
  if (max_degree > options.max_degree)
    throw ResourceError("truncation m=" + std::to_string(max_degree) + " exceeds degree cap " +
                        std::to_string(options.max_degree));
  if (max_subset_size > options.max_subset_size)
    throw ResourceError("truncation S=" + std::to_string(max_subset_size) + " exceeds subset-size cap " +
                        std::to_string(options.max_subset_size));

  MomentCache cache(measure);
  std::vector<BasisFunction> functions;
  for (const VariableSubset& u : enumerate_subsets(n, 1, max_subset_size)) {
    const MarginalMeasure mu = marginal(measure, u);
    MomentEngine<double>& engine = cache.engine(u);
    const std::size_t first_of_u = functions.size();

    for (const MultiIndex& j : all_nonzero_indices(u.size(), max_degree)) {
      BasisFunction f = orthonormalize(hermite_raw(mu, j, options.max_degree), mu, j);

      // Equal-degree Hermite members of one subset are not mutually orthogonal; orthonormalize
      // against the earlier members of u (modified Gram–Schmidt, two passes).
      for (int pass = 0; pass < 2 && functions.size() > first_of_u; ++pass) {
        for (std::size_t k = first_of_u; k < functions.size(); ++k)
          f.poly -= functions[k].poly * engine.expectation(f.poly * functions[k].poly);
        f.poly *= 1.0 / std::sqrt(engine.expectation(f.poly * f.poly));
      }
      f.norm_check = engine.expectation(f.poly * f.poly);

      // Zero mean and hierarchical orthogonality against nested members v ⊂ u.
      std::vector<PolynomialD> offending;
      if (std::abs(engine.expectation(f.poly)) > options.mean_tolerance)
        offending.push_back(PolynomialD::constant(u, 1.0));
      for (std::size_t k = 0; k < first_of_u; ++k) {
        const BasisFunction& g = functions[k];
        if (!g.subset.is_proper_subset_of(u)) continue;
        const PolynomialD lifted = g.poly.lift(u);
        if (std::abs(engine.expectation(f.poly * lifted)) > options.hierarchy_tolerance) offending.push_back(lifted);
      }
      if (!offending.empty()) {
        project_out(f, offending, engine);
        f.repaired = true;
      }
      functions.push_back(std::move(f));
    }
  }
  return BasisSet(measure, max_subset_size, max_degree, std::move(functions));
}

std::size_t basis_size(int dimension, int max_subset_size, int max_degree) {
  std::size_t total = 0;
  for (int k = 1; k <= std::min(max_subset_size, dimension); ++k) {
    // subsets of size k times all-nonzero indices of length k with total <= m
    std::size_t subsets = 1;
    for (int i = 0; i < k; ++i) subsets = subsets * static_cast<std::size_t>(dimension - i) / static_cast<std::size_t>(i + 1);
    total += subsets * all_nonzero_indices(static_cast<std::size_t>(k), max_degree).size();
  }
  return total;
}

}  // namespace gadd
