#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gadd/errors.hpp"
#include "gadd/subset.hpp"

namespace gadd {

/// Per-variable degrees aligned with a VariableSubset.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> degrees) : degrees_(std::move(degrees)) {
    for (int d : degrees_)
      if (d < 0) throw DomainError("multi-index entries must be non-negative");
  }
  MultiIndex(std::initializer_list<int> degrees) : MultiIndex(std::vector<int>(degrees)) {}
  static MultiIndex zeros(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

  [[nodiscard]] std::size_t size() const { return degrees_.size(); }
  [[nodiscard]] int operator[](std::size_t k) const { return degrees_[k]; }
  [[nodiscard]] int& operator[](std::size_t k) { return degrees_[k]; }
  [[nodiscard]] const std::vector<int>& degrees() const { return degrees_; }
  [[nodiscard]] int total() const { return std::accumulate(degrees_.begin(), degrees_.end(), 0); }
  [[nodiscard]] bool all_nonzero() const {
    for (int d : degrees_)
      if (d == 0) return false;
    return true;
  }
  [[nodiscard]] std::string to_label() const {
    std::string s;
    for (std::size_t k = 0; k < degrees_.size(); ++k) s += (k ? " " : "") + std::to_string(degrees_[k]);
    return s;
  }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> degrees_;
};

/// Graded order: total degree ascending, then lexicographically descending ((2,1) before (1,2)).
inline bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.total() != b.total()) return a.total() < b.total();
  return a.degrees() > b.degrees();
}

/// All multi-indices of length n with every entry >= 1 and total degree <= max_degree, graded-lex order.
std::vector<MultiIndex> all_nonzero_indices(std::size_t n, int max_degree);

/// Sparse polynomial in the variables of `subset()`; term exponents are aligned with the subset.
template <typename Scalar>
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, Scalar>;

  Polynomial() = default;
  explicit Polynomial(VariableSubset subset) : subset_(std::move(subset)) {}

  static Polynomial constant(VariableSubset subset, Scalar c) {
    Polynomial p(std::move(subset));
    p.add_term(MultiIndex::zeros(p.subset_.size()), c);
    return p;
  }

  static Polynomial monomial(VariableSubset subset, MultiIndex exponents, Scalar c = Scalar(1)) {
    Polynomial p(std::move(subset));
    p.add_term(std::move(exponents), c);
    return p;
  }

  [[nodiscard]] const VariableSubset& subset() const { return subset_; }
  [[nodiscard]] const Terms& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] std::size_t term_count() const { return terms_.size(); }

  [[nodiscard]] Scalar coefficient(const MultiIndex& exponents) const {
    auto it = terms_.find(exponents);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  [[nodiscard]] int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.total());
    return d;
  }

  void add_term(const MultiIndex& exponents, Scalar c) {
    if (exponents.size() != subset_.size()) throw DomainError("term exponent length does not match subset");
    if (c == Scalar(0)) return;
    auto [it, inserted] = terms_.try_emplace(exponents, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  /// Drops terms with |c| <= tol.
  Polynomial& prune(Scalar tol) {
    std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
    return *this;
  }

  /// Same polynomial expressed over a superset of variables.
  [[nodiscard]] Polynomial lift(const VariableSubset& superset) const {
    if (!subset_.is_subset_of(superset))
      throw DomainError("cannot lift polynomial over " + subset_.to_string() + " to " + superset.to_string());
    std::vector<std::size_t> where(subset_.size());
    for (std::size_t k = 0; k < subset_.size(); ++k) where[k] = static_cast<std::size_t>(superset.position_of(subset_[k]));
    Polynomial out(superset);
    for (const auto& [e, c] : terms_) {
      MultiIndex big = MultiIndex::zeros(superset.size());
      for (std::size_t k = 0; k < e.size(); ++k) big[where[k]] = e[k];
      out.terms_.emplace(std::move(big), c);
    }
    return out;
  }

  /// ∂/∂x at position `pos` of the subset.
  [[nodiscard]] Polynomial derivative(std::size_t pos) const {
    Polynomial out(subset_);
    for (const auto& [e, c] : terms_) {
      if (e[pos] == 0) continue;
      MultiIndex d = e;
      d[pos] -= 1;
      out.add_term(d, c * Scalar(e[pos]));
    }
    return out;
  }

  /// Value at x_u (entries aligned with the subset).
  template <typename Derived>
  [[nodiscard]] Scalar evaluate(const Eigen::MatrixBase<Derived>& x) const {
    if (static_cast<std::size_t>(x.size()) != subset_.size())
      throw DomainError("evaluation point has dimension " + std::to_string(x.size()) + ", expected " +
                        std::to_string(subset_.size()));
    // powers[k][d] = x_k^d, built once per call
    std::vector<std::vector<Scalar>> powers(subset_.size());
    std::vector<int> max_deg(subset_.size(), 0);
    for (const auto& [e, c] : terms_)
      for (std::size_t k = 0; k < e.size(); ++k) max_deg[k] = std::max(max_deg[k], e[k]);
    for (std::size_t k = 0; k < subset_.size(); ++k) {
      powers[k].resize(static_cast<std::size_t>(max_deg[k]) + 1);
      powers[k][0] = Scalar(1);
      for (int d = 1; d <= max_deg[k]; ++d)
        powers[k][static_cast<std::size_t>(d)] = powers[k][static_cast<std::size_t>(d - 1)] * Scalar(x(static_cast<Eigen::Index>(k)));
    }
    Scalar sum(0);
    for (const auto& [e, c] : terms_) {
      Scalar t = c;
      for (std::size_t k = 0; k < e.size(); ++k) t *= powers[k][static_cast<std::size_t>(e[k])];
      sum += t;
    }
    return sum;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same_subset(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    require_same_subset(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(Scalar s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, Scalar s) { return a *= s; }
  friend Polynomial operator*(Scalar s, Polynomial a) { return a *= s; }

  /// Product; operands over different subsets are lifted to the union first.
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.subset_ != b.subset_) {
      const VariableSubset w = a.subset_.unite(b.subset_);
      return a.lift(w) * b.lift(w);
    }
    Polynomial out(a.subset_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        MultiIndex e = ea;
        for (std::size_t k = 0; k < e.size(); ++k) e[k] += eb[k];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  template <typename Other>
  [[nodiscard]] Polynomial<Other> cast() const {
    Polynomial<Other> out(subset_);
    for (const auto& [e, c] : terms_) out.add_term(e, static_cast<Other>(c));
    return out;
  }

 private:
  void require_same_subset(const Polynomial& o) const {
    if (o.subset_ != subset_) throw DomainError("polynomials live on different variable subsets");
  }

  VariableSubset subset_;
  Terms terms_;
};

using PolynomialD = Polynomial<double>;

}  // namespace gadd
