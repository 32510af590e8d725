#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace gadd {

/// Strictly increasing list of 0-based variable indices. Printed 1-based.
class VariableSubset {
 public:
  VariableSubset() = default;
  explicit VariableSubset(std::vector<int> indices);
  VariableSubset(std::initializer_list<int> indices) : VariableSubset(std::vector<int>(indices)) {}

  static VariableSubset full(int dimension);
  /// From 1-based indices as written in configs and reports.
  static VariableSubset from_one_based(const std::vector<int>& indices);

  [[nodiscard]] std::size_t size() const { return indices_.size(); }
  [[nodiscard]] bool empty() const { return indices_.empty(); }
  [[nodiscard]] int operator[](std::size_t pos) const { return indices_[pos]; }
  [[nodiscard]] const std::vector<int>& indices() const { return indices_; }
  [[nodiscard]] auto begin() const { return indices_.begin(); }
  [[nodiscard]] auto end() const { return indices_.end(); }

  [[nodiscard]] bool contains(int index) const;
  /// Position of `index` inside this subset, or -1.
  [[nodiscard]] int position_of(int index) const;
  [[nodiscard]] bool is_subset_of(const VariableSubset& other) const;
  [[nodiscard]] bool is_proper_subset_of(const VariableSubset& other) const {
    return size() < other.size() && is_subset_of(other);
  }
  [[nodiscard]] bool intersects(const VariableSubset& other) const;

  [[nodiscard]] VariableSubset unite(const VariableSubset& other) const;
  [[nodiscard]] VariableSubset intersect(const VariableSubset& other) const;
  [[nodiscard]] VariableSubset minus(const VariableSubset& other) const;
  [[nodiscard]] VariableSubset complement(int dimension) const;

  /// Throws DomainError unless every index is < dimension.
  void check_range(int dimension) const;

  [[nodiscard]] std::string to_string() const;  // "{1,3}"
  [[nodiscard]] std::string to_label() const;   // "1 3"

  /// Canonical order: cardinality first, then lexicographic.
  friend std::strong_ordering operator<=>(const VariableSubset& a, const VariableSubset& b);
  friend bool operator==(const VariableSubset& a, const VariableSubset& b) = default;

 private:
  std::vector<int> indices_;
};

/// All subsets of {0..dimension-1} with min_size <= |u| <= max_size, in canonical order.
std::vector<VariableSubset> enumerate_subsets(int dimension, int min_size, int max_size);

}  // namespace gadd
