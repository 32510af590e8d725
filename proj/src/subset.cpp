#include "gadd/subset.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

#include "gadd/errors.hpp"

namespace gadd {

VariableSubset::VariableSubset(std::vector<int> indices) : indices_(std::move(indices)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] < 0) throw DomainError("variable index must be non-negative");
    if (k > 0 && indices_[k] <= indices_[k - 1])
      throw DomainError("variable subset must be strictly increasing: " + to_string());
  }
}

VariableSubset VariableSubset::full(int dimension) {
  std::vector<int> idx(static_cast<std::size_t>(dimension));
  for (int i = 0; i < dimension; ++i) idx[static_cast<std::size_t>(i)] = i;
  return VariableSubset(std::move(idx));
}

VariableSubset VariableSubset::from_one_based(const std::vector<int>& indices) {
  std::vector<int> idx;
  idx.reserve(indices.size());
  for (int i : indices) {
    if (i < 1) throw DomainError("1-based variable index must be >= 1");
    idx.push_back(i - 1);
  }
  return VariableSubset(std::move(idx));
}

bool VariableSubset::contains(int index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

int VariableSubset::position_of(int index) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) return -1;
  return static_cast<int>(it - indices_.begin());
}

bool VariableSubset::is_subset_of(const VariableSubset& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(), indices_.end());
}

bool VariableSubset::intersects(const VariableSubset& other) const {
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a; else ++b;
  }
  return false;
}

VariableSubset VariableSubset::unite(const VariableSubset& other) const {
  std::vector<int> out;
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                 std::back_inserter(out));
  return VariableSubset(std::move(out));
}

VariableSubset VariableSubset::intersect(const VariableSubset& other) const {
  std::vector<int> out;
  std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(out));
  return VariableSubset(std::move(out));
}

VariableSubset VariableSubset::minus(const VariableSubset& other) const {
  std::vector<int> out;
  std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                      std::back_inserter(out));
  return VariableSubset(std::move(out));
}

VariableSubset VariableSubset::complement(int dimension) const {
  return full(dimension).minus(*this);
}

void VariableSubset::check_range(int dimension) const {
  if (!indices_.empty() && indices_.back() >= dimension)
    throw DomainError("variable index " + std::to_string(indices_.back() + 1) + " out of range 1.." +
                      std::to_string(dimension));
}

std::string VariableSubset::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < indices_.size(); ++k) os << (k ? "," : "") << indices_[k] + 1;
  os << '}';
  return os.str();
}

std::string VariableSubset::to_label() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < indices_.size(); ++k) os << (k ? " " : "") << indices_[k] + 1;
  return os.str();
}

std::strong_ordering operator<=>(const VariableSubset& a, const VariableSubset& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return a.indices_ <=> b.indices_;
}

namespace {
void combos(int dimension, int k, int start, std::vector<int>& cur, std::vector<VariableSubset>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.emplace_back(cur);
    return;
  }
  for (int i = start; i < dimension; ++i) {
    cur.push_back(i);
    combos(dimension, k, i + 1, cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<VariableSubset> enumerate_subsets(int dimension, int min_size, int max_size) {
  std::vector<VariableSubset> out;
  std::vector<int> cur;
  for (int k = std::max(min_size, 0); k <= std::min(max_size, dimension); ++k) combos(dimension, k, 0, cur, out);
  return out;
}

}  // namespace gadd
