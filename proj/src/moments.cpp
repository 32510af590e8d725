#include "gadd/moments.hpp"

#include <algorithm>

namespace gadd {

std::vector<MultiIndex> all_nonzero_indices(std::size_t n, int max_degree) {
  std::vector<MultiIndex> out;
  if (n == 0 || static_cast<int>(n) > max_degree) return out;
  std::vector<int> cur(n, 1);
  // odometer over entries in [1, max_degree]; prune by total
  while (true) {
    int total = 0;
    for (int d : cur) total += d;
    if (total <= max_degree) out.emplace_back(cur);
    std::size_t k = 0;
    while (k < n) {
      if (++cur[k] <= max_degree) break;
      cur[k] = 1;
      ++k;
    }
    if (k == n) break;
  }
  std::sort(out.begin(), out.end(), graded_lex_less);
  return out;
}

double gaussian_moment(const MarginalMeasure& m, const MultiIndex& alpha, int degree_cap) {
  MomentEngine<double> engine(m.covariance, degree_cap);
  return engine.moment(alpha);
}

double inner_product(const PolynomialD& g, const PolynomialD& h, const MarginalMeasure& w) {
  if (!g.subset().is_subset_of(w.subset) || !h.subset().is_subset_of(w.subset))
    throw DomainError("inner product: polynomial subsets must lie in " + w.subset.to_string());
  MomentEngine<double> engine(w.covariance);
  return engine.expectation(g.lift(w.subset) * h.lift(w.subset));
}

double product_measure_moment(const MarginalMeasure& a, const MarginalMeasure& b, const MultiIndex& alpha) {
  if (a.subset.intersects(b.subset)) throw DomainError("product measure requires disjoint subsets");
  const VariableSubset w = a.subset.unite(b.subset);
  if (alpha.size() != w.size()) throw DomainError("moment index length does not match the union of subsets");
  MultiIndex ia = MultiIndex::zeros(a.subset.size());
  MultiIndex ib = MultiIndex::zeros(b.subset.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (int p = a.subset.position_of(w[k]); p >= 0) ia[static_cast<std::size_t>(p)] = alpha[k];
    else ib[static_cast<std::size_t>(b.subset.position_of(w[k]))] = alpha[k];
  }
  const double ma = a.subset.empty() ? (ia.total() == 0 ? 1.0 : 0.0) : gaussian_moment(a, ia);
  if (ma == 0.0) return 0.0;
  const double mb = b.subset.empty() ? (ib.total() == 0 ? 1.0 : 0.0) : gaussian_moment(b, ib);
  return ma * mb;
}

MomentEngine<double>& MomentCache::engine(const VariableSubset& u) {
  auto it = engines_.find(u);
  if (it == engines_.end())
    it = engines_.emplace(u, std::make_unique<MomentEngine<double>>(marginal(measure_, u).covariance, cap_)).first;
  return *it->second;
}

double MomentCache::expect_joint(const PolynomialD& p) {
  if (p.subset().empty()) return p.coefficient(MultiIndex{});
  return engine(p.subset()).expectation(p);
}

double MomentCache::expect_product(const PolynomialD& p, const std::vector<VariableSubset>& blocks) {
  const VariableSubset& w = p.subset();
  std::size_t covered = 0;
  struct Slot {
    MomentEngine<double>* engine;
    std::vector<std::size_t> positions;  // positions in w, in block order
  };
  std::vector<Slot> slots;
  for (const auto& b : blocks) {
    if (b.empty()) continue;
    if (!b.is_subset_of(w)) throw DomainError("block " + b.to_string() + " is not inside " + w.to_string());
    Slot s{&engine(b), {}};
    for (int v : b) s.positions.push_back(static_cast<std::size_t>(w.position_of(v)));
    covered += b.size();
    slots.push_back(std::move(s));
  }
  if (covered != w.size()) throw DomainError("blocks do not partition " + w.to_string());
  double sum = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double t = c;
    for (const auto& s : slots) {
      MultiIndex local = MultiIndex::zeros(s.positions.size());
      for (std::size_t k = 0; k < s.positions.size(); ++k) local[k] = e[s.positions[k]];
      t *= s.engine->moment(local);
      if (t == 0.0) break;
    }
    sum += t;
  }
  return sum;
}

}  // namespace gadd
