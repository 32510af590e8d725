#include "gadd/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "gadd/errors.hpp"
#include "gadd/model.hpp"
#include "gadd/moments.hpp"

namespace gadd {

namespace {

bool nested(const VariableSubset& a, const VariableSubset& b) { return a.is_subset_of(b) || b.is_subset_of(a); }

double joint_expectation(MomentCache& cache, const PolynomialD& a, const PolynomialD& b) {
  return cache.expect_joint(a * b);
}

}  // namespace

const SubsetIndices* SensitivityReport::find(const VariableSubset& u) const {
  for (const auto& s : subsets)
    if (s.subset == u) return &s;
  return nullptr;
}

double SensitivityReport::variance_driven_sum() const {
  double s = 0.0;
  for (const auto& t : subsets) s += t.variance_driven;
  return s;
}

double SensitivityReport::covariance_driven_sum() const {
  double s = 0.0;
  for (const auto& t : subsets) s += t.covariance_driven;
  return s;
}

double mean(const AddExpansion& expansion) { return expansion.constant(); }

VarianceBreakdown variance(const AddExpansion& expansion, const GaussianMeasure& measure) {
  if (measure.dimension() != expansion.dimension()) throw DomainError("measure dimension does not match expansion");
  const auto components = component_functions(expansion);
  MomentCache cache(measure);
  VarianceBreakdown out;
  for (const auto& [u, yu] : components) {
    const double m2 = joint_expectation(cache, yu, yu);
    out.second_moments[u] = m2;
    out.variance_sum += m2;
  }
  for (auto a = components.begin(); a != components.end(); ++a)
    for (auto b = std::next(a); b != components.end(); ++b) {
      if (nested(a->first, b->first)) continue;
      const double c = joint_expectation(cache, a->second, b->second);
      out.pairs.push_back({a->first, b->first, c});
      out.covariance_sum += 2.0 * c;
    }
  out.total = out.variance_sum + out.covariance_sum;
  return out;
}

SensitivityReport indices(const AddExpansion& expansion, const GaussianMeasure& measure) {
  const VarianceBreakdown vb = variance(expansion, measure);
  const double scale = expansion.constant() * expansion.constant() + vb.variance_sum;
  if (!(vb.total > kDegenerateVarianceTolerance * scale))
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", vb.total);
    throw DegenerateResponseError(std::string("response variance ") + buf +
                                  " is zero to working precision; sensitivity indices are undefined");
  }
  SensitivityReport r;
  r.dimension = expansion.dimension();
  r.max_subset_size = expansion.max_subset_size();
  r.max_degree = expansion.max_degree();
  r.mean = expansion.constant();
  r.variance = vb.total;

  std::map<VariableSubset, double> cov;
  for (const auto& p : vb.pairs) {
    cov[p.u] += p.value;
    cov[p.v] += p.value;
  }
  for (const VariableSubset& u : enumerate_subsets(r.dimension, 1, r.max_subset_size)) {
    SubsetIndices s{u, 0.0, 0.0, 0.0};
    if (auto it = vb.second_moments.find(u); it != vb.second_moments.end()) s.variance_driven = it->second / vb.total;
    if (auto it = cov.find(u); it != cov.end()) s.covariance_driven = it->second / vb.total;
    s.total = s.variance_driven + s.covariance_driven;
    r.subsets.push_back(std::move(s));
  }
  r.effects = total_effects(r);
  return r;
}

double unreduced_correlative_index(const AddExpansion& expansion, const GaussianMeasure& measure,
                                   const VariableSubset& u) {
  const VarianceBreakdown vb = variance(expansion, measure);
  if (!(vb.total > 0.0)) throw DegenerateResponseError("response variance is zero");
  const auto components = component_functions(expansion);
  const auto self = components.find(u);
  if (self == components.end()) return 0.0;
  MomentCache cache(measure);
  double sum = 0.0;
  for (const auto& [v, yv] : components)
    if (v != u) sum += joint_expectation(cache, self->second, yv);
  return sum / vb.total;
}

std::vector<TotalEffect> total_effects(const SensitivityReport& report) {
  std::vector<TotalEffect> out;
  for (int i = 0; i < report.dimension; ++i) {
    double s = 0.0;
    for (const auto& t : report.subsets)
      if (t.subset.contains(i)) s += t.total;
    out.push_back({i, s, 0, false});
  }
  auto same = [](double a, double b) {
    return std::abs(a - b) <= kTieTolerance * std::max({std::abs(a), std::abs(b), 1e-300});
  };
  for (auto& e : out) {
    int greater = 0;
    for (const auto& o : out) {
      if (o.variable == e.variable) continue;
      if (same(o.value, e.value)) e.tied = true;
      else if (o.value > e.value) ++greater;
    }
    e.rank = 1 + greater;
  }
  return out;
}

EffectiveDimensions effective_dimensions(const SensitivityReport& report, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percentile threshold must lie in [0, 1]");
  EffectiveDimensions d;
  d.threshold = p;
  const int n = report.dimension;
  const double bound = 1.0 - p;
  d.superposition = n;
  d.superposition_saturated = true;
  for (int s = 1; s <= n; ++s) {
    double sum = 0.0;
    for (const auto& t : report.subsets)
      if (static_cast<int>(t.subset.size()) <= s) sum += t.total;
    if (std::abs(1.0 - sum) <= bound) {
      d.superposition = s;
      d.superposition_saturated = false;
      break;
    }
  }
  d.truncation = n;
  d.truncation_saturated = true;
  for (int s = 1; s <= n; ++s) {
    double sum = 0.0;
    for (const auto& t : report.subsets)
      if (t.subset.indices().back() < s) sum += t.total;
    if (std::abs(1.0 - sum) <= bound) {
      d.truncation = s;
      d.truncation_saturated = false;
      break;
    }
  }
  return d;
}

AdaptiveSelection adaptive_select(Model& model, const GaussianMeasure& measure, const AdaptiveOptions& options) {
  if (options.epsilon1 < 0.0 || options.epsilon2 < 0.0) throw DomainError("adaptive tolerances must be non-negative");
  if (options.max_order < 1) throw DomainError("adaptive sweep needs m_max >= 1");
  const int n = measure.dimension();
  const int s_max = options.max_subset_size > 0 ? std::min(options.max_subset_size, n) : std::min(n, options.max_order);

  AdaptiveSelection sel;
  sel.epsilon1 = options.epsilon1;
  sel.epsilon2 = options.epsilon2;
  const auto subsets = enumerate_subsets(n, 1, s_max);
  for (const auto& u : subsets) sel.history[u].assign(static_cast<std::size_t>(options.max_order), 0.0);

  for (int m = 1; m <= options.max_order; ++m) {
    SolveOptions so = options.solve;
    so.max_subset_size = s_max;
    so.max_degree = m;
    const AddExpansion e = assemble_and_solve(model, measure, so);
    try {
      const SensitivityReport r = indices(e, measure);
      for (const auto& t : r.subsets) sel.history[t.subset][static_cast<std::size_t>(m - 1)] = t.total;
    } catch (const DegenerateResponseError&) {
      // no variance captured at this order; every S̃_{u,m} stays 0
    }
  }

  for (const auto& u : subsets) {
    const auto& h = sel.history[u];
    int order = 0;
    for (int m = static_cast<int>(u.size()); m <= options.max_order; ++m) {
      const double cur = h[static_cast<std::size_t>(m - 1)];
      const double prev = m >= 2 ? h[static_cast<std::size_t>(m - 2)] : 0.0;
      const bool first = cur > options.epsilon1;
      const bool second = std::abs(prev) < 1e-12 || (cur - prev) / prev > options.epsilon2;
      if (!(first && second)) break;
      order = m;
    }
    if (order > 0) sel.retained.push_back({u, order, h[static_cast<std::size_t>(order - 1)]});
  }
  return sel;
}

}  // namespace gadd
