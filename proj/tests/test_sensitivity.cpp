#include <doctest.h>

#include <cmath>
#include <random>

#include "gadd/errors.hpp"
#include "gadd/model.hpp"
#include "gadd/sensitivity.hpp"
#include "support.hpp"

using namespace gadd;

namespace {

AddExpansion solve_case(int c, int s = 2, int m = 2) {
  PolynomialModel y(testing::case_polynomial());
  SolveOptions o;
  o.max_subset_size = s;
  o.max_degree = m;
  return assemble_and_solve(y, testing::case_measure(c), o);
}

const SubsetIndices& at(const SensitivityReport& r, std::initializer_list<int> u) {
  const auto* s = r.find(VariableSubset::from_one_based(u));
  REQUIRE(s != nullptr);
  return *s;
}

}  // namespace

TEST_CASE("mean and variance of the four cases") {
  const double mu[4] = {12.0, 63.0 / 5.0, 67.0 / 5.0, 57.0 / 5.0};
  const double var[4] = {51.0, 1794.0 / 25.0, 2514.0 / 25.0, 774.0 / 25.0};
  for (int c = 1; c <= 4; ++c) {
    const auto e = solve_case(c);
    CHECK(mean(e) == doctest::Approx(mu[c - 1]).epsilon(1e-12));
    CHECK(variance(e).total == doctest::Approx(var[c - 1]).epsilon(1e-12));
  }
}

TEST_CASE("index triplets") {
  const auto r1 = indices(solve_case(1));
  CHECK(at(r1, {1}).variance_driven == doctest::Approx(0.313725).epsilon(1e-5));
  CHECK(at(r1, {1}).covariance_driven == 0.0);
  const auto r2 = indices(solve_case(2));
  CHECK(at(r2, {1, 2}).variance_driven == doctest::Approx(0.012349).epsilon(1e-4));
  CHECK(at(r2, {1, 2}).covariance_driven == doctest::Approx(0.004116).epsilon(1e-3));
  CHECK(at(r2, {1, 2}).total == doctest::Approx(0.016465).epsilon(1e-4));
  const auto r4 = indices(solve_case(4));
  CHECK(r4.variance_driven_sum() == doctest::Approx(1.63391).epsilon(1e-5));
  CHECK(r4.covariance_driven_sum() == doctest::Approx(-0.63391).epsilon(1e-5));
}

TEST_CASE("indices sum to one and variance-driven parts are non-negative") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 3;
    const auto m = validate_covariance(testing::random_covariance(n, rng));
    PolynomialModel y(testing::random_polynomial(n, 3, 2, 5, rng));
    SolveOptions o;
    o.max_degree = 3;
    const auto e = assemble_and_solve(y, m, o);
    const auto r = indices(e, m);
    double total = 0.0;
    for (const auto& s : r.subsets) {
      CHECK(s.variance_driven >= 0.0);
      total += s.total;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("unreduced correlative index equals the covariance-driven index") {
  for (int c = 1; c <= 4; ++c) {
    const auto e = solve_case(c, 2, 3);
    const auto m = testing::case_measure(c);
    const auto r = indices(e, m);
    for (const auto& s : r.subsets) CHECK(std::abs(unreduced_correlative_index(e, m, s.subset) - s.covariance_driven) < 1e-9);
  }
  const auto e3 = solve_case(3);
  CHECK(unreduced_correlative_index(e3, testing::case_measure(3), VariableSubset::from_one_based({3})) ==
        doctest::Approx(0.202314).epsilon(1e-5));
}

TEST_CASE("diagonal covariance has no covariance-driven part") {
  std::mt19937_64 rng(9);
  const auto m = validate_covariance(testing::random_diagonal(4, rng));
  PolynomialModel y(testing::random_polynomial(4, 3, 2, 6, rng));
  SolveOptions o;
  o.max_degree = 3;
  const auto e = assemble_and_solve(y, m, o);
  const auto r = indices(e, m);
  for (const auto& s : r.subsets) {
    CHECK(std::abs(s.covariance_driven) < 1e-10);
    CHECK(std::abs(unreduced_correlative_index(e, m, s.subset)) < 1e-10);
  }
}

TEST_CASE("scaling the response leaves indices and ranks unchanged") {
  const auto m = testing::case_measure(3);
  PolynomialModel y(testing::case_polynomial());
  PolynomialD scaled = testing::case_polynomial();
  scaled *= 7.5;
  PolynomialModel ys(scaled);
  const auto a = indices(assemble_and_solve(y, m, SolveOptions{}));
  const auto b = indices(assemble_and_solve(ys, m, SolveOptions{}));
  for (std::size_t k = 0; k < a.subsets.size(); ++k) {
    CHECK(std::abs(a.subsets[k].variance_driven - b.subsets[k].variance_driven) < 1e-10);
    CHECK(std::abs(a.subsets[k].covariance_driven - b.subsets[k].covariance_driven) < 1e-10);
  }
  for (std::size_t k = 0; k < a.effects.size(); ++k) CHECK(a.effects[k].rank == b.effects[k].rank);
}

TEST_CASE("total effects and ranking") {
  const auto r1 = indices(solve_case(1));
  for (const auto& t : r1.effects) {
    CHECK(t.value == doctest::Approx(0.352941).epsilon(1e-5));
    CHECK(t.tied);
    CHECK(t.rank == 1);
  }
  const auto r3 = indices(solve_case(3));
  CHECK(r3.effects[0].rank == 3);
  CHECK(r3.effects[1].rank == 2);
  CHECK(r3.effects[2].rank == 1);
  const auto r4 = indices(solve_case(4));
  CHECK(r4.effects[0].value == doctest::Approx(0.641262).epsilon(1e-5));
  CHECK(r4.effects[0].rank == 1);
  CHECK(r4.effects[1].rank == 3);
  CHECK(r4.effects[2].rank == 2);
}

TEST_CASE("effective dimensions") {
  const auto r1 = indices(solve_case(1));
  const auto d = effective_dimensions(r1, 0.99);
  CHECK(d.superposition == 2);
  CHECK_FALSE(d.superposition_saturated);
  const auto d0 = effective_dimensions(r1, 0.0);
  CHECK(d0.superposition == 1);
  CHECK(d0.truncation == 1);
  CHECK_THROWS_AS(effective_dimensions(r1, 1.5), DomainError);

  std::mt19937_64 rng(1);
  PolynomialModel add(additive_linear({1.0, -2.0, 0.5, 3.0}));
  const auto m = validate_covariance(testing::random_covariance(4, rng));
  const auto ra = indices(assemble_and_solve(add, m, SolveOptions{}), m);
  CHECK(effective_dimensions(ra, 0.99).superposition == 1);
  for (const auto& s : ra.subsets)
    if (s.subset.size() == 2) CHECK(std::abs(s.total) < 1e-10);
}

TEST_CASE("truncation dimension saturates when the prefix never captures enough") {
  SensitivityReport r;
  r.dimension = 3;
  r.max_subset_size = 1;
  r.subsets = {{VariableSubset::from_one_based({1}), 0.3, 0.0, 0.3},
               {VariableSubset::from_one_based({2}), 0.3, 0.0, 0.3},
               {VariableSubset::from_one_based({3}), 0.3, 0.0, 0.3}};
  const auto d = effective_dimensions(r, 0.99);
  CHECK(d.truncation == 3);
  CHECK(d.truncation_saturated);
  CHECK(d.superposition_saturated);
}

TEST_CASE("degenerate response") {
  PolynomialModel zero(additive_linear({0.0, 0.0, 0.0}));
  const auto e = assemble_and_solve(zero, testing::case_measure(2), SolveOptions{});
  CHECK(mean(e) == 0.0);
  CHECK_THROWS_AS(indices(e), DegenerateResponseError);
  PolynomialModel constant(additive_linear({0.0, 0.0, 0.0}, 5.0));
  CHECK_THROWS_AS(indices(assemble_and_solve(constant, testing::case_measure(3), SolveOptions{})),
                  DegenerateResponseError);
}

TEST_CASE("adaptive selection") {
  const auto m1 = testing::case_measure(1);
  PolynomialModel y(testing::case_polynomial());
  AdaptiveOptions o;
  o.max_order = 3;

  const auto all = adaptive_select(y, m1, o);
  CHECK(all.retained.size() == 6);
  for (const auto& c : all.retained) {
    CHECK(c.order <= 2);
    CHECK(c.index > 0.0);
  }

  o.epsilon1 = 1.0;
  CHECK(adaptive_select(y, m1, o).retained.empty());

  o.epsilon1 = 0.01;
  auto sel = adaptive_select(y, m1, o);
  CHECK(sel.retained.size() == 6);
  o.epsilon1 = 0.02;
  sel = adaptive_select(y, m1, o);
  CHECK(sel.retained.size() == 3);
  for (const auto& c : sel.retained) CHECK(c.subset.size() == 1);

  for (int c = 2; c <= 4; ++c) {
    AdaptiveOptions z;
    z.max_order = 3;
    z.epsilon2 = 0.05;
    const auto sel_c = adaptive_select(y, testing::case_measure(c), z);
    for (const auto& r : sel_c.retained) {
      const auto& h = sel_c.history.at(r.subset);
      for (int m = static_cast<int>(r.subset.size()); m <= r.order; ++m) {
        const double cur = h[static_cast<std::size_t>(m - 1)];
        const double prev = m >= 2 ? h[static_cast<std::size_t>(m - 2)] : 0.0;
        CHECK(cur > z.epsilon1);
        if (std::abs(prev) >= 1e-12) CHECK((cur - prev) / prev > z.epsilon2);
      }
    }
  }
}
