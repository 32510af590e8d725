#include <doctest.h>

#include <cmath>
#include <random>

#include "gadd/errors.hpp"
#include "gadd/expansion.hpp"
#include "gadd/model.hpp"
#include "gadd/quadrature.hpp"
#include "support.hpp"

using namespace gadd;

namespace {

// J by a tensor rule under f_u ⊗ f_{v∖u}: independent blocks, each with its own correlated rule.
double tensor_coupling(const BasisFunction& row, const BasisFunction& col, const GaussianMeasure& m, int n) {
  const VariableSubset u = row.subset;
  const VariableSubset rest = col.subset.minus(u);
  const QuadratureRule ru = correlated_rule(marginal(m, u), n);
  const QuadratureRule rr = correlated_rule(marginal(m, rest), n);
  double sum = 0.0;
  Eigen::VectorXd xv(static_cast<Eigen::Index>(col.subset.size()));
  for (Eigen::Index a = 0; a < ru.size(); ++a)
    for (Eigen::Index b = 0; b < rr.size(); ++b) {
      for (std::size_t k = 0; k < col.subset.size(); ++k) {
        const int var = col.subset[k];
        const int pu = u.position_of(var);
        xv(static_cast<Eigen::Index>(k)) = pu >= 0 ? ru.nodes(pu, a) : rr.nodes(rest.position_of(var), b);
      }
      sum += ru.weights(a) * rr.weights(b) * row.poly.evaluate(ru.nodes.col(a)) * col.poly.evaluate(xv);
    }
  return sum;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("coupling integrals agree with a tensor-quadrature oracle") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + trial % 2;
    const auto m = validate_covariance(testing::random_covariance(n, rng));
    const auto b = build_basis(m, 2, 3);
    MomentCache cache(m);
    for (std::size_t r = 0; r < b.size(); ++r)
      for (std::size_t c = 0; c < b.size(); ++c) {
        if (!couples(b[r].subset, b[c].subset)) continue;
        CHECK(coupling_integral(cache, b[r], b[c]) ==
              doctest::Approx(tensor_coupling(b[r], b[c], m, 5)).epsilon(1e-9).scale(1.0));
      }
  }
}

TEST_CASE("coupling pattern") {
  const auto u1 = VariableSubset::from_one_based({1});
  const auto u12 = VariableSubset::from_one_based({1, 2});
  const auto u23 = VariableSubset::from_one_based({2, 3});
  CHECK(couples(u1, u12));
  CHECK_FALSE(couples(u12, u1));
  CHECK(couples(u12, u23));
  CHECK_FALSE(couples(u1, u23));
  CHECK_FALSE(couples(u1, u1));
}

TEST_CASE("paper cases reproduce component functions") {
  for (int c = 1; c <= 4; ++c) {
    PolynomialModel y(testing::case_polynomial());
    const auto e = assemble_and_solve(y, testing::case_measure(c), SolveOptions{});
    CHECK(e.basis().size() == 9);
    const auto comps = component_functions(e);
    REQUIRE(comps.size() == 6);
    for (const auto& [u, p] : comps) {
      if (u.size() == 1) CHECK(p.coefficient(MultiIndex{1}) == doctest::Approx(4.0));
      else CHECK(p.coefficient(MultiIndex{1, 1}) == doctest::Approx(1.0));
    }
    if (c == 2) CHECK(comps.at(VariableSubset::from_one_based({3})).coefficient(MultiIndex{0}) == doctest::Approx(-5.0 / 13.0));
  }
}

TEST_CASE("diagonal covariance: identity system and classical equivalence") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + trial % 3;
    const auto m = validate_covariance(testing::random_diagonal(n, rng));
    const auto b = build_basis(m, std::min(n, 2), 3);
    const Eigen::MatrixXd a = coupling_matrix(b);
    const Eigen::MatrixXd off = a - Eigen::MatrixXd::Identity(a.rows(), a.cols());
    CHECK(off.cwiseAbs().maxCoeff() < 1e-12);

    PolynomialModel y(testing::random_polynomial(n, 3, 2, 5, rng));
    SolveOptions o;
    o.max_subset_size = std::min(n, 2);
    o.max_degree = 3;
    const auto g = assemble_and_solve(y, m, o);
    const auto cl = classical_add(y, m.covariance().diagonal(), o);
    CHECK(cl.diagnostics().classical);
    CHECK((g.coefficients() - cl.coefficients()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(g.constant() == doctest::Approx(cl.constant()));
  }
}

TEST_CASE("surrogate reproduces at-most-bivariate polynomials") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 9; ++trial) {
    const int n = 2 + trial % 4;
    const int mdeg = 2 + trial % 3;
    const auto m = validate_covariance(testing::random_covariance(n, rng));
    PolynomialModel y(testing::random_polynomial(n, mdeg, 2, 6, rng));
    SolveOptions o;
    o.max_subset_size = 2;
    o.max_degree = mdeg;
    const auto e = assemble_and_solve(y, m, o);
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = z(rng);
      CHECK(relative_gap(evaluate_surrogate(e, x), y.polynomial()->evaluate(x)) < 1e-8);
    }
  }
}

TEST_CASE("dimension reduction matches exact integration for polynomial models") {
  for (int c = 1; c <= 4; ++c) {
    const auto m = testing::case_measure(c);
    PolynomialModel y(testing::case_polynomial());
    SolveOptions exact;
    exact.method = IntegrationMethod::Exact;
    SolveOptions cut;
    cut.method = IntegrationMethod::DimensionReduction;
    cut.quadrature_points = 5;
    const auto a = assemble_and_solve(y, m, exact);
    const auto b = assemble_and_solve(y, m, cut);
    CHECK((a.coefficients() - b.coefficients()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(b.constant() == doctest::Approx(a.constant()));
    REQUIRE(b.diagnostics().plan_evaluations.size() == 7);
    for (auto k : b.diagnostics().plan_evaluations) CHECK(k == expected_evaluation_count(3, 2, 5));
    CHECK(b.diagnostics().model_evaluations == 7 * expected_evaluation_count(3, 2, 5));
  }
}

TEST_CASE("exact integration needs a polynomial") {
  FunctionModel f(3, [](const Eigen::VectorXd& x) { return std::exp(x(0)); });
  SolveOptions o;
  o.method = IntegrationMethod::Exact;
  CHECK_THROWS_AS(assemble_and_solve(f, testing::case_measure(1), o), DomainError);
}

TEST_CASE("model and measure dimensions must agree") {
  PolynomialModel y(additive_linear({1.0, 2.0}));
  CHECK_THROWS_AS(assemble_and_solve(y, testing::case_measure(1), SolveOptions{}), DomainError);
}

TEST_CASE("ill-conditioned coupling is reported") {
  // nearly collinear inputs make the bivariate block almost singular
  const auto m = measure_from_correlations(3, {{1, 2, 0.999999}, {1, 3, 0.999999}, {2, 3, 0.999999}});
  PolynomialModel y(testing::case_polynomial());
  SolveOptions o;
  o.max_condition = 1e3;
  CHECK_THROWS_AS(assemble_and_solve(y, m, o), IllConditionedError);
}

TEST_CASE("component function queries") {
  PolynomialModel y(testing::case_polynomial());
  const auto e = assemble_and_solve(y, testing::case_measure(2), SolveOptions{});
  CHECK_THROWS_AS(component_function(e, VariableSubset::full(3)), DomainError);
  SolveOptions s3;
  s3.max_subset_size = 3;
  const auto e3 = assemble_and_solve(y, testing::case_measure(2), s3);
  CHECK(component_function(e3, VariableSubset::full(3)).is_zero());
  CHECK_THROWS_AS(component_function(e, VariableSubset{}), DomainError);
  SolveOptions s1;
  s1.max_subset_size = 1;
  const auto e1 = assemble_and_solve(y, testing::case_measure(2), s1);
  CHECK_THROWS_AS(component_function(e1, VariableSubset::from_one_based({1, 2})), DomainError);
  CHECK(e.coefficient(VariableSubset::from_one_based({1, 2, 3}), MultiIndex{1, 1, 1}) == 0.0);
}
