#include "gadd/model.hpp"

#include <string>

#include "gadd/errors.hpp"

namespace gadd {

void Model::check_dimension(Eigen::Index rows) const {
  if (rows != dimension_)
    throw DomainError("model expects " + std::to_string(dimension_) + " inputs, got " + std::to_string(rows));
}

double Model::operator()(const Eigen::VectorXd& x) {
  check_dimension(x.size());
  add_evaluations(1);
  return evaluate(x);
}

Eigen::VectorXd Model::evaluate_batch(const Eigen::MatrixXd& points) {
  check_dimension(points.rows());
  Eigen::VectorXd out(points.cols());
  for (Eigen::Index p = 0; p < points.cols(); ++p) out(p) = (*this)(points.col(p));
  return out;
}

PolynomialModel::PolynomialModel(PolynomialD poly)
    : Model(static_cast<int>(poly.subset().size())), poly_(std::move(poly)) {
  if (poly_.subset() != VariableSubset::full(dimension()))
    throw DomainError("model polynomial must be defined over all variables 1..N");
}

PolynomialD quadratic_symmetric(const std::array<double, 6>& abc) {
  const auto [a0, a1, b0, b1, c0, c1] = abc;
  const VariableSubset all = VariableSubset::full(3);
  auto lin = [&](double c, double s, std::size_t k) {
    PolynomialD p = PolynomialD::constant(all, c);
    MultiIndex e = MultiIndex::zeros(3);
    e[k] = 1;
    p.add_term(e, s);
    return p;
  };
  const PolynomialD a = lin(a0, a1, 0);
  const PolynomialD b = lin(b0, b1, 1);
  const PolynomialD c = lin(c0, c1, 2);
  return a * b + a * c + b * c;
}

PolynomialD additive_linear(const std::vector<double>& coefficients, double constant) {
  if (coefficients.empty()) throw DomainError("additive_linear needs at least one coefficient");
  const VariableSubset all = VariableSubset::full(static_cast<int>(coefficients.size()));
  PolynomialD p = PolynomialD::constant(all, constant);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    MultiIndex e = MultiIndex::zeros(coefficients.size());
    e[k] = 1;
    p.add_term(e, coefficients[k]);
  }
  return p;
}

PolynomialD polynomial_from_terms(int dimension, const std::vector<std::pair<double, std::vector<int>>>& terms) {
  if (dimension < 1) throw DomainError("polynomial dimension must be >= 1");
  PolynomialD p(VariableSubset::full(dimension));
  for (const auto& [c, e] : terms) {
    if (static_cast<int>(e.size()) != dimension)
      throw DomainError("polynomial term has " + std::to_string(e.size()) + " exponents, expected " +
                        std::to_string(dimension));
    p.add_term(MultiIndex(e), c);
  }
  return p;
}

}  // namespace gadd
