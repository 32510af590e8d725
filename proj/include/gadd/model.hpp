#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gadd/polynomial.hpp"

namespace gadd {

/// The response y(x). Every evaluation goes through operator() or evaluate_batch() and is counted.
class Model {
 public:
  explicit Model(int dimension) : dimension_(dimension) {}
  virtual ~Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] std::size_t evaluations() const { return evaluations_.load(); }

  double operator()(const Eigen::VectorXd& x);

  /// One value per column of `points`.
  virtual Eigen::VectorXd evaluate_batch(const Eigen::MatrixXd& points);

  /// Exact polynomial form when the model has one; enables moment-based integrals.
  [[nodiscard]] virtual const PolynomialD* polynomial() const { return nullptr; }

 protected:
  virtual double evaluate(const Eigen::VectorXd& x) = 0;
  void add_evaluations(std::size_t k) { evaluations_ += k; }
  void check_dimension(Eigen::Index rows) const;

 private:
  int dimension_;
  std::atomic<std::size_t> evaluations_{0};
};

class PolynomialModel final : public Model {
 public:
  /// `poly` must live on {0..N-1}.
  explicit PolynomialModel(PolynomialD poly);
  [[nodiscard]] const PolynomialD* polynomial() const override { return &poly_; }

 protected:
  double evaluate(const Eigen::VectorXd& x) override { return poly_.evaluate(x); }

 private:
  PolynomialD poly_;
};

class FunctionModel final : public Model {
 public:
  FunctionModel(int dimension, std::function<double(const Eigen::VectorXd&)> f)
      : Model(dimension), f_(std::move(f)) {}

 protected:
  double evaluate(const Eigen::VectorXd& x) override { return f_(x); }

 private:
  std::function<double(const Eigen::VectorXd&)> f_;
};

/// (a0 + a1 X1)(b0 + b1 X2) + (a0 + a1 X1)(c0 + c1 X3) + (b0 + b1 X2)(c0 + c1 X3) on three variables.
PolynomialD quadratic_symmetric(const std::array<double, 6>& abc);

/// c0 + Σ_i c_i X_i.
PolynomialD additive_linear(const std::vector<double>& coefficients, double constant = 0.0);

/// Sparse polynomial over N variables from (coefficient, exponents) terms.
PolynomialD polynomial_from_terms(int dimension, const std::vector<std::pair<double, std::vector<int>>>& terms);

}  // namespace gadd
