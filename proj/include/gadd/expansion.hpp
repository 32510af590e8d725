#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "gadd/measure.hpp"
#include "gadd/moments.hpp"
#include "gadd/polybasis.hpp"
#include "gadd/polynomial.hpp"

namespace gadd {

class Model;

enum class IntegrationMethod {
  Auto,                // exact moments for polynomial models, dimension reduction otherwise
  Exact,               // moment factorization; polynomial models only
  DimensionReduction,  // cut scheme with Gauss–Hermite rules
};

struct SolveOptions {
  int max_subset_size = 2;  // S
  int max_degree = 2;       // m
  IntegrationMethod method = IntegrationMethod::Auto;
  int quadrature_points = 3;  // n per axis
  int reduction_order = 2;    // S of the cut scheme
  double max_condition = 1e12;
  double residual_tolerance = 1e-8;  // relative to ‖b‖∞
  BasisOptions basis{};
};

struct SolveDiagnostics {
  double condition_estimate = 1.0;
  double residual = 0.0;  // ‖A z − b‖∞
  std::size_t model_evaluations = 0;
  std::vector<std::size_t> plan_evaluations;  // one entry per dimension-reduction plan
  bool classical = false;
};

/// Truncated generalized ADD: constant plus coefficients aligned with the basis ordering.
class AddExpansion {
 public:
  AddExpansion(std::shared_ptr<const BasisSet> basis, double constant, Eigen::VectorXd coefficients,
               SolveDiagnostics diagnostics);

  [[nodiscard]] double constant() const { return constant_; }
  [[nodiscard]] const BasisSet& basis() const { return *basis_; }
  [[nodiscard]] const std::shared_ptr<const BasisSet>& basis_ptr() const { return basis_; }
  [[nodiscard]] const Eigen::VectorXd& coefficients() const { return coefficients_; }
  [[nodiscard]] const SolveDiagnostics& diagnostics() const { return diagnostics_; }
  [[nodiscard]] int dimension() const { return basis_->dimension(); }
  [[nodiscard]] int max_subset_size() const { return basis_->max_subset_size(); }
  [[nodiscard]] int max_degree() const { return basis_->max_degree(); }

  /// C̃_{u,j}; zero outside the truncation.
  [[nodiscard]] double coefficient(const VariableSubset& u, const MultiIndex& j) const;

 private:
  std::shared_ptr<const BasisSet> basis_;
  double constant_;
  Eigen::VectorXd coefficients_;
  SolveDiagnostics diagnostics_;
};

struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// Row u couples to column v when u ∩ v ≠ ∅ and v ⊄ u.
bool couples(const VariableSubset& u, const VariableSubset& v);

/// J = ∫ ψ_{u,j}(x_u) ψ_{v,k}(x_v) f_u(x_u) f_{v∖u}(x_{v∖u}) dx_{u∪v}, exact by moments.
double coupling_integral(MomentCache& cache, const BasisFunction& row, const BasisFunction& col);

/// I = ∫ y(x) ψ_{u,j}(x_u) f_u(x_u) f_{−u}(x_{−u}) dx for a polynomial y over all N variables.
double projection_integral(MomentCache& cache, const PolynomialD& y, const BasisFunction& f);

/// Identity plus coupling integrals, rows/columns in basis order.
Eigen::MatrixXd coupling_matrix(const BasisSet& basis);

/// Constant term ∫ y f_X and the right-hand side b = (I_{u,j}).
struct Projections {
  double constant = 0.0;
  Eigen::VectorXd b;
  std::size_t model_evaluations = 0;
  std::vector<std::size_t> plan_evaluations;
};

/// Constant against the joint measure, I_{u,j} against f_u ⊗ f_{−u}. Dimension reduction evaluates the
/// model once per plan point: one plan for the constant, then one per subset owning basis members.
Projections compute_projections(Model& model, const BasisSet& basis, const SolveOptions& options);

/// x = T z with T the Cholesky factor of diag-block(Σ_u, Σ_{−u}); u empty gives chol(Σ).
Eigen::MatrixXd product_transform(const GaussianMeasure& measure, const VariableSubset& u);

LinearSystem assemble_system(Model& model, const BasisSet& basis, const SolveOptions& options,
                             Projections* projections = nullptr);

AddExpansion assemble_and_solve(Model& model, const GaussianMeasure& measure, const SolveOptions& options);
AddExpansion assemble_and_solve(Model& model, std::shared_ptr<const BasisSet> basis, const SolveOptions& options);

/// Classical ADD under the product measure with the given marginal variances: C = I, no system solve.
AddExpansion classical_add(Model& model, const Eigen::VectorXd& variances, const SolveOptions& options);

/// y_{u,G} = Σ_j C̃_{u,j} ψ_{u,j} over x_u; the zero polynomial when u owns no basis members.
PolynomialD component_function(const AddExpansion& expansion, const VariableSubset& u);

/// All non-constant components with at least one basis member, canonical order.
std::map<VariableSubset, PolynomialD> component_functions(const AddExpansion& expansion);

/// ỹ_{S,m}(x).
double evaluate_surrogate(const AddExpansion& expansion, const Eigen::VectorXd& x);

}  // namespace gadd
