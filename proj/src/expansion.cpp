#include "gadd/expansion.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "gadd/errors.hpp"
#include "gadd/model.hpp"
#include "gadd/quadrature.hpp"

namespace gadd {

AddExpansion::AddExpansion(std::shared_ptr<const BasisSet> basis, double constant, Eigen::VectorXd coefficients,
                           SolveDiagnostics diagnostics)
    : basis_(std::move(basis)),
      constant_(constant),
      coefficients_(std::move(coefficients)),
      diagnostics_(std::move(diagnostics)) {
  if (static_cast<std::size_t>(coefficients_.size()) != basis_->size())
    throw DomainError("coefficient count does not match basis size");
}

double AddExpansion::coefficient(const VariableSubset& u, const MultiIndex& j) const {
  const auto k = basis_->find(u, j);
  return k ? coefficients_(static_cast<Eigen::Index>(*k)) : 0.0;
}

bool couples(const VariableSubset& u, const VariableSubset& v) {
  return u.intersects(v) && !v.is_subset_of(u);
}

double coupling_integral(MomentCache& cache, const BasisFunction& row, const BasisFunction& col) {
  const VariableSubset& u = row.subset;
  const VariableSubset& v = col.subset;
  if (!couples(u, v))
    throw DomainError("coupling integral needs u ∩ v ≠ ∅ and v ⊄ u (u=" + u.to_string() + ", v=" + v.to_string() + ")");
  return cache.expect_product(row.poly * col.poly, {u, v.minus(u)});
}

double projection_integral(MomentCache& cache, const PolynomialD& y, const BasisFunction& f) {
  const int n = cache.measure().dimension();
  if (y.subset() != VariableSubset::full(n)) throw DomainError("model polynomial must live on all N variables");
  return cache.expect_product(y * f.poly, {f.subset, f.subset.complement(n)});
}

Eigen::MatrixXd coupling_matrix(const BasisSet& basis) {
  const auto L = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(L, L);
  MomentCache cache(basis.measure());
  for (Eigen::Index r = 0; r < L; ++r)
    for (Eigen::Index c = 0; c < L; ++c) {
      const BasisFunction& row = basis[static_cast<std::size_t>(r)];
      const BasisFunction& col = basis[static_cast<std::size_t>(c)];
      if (couples(row.subset, col.subset)) A(r, c) = coupling_integral(cache, row, col);
    }
  return A;
}

Eigen::MatrixXd product_transform(const GaussianMeasure& measure, const VariableSubset& u) {
  const int n = measure.dimension();
  if (u.empty() || static_cast<int>(u.size()) == n) return measure.cholesky();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (const VariableSubset& block : {u, u.complement(n)}) {
    const Eigen::MatrixXd L = checked_cholesky(marginal(measure, block).covariance);
    for (std::size_t a = 0; a < block.size(); ++a)
      for (std::size_t b = 0; b <= a; ++b)
        T(block[a], block[b]) = L(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return T;
}

Projections compute_projections(Model& model, const BasisSet& basis, const SolveOptions& options) {
  const GaussianMeasure& measure = basis.measure();
  const int n = measure.dimension();
  if (model.dimension() != n)
    throw DomainError("model has " + std::to_string(model.dimension()) + " inputs but the measure has " +
                      std::to_string(n));
  IntegrationMethod method = options.method;
  if (method == IntegrationMethod::Auto)
    method = model.polynomial() ? IntegrationMethod::Exact : IntegrationMethod::DimensionReduction;

  Projections out;
  out.b.resize(static_cast<Eigen::Index>(basis.size()));
  const std::size_t before = model.evaluations();

  if (method == IntegrationMethod::Exact) {
    const PolynomialD* y = model.polynomial();
    if (!y) throw DomainError("exact integration requires a polynomial model");
    MomentCache cache(measure);
    out.constant = cache.expect_joint(*y);
    for (std::size_t k = 0; k < basis.size(); ++k)
      out.b(static_cast<Eigen::Index>(k)) = projection_integral(cache, *y, basis[k]);
    return out;
  }

  const ReductionPlan plan = make_reduction_plan(n, options.reduction_order, options.quadrature_points);
  {
    const Eigen::MatrixXd T = measure.cholesky();
    const Eigen::VectorXd y = evaluate_plan(model, plan, T);
    out.constant = plan.weights.dot(y);
    out.plan_evaluations.push_back(plan.evaluation_count());
  }
  for (const VariableSubset& u : basis.subsets()) {
    const Eigen::MatrixXd T = product_transform(measure, u);
    const Eigen::MatrixXd x = T * plan.points;
    const Eigen::VectorXd y = model.evaluate_batch(x);
    out.plan_evaluations.push_back(plan.evaluation_count());
    Eigen::MatrixXd xu(static_cast<Eigen::Index>(u.size()), x.cols());
    for (std::size_t a = 0; a < u.size(); ++a) xu.row(static_cast<Eigen::Index>(a)) = x.row(u[a]);
    auto [first, last] = basis.range(u);
    for (std::size_t k = first; k < last; ++k) {
      double sum = 0.0;
      for (Eigen::Index p = 0; p < x.cols(); ++p) sum += plan.weights(p) * y(p) * basis[k].poly.evaluate(xu.col(p));
      out.b(static_cast<Eigen::Index>(k)) = sum;
    }
  }
  out.model_evaluations = model.evaluations() - before;
  return out;
}

LinearSystem assemble_system(Model& model, const BasisSet& basis, const SolveOptions& options, Projections* projections) {
  Projections p = compute_projections(model, basis, options);
  LinearSystem sys{coupling_matrix(basis), p.b};
  if (projections) *projections = std::move(p);
  return sys;
}

AddExpansion assemble_and_solve(Model& model, const GaussianMeasure& measure, const SolveOptions& options) {
  auto basis = std::make_shared<const BasisSet>(
      build_basis(measure, options.max_subset_size, options.max_degree, options.basis));
  return assemble_and_solve(model, std::move(basis), options);
}

AddExpansion assemble_and_solve(Model& model, std::shared_ptr<const BasisSet> basis, const SolveOptions& options) {
  Projections proj;
  const LinearSystem sys = assemble_system(model, *basis, options, &proj);
  SolveDiagnostics diag;
  diag.model_evaluations = proj.model_evaluations;
  diag.plan_evaluations = proj.plan_evaluations;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(sys.b.size());
  if (sys.A.size() > 0) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
    const double rcond = lu.rcond();
    diag.condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(diag.condition_estimate <= options.max_condition))
      throw IllConditionedError("coupling matrix condition estimate " + std::to_string(diag.condition_estimate) +
                                " exceeds " + std::to_string(options.max_condition));
    z = lu.solve(sys.b);
    diag.residual = (sys.A * z - sys.b).lpNorm<Eigen::Infinity>();
    const double bnorm = sys.b.lpNorm<Eigen::Infinity>();
    if (!(diag.residual <= options.residual_tolerance * bnorm) && diag.residual > 0.0)
      throw NumericalError("linear solve residual " + std::to_string(diag.residual) + " exceeds tolerance");
  }
  return AddExpansion(std::move(basis), proj.constant, std::move(z), std::move(diag));
}

AddExpansion classical_add(Model& model, const Eigen::VectorXd& variances, const SolveOptions& options) {
  if (variances.size() != model.dimension()) throw DomainError("one variance per model input is required");
  const GaussianMeasure product = validate_covariance(variances.asDiagonal().toDenseMatrix());
  auto basis = std::make_shared<const BasisSet>(
      build_basis(product, options.max_subset_size, options.max_degree, options.basis));
  const Projections proj = compute_projections(model, *basis, options);
  SolveDiagnostics diag;
  diag.model_evaluations = proj.model_evaluations;
  diag.plan_evaluations = proj.plan_evaluations;
  diag.classical = true;
  return AddExpansion(std::move(basis), proj.constant, proj.b, std::move(diag));
}

PolynomialD component_function(const AddExpansion& expansion, const VariableSubset& u) {
  if (u.empty()) throw DomainError("the constant term is not a component function; use constant()");
  u.check_range(expansion.dimension());
  if (static_cast<int>(u.size()) > expansion.max_subset_size())
    throw DomainError("subset " + u.to_string() + " lies outside the truncation S=" +
                      std::to_string(expansion.max_subset_size()));
  PolynomialD out(u);
  auto [first, last] = expansion.basis().range(u);
  for (std::size_t k = first; k < last; ++k)
    out += expansion.basis()[k].poly * expansion.coefficients()(static_cast<Eigen::Index>(k));
  return out;
}

std::map<VariableSubset, PolynomialD> component_functions(const AddExpansion& expansion) {
  std::map<VariableSubset, PolynomialD> out;
  for (const VariableSubset& u : expansion.basis().subsets()) out.emplace(u, component_function(expansion, u));
  return out;
}

double evaluate_surrogate(const AddExpansion& expansion, const Eigen::VectorXd& x) {
  if (x.size() != expansion.dimension())
    throw DomainError("surrogate expects " + std::to_string(expansion.dimension()) + " inputs, got " +
                      std::to_string(x.size()));
  double sum = expansion.constant();
  const BasisSet& basis = expansion.basis();
  for (const VariableSubset& u : basis.subsets()) {
    Eigen::VectorXd xu(static_cast<Eigen::Index>(u.size()));
    for (std::size_t a = 0; a < u.size(); ++a) xu(static_cast<Eigen::Index>(a)) = x(u[a]);
    auto [first, last] = basis.range(u);
    for (std::size_t k = first; k < last; ++k)
      sum += expansion.coefficients()(static_cast<Eigen::Index>(k)) * basis[k].poly.evaluate(xu);
  }
  return sum;
}

}  // namespace gadd
