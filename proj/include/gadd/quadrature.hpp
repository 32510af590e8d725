#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Core>

#include "gadd/measure.hpp"

namespace gadd {

class Model;

/// Nodes are columns of `nodes`; weights are normalized to sum to one.
struct QuadratureRule {
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;
  int order = 0;

  [[nodiscard]] Eigen::Index dimension() const { return nodes.rows(); }
  [[nodiscard]] Eigen::Index size() const { return nodes.cols(); }

  template <typename F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (Eigen::Index p = 0; p < size(); ++p) sum += weights(p) * f(nodes.col(p));
    return sum;
  }
};

/// n-point Gauss–Hermite rule for the standard normal weight (probabilists' convention), by
/// Golub–Welsch on the Jacobi matrix, nodes polished with Newton steps. 1 <= n <= 64.
QuadratureRule gauss_hermite(int n);

/// n^|u|-point tensor rule for f_u: standard nodes z mapped by x = L_u z.
QuadratureRule correlated_rule(const MarginalMeasure& m, int n);

/// Cut (anchored) dimension-reduction scheme in standardized coordinates z ~ N(0, I):
///   Î = Σ_{k=0..S} (-1)^{S-k} C(N-k-1, S-k) Σ_{|w|=k} I_w,
/// where I_w integrates over z_w with the remaining coordinates at the reference point 0.
/// Shared points are merged, so `points` holds each model evaluation exactly once.
struct ReductionPlan {
  int dimension = 0;
  int order = 0;   // S
  int points_per_axis = 0;  // n
  Eigen::MatrixXd points;   // N × P, standardized coordinates
  Eigen::VectorXd weights;  // combined signed weights

  [[nodiscard]] std::size_t evaluation_count() const { return static_cast<std::size_t>(points.cols()); }
};

/// N(N−1)(n−1)²/2 + N(n−1) + 1 for S = 2; N(n−1) + 1 for S = 1.
std::size_t expected_evaluation_count(int dimension, int order, int points_per_axis);

/// Requires S ∈ {1, 2} and odd n (the reference point must be a node). S is clamped to N.
ReductionPlan make_reduction_plan(int dimension, int order, int points_per_axis);

/// Σ_p w_p g(T z_p); `transform` maps standardized points to x.
double integrate_plan(const ReductionPlan& plan, const Eigen::MatrixXd& transform,
                      const std::function<double(const Eigen::VectorXd&)>& integrand);

/// Model values at x_p = T z_p for every plan point, in plan order (one model call per point).
Eigen::VectorXd evaluate_plan(Model& model, const ReductionPlan& plan, const Eigen::MatrixXd& transform);

/// ∫ y(x) weight(x) dN(0, T Tᵀ)(x) by the cut scheme.
double dimension_reduction_integrate(Model& model, const Eigen::MatrixXd& transform, int order, int points_per_axis,
                                     const std::function<double(const Eigen::VectorXd&)>& weight);

}  // namespace gadd
