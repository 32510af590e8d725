#include "gadd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gadd/errors.hpp"
#include "gadd/model.hpp"

namespace gadd {

namespace {

// Orthonormal probabilists' Hermite values h_0..h_{n} at x.
std::vector<double> orthonormal_hermite(int n, double x) {
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  h[0] = 1.0;
  if (n >= 1) h[1] = x;
  for (int k = 1; k < n; ++k)
    h[static_cast<std::size_t>(k) + 1] =
        (x * h[static_cast<std::size_t>(k)] - std::sqrt(double(k)) * h[static_cast<std::size_t>(k) - 1]) /
        std::sqrt(double(k + 1));
  return h;
}

double binomial(int n, int k) {
  if (k < 0) return 0.0;
  if (k == 0) return 1.0;
  if (n < k) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * double(n - i) / double(i + 1);
  return std::round(r);
}

void for_each_combination(int n, int k, int start, std::vector<int>& cur,
                          const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(cur.size()) == k) {
    f(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    for_each_combination(n, k, i + 1, cur, f);
    cur.pop_back();
  }
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
  if (n < 1 || n > 64) throw DomainError("Gauss–Hermite order must be in 1..64, got " + std::to_string(n));
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) jacobi(k, k + 1) = jacobi(k + 1, k) = std::sqrt(double(k + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Eigen::VectorXd x = eig.eigenvalues();

  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    for (int it = 0; it < 3 && n > 1; ++it) {
      const auto h = orthonormal_hermite(n, x(i));
      x(i) -= h[static_cast<std::size_t>(n)] / (std::sqrt(double(n)) * h[static_cast<std::size_t>(n) - 1]);
    }
    const auto h = orthonormal_hermite(n - 1, x(i));
    double s = 0.0;
    for (double v : h) s += v * v;
    w(i) = 1.0 / s;
  }
  // exact symmetry; the middle node of an odd rule is exactly the origin
  for (int i = 0; i < n / 2; ++i) {
    const double xs = 0.5 * (x(n - 1 - i) - x(i));
    const double ws = 0.5 * (w(i) + w(n - 1 - i));
    x(i) = -xs;
    x(n - 1 - i) = xs;
    w(i) = w(n - 1 - i) = ws;
  }
  if (n % 2 == 1) x(n / 2) = 0.0;
  w /= w.sum();
  return {x.transpose(), w, n};
}

QuadratureRule correlated_rule(const MarginalMeasure& m, int n) {
  const QuadratureRule base = gauss_hermite(n);
  const auto d = static_cast<Eigen::Index>(m.subset.size());
  const Eigen::MatrixXd L = checked_cholesky(m.covariance);
  Eigen::Index count = 1;
  for (Eigen::Index k = 0; k < d; ++k) count *= n;
  QuadratureRule out{Eigen::MatrixXd(d, count), Eigen::VectorXd(count), n};
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd z(d);
  for (Eigen::Index p = 0; p < count; ++p) {
    double w = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      z(k) = base.nodes(0, idx[static_cast<std::size_t>(k)]);
      w *= base.weights(idx[static_cast<std::size_t>(k)]);
    }
    out.nodes.col(p) = L * z;
    out.weights(p) = w;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
  return out;
}

std::size_t expected_evaluation_count(int dimension, int order, int points_per_axis) {
  const auto N = static_cast<std::size_t>(dimension);
  const auto m = static_cast<std::size_t>(points_per_axis - 1);
  if (order == 1) return N * m + 1;
  if (order == 2) return N * (N - 1) * m * m / 2 + N * m + 1;
  throw DomainError("evaluation-count formula is defined for S = 1 or 2");
}

ReductionPlan make_reduction_plan(int dimension, int order, int points_per_axis) {
  if (dimension < 1) throw DomainError("dimension must be >= 1");
  if (order < 1 || order > 2)
    throw DomainError("dimension-reduction integration supports S = 1 or 2 only, got S=" + std::to_string(order));
  if (points_per_axis % 2 == 0)
    throw DomainError("dimension-reduction integration needs an odd number of points per axis so the reference "
                      "point is a node, got n=" + std::to_string(points_per_axis));
  const QuadratureRule rule = gauss_hermite(points_per_axis);
  const int n = points_per_axis;
  const int center = n / 2;
  const int S = std::min(order, dimension);

  // key: (coordinate, node index) pairs off the reference point
  std::map<std::vector<std::pair<int, int>>, double> accumulated;
  for (int k = 0; k <= S; ++k) {
    const double coef = ((S - k) % 2 == 0 ? 1.0 : -1.0) * binomial(dimension - k - 1, S - k);
    std::vector<int> cur;
    for_each_combination(dimension, k, 0, cur, [&](const std::vector<int>& w) {
      std::vector<int> idx(w.size(), 0);
      while (true) {
        double weight = coef;
        std::vector<std::pair<int, int>> key;
        for (std::size_t a = 0; a < w.size(); ++a) {
          weight *= rule.weights(idx[a]);
          if (idx[a] != center) key.emplace_back(w[a], idx[a]);
        }
        accumulated[key] += weight;
        std::size_t a = 0;
        for (; a < idx.size(); ++a) {
          if (++idx[a] < n) break;
          idx[a] = 0;
        }
        if (a == idx.size()) break;
      }
    });
  }

  ReductionPlan plan;
  plan.dimension = dimension;
  plan.order = S;
  plan.points_per_axis = n;
  plan.points = Eigen::MatrixXd::Zero(dimension, static_cast<Eigen::Index>(accumulated.size()));
  plan.weights.resize(static_cast<Eigen::Index>(accumulated.size()));
  Eigen::Index p = 0;
  for (const auto& [key, weight] : accumulated) {
    for (const auto& [coord, node] : key) plan.points(coord, p) = rule.nodes(0, node);
    plan.weights(p) = weight;
    ++p;
  }
  return plan;
}

double integrate_plan(const ReductionPlan& plan, const Eigen::MatrixXd& transform,
                      const std::function<double(const Eigen::VectorXd&)>& integrand) {
  double sum = 0.0;
  for (Eigen::Index p = 0; p < plan.points.cols(); ++p) {
    const Eigen::VectorXd x = transform * plan.points.col(p);
    sum += plan.weights(p) * integrand(x);
  }
  return sum;
}

Eigen::VectorXd evaluate_plan(Model& model, const ReductionPlan& plan, const Eigen::MatrixXd& transform) {
  return model.evaluate_batch(transform * plan.points);
}

double dimension_reduction_integrate(Model& model, const Eigen::MatrixXd& transform, int order, int points_per_axis,
                                     const std::function<double(const Eigen::VectorXd&)>& weight) {
  if (transform.rows() != model.dimension() || transform.cols() != model.dimension())
    throw DomainError("transform must be N×N for an N-input model");
  const ReductionPlan plan = make_reduction_plan(model.dimension(), order, points_per_axis);
  const Eigen::MatrixXd x = transform * plan.points;
  const Eigen::VectorXd y = model.evaluate_batch(x);
  double sum = 0.0;
  for (Eigen::Index p = 0; p < x.cols(); ++p) sum += plan.weights(p) * y(p) * weight(x.col(p));
  return sum;
}

}  // namespace gadd
