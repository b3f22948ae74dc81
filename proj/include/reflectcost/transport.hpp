#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace reflectcost {

/// Probability vector over an indexed point set.
struct DiscreteMeasure {
  Eigen::VectorXd weights;

  DiscreteMeasure() = default;
  /// Validates nonnegativity and unit mass within tol.
  explicit DiscreteMeasure(Eigen::VectorXd w, double tol = 1e-12);

  static DiscreteMeasure dirac(Eigen::Index n, Eigen::Index i);
  static DiscreteMeasure uniform(Eigen::Index n);

  Eigen::Index size() const { return weights.size(); }
};

struct CostMatrix {
  Eigen::MatrixXd entries;
  bool metric_flag = false;

  CostMatrix() = default;
  /// Arbitrary nonnegative cost.
  explicit CostMatrix(Eigen::MatrixXd c);
  /// Validated metric: symmetric, zero diagonal, triangle inequality within tol.
  static CostMatrix metric(Eigen::MatrixXd c, double tol = 1e-10);

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

/// True if c is symmetric with zero diagonal and satisfies the triangle inequality within tol.
bool is_metric(const Eigen::MatrixXd& c, double tol = 1e-10);

struct TransportPlan {
  Eigen::MatrixXd plan;
  double value = 0.0;
  /// Feasible dual potentials: u_i + v_j <= C_ij.
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double duality_gap = 0.0;
  std::size_t pivots = 0;
};

/// Exact min <pi, C> over couplings of mu and nu.
TransportPlan transport_cost(const CostMatrix& C, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// min over permutations of (1/n) sum C[i][sigma(i)], n <= 8.
double brute_force_uniform(const CostMatrix& C);

/// (1/2) sum |mu_i - nu_i|.
double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// max sum f_i (mu_i - nu_i) over f with |f_i - f_j| <= C_ij, by an exact simplex.
double kr_dual_value(const CostMatrix& C, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct LinearProgramResult {
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// max c.x subject to A x <= b, x >= 0, with b >= 0; Bland's rule.
LinearProgramResult maximize_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace reflectcost
