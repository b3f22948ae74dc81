#include "reflectcost/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "network_simplex.hpp"
#include "reflectcost/comparison.hpp"

namespace reflectcost {

DiscreteMeasure::DiscreteMeasure(Eigen::VectorXd w, double tol) : weights(std::move(w)) {
  if (weights.size() == 0) throw std::invalid_argument("measure: empty weight vector");
  if (!weights.allFinite() || weights.minCoeff() < 0.0) throw std::invalid_argument("measure: negative weight");
  if (std::abs(weights.sum() - 1.0) > tol) throw std::invalid_argument("measure: weights do not sum to 1");
}

DiscreteMeasure DiscreteMeasure::dirac(Eigen::Index n, Eigen::Index i) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w[i] = 1.0;
  return DiscreteMeasure(std::move(w));
}

DiscreteMeasure DiscreteMeasure::uniform(Eigen::Index n) {
  return DiscreteMeasure(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

CostMatrix::CostMatrix(Eigen::MatrixXd c) : entries(std::move(c)) {
  if (entries.size() == 0) throw std::invalid_argument("cost: empty matrix");
  if (!entries.allFinite() || entries.minCoeff() < 0.0) throw std::invalid_argument("cost: negative entry");
}

bool is_metric(const Eigen::MatrixXd& c, double tol) {
  const Eigen::Index n = c.rows();
  if (c.cols() != n) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(c(i, i)) > tol) return false;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(c(i, j) - c(j, i)) > tol) return false;
  }
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (c(i, j) > c(i, k) + c(k, j) + tol) return false;
  return true;
}

CostMatrix CostMatrix::metric(Eigen::MatrixXd c, double tol) {
  CostMatrix out(std::move(c));
  if (!is_metric(out.entries, tol)) throw std::invalid_argument("cost: not a metric");
  out.metric_flag = true;
  return out;
}

TransportPlan transport_cost(const CostMatrix& C, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const Eigen::Index n = C.rows(), m = C.cols();
  if (mu.size() != n || nu.size() != m) throw std::invalid_argument("transport: dimension mismatch");

  // restrict to the supports
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < n; ++i)
    if (mu.weights[i] > 0.0) rows.push_back(i);
  for (Eigen::Index j = 0; j < m; ++j)
    if (nu.weights[j] > 0.0) cols.push_back(j);
  const std::size_t nr = rows.size(), nc = cols.size();
  std::vector<double> cost(nr * nc), supply(nr), demand(nc);
  for (std::size_t a = 0; a < nr; ++a) {
    supply[a] = mu.weights[rows[a]];
    for (std::size_t b = 0; b < nc; ++b) cost[a * nc + b] = C.entries(rows[a], cols[b]);
  }
  for (std::size_t b = 0; b < nc; ++b) demand[b] = nu.weights[cols[b]];

  const detail::TransportationSolution sol = detail::solve_transportation(cost, supply, demand);

  TransportPlan out;
  out.pivots = sol.pivots;
  out.plan = Eigen::MatrixXd::Zero(n, m);
  std::vector<double> terms(nr * nc);
  for (std::size_t a = 0; a < nr; ++a)
    for (std::size_t b = 0; b < nc; ++b) {
      const double f = std::max(0.0, sol.flow[a * nc + b]);
      out.plan(rows[a], cols[b]) = f;
      terms[a * nc + b] = f * cost[a * nc + b];
    }
  std::sort(terms.begin(), terms.end());
  out.value = std::accumulate(terms.begin(), terms.end(), 0.0);

  // Dual certificate: shift, then repair v so that u_i + v_j <= C_ij holds everywhere.
  out.u = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  out.v = Eigen::VectorXd::Zero(m);
  const double shift = *std::max_element(sol.u.begin(), sol.u.end());
  for (std::size_t a = 0; a < nr; ++a) out.u[rows[a]] = sol.u[a] - shift;
  for (Eigen::Index j = 0; j < m; ++j) out.v[j] = (C.entries.col(j) - out.u).minCoeff();
  for (Eigen::Index i = 0; i < n; ++i)
    if (mu.weights[i] == 0.0) out.u[i] = (C.entries.row(i).transpose() - out.v).minCoeff();
  const double dual = mu.weights.dot(out.u) + nu.weights.dot(out.v);
  out.duality_gap = out.value - dual;
  if (std::abs(out.duality_gap) > 1e-9 * (1.0 + std::abs(out.value)))
    throw numerical_error("transport: duality gap " + std::to_string(out.duality_gap) + " exceeds tolerance");
  return out;
}

double brute_force_uniform(const CostMatrix& C) {
  const Eigen::Index n = C.rows();
  if (C.cols() != n) throw std::invalid_argument("brute_force_uniform: square cost required");
  if (n > 8) throw std::invalid_argument("brute_force_uniform: n > 8");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += C.entries(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.size() != nu.size()) throw std::invalid_argument("total_variation: dimension mismatch");
  return std::min(1.0, 0.5 * (mu.weights - nu.weights).cwiseAbs().sum());
}

LinearProgramResult maximize_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index rows = A.rows(), vars = A.cols();
  if (c.size() != vars || b.size() != rows) throw std::invalid_argument("lp: dimension mismatch");
  if (rows > 0 && b.minCoeff() < 0.0) throw std::invalid_argument("lp: origin must be feasible");
  constexpr double eps = 1e-12;
  // tableau columns: structural, slack, rhs; last row: reduced costs
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(rows + 1, vars + rows + 1);
  T.topLeftCorner(rows, vars) = A;
  T.block(0, vars, rows, rows).setIdentity();
  T.topRightCorner(rows, 1) = b;
  T.bottomLeftCorner(1, vars) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = vars + i;
  const Eigen::Index rhs = vars + rows;

  for (std::size_t iter = 0;; ++iter) {
    if (iter > 100000) throw numerical_error("lp: iteration cap reached");
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < vars + rows; ++j)
      if (T(rows, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (T(i, enter) <= eps) continue;
      const double ratio = T(i, rhs) / T(i, enter);
      if (ratio < best - eps ||
          (std::abs(ratio - best) <= eps && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) throw numerical_error("lp: unbounded");
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= rows; ++i)
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  LinearProgramResult out;
  out.x = Eigen::VectorXd::Zero(vars);
  for (Eigen::Index i = 0; i < rows; ++i)
    if (basis[static_cast<std::size_t>(i)] < vars) out.x[basis[static_cast<std::size_t>(i)]] = T(i, rhs);
  out.objective = T(rows, rhs);
  return out;
}

double kr_dual_value(const CostMatrix& C, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!C.metric_flag) throw std::invalid_argument("kr_dual_value: metric cost required");
  const Eigen::Index n = C.rows();
  if (mu.size() != n || nu.size() != n) throw std::invalid_argument("kr_dual_value: dimension mismatch");
  if (n == 1) return 0.0;
  // f_0 = 0, f_i = p_i - q_i for i >= 1; one row per ordered pair
  const Eigen::Index k = n - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * (n - 1), 2 * k);
  Eigen::VectorXd b(n * (n - 1));
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (i > 0) {
        A(row, i - 1) += 1.0;
        A(row, k + i - 1) -= 1.0;
      }
      if (j > 0) {
        A(row, j - 1) -= 1.0;
        A(row, k + j - 1) += 1.0;
      }
      b[row] = C.entries(i, j);
      ++row;
    }
  Eigen::VectorXd c(2 * k);
  for (Eigen::Index i = 1; i < n; ++i) {
    c[i - 1] = mu.weights[i] - nu.weights[i];
    c[k + i - 1] = -(mu.weights[i] - nu.weights[i]);
  }
  return maximize_lp(c, A, b).objective;
}

}  // namespace reflectcost
