#pragma once

#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace reflectcost {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

namespace detail {

inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
std::pair<double, double> kronrod15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7], gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double fl = f(c - h * kXgk[j]), fr = f(c + h * kXgk[j]);
    kron += kWgk[j] * (fl + fr);
    if (j % 2 == 1) gauss += kWg[j / 2] * (fl + fr);
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b] to absolute tolerance tol;
/// bisects the worst interval, at most max_intervals of them.
template <typename F>
QuadratureResult integrate(F f, double a, double b, double tol, int max_intervals = 4000) {
  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> heap;
  const auto [v0, e0] = detail::kronrod15(f, a, b);
  heap.push({a, b, v0, e0});
  double value = v0, error = e0;
  while (error > tol && static_cast<int>(heap.size()) < max_intervals) {
    const Piece p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    const auto [vl, el] = detail::kronrod15(f, p.a, m);
    const auto [vr, er] = detail::kronrod15(f, m, p.b);
    value += vl + vr - p.value;
    error += el + er - p.error;
    heap.push({p.a, m, vl, el});
    heap.push({m, p.b, vr, er});
  }
  // re-add to shed accumulated rounding in the running totals
  value = error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, error <= tol};
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd x = es.eigenvalues();
  Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  // polish nodes with Newton steps on P_n
  for (int i = 0; i < n; ++i) {
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = x[i];
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x[i] * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x[i] * p1 - p0) / (x[i] * x[i] - 1.0);
      x[i] -= p1 / dp;
      if (it == 2) w[i] = 2.0 / ((1.0 - x[i] * x[i]) * dp * dp);
    }
  }
  return {x, w};
}

}  // namespace reflectcost
