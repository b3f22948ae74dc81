#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "reflectcost/comparison.hpp"
#include "reflectcost/quadrature.hpp"
#include "reflectcost/spaceform.hpp"

namespace reflectcost {

using std::numbers::pi;

SphereHeatKernel::SphereHeatKernel(double t) : t_(t) {
  if (!(t >= 0.01)) throw std::domain_error("sphere_heat_kernel: t below 0.01");
  for (int l = 0;; ++l) {
    const double c = (2.0 * l + 1.0) / (4.0 * pi) * std::exp(-l * (l + 1.0) * t);
    if (c < 1e-12 && l > 0) break;
    coef_.push_back(c);
  }
}

double SphereHeatKernel::operator()(double c) const {
  c = std::clamp(c, -1.0, 1.0);
  double p0 = 1.0, p1 = c;
  double sum = coef_[0];
  if (coef_.size() > 1) sum += coef_[1] * p1;
  for (std::size_t l = 2; l < coef_.size(); ++l) {
    const double p2 = ((2.0 * l - 1.0) * c * p1 - (l - 1.0) * p0) / static_cast<double>(l);
    sum += coef_[l] * p2;
    p0 = p1;
    p1 = p2;
  }
  return std::max(0.0, sum);
}

double sphere_heat_kernel(double t, double cos_angle) { return SphereHeatKernel(t)(cos_angle); }

double tv_sphere_heat(double t, double a) {
  if (!(a > 0.0 && a <= pi)) throw std::domain_error("tv_sphere_heat: a outside (0, pi]");
  const SphereHeatKernel kernel(t);
  const double ca = std::cos(0.5 * a), sa = std::sin(0.5 * a);
  // x1, x2 mirror images across the equator; TV = integral over the north of p1 - p2
  auto quad = [&](int nt, int np) {
    const auto [x, w] = gauss_legendre(nt);
    double total = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double th = 0.25 * pi * (x[i] + 1.0);
      const double st = std::sin(th), ct = std::cos(th);
      double row = 0.0;
      for (int k = 0; k < np; ++k) {
        const double ph = 2.0 * pi * k / np;
        const double base = st * std::cos(ph) * ca;
        row += kernel(base + ct * sa) - kernel(base - ct * sa);
      }
      total += 0.25 * pi * w[i] * st * row * (2.0 * pi / np);
    }
    return total;
  };
  int nt = 32, np = 64;
  double prev = quad(nt, np);
  for (int level = 0; level < 6; ++level) {
    nt *= 2;
    np *= 2;
    const double cur = quad(nt, np);
    if (std::abs(cur - prev) < 1e-7) return std::clamp(cur, 0.0, 1.0);
    prev = cur;
  }
  throw numerical_error("tv_sphere_heat: quadrature did not converge");
}

SphereGrid SphereGrid::make(int n_colat, int n_lon) {
  if (n_colat < 16 || n_lon < 32) throw std::invalid_argument("sphere grid: resolution below 16 x 32");
  SphereGrid g;
  g.n_colat = n_colat;
  g.n_lon = n_lon;
  const auto [x, w] = gauss_legendre(n_colat);
  g.colatitude.resize(n_colat);
  g.cell_area.resize(n_colat);
  g.points.resize(3, static_cast<Eigen::Index>(n_colat) * n_lon);
  for (int i = 0; i < n_colat; ++i) {
    const int src = n_colat - 1 - i;
    g.colatitude[i] = std::acos(x[src]);
    g.cell_area[i] = w[src] * 2.0 * pi / n_lon;
    for (int j = 0; j < n_lon; ++j) {
      const double ph = g.longitude(j);
      const double st = std::sqrt(std::max(0.0, 1.0 - x[src] * x[src]));
      g.points.col(g.index(i, j)) << st * std::cos(ph), st * std::sin(ph), x[src];
    }
  }
  return g;
}

double SphereGrid::longitude(int j) const { return 2.0 * pi * j / n_lon; }

Eigen::MatrixXd sphere_heat_matrix(const SphereGrid& grid, double t) {
  const SphereHeatKernel kernel(t);
  const Eigen::Index n = grid.size();
  Eigen::MatrixXd M(n, n);
  const Eigen::MatrixXd cosines = grid.points.transpose() * grid.points;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double area = grid.area(k);
    for (Eigen::Index i = k; i < n; ++i) {
      const double p = kernel(cosines(i, k));
      M(i, k) = p * area;
      M(k, i) = p * grid.area(i);
    }
  }
  return M;
}

HeatFlowResult sphere_heat_flow(const DiscreteMeasure& mu, const SphereGrid& grid, double t) {
  if (mu.size() != grid.size()) throw std::invalid_argument("sphere_heat_flow: measure/grid size mismatch");
  const Eigen::MatrixXd M = sphere_heat_matrix(grid, t);
  Eigen::VectorXd out = M.transpose() * mu.weights;
  const double mass = out.sum();
  out /= mass;
  return {DiscreteMeasure(std::move(out), 1e-9), mass};
}

}  // namespace reflectcost
