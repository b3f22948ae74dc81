#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "reflectcost/cost.hpp"
#include "reflectcost/quadrature.hpp"
#include "reflectcost/spaceform.hpp"

using namespace reflectcost;
using std::numbers::pi;

namespace {

ModelPoint random_point(const Space& s, std::mt19937_64& gen) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (s.kind) {
    case SpaceKind::euclidean: {
      Eigen::VectorXd c(s.dim);
      for (int k = 0; k < s.dim; ++k) c[k] = 2.0 * g(gen);
      return make_point(s, c);
    }
    case SpaceKind::sphere: {
      Eigen::VectorXd c(3);
      c << g(gen), g(gen), g(gen);
      return make_point(s, s.radius * c / c.norm());
    }
    default:
      return hyperbolic_point(s.radius, 3.0 * u(gen), 2.0 * pi * u(gen));
  }
}

Tangent random_tangent(const ModelPoint& x, std::mt19937_64& gen) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::MatrixXd F = tangent_frame(x);
  Eigen::VectorXd xi(F.cols());
  for (Eigen::Index k = 0; k < xi.size(); ++k) xi[k] = g(gen);
  return F * xi;
}

bool tangent_at(const ModelPoint& x, const Tangent& v) {
  const double r2 = x.space.radius * x.space.radius;
  if (x.space.kind == SpaceKind::euclidean) return true;
  return std::abs(inner(x.space, x.coords, v)) <= 1e-9 * std::sqrt(r2) * (1.0 + v.norm());
}

// Kolmogorov distance between a sample and the N(0, var) law.
double ks_normal(std::vector<double> x, double var) {
  std::sort(x.begin(), x.end());
  double d = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = 0.5 * std::erfc(-x[i] / std::sqrt(2.0 * var));
    d = std::max({d, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  return d;
}

}  // namespace

TEST_CASE("geodesic operations: examples") {
  const ModelPoint north = sphere_point(1.0, 0.0, 0.0);
  const ModelPoint eq = sphere_point(1.0, pi / 2, 0.3);
  CHECK(distance(north, eq) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(distance(north, north) == 0.0);
  Tangent v(3);
  v << 0.2, -0.1, 0.0;
  CHECK(parallel_transport(north, north, v) == v);

  const ModelPoint p = make_point(Space::euclidean(2), Eigen::Vector2d(1.0, 2.0));
  const Tangent w = Eigen::Vector2d(0.25, -3.0);
  CHECK(exp_map(p, w).coords == p.coords + w);

  CHECK_THROWS_AS(make_point(Space::sphere(), Eigen::Vector3d(1.0, 0.1, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(make_point(Space::hyperbolic(), Eigen::Vector3d(1.0, 0.5, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(distance(north, p), std::invalid_argument);
  CHECK(distance(hyperbolic_point(2.0, 0.0, 0.0), hyperbolic_point(2.0, 1.3, 0.7)) == doctest::Approx(1.3));
}

TEST_CASE("geodesic operations: round trips on random instances") {
  std::mt19937_64 gen(1);
  for (const Space& s : {Space::euclidean(2), Space::euclidean(3), Space::sphere(1.0), Space::sphere(2.5),
                         Space::hyperbolic(1.0), Space::hyperbolic(0.7)}) {
    for (int rep = 0; rep < 1000; ++rep) {
      const ModelPoint x = random_point(s, gen), y = random_point(s, gen);
      CAPTURE(static_cast<int>(s.kind));
      CAPTURE(s.radius);
      CAPTURE(distance(x, y));
      CHECK(std::abs(distance(x, y) - distance(y, x)) <= 1e-12 * (1.0 + distance(x, y)));
      const LogResult l = log_map(x, y);
      CHECK_FALSE(l.tie_break);
      CHECK(tangent_at(x, l.v));
      CHECK(std::abs(norm(s, l.v) - distance(x, y)) <= 1e-9);
      CHECK((exp_map(x, l.v).coords - y.coords).norm() <= 1e-9 * (1.0 + y.coords.norm()));
      const Tangent v = random_tangent(x, gen);
      const Tangent pv = parallel_transport(x, y, v);
      CHECK(tangent_at(y, pv));
      CHECK(std::abs(norm(s, pv) - norm(s, v)) <= 1e-10 * (1.0 + norm(s, v)));
    }
  }
}

TEST_CASE("antipodal log map takes the documented tie-break") {
  const ModelPoint x = sphere_point(1.0, 0.0, 0.0), y = sphere_point(1.0, pi, 0.0);
  const LogResult l = log_map(x, y);
  CHECK(l.tie_break);
  CHECK(norm(x.space, l.v) == doctest::Approx(pi));
  CHECK((exp_map(x, l.v).coords - y.coords).norm() <= 1e-9);
  CHECK(log_map(x, y).v == l.v);
}

TEST_CASE("reflection map") {
  std::mt19937_64 gen(4);
  for (const Space& s : {Space::euclidean(2), Space::sphere(1.0), Space::hyperbolic(1.0)}) {
    for (int rep = 0; rep < 100; ++rep) {
      const ModelPoint x = random_point(s, gen), y = random_point(s, gen);
      const Tangent u = log_map(x, y).v / distance(x, y);
      const Tangent uy = -log_map(y, x).v / distance(x, y);  // velocity at the far end
      const Tangent v = random_tangent(x, gen);
      const Tangent mv = reflection_map(x, y, v);
      CHECK(tangent_at(y, mv));
      CHECK(std::abs(norm(s, mv) - norm(s, v)) <= 1e-10 * (1.0 + norm(s, v)));
      CHECK(inner(s, reflection_map(x, y, u), uy) == doctest::Approx(-1.0).epsilon(1e-10));
      const Tangent perp = v - inner(s, v, u) * u;
      CHECK((reflection_map(x, y, perp) - parallel_transport(x, y, perp)).norm() <= 1e-10 * (1.0 + perp.norm()));
      // involution: reflecting back from y returns v
      CHECK((reflection_map(y, x, mv) - v).norm() <= 1e-9 * (1.0 + v.norm()));
    }
  }
  const ModelPoint x = sphere_point(1.0, 0.5, 0.5);
  CHECK_THROWS_AS(reflection_map(x, x, Tangent::Zero(3)), std::invalid_argument);
}

TEST_CASE("coupled walk: glued start and swap symmetry") {
  const ModelPoint x = sphere_point(1.0, 1.0, 0.2);
  const auto trace = coupled_walk_run(x, x, 0.05, 0.2, 9);
  for (const auto& p : trace) CHECK(p.distance == 0.0);
  CHECK(trace.back().t == doctest::Approx(0.2));

  std::mt19937_64 gen(12);
  for (const Space& s : {Space::euclidean(2), Space::sphere(1.0), Space::hyperbolic(1.0)}) {
    const ModelPoint x1 = random_point(s, gen), x2 = random_point(s, gen);
    CoupledWalk a(x1, x2, 0.05), b(x2, x1, 0.05);
    CounterRng rng(77);
    for (int k = 0; k < 200; ++k) {
      const Tangent v1 = a.increment(unit_ball_sample(2, rng));
      // b's first walker follows a's second one
      const Tangent w1 = a.state().coalesced ? v1 : reflection_map(a.state().x1, a.state().x2, v1);
      a.step_with(v1);
      b.step_with(w1);
      CHECK(std::abs(a.separation() - b.separation()) <= 1e-10);
    }
  }
}

TEST_CASE("coupled walk glues when the walkers pass through each other") {
  const ModelPoint p = make_point(Space::euclidean(2), Eigen::Vector2d(0.0, 0.0));
  const ModelPoint q = make_point(Space::euclidean(2), Eigen::Vector2d(0.01, 0.0));
  CoupledWalk swap(p, q, 0.02);
  swap.step_with(Eigen::Vector2d(0.02, 0.0));
  CHECK(swap.state().coalesced);
  CHECK(swap.separation() == 0.0);

  CoupledWalk miss(p, q, 0.02);
  miss.step_with(Eigen::Vector2d(0.004, 0.01));
  CHECK_FALSE(miss.state().coalesced);
  CHECK(miss.separation() == doctest::Approx(0.002));

  // on the sphere near a pole: a crossing step and a step along the separation
  const ModelPoint a = sphere_point(1.0, 0.5, 0.0), b = sphere_point(1.0, 0.51, 0.0);
  CoupledWalk cross(a, b, 0.02);
  cross.step_with(0.02 * log_map(a, b).v.normalized());
  CHECK(cross.state().coalesced);
  CoupledWalk apart(a, b, 0.02);
  apart.step_with(-0.02 * log_map(a, b).v.normalized());
  CHECK_FALSE(apart.state().coalesced);
  CHECK(apart.separation() == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("coupled walk: marginal is Gaussian with covariance 2t on the plane") {
  const ModelPoint x1 = make_point(Space::euclidean(2), Eigen::Vector2d(0.0, 0.0));
  const ModelPoint x2 = make_point(Space::euclidean(2), Eigen::Vector2d(1.0, 0.0));
  const double alpha = 0.02, t = 0.5;
  const int runs = 4000;
  std::vector<double> first, second;
  for (int i = 0; i < runs; ++i) {
    CoupledWalk w(x1, x2, alpha);
    CounterRng rng(derive_seed(5, i));
    for (int k = 0; k < static_cast<int>(std::lround(t / (alpha * alpha))); ++k) w.step(rng);
    first.push_back(w.state().x1.coords[1]);
    second.push_back(w.state().x2.coords[1]);
  }
  // 1.63 / sqrt(n) is the 1% critical value
  CHECK(ks_normal(first, 2.0 * t) <= 1.63 / std::sqrt(runs));
  CHECK(ks_normal(second, 2.0 * t) <= 1.63 / std::sqrt(runs));
}

TEST_CASE("unit ball sample") {
  CounterRng rng(3);
  double m2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = unit_ball_sample(3, rng);
    CHECK(xi.norm() < 1.0);
    m2 += xi.squaredNorm();
  }
  // E|xi|^2 = m / (m + 2) on the unit ball of R^m
  CHECK(m2 / n == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("sphere heat kernel") {
  CHECK_THROWS_AS(SphereHeatKernel(0.005), std::domain_error);
  const auto [x, w] = gauss_legendre(200);
  for (double t : {0.01, 0.1, 1.0}) {
    const SphereHeatKernel k(t);
    double mass = 0.0;
    for (int i = 0; i < 200; ++i) mass += 2.0 * pi * w[i] * k(x[i]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    // std::legendre oracle
    for (double c : {-0.9, 0.0, 0.4, 1.0}) {
      double ref = 0.0;
      for (unsigned l = 0; l < 200; ++l) ref += (2.0 * l + 1.0) / (4.0 * pi) * std::exp(-(l * (l + 1.0)) * t) * std::legendre(l, c);
      CHECK(std::abs(k(c) - ref) <= 1e-10);
    }
  }
  CHECK(sphere_heat_kernel(40.0, 0.3) == doctest::Approx(1.0 / (4.0 * pi)).epsilon(1e-12));
  CHECK(sphere_heat_kernel(40.0, -0.8) == doctest::Approx(1.0 / (4.0 * pi)).epsilon(1e-12));
}

TEST_CASE("sphere TV equals the comparison cost") {
  CHECK(tv_sphere_heat(0.5, 1e-4) < 1e-4);
  CHECK(tv_sphere_heat(20.0, 2.0) < 1e-6);
  const CurvatureDimension cd(1.0, 2.0);
  for (double t : {0.25, 1.0})
    for (double a : {pi / 4, pi / 2, pi}) CHECK(std::abs(tv_sphere_heat(t, a) - phi_series(cd, t, a).value) <= 2e-3);
  CHECK_THROWS(tv_sphere_heat(0.5, 0.0));
  CHECK_THROWS(tv_sphere_heat(0.001, 1.0));
}

TEST_CASE("sphere grid and heat flow") {
  CHECK_THROWS_AS(SphereGrid::make(12, 32), std::invalid_argument);
  const SphereGrid g = SphereGrid::make(16, 32);
  double area = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) area += g.area(k);
  CHECK(area == doctest::Approx(4.0 * pi).epsilon(1e-12));
  CHECK(g.colatitude[0] < g.colatitude[15]);

  const Eigen::Index cell = g.index(5, 7);
  const auto peak = sphere_heat_flow(DiscreteMeasure::dirac(g.size(), cell), g, 0.01);
  Eigen::Index arg = 0;
  peak.measure.weights.maxCoeff(&arg);
  CHECK(arg == cell);

  Eigen::VectorXd areas(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) areas[k] = g.area(k) / (4.0 * pi);
  const DiscreteMeasure uniform(areas / areas.sum());
  const auto still = sphere_heat_flow(uniform, g, 0.3);
  CHECK((still.measure.weights - uniform.weights).cwiseAbs().maxCoeff() <= 1e-8);

  const DiscreteMeasure d = DiscreteMeasure::dirac(g.size(), g.index(3, 0));
  const auto two = sphere_heat_flow(sphere_heat_flow(d, g, 0.2).measure, g, 0.3);
  const auto once = sphere_heat_flow(d, g, 0.5);
  CHECK(total_variation(two.measure, once.measure) <= 1e-6);
  CHECK(std::abs(once.renormalization - 1.0) <= 1e-6);
}
