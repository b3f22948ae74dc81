#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "reflectcost/parallel.hpp"
#include "reflectcost/transport.hpp"

namespace reflectcost {

enum class SpaceKind { euclidean, sphere, hyperbolic };

/// R^m, the 2-sphere of radius r in R^3, or the hyperboloid of scale r in R^{2,1}.
struct Space {
  SpaceKind kind = SpaceKind::euclidean;
  int dim = 2;
  double radius = 1.0;

  static Space euclidean(int m) { return {SpaceKind::euclidean, m, 1.0}; }
  static Space sphere(double r = 1.0) { return {SpaceKind::sphere, 2, r}; }
  static Space hyperbolic(double r = 1.0) { return {SpaceKind::hyperbolic, 2, r}; }

  int ambient_dim() const { return kind == SpaceKind::euclidean ? dim : 3; }
  bool operator==(const Space&) const = default;
};

using Tangent = Eigen::VectorXd;

struct ModelPoint {
  Space space;
  Eigen::VectorXd coords;
};

/// Validates the embedding constraint within 1e-10 (relative to r^2).
ModelPoint make_point(const Space& space, Eigen::VectorXd coords);

/// Sphere point from colatitude and longitude.
ModelPoint sphere_point(double r, double colatitude, double longitude);

/// Hyperboloid point at geodesic distance rho from the base point (r, 0, 0), direction angle.
ModelPoint hyperbolic_point(double r, double rho, double angle);

/// Riemannian inner product of tangent vectors (Minkowski form on the hyperboloid).
double inner(const Space& space, const Tangent& v, const Tangent& w);
double norm(const Space& space, const Tangent& v);

double distance(const ModelPoint& x, const ModelPoint& y);
ModelPoint exp_map(const ModelPoint& x, const Tangent& v);

struct LogResult {
  Tangent v;
  /// Set when y is antipodal to x and the fixed basis direction was used.
  bool tie_break = false;
};

LogResult log_map(const ModelPoint& x, const ModelPoint& y);

/// Transport along the minimal geodesic from x to y.
Tangent parallel_transport(const ModelPoint& x, const ModelPoint& y, const Tangent& v);

/// Transport of v reflected in the hyperplane normal to the geodesic from x to y.
/// `direction` overrides the unit initial velocity (used at antipodal states).
Tangent reflection_map(const ModelPoint& x, const ModelPoint& y, const Tangent& v,
                       const std::optional<Tangent>& direction = std::nullopt);

/// Orthonormal tangent frame at x; columns are ambient vectors.
Eigen::MatrixXd tangent_frame(const ModelPoint& x);

struct CoupledWalkState {
  ModelPoint x1;
  ModelPoint x2;
  double alpha = 0.0;
  std::size_t step_index = 0;
  bool coalesced = false;
  /// Last unit velocity of the geodesic from x1 to x2, for antipodal states.
  std::optional<Tangent> last_direction;
};

/// Geodesic random walks coupled by reflection.
class CoupledWalk {
 public:
  CoupledWalk(const ModelPoint& x1, const ModelPoint& x2, double alpha);

  /// Moves X1 by exp(v1) and X2 by the reflected image of v1.
  void step_with(const Tangent& v1);
  /// Draws xi uniformly on the unit ball and steps by alpha sqrt(2(m+2)) Phi xi.
  void step(CounterRng& rng);

  const CoupledWalkState& state() const { return state_; }
  double time() const { return state_.alpha * state_.alpha * static_cast<double>(state_.step_index); }
  double separation() const;
  /// Tangent increment at X1 for a unit-ball draw xi.
  Tangent increment(const Eigen::VectorXd& xi) const;

 private:
  CoupledWalkState state_;
};

struct WalkTracePoint {
  double t = 0.0;
  double distance = 0.0;
};

/// Uniform draw on the unit ball of R^m.
Eigen::VectorXd unit_ball_sample(int m, CounterRng& rng);

std::vector<WalkTracePoint> coupled_walk_run(const ModelPoint& x1, const ModelPoint& x2, double alpha, double horizon,
                                             std::uint64_t seed);

/// Terminal separations of n independent coupled walks (run i seeded by derive_seed(seed, i)).
Eigen::VectorXd coupled_walk_distances(const ModelPoint& x1, const ModelPoint& x2, double alpha, double horizon,
                                       std::size_t n_runs, std::uint64_t seed);

/// Heat kernel of the Laplacian on the unit 2-sphere, as a function of the cosine of the angle.
class SphereHeatKernel {
 public:
  explicit SphereHeatKernel(double t);
  double operator()(double cos_angle) const;
  double t() const { return t_; }
  int degree() const { return static_cast<int>(coef_.size()) - 1; }

 private:
  double t_;
  std::vector<double> coef_;
};

double sphere_heat_kernel(double t, double cos_angle);

/// 1/2 int |p_t(x1, .) - p_t(x2, .)| for points at distance a on the unit sphere.
double tv_sphere_heat(double t, double a);

/// Gauss-Legendre colatitudes by uniform longitudes on the unit sphere.
struct SphereGrid {
  int n_colat = 0;
  int n_lon = 0;
  Eigen::VectorXd colatitude;  // north to south
  Eigen::VectorXd cell_area;   // per colatitude row; sums to 4 pi over the grid
  Eigen::Matrix3Xd points;     // index i * n_lon + j

  static SphereGrid make(int n_colat, int n_lon);
  Eigen::Index size() const { return points.cols(); }
  Eigen::Index index(int i, int j) const { return static_cast<Eigen::Index>(i) * n_lon + j; }
  double longitude(int j) const;
  double area(Eigen::Index k) const { return cell_area[k / n_lon]; }
};

struct HeatFlowResult {
  DiscreteMeasure measure;
  /// Total mass before renormalization.
  double renormalization = 1.0;
};

/// Pushes a grid measure through the heat semigroup by dense kernel application.
HeatFlowResult sphere_heat_flow(const DiscreteMeasure& mu, const SphereGrid& grid, double t);

/// Dense row-stochastic transition matrix of the grid heat flow (before renormalization).
Eigen::MatrixXd sphere_heat_matrix(const SphereGrid& grid, double t);

}  // namespace reflectcost
