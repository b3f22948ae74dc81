#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reflectcost/cost.hpp"
#include "reflectcost/spaceform.hpp"

namespace reflectcost {

struct Observation {
  std::string label;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  /// Wall-clock rows vary between runs and are kept out of result files.
  bool timing = false;
};

/// Outcome of a verification harness. An observation passes when value <= tolerance.
struct CheckReport {
  std::string name;
  bool pass = true;
  std::vector<Observation> observed;
  double runtime_seconds = 0.0;
  /// Plot-ready rows and free-form remarks; neither affects pass.
  std::vector<std::string> table_header;
  std::vector<std::vector<double>> table;
  std::vector<std::string> notes;

  void add(std::string label, double value, double tolerance);
  /// Records runtime_seconds and checks it against limit.
  void add_runtime(double seconds, double limit);
  /// Adds a failing row for a harness that aborted.
  void fail(std::string label);
};

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> x, std::vector<double> y);

inline constexpr std::uint64_t kCheckSeed = 0x5eedULL;

/// Survival MC against the closed form on N = inf branches.
struct ClosedVsMcOptions {
  std::vector<double> K = {0.0, -1.0, 2.0};
  std::vector<double> t = {0.25, 1.0};
  std::vector<double> a = {0.5, 1.0, 2.0};
  std::size_t n_paths = 100000;
  double dt = 1e-3;
  double runtime_limit = 60.0;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_closed_vs_mc(const ClosedVsMcOptions& o = {});

/// Series against survival MC and against the theta-sampler mixture, K = 1, N = 2.
struct SeriesVsMcOptions {
  std::vector<double> t = {0.25, 0.5, 1.0};
  std::vector<double> a = {0.5, 1.5707963267948966, 2.5};
  std::size_t n_paths = 100000;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_series_vs_mc(const SeriesVsMcOptions& o = {});

/// Identity-transform and geometric-BM mixtures for K < 0.
struct HyperbolicDualOptions {
  double K = -1.0;
  double N = 3.0;
  double t = 1.0;
  std::vector<double> a = {0.5, 1.0, 2.0};
  std::size_t n_paths = 100000;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_hyperbolic_dual(const HyperbolicDualOptions& o = {});

/// Total variation of sphere heat kernels against the K = 1, N = 2 cost.
struct TvCompareOptions {
  std::vector<double> t = {0.25, 0.5, 1.0};
  std::vector<double> a = {0.7853981633974483, 1.5707963267948966, 2.356194490192345};
  double tolerance = 2e-3;
  double runtime_limit = 120.0;
};
CheckReport check_tv_compare(const TvCompareOptions& o = {});

/// E[phi_{t-s}(rho(s)); tau_0 > s] along one ensemble against phi_t(a).
struct ConstancyOptions {
  double K = 0.0;
  double N = kInf;
  double a = 1.0;
  double t = 1.0;
  std::vector<double> s = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t n_paths = 100000;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_constancy(const ConstancyOptions& o = {});

/// Transport cost between heat flows of two Dirac masses as s runs over the grid.
enum class MonotonicityCost { phi, theta };
enum class MonotonicitySpace { sphere, plane };

struct MonotonicityOptions {
  MonotonicitySpace space = MonotonicitySpace::sphere;
  MonotonicityCost cost = MonotonicityCost::phi;
  /// Profile parameters; the sphere carries K = 1, N = 2.
  double K = 1.0;
  double N = 2.0;
  double t = 1.0;
  std::vector<double> s = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int n_colat = 24;
  int n_lon = 48;
  /// Plane: n_grid^2 nodes on [-half_width, half_width]^2, Gaussians of variance sigma0^2 + 2s at +-center.
  int n_grid = 40;
  double half_width = 6.5;
  double sigma0 = 0.5;
  double center = 1.0;
  double slack = 1e-4;
};
CheckReport check_monotonicity(const MonotonicityOptions& o = {});

/// Permutation and Kantorovich-Rubinstein oracles for the transport solver.
struct OtExactnessOptions {
  int n_instances = 200;
  int n_metric = 50;
  int max_size = 6;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_ot_exactness(const OtExactnessOptions& o = {});

/// Range, monotonicity in a and t, midpoint concavity and subadditivity for one (K, N).
struct CostPropertiesOptions {
  double K = -1.0;
  double N = 3.0;
  std::vector<double> t = {0.5, 1.0, 2.0};
  int n_grid = 50;
  /// Upper end of the a-grid when Rbar is infinite.
  double a_max = 6.0;
  std::size_t n_paths = 100000;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_cost_properties(const CostPropertiesOptions& o = {});

/// phi^{K,N} <= phi^{K',N'} and the same for phi'(0), over K >= K', N <= N'.
struct OrderingOptions {
  std::vector<double> K = {-1.0, 0.0, 1.0};
  std::vector<double> N = {2.0, 5.0, kInf};
  std::vector<double> t = {0.5, 1.0};
  int n_grid = 30;
  double a_max = 6.0;
  std::size_t n_paths = 100000;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_ordering(const OrderingOptions& o = {});

/// sqrt(t) phi'(0) -> 1/(4 sqrt(pi)) at small t and phi'(0) <= (pi eta)^{-1/2} / 4.
struct ShortTimeOptions {
  std::vector<double> K = {-1.0, 0.0, 1.0};
  std::vector<double> N = {2.0, 5.0, kInf};
  double t_small = 1e-3;
  double relative_tolerance = 0.05;
  std::vector<double> t_bound = {0.25, 1.0};
  std::size_t n_paths = 100000;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_short_time(const ShortTimeOptions& o = {});

/// KS distance between glued coupled-walk separations and rho absorbed at 0, at the horizon.
struct CoupledWalkOptions {
  SpaceKind space = SpaceKind::euclidean;
  double a = 1.0;
  double alpha = 0.02;
  double t = 0.5;
  std::size_t runs = 20000;
  double tolerance = 0.03;
  double runtime_limit = 600.0;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_coupled_walk(const CoupledWalkOptions& o = {});

/// sup |grad P_t f| <= phi_t'(0) osc(f) (1 + slack) for random zonal f on the unit sphere.
struct GradientOptions {
  std::vector<double> t = {0.25, 1.0};
  int n_functions = 20;
  int n_theta = 2001;
  double slack = 0.05;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_gradient(const GradientOptions& o = {});

/// Long-time scalings of phi.
struct AsymptoticsOptions {
  double t_flat = 100.0;
  double t_sphere = 5.0;
  double t_hyperbolic = 50.0;
  std::vector<double> a_flat = {0.5, 1.0, 2.0};
  std::vector<double> a_sphere = {0.5, 1.5707963267948966, 2.5};
  std::vector<double> a_hyperbolic = {0.5, 1.0, 2.0};
  double tol_flat = 0.02;
  double tol_sphere = 0.01;
  double tol_hyperbolic = 0.02;
  /// Euler step of the geometric-BM route at t_hyperbolic.
  double dt_hyperbolic = 1e-2;
  std::size_t n_paths = 100000;
  std::uint64_t seed = kCheckSeed;
};
CheckReport check_asymptotics(const AsymptoticsOptions& o = {});

}  // namespace reflectcost
