#include "reflectcost/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "reflectcost/comparison.hpp"
#include "reflectcost/parallel.hpp"
#include "reflectcost/transport.hpp"

namespace reflectcost {

namespace {

using std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string cd_label(const CurvatureDimension& cd) { return "K=" + fmt(cd.K) + " N=" + fmt(cd.N); }

std::string point_label(const CurvatureDimension& cd, double t, double a) {
  return cd_label(cd) + " t=" + fmt(t) + " a=" + fmt(a);
}

SdeConfig literal_config(double t, double dt, std::size_t n, std::uint64_t seed) {
  SdeConfig cfg;
  cfg.horizon = t;
  cfg.dt = std::min(dt, t);
  cfg.n_paths = n;
  cfg.master_seed = seed;
  return cfg;
}

// a-grid on [0, Rbar] or [0, a_max].
std::vector<double> distance_grid(const CurvatureDimension& cd, int n, double a_max) {
  const double top = cd.bounded() ? cd.Rbar : a_max;
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) a[i] = top * i / (n - 1);
  return a;
}

struct Profile {
  std::vector<double> value;
  std::vector<double> err;
};

Profile evaluate(const PhiEvaluator& phi_t, const std::vector<double>& a) {
  Profile p{std::vector<double>(a.size()), std::vector<double>(a.size())};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const PhiResult r = phi_t(a[i]);
    p.value[i] = r.value;
    p.err[i] = r.error_bound;
  }
  return p;
}

SdeConfig mixture_config(double t, std::size_t n, std::uint64_t seed) {
  return SdeConfig::for_horizon(t, n, seed);
}

// Transport cost between the time-s flows of two grid measures.
struct FlowPair {
  DiscreteMeasure mu1;
  DiscreteMeasure mu2;
  double renormalization_error = 0.0;
};

}  // namespace

void CheckReport::add(std::string label, double value, double tolerance) {
  const bool ok = value <= tolerance;
  observed.push_back({std::move(label), value, tolerance, ok});
  pass = pass && ok;
}

void CheckReport::add_runtime(double seconds, double limit) {
  runtime_seconds = seconds;
  add("runtime seconds", seconds, limit);
  observed.back().timing = true;
}

void CheckReport::fail(std::string label) {
  observed.push_back({std::move(label), std::numeric_limits<double>::quiet_NaN(), 0.0, false});
  pass = false;
}

double ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(i / nx - j / ny));
  }
  return d;
}

CheckReport check_closed_vs_mc(const ClosedVsMcOptions& o) {
  CheckReport rep;
  rep.name = "closed-vs-mc";
  rep.table_header = {"K", "t", "a", "closed", "survival", "std_error"};
  const Stopwatch clock;
  for (double K : o.K) {
    const CurvatureDimension cd(K, kInf);
    for (double t : o.t) {
      const SdeConfig cfg = literal_config(t, o.dt, o.n_paths, o.seed);
      for (double a : o.a) {
        const double closed = phi_closed(K, t, a);
        const Estimate mc = survival_probability(cd, a, t, cfg);
        rep.add(point_label(cd, t, a) + " |survival - closed|", std::abs(mc.value - closed),
                3.0 * mc.std_error + 0.005);
        rep.table.push_back({K, t, a, closed, mc.value, mc.std_error});
      }
    }
  }
  rep.add_runtime(clock.seconds(), o.runtime_limit);
  return rep;
}

CheckReport check_series_vs_mc(const SeriesVsMcOptions& o) {
  CheckReport rep;
  rep.name = "series-vs-mc";
  rep.table_header = {"t", "a", "series", "survival", "survival_se", "mixture", "mixture_se"};
  const Stopwatch clock;
  const CurvatureDimension cd(1.0, 2.0);
  for (double t : o.t) {
    const SdeConfig cfg = mixture_config(t, o.n_paths, o.seed);
    const MixtureSamples ms = sample_zeta(cd, t, o.n_paths, cfg);
    for (double a : o.a) {
      const PhiResult s = phi_series(cd, t, a);
      const Estimate mc = survival_probability(cd, a, t, cfg);
      const PhiResult mix = phi_mixture(ms, a);
      rep.add(point_label(cd, t, a) + " |series - survival|", std::abs(s.value - mc.value),
              3.0 * mc.std_error + 0.005);
      rep.add(point_label(cd, t, a) + " |series - mixture|", std::abs(s.value - mix.value), 0.02);
      rep.table.push_back({t, a, s.value, mc.value, mc.std_error, mix.value, mix.error_bound});
    }
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_hyperbolic_dual(const HyperbolicDualOptions& o) {
  CheckReport rep;
  rep.name = "hyperbolic-dual";
  rep.table_header = {"a", "identity", "identity_se", "geometric", "geometric_se"};
  const Stopwatch clock;
  const CurvatureDimension cd(o.K, o.N);
  const SdeConfig cfg = mixture_config(o.t, o.n_paths, o.seed);
  const MixtureSamples id = sample_zeta(cd, o.t, o.n_paths, cfg);
  const MixtureSamples geo = sample_zeta_hyperbolic(o.K, o.N, o.t, o.n_paths, cfg);
  for (double a : o.a) {
    const PhiResult x = phi_mixture(id, a), y = phi_mixture(geo, a);
    rep.add(point_label(cd, o.t, a) + " |identity - geometric|", std::abs(x.value - y.value), 0.02);
    rep.table.push_back({a, x.value, x.error_bound, y.value, y.error_bound});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_tv_compare(const TvCompareOptions& o) {
  CheckReport rep;
  rep.name = "tv-compare";
  rep.table_header = {"t", "a", "tv", "series"};
  const Stopwatch clock;
  const CurvatureDimension cd(1.0, 2.0);
  for (double t : o.t) {
    for (double a : o.a) {
      const double tv = tv_sphere_heat(t, a);
      const double s = phi_series(cd, t, a).value;
      rep.add("t=" + fmt(t) + " a=" + fmt(a) + " |tv - phi|", std::abs(tv - s), o.tolerance);
      rep.table.push_back({t, a, tv, s});
    }
  }
  rep.add_runtime(clock.seconds(), o.runtime_limit);
  return rep;
}

CheckReport check_constancy(const ConstancyOptions& o) {
  CheckReport rep;
  rep.name = "constancy";
  rep.table_header = {"s", "estimate", "std_error", "phi"};
  const Stopwatch clock;
  const CurvatureDimension cd(o.K, o.N);
  const double target = phi(CostQuery{cd, o.t, o.a}).value;
  const auto pts = constancy_statistic(cd, o.a, o.t, o.s, mixture_config(o.t, o.n_paths, o.seed));
  for (const auto& p : pts) {
    rep.add(point_label(cd, o.t, o.a) + " s=" + fmt(p.s) + " |estimate - phi|", std::abs(p.estimate - target),
            3.0 * p.std_error);
    rep.table.push_back({p.s, p.estimate, p.std_error, target});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_monotonicity(const MonotonicityOptions& o) {
  CheckReport rep;
  const bool sphere = o.space == MonotonicitySpace::sphere;
  const bool theta = o.cost == MonotonicityCost::theta;
  rep.name = "monotonicity";
  rep.table_header = {"s", "cost", "scaled_cost"};
  const Stopwatch clock;
  for (std::size_t k = 0; k < o.s.size(); ++k) {
    if (o.s[k] < 0.0 || o.s[k] > o.t * (1.0 + 1e-12)) throw std::invalid_argument("monotonicity: s outside [0, t]");
    if (k > 0 && o.s[k] <= o.s[k - 1]) throw std::invalid_argument("monotonicity: s-grid not increasing");
  }
  const CurvatureDimension cd = sphere ? CurvatureDimension(1.0, 2.0) : CurvatureDimension(o.K, o.N);
  const double rate = theta ? kappa(cd) : 0.0;

  // node coordinates and pairwise distances
  Eigen::MatrixXd dist;
  Eigen::Index src1 = 0, src2 = 0;
  SphereGrid grid;
  Eigen::MatrixXd plane;
  if (sphere) {
    grid = SphereGrid::make(o.n_colat, o.n_lon);
    int row = 0;
    for (int i = 1; i < o.n_colat; ++i)
      if (std::abs(grid.colatitude[i] - pi / 2) < std::abs(grid.colatitude[row] - pi / 2)) row = i;
    src1 = grid.index(row, 0);
    src2 = grid.index(row, o.n_lon / 4);
    const Eigen::MatrixXd cosines = grid.points.transpose() * grid.points;
    dist = cosines.unaryExpr([](double c) { return std::acos(std::clamp(c, -1.0, 1.0)); });
    dist.diagonal().setZero();
    rep.notes.push_back("grid Diracs at distance " + fmt(dist(src1, src2)));
  } else {
    if (o.n_grid < 2) throw std::invalid_argument("monotonicity: plane grid too small");
    const int n = o.n_grid;
    const double h = 2.0 * o.half_width / (n - 1);
    plane.resize(n * n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) plane.row(i * n + j) << -o.half_width + i * h, -o.half_width + j * h;
    dist.resize(n * n, n * n);
    for (Eigen::Index p = 0; p < dist.rows(); ++p)
      for (Eigen::Index q = 0; q < dist.cols(); ++q) dist(p, q) = (plane.row(p) - plane.row(q)).norm();
  }

  // Theta depends on s only through the prefactor, so its matrix is built once.
  Eigen::MatrixXd theta_cost;
  if (theta) {
    if (sphere) {
      theta_cost = dist.unaryExpr([&](double d) { return theta_limit(cd, std::min(d, cd.Rbar)); });
    } else {
      // distances on the lattice depend on (|di|, |dj|) only
      const int n = o.n_grid;
      const double h = 2.0 * o.half_width / (n - 1);
      Eigen::MatrixXd table(n, n);
      for (int di = 0; di < n; ++di)
        for (int dj = 0; dj < n; ++dj) table(di, dj) = theta_limit(cd, h * std::hypot(di, dj));
      theta_cost.resize(n * n, n * n);
      for (int p = 0; p < n * n; ++p)
        for (int q = 0; q < n * n; ++q) theta_cost(p, q) = table(std::abs(p / n - q / n), std::abs(p % n - q % n));
    }
  }

  auto flows = [&](double s) {
    FlowPair fp;
    if (sphere) {
      const auto d1 = DiscreteMeasure::dirac(grid.size(), src1), d2 = DiscreteMeasure::dirac(grid.size(), src2);
      if (s == 0.0) {
        fp.mu1 = d1;
        fp.mu2 = d2;
        return fp;
      }
      const HeatFlowResult f1 = sphere_heat_flow(d1, grid, s), f2 = sphere_heat_flow(d2, grid, s);
      fp.mu1 = f1.measure;
      fp.mu2 = f2.measure;
      fp.renormalization_error = std::max(std::abs(f1.renormalization - 1.0), std::abs(f2.renormalization - 1.0));
      return fp;
    }
    const double var = o.sigma0 * o.sigma0 + 2.0 * s;
    auto gaussian = [&](double cx) {
      Eigen::VectorXd w(plane.rows());
      for (Eigen::Index p = 0; p < w.size(); ++p) {
        const double dx = plane(p, 0) - cx, dy = plane(p, 1);
        w[p] = std::exp(-(dx * dx + dy * dy) / (2.0 * var));
      }
      return DiscreteMeasure(w / w.sum(), 1e-10);
    };
    fp.mu1 = gaussian(-o.center);
    fp.mu2 = gaussian(o.center);
    return fp;
  };

  std::vector<double> scaled;
  double renorm = 0.0;
  for (double s : o.s) {
    const FlowPair fp = flows(s);
    renorm = std::max(renorm, fp.renormalization_error);
    Eigen::MatrixXd c;
    if (theta) {
      c = theta_cost;
    } else {
      const PhiEvaluator phi_rest(cd, std::max(0.0, o.t - s));
      c = dist.unaryExpr([&](double d) { return phi_rest(d).value; });
    }
    const double value = transport_cost(CostMatrix(std::move(c)), fp.mu1, fp.mu2).value;
    scaled.push_back(std::exp(rate * s) * value);
    rep.table.push_back({s, value, scaled.back()});
  }
  double worst = -kInf;
  for (std::size_t k = 1; k < scaled.size(); ++k) worst = std::max(worst, scaled[k] - scaled[k - 1]);
  const std::string what = theta ? "exp(kappa s) T_Theta" : "T_phi_{t-s}";
  const std::string where = sphere ? "sphere" : "plane";
  if (scaled.size() > 1) rep.add(where + " " + cd_label(cd) + " max increase of " + what, worst, o.slack);
  if (sphere) rep.add(where + " max |renormalization - 1|", renorm, 1e-6);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_ot_exactness(const OtExactnessOptions& o) {
  CheckReport rep;
  rep.name = "ot-exactness";
  const Stopwatch clock;
  CounterRng rng(o.seed);
  double worst_bf = 0.0, worst_kr = 0.0;
  for (int r = 0; r < o.n_instances; ++r) {
    const int n = 1 + r % o.max_size;
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) = rng.uniform();
    const CostMatrix C(c);
    const double v = transport_cost(C, DiscreteMeasure::uniform(n), DiscreteMeasure::uniform(n)).value;
    worst_bf = std::max(worst_bf, std::abs(v - brute_force_uniform(C)));
  }
  for (int r = 0; r < o.n_metric; ++r) {
    const int n = 2 + r % (o.max_size - 1);
    Eigen::MatrixXd p(n, 2);
    for (int i = 0; i < n; ++i) p.row(i) << rng.normal(), rng.normal();
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = (p.row(i) - p.row(j)).norm();
    auto simplex = [&] {
      Eigen::VectorXd w(n);
      for (int i = 0; i < n; ++i) w[i] = -std::log1p(-rng.uniform());
      return DiscreteMeasure(w / w.sum(), 1e-10);
    };
    const DiscreteMeasure mu = simplex(), nu = simplex();
    const CostMatrix C = CostMatrix::metric(d);
    worst_kr = std::max(worst_kr, std::abs(kr_dual_value(C, mu, nu) - transport_cost(C, mu, nu).value));
  }
  rep.add(std::to_string(o.n_instances) + " uniform instances max |transport - permutation|", worst_bf, 1e-9);
  rep.add(std::to_string(o.n_metric) + " metric instances max |dual - primal|", worst_kr, 1e-8);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_cost_properties(const CostPropertiesOptions& o) {
  CheckReport rep;
  rep.name = "cost-properties";
  rep.table_header = {"t", "a", "value", "error_bound"};
  const Stopwatch clock;
  if (o.n_grid < 3) throw std::invalid_argument("cost-properties: grid too small");
  const CurvatureDimension cd(o.K, o.N);
  const std::vector<double> a = distance_grid(cd, o.n_grid, o.a_max);
  const std::size_t n = a.size();
  std::vector<double> t = o.t;
  std::sort(t.begin(), t.end());

  double range = 0.0, mono_a = -kInf, mono_t = -kInf, concave = -kInf, subadd = -kInf;
  Profile prev;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Profile p = evaluate(PhiEvaluator(cd, t[k], kDefaultTol, mixture_config(t[k], o.n_paths, o.seed)), a);
    for (std::size_t i = 0; i < n; ++i) {
      rep.table.push_back({t[k], a[i], p.value[i], p.err[i]});
      range = std::max({range, -p.value[i], p.value[i] - 1.0});
    }
    // Each entry is the violation minus the allowance from the method error bounds.
    for (std::size_t i = 1; i < n; ++i)
      mono_a = std::max(mono_a, p.value[i - 1] - p.value[i] - 2.0 * std::max(p.err[i], p.err[i - 1]));
    for (std::size_t i = 1; i + 1 < n; ++i)
      for (std::size_t h = 1; h <= std::min(i, n - 1 - i); ++h) {
        const double chord = 0.5 * (p.value[i - h] + p.value[i + h]);
        concave = std::max(concave, chord - p.value[i] - 2.0 * std::max({p.err[i], p.err[i - h], p.err[i + h]}));
      }
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = i; i + j < n; ++j)
        subadd = std::max(subadd, p.value[i + j] - p.value[i] - p.value[j] -
                                      2.0 * std::max({p.err[i + j], p.err[i], p.err[j]}));
    if (k > 0)
      for (std::size_t i = 0; i < n; ++i)
        mono_t = std::max(mono_t, p.value[i] - prev.value[i] - 3.0 * std::hypot(p.err[i], prev.err[i]));
    prev = p;
  }
  const std::string tag = cd_label(cd) + " ";
  const double roundoff = 1e-12;
  rep.add(tag + "range: distance outside [0, 1]", range, roundoff);
  rep.add(tag + "monotone in a: violation beyond error bound", mono_a, roundoff);
  if (t.size() > 1) rep.add(tag + "nonincreasing in t: violation beyond error bound", mono_t, roundoff);
  rep.add(tag + "midpoint concavity: violation beyond error bound", concave, roundoff);
  rep.add(tag + "subadditivity: violation beyond error bound", subadd, roundoff);
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_ordering(const OrderingOptions& o) {
  CheckReport rep;
  rep.name = "ordering";
  const Stopwatch clock;
  struct Entry {
    CurvatureDimension cd;
    double t;
    Profile p;
    Estimate slope;
  };
  std::vector<Entry> entries;
  double top = o.a_max;
  for (double K : o.K)
    for (double N : o.N) top = std::min(top, CurvatureDimension(K, N).Rbar);
  std::vector<double> a(o.n_grid);
  for (int i = 0; i < o.n_grid; ++i) a[i] = top * i / (o.n_grid - 1);
  for (double t : o.t)
    for (double K : o.K)
      for (double N : o.N) {
        const CurvatureDimension cd(K, N);
        const SdeConfig mc = mixture_config(t, o.n_paths, o.seed);
        entries.push_back({cd, t, evaluate(PhiEvaluator(cd, t, kDefaultTol, mc), a), phi_prime_zero(cd, t, mc)});
      }
  double worst = -kInf, worst_slope = -kInf;
  for (const Entry& lo : entries)
    for (const Entry& hi : entries) {
      if (lo.t != hi.t || &lo == &hi || !(lo.cd.K >= hi.cd.K && lo.cd.N <= hi.cd.N)) continue;
      for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, lo.p.value[i] - hi.p.value[i] - 3.0 * std::hypot(lo.p.err[i], hi.p.err[i]));
      worst_slope = std::max(worst_slope, lo.slope.value - hi.slope.value -
                                              3.0 * std::hypot(lo.slope.std_error, hi.slope.std_error));
    }
  rep.add("phi^{K,N} <= phi^{K',N'}: violation beyond error bound", worst, 1e-12);
  rep.add("phi'(0) ordering: violation beyond error bound", worst_slope, 1e-12);
  rep.table_header = {"K", "N", "t", "phi_prime_zero", "std_error"};
  for (const Entry& e : entries) rep.table.push_back({e.cd.K, e.cd.N, e.t, e.slope.value, e.slope.std_error});
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_short_time(const ShortTimeOptions& o) {
  CheckReport rep;
  rep.name = "short-time";
  rep.table_header = {"K", "N", "t", "phi_prime_zero", "std_error", "sqrt_t_scaled"};
  const Stopwatch clock;
  const double limit = 1.0 / (4.0 * std::sqrt(pi));
  for (double K : o.K)
    for (double N : o.N) {
      const CurvatureDimension cd(K, N);
      const double t = o.t_small;
      const Estimate d = phi_prime_zero(cd, t, mixture_config(t, o.n_paths, o.seed));
      const double scaled = std::sqrt(t) * d.value;
      rep.add(cd_label(cd) + " t=" + fmt(t) + " |sqrt(t) phi'(0) / (1/(4 sqrt(pi))) - 1|",
              std::abs(scaled / limit - 1.0), o.relative_tolerance);
      rep.table.push_back({K, N, t, d.value, d.std_error, scaled});
      for (double tb : o.t_bound) {
        const Estimate e = phi_prime_zero(cd, tb, mixture_config(tb, o.n_paths, o.seed));
        const double bound = 0.25 / std::sqrt(pi * eta(K, tb));
        rep.add(cd_label(cd) + " t=" + fmt(tb) + " phi'(0) / ((pi eta)^{-1/2} / 4 + 3 SE) - 1",
                e.value / (bound + 3.0 * e.std_error) - 1.0, 0.0);
        rep.table.push_back({K, N, tb, e.value, e.std_error, std::sqrt(tb) * e.value});
      }
    }
  rep.notes.push_back("with the constant 1/(2 sqrt(pi)) the small-t ratio is " +
                      fmt(rep.table.front()[5] * 2.0 * std::sqrt(pi)));
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_coupled_walk(const CoupledWalkOptions& o) {
  CheckReport rep;
  rep.name = "coupled-walk";
  const Stopwatch clock;
  ModelPoint x1, x2;
  CurvatureDimension cd;
  switch (o.space) {
    case SpaceKind::euclidean: {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(2), q = Eigen::VectorXd::Zero(2);
      q[0] = o.a;
      x1 = make_point(Space::euclidean(2), p);
      x2 = make_point(Space::euclidean(2), q);
      cd = CurvatureDimension(0.0, kInf);
      break;
    }
    case SpaceKind::sphere:
      x1 = sphere_point(1.0, pi / 2 - o.a / 2, 0.0);
      x2 = sphere_point(1.0, pi / 2 + o.a / 2, 0.0);
      cd = CurvatureDimension(1.0, 2.0);
      break;
    case SpaceKind::hyperbolic:
      x1 = hyperbolic_point(1.0, 0.0, 0.0);
      x2 = hyperbolic_point(1.0, o.a, 0.0);
      cd = CurvatureDimension(-1.0, 2.0);
      break;
  }
  const Eigen::VectorXd walk = coupled_walk_distances(x1, x2, o.alpha, o.t, o.runs, o.seed);
  // glued walk against rho absorbed at 0
  const SdeConfig cfg = literal_config(o.t, 1e-3, o.runs, derive_seed(o.seed, 0xd15ULL));
  const Eigen::VectorXd rho = simulate_rho_terminal(cd, distance(x1, x2), cfg);
  const double ks = ks_two_sample({walk.begin(), walk.end()}, {rho.begin(), rho.end()});
  const std::string where = o.space == SpaceKind::euclidean ? "plane" : o.space == SpaceKind::sphere ? "sphere"
                                                                                                    : "hyperbolic";
  rep.add(where + " a=" + fmt(o.a) + " KS(walk distance, rho)", ks, o.tolerance);
  rep.add_runtime(clock.seconds(), o.runtime_limit);
  return rep;
}

CheckReport check_gradient(const GradientOptions& o) {
  CheckReport rep;
  rep.name = "gradient";
  rep.table_header = {"t", "function", "max_gradient", "osc", "ratio"};
  const Stopwatch clock;
  constexpr int L = 60;
  const int m = o.n_theta;
  if (m < 3) throw std::invalid_argument("gradient: theta grid too small");

  // P_l and P_l' on the theta grid, l = 0..L+1
  Eigen::MatrixXd P(L + 2, m), dP(L + 2, m);
  Eigen::VectorXd theta(m);
  for (int k = 0; k < m; ++k) {
    theta[k] = pi * k / (m - 1);
    const double x = std::cos(theta[k]);
    P(0, k) = 1.0;
    P(1, k) = x;
    dP(0, k) = 0.0;
    dP(1, k) = 1.0;
    for (int l = 1; l <= L; ++l) {
      P(l + 1, k) = ((2 * l + 1) * x * P(l, k) - l * P(l - 1, k)) / (l + 1);
      dP(l + 1, k) = dP(l - 1, k) + (2 * l + 1) * P(l, k);
    }
  }
  // Legendre values at arbitrary x for the exact projections.
  auto legendre_row = [](double x) {
    std::vector<double> p(L + 2);
    p[0] = 1.0;
    p[1] = x;
    for (int l = 1; l <= L; ++l) p[l + 1] = ((2 * l + 1) * x * p[l] - l * p[l - 1]) / (l + 1);
    return p;
  };
  // integral of P_l over [x0, x1]
  auto integral = [&](double x0, double x1, int l) {
    if (l == 0) return x1 - x0;
    const auto p1 = legendre_row(x1), p0 = legendre_row(x0);
    return ((p1[l + 1] - p1[l - 1]) - (p0[l + 1] - p0[l - 1])) / (2.0 * l + 1.0);
  };

  struct Step {
    std::vector<double> cuts;    // increasing in theta, cuts.front() = 0, cuts.back() = pi
    std::vector<double> values;  // one per piece
  };
  CounterRng rng(o.seed);
  std::vector<Step> fs;
  for (int f = 0; f < o.n_functions; ++f) {
    Step s;
    const int pieces = 2 + static_cast<int>(rng.uniform() * 5.0);
    s.cuts.push_back(0.0);
    for (int j = 1; j < pieces; ++j) s.cuts.push_back(pi * rng.uniform());
    s.cuts.push_back(pi);
    std::sort(s.cuts.begin(), s.cuts.end());
    for (int j = 0; j < pieces; ++j) s.values.push_back(rng.uniform());
    fs.push_back(std::move(s));
  }
  // the indicator of a hemisphere attains the bound
  fs.push_back({{0.0, pi / 2, pi}, {1.0, 0.0}});

  const CurvatureDimension cd(1.0, 2.0);
  for (double t : o.t) {
    const double slope = phi_prime_zero(cd, t).value;
    double worst = 0.0;
    for (std::size_t f = 0; f < fs.size(); ++f) {
      const Step& s = fs[f];
      Eigen::VectorXd coef(L + 2);
      for (int l = 0; l <= L + 1; ++l) {
        double acc = 0.0;
        for (std::size_t j = 0; j < s.values.size(); ++j)
          acc += s.values[j] * integral(std::cos(s.cuts[j + 1]), std::cos(s.cuts[j]), l);
        coef[l] = 0.5 * (2.0 * l + 1.0) * acc * std::exp(-l * (l + 1.0) * t);
      }
      const Eigen::VectorXd deriv = dP.transpose() * coef;
      double grad = 0.0, lo = kInf, hi = -kInf;
      for (int k = 0; k < m; ++k) {
        grad = std::max(grad, std::abs(deriv[k]) * std::sin(theta[k]));
        const auto piece = std::upper_bound(s.cuts.begin() + 1, s.cuts.end() - 1, theta[k]) - s.cuts.begin() - 1;
        lo = std::min(lo, s.values[piece]);
        hi = std::max(hi, s.values[piece]);
      }
      const double osc = hi - lo;
      const double ratio = osc > 0.0 ? grad / (slope * osc) : 0.0;
      rep.table.push_back({t, static_cast<double>(f), grad, osc, ratio});
      if (f + 1 == fs.size()) {
        rep.notes.push_back("t=" + fmt(t) + " hemisphere indicator ratio " + fmt(ratio));
      } else {
        worst = std::max(worst, ratio);
      }
    }
    rep.add("t=" + fmt(t) + " max grad P_t f / (phi'(0) osc f)", worst, 1.0 + o.slack);
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

CheckReport check_asymptotics(const AsymptoticsOptions& o) {
  CheckReport rep;
  rep.name = "asymptotics";
  rep.table_header = {"K", "N", "t", "a", "scaled", "limit"};
  const Stopwatch clock;

  const CurvatureDimension flat(0.0, kInf);
  for (double a : o.a_flat) {
    const double scaled = std::sqrt(o.t_flat) * phi_closed(0.0, o.t_flat, a);
    const double limit = a / (4.0 * std::sqrt(pi));
    rep.add(point_label(flat, o.t_flat, a) + " |sqrt(t) phi / (a/(4 sqrt(pi))) - 1|", std::abs(scaled / limit - 1.0),
            o.tol_flat);
    rep.table.push_back({0.0, kInf, o.t_flat, a, scaled, limit});
  }
  rep.notes.push_back("sqrt(t) phi at K=0, t=" + fmt(o.t_flat) + " over a/(2 sqrt(pi)): " +
                      fmt(rep.table.back()[4] / (o.a_flat.back() / (2.0 * std::sqrt(pi)))));

  const CurvatureDimension round(1.0, 2.0);
  const PhiEvaluator sphere_phi(round, o.t_sphere);
  const double growth = std::exp(round.N * round.K * o.t_sphere / (round.N - 1.0));
  for (double a : o.a_sphere) {
    const double scaled = growth * sphere_phi(a).value;
    const double limit = 1.5 * std::sin(0.5 * a);
    rep.add(point_label(round, o.t_sphere, a) + " |exp(NKt/(N-1)) phi / limit - 1|", std::abs(scaled / limit - 1.0),
            o.tol_sphere);
    rep.table.push_back({round.K, round.N, o.t_sphere, a, scaled, limit});
  }

  const CurvatureDimension hyp(-1.0, 3.0);
  const PhiEvaluator hyp_phi(hyp, o.t_hyperbolic, kDefaultTol,
                             literal_config(o.t_hyperbolic, o.dt_hyperbolic, o.n_paths, o.seed));
  for (double a : o.a_hyperbolic) {
    const PhiResult r = hyp_phi(a);
    const double limit = theta_limit(hyp, a);
    rep.add(point_label(hyp, o.t_hyperbolic, a) + " |phi - Theta|", std::abs(r.value - limit), o.tol_hyperbolic);
    rep.table.push_back({hyp.K, hyp.N, o.t_hyperbolic, a, r.value, limit});
  }
  rep.runtime_seconds = clock.seconds();
  return rep;
}

}  // namespace reflectcost
