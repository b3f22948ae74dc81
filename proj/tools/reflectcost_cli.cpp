// reflectcost: evaluate the comparison cost, run the simulators, solve
// transport instances and run the verification harnesses.
//
// Exit codes: 0 success or check passed, 1 check failed, 2 usage, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reflectcost/checks.hpp"
#include "reflectcost/comparison.hpp"
#include "reflectcost/cost.hpp"
#include "reflectcost/io.hpp"
#include "reflectcost/spaceform.hpp"
#include "reflectcost/transport.hpp"

using namespace reflectcost;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  return std::get<std::string>(c);
}

struct Output {
  std::string format = "csv";
  std::string path;

  void write(const Table& t) const {
    std::ostringstream os;
    if (format == "json") {
      json j;
      j["meta"] = json::object();
      for (const auto& [k, v] : t.meta) j["meta"][k] = v;
      j["header"] = t.header;
      j["rows"] = json::array();
      for (const auto& r : t.rows) {
        json row = json::object();
        for (std::size_t i = 0; i < r.size(); ++i) row[t.header[i]] = cell_json(r[i]);
        j["rows"].push_back(row);
      }
      os << j.dump(2) << '\n';
    } else {
      os << "# reflectcost";
      for (const auto& [k, v] : t.meta) os << ' ' << k << '=' << v;
      os << '\n';
      for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
      os << '\n';
      for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
        os << '\n';
      }
    }
    if (path.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw schema_error("cannot write " + path);
      f << os.str();
    }
  }
};

Table base_table(const std::string& command, std::uint64_t seed) {
  Table t;
  t.meta = {{"version", kVersion},
            {"command", command},
            {"seed", std::to_string(seed)},
            {"tol", format_double(kDefaultTol)},
            {"series_threshold", format_double(kSeriesThreshold)}};
  return t;
}

std::vector<double> grid_or_value(const std::string& grid, const std::string& value, const char* name) {
  if (!grid.empty()) return parse_grid(grid);
  if (!value.empty()) return {parse_extended(value)};
  throw schema_error(std::string("missing --") + name + " or --" + name + "-grid");
}

CurvatureDimension make_cd(double K, const std::string& N) {
  const double n = parse_extended(N);
  if (!std::isfinite(K)) throw schema_error("--K must be finite");
  return CurvatureDimension(K, n);
}

// ---- phi --------------------------------------------------------------------

struct PhiArgs {
  double K = 0.0;
  std::string N = "inf";
  std::string t, t_grid, a, a_grid;
  std::string method = "auto";
  double tol = kDefaultTol;
  std::size_t paths = 100000;
};

int cmd_phi(const PhiArgs& p, std::uint64_t seed, const Output& out) {
  const CurvatureDimension cd = make_cd(p.K, p.N);
  const auto ts = grid_or_value(p.t_grid, p.t, "t");
  const auto as = grid_or_value(p.a_grid, p.a, "a");
  for (double t : ts)
    if (!(t >= 0.0)) throw schema_error("t must be nonnegative");
  for (double a : as)
    if (!(a >= 0.0) || (cd.bounded() && a > cd.Rbar * (1.0 + 1e-12)))
      throw schema_error("a outside [0, Rbar] = [0, " + format_double(cd.Rbar) + "]");

  Table tab = base_table("phi", seed);
  tab.meta.push_back({"K", format_double(cd.K)});
  tab.meta.push_back({"N", format_double(cd.N)});
  tab.header = {"t", "a", "value", "method", "error_bound"};
  for (double t : ts) {
    const SdeConfig mc = SdeConfig::for_horizon(t > 0.0 ? t : 1.0, p.paths, seed);
    auto emit = [&](double a, const PhiResult& r) {
      tab.rows.push_back({t, a, r.value, method_name(r.method), r.error_bound});
    };
    if (p.method == "auto") {
      const PhiEvaluator eval(cd, t, p.tol, mc);
      for (double a : as) emit(a, eval(a));
    } else if (p.method == "closed") {
      if (cd.finite_dimension() && cd.K != 0.0) throw schema_error("closed form requires K = 0 or N = inf");
      for (double a : as) emit(a, {phi_closed(cd.K, t, a), PhiMethod::closed, 0.0});
    } else if (p.method == "series") {
      const SeriesTable table = make_series_table(cd, t, p.tol);
      for (double a : as) emit(a, eval_series(table, a));
    } else if (p.method == "mixture") {
      if (!cd.finite_dimension()) throw schema_error("mixture requires N finite");
      const MixtureSamples ms =
          cd.K < 0.0 ? sample_zeta_hyperbolic(cd.K, cd.N, t, p.paths, mc) : sample_zeta(cd, t, p.paths, mc);
      for (double a : as) emit(a, phi_mixture(ms, a));
    } else if (p.method == "survival") {
      for (double a : as) {
        const Estimate e = survival_probability(cd, a, t, mc);
        emit(a, {e.value, PhiMethod::survival_mc, e.std_error});
      }
    } else {
      throw schema_error("unknown method " + p.method);
    }
  }
  out.write(tab);
  return kOk;
}

// ---- rho-simulate -----------------------------------------------------------

struct RhoArgs {
  double K = 0.0;
  std::string N = "inf";
  double a = 1.0;
  double t = 1.0;
  double dt = 0.0;
  std::size_t paths = 1000;
  bool no_absorb = false;
  int keep = 0;
  int every = 10;
};

int cmd_rho(const RhoArgs& p, std::uint64_t seed, const Output& out) {
  const CurvatureDimension cd = make_cd(p.K, p.N);
  SdeConfig cfg = SdeConfig::for_horizon(p.t, p.paths, seed);
  if (p.dt > 0.0) cfg.dt = p.dt;
  cfg.absorb_at_zero = !p.no_absorb;
  cfg.validate(cd);
  Table tab = base_table("rho-simulate", seed);
  tab.meta.push_back({"K", format_double(cd.K)});
  tab.meta.push_back({"N", format_double(cd.N)});
  tab.meta.push_back({"a", format_double(p.a)});
  tab.meta.push_back({"dt", format_double(cfg.step())});
  if (p.keep > 0) {
    // thinned path table for plotting
    SdeConfig small = cfg;
    small.n_paths = std::min<std::size_t>(cfg.n_paths, static_cast<std::size_t>(p.keep));
    const PathEnsemble e = simulate_rho(cd, p.a, small);
    tab.header = {"path", "time", "rho"};
    for (Eigen::Index i = 0; i < e.values.rows(); ++i)
      for (Eigen::Index k = 0; k < e.times.size(); k += std::max(1, p.every))
        tab.rows.push_back({static_cast<double>(i), e.times[k], e.values(i, k)});
  } else {
    const Eigen::VectorXd x = simulate_rho_terminal(cd, p.a, cfg);
    if (cfg.absorb_at_zero) {
      const Estimate s = survival_probability(cd, p.a, p.t, cfg);
      tab.meta.push_back({"survival", format_double(s.value)});
      tab.meta.push_back({"survival_se", format_double(s.std_error)});
    }
    tab.header = {"path", "rho_t"};
    for (Eigen::Index i = 0; i < x.size(); ++i) tab.rows.push_back({static_cast<double>(i), x[i]});
  }
  out.write(tab);
  return kOk;
}

// ---- coupling-simulate ------------------------------------------------------

struct CouplingArgs {
  std::string space = "euclidean";
  double a = 1.0;
  double alpha = 0.02;
  double t = 0.5;
  std::size_t runs = 1;
};

int cmd_coupling(const CouplingArgs& p, std::uint64_t seed, const Output& out) {
  if (!(p.a >= 0.0)) throw schema_error("a must be nonnegative");
  if (!(p.t > 0.0)) throw schema_error("t must be positive");
  ModelPoint x1, x2;
  if (p.space == "euclidean") {
    x1 = make_point(Space::euclidean(2), Eigen::Vector2d(0.0, 0.0));
    x2 = make_point(Space::euclidean(2), Eigen::Vector2d(p.a, 0.0));
  } else if (p.space == "sphere") {
    if (p.a > std::numbers::pi) throw schema_error("a beyond pi on the unit sphere");
    x1 = sphere_point(1.0, 0.5 * (std::numbers::pi - p.a), 0.0);
    x2 = sphere_point(1.0, 0.5 * (std::numbers::pi + p.a), 0.0);
  } else if (p.space == "hyperbolic") {
    x1 = hyperbolic_point(1.0, 0.0, 0.0);
    x2 = hyperbolic_point(1.0, p.a, 0.0);
  } else {
    throw schema_error("unknown space " + p.space);
  }
  Table tab = base_table("coupling-simulate", seed);
  tab.meta.push_back({"space", p.space});
  tab.meta.push_back({"a", format_double(p.a)});
  tab.meta.push_back({"alpha", format_double(p.alpha)});
  if (p.runs <= 1) {
    tab.header = {"t", "distance"};
    for (const auto& pt : coupled_walk_run(x1, x2, p.alpha, p.t, seed)) tab.rows.push_back({pt.t, pt.distance});
  } else {
    tab.header = {"run", "distance"};
    const Eigen::VectorXd d = coupled_walk_distances(x1, x2, p.alpha, p.t, p.runs, seed);
    for (Eigen::Index i = 0; i < d.size(); ++i) tab.rows.push_back({static_cast<double>(i), d[i]});
  }
  out.write(tab);
  return kOk;
}

// ---- transport --------------------------------------------------------------

struct TransportArgs {
  std::string cost, mu, nu;
  bool oracle = false;
};

int cmd_transport(const TransportArgs& p, std::uint64_t seed, const Output& out) {
  const CostMatrix C = read_cost(p.cost);
  const DiscreteMeasure mu = read_measure(p.mu), nu = read_measure(p.nu);
  if (C.rows() != mu.size() || C.cols() != nu.size()) throw schema_error("cost shape does not match the measures");
  const TransportPlan plan = transport_cost(C, mu, nu);
  Table tab = base_table("transport", seed);
  tab.meta.push_back({"value", format_double(plan.value)});
  tab.meta.push_back({"duality_gap", format_double(plan.duality_gap)});
  if (p.oracle) {
    const Eigen::Index n = mu.size();
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const bool uniform = n == nu.size() && n <= 8 && (mu.weights - u).cwiseAbs().maxCoeff() <= 1e-12 &&
                         (nu.weights - u).cwiseAbs().maxCoeff() <= 1e-12;
    if (!uniform) throw schema_error("--oracle needs uniform marginals of equal size n <= 8");
    const double bf = brute_force_uniform(C);
    tab.meta.push_back({"oracle", format_double(bf)});
    tab.meta.push_back({"oracle_diff", format_double(std::abs(bf - plan.value))});
  }
  tab.header = {"i", "j", "mass"};
  for (Eigen::Index i = 0; i < plan.plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.plan.cols(); ++j)
      if (plan.plan(i, j) > 0.0)
        tab.rows.push_back({static_cast<double>(i), static_cast<double>(j), plan.plan(i, j)});
  out.write(tab);
  return kOk;
}

// ---- check ------------------------------------------------------------------

struct CheckArgs {
  std::string name;
  std::optional<double> K;
  std::string N;
  std::string t, a, s_grid;
  std::string space = "sphere";
  std::string cost = "phi";
  std::optional<std::size_t> paths;
  std::optional<int> functions;
  std::string table;
};

std::vector<double> grid_opt(const std::string& spec, std::vector<double> fallback) {
  return spec.empty() ? fallback : parse_grid(spec);
}

double scalar_opt(const std::string& spec, double fallback) {
  if (spec.empty()) return fallback;
  const auto v = parse_grid(spec);
  if (v.size() != 1) throw schema_error("expected a single value, got a grid");
  return v[0];
}

CheckReport run_check(const CheckArgs& c, std::uint64_t seed) {
  const std::string& n = c.name;
  const double N = c.N.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_extended(c.N);
  auto pick_N = [&](double fallback) { return c.N.empty() ? fallback : N; };
  if (n == "closed-vs-mc") {
    ClosedVsMcOptions o;
    if (c.K) o.K = {*c.K};
    o.t = grid_opt(c.t, o.t);
    o.a = grid_opt(c.a, o.a);
    o.n_paths = c.paths.value_or(o.n_paths);
    o.seed = seed;
    return check_closed_vs_mc(o);
  }
  if (n == "series-vs-mc") {
    SeriesVsMcOptions o;
    o.t = grid_opt(c.t, o.t);
    o.a = grid_opt(c.a, o.a);
    o.n_paths = c.paths.value_or(o.n_paths);
    o.seed = seed;
    return check_series_vs_mc(o);
  }
  if (n == "hyperbolic-dual") {
    HyperbolicDualOptions o;
    o.K = c.K.value_or(o.K);
    o.N = pick_N(o.N);
    o.t = scalar_opt(c.t, o.t);
    o.a = grid_opt(c.a, o.a);
    o.n_paths = c.paths.value_or(o.n_paths);
    o.seed = seed;
    return check_hyperbolic_dual(o);
  }
  if (n == "tv-compare") {
    TvCompareOptions o;
    o.t = grid_opt(c.t, o.t);
    o.a = grid_opt(c.a, o.a);
    return check_tv_compare(o);
  }
  if (n == "constancy") {
    ConstancyOptions o;
    o.K = c.K.value_or(o.K);
    o.N = pick_N(o.N);
    o.t = scalar_opt(c.t, o.t);
    o.a = scalar_opt(c.a, o.a);
    o.s = grid_opt(c.s_grid, {0.0, 0.25 * o.t, 0.5 * o.t, 0.75 * o.t, o.t});
    o.n_paths = c.paths.value_or(o.n_paths);
    o.seed = seed;
    return check_constancy(o);
  }
  if (n == "monotonicity") {
    MonotonicityOptions o;
    if (c.space == "plane") {
      o.space = MonotonicitySpace::plane;
      o.K = -1.0;
      o.N = 3.0;
    } else if (c.space != "sphere") {
      throw schema_error("monotonicity: space must be sphere or plane");
    }
    if (c.cost == "theta") {
      o.cost = MonotonicityCost::theta;
    } else if (c.cost != "phi") {
      throw schema_error("monotonicity: cost must be phi or theta");
    }
    if (o.space == MonotonicitySpace::sphere && (c.K || !c.N.empty()))
      throw schema_error("monotonicity: the sphere carries K = 1, N = 2");
    o.K = c.K.value_or(o.K);
    o.N = pick_N(o.N);
    o.t = scalar_opt(c.t, o.t);
    o.s = grid_opt(c.s_grid, o.s);
    return check_monotonicity(o);
  }
  if (n == "ot-exactness") {
    OtExactnessOptions o;
    o.seed = seed;
    return check_ot_exactness(o);
  }
  if (n == "cost-properties") {
    CostPropertiesOptions o;
    o.K = c.K.value_or(o.K);
    o.N = pick_N(o.N);
    o.t = grid_opt(c.t, o.t);
    o.n_paths = c.paths.value_or(o.n_paths);
    o.seed = seed;
    return check_cost_properties(o);
  }
  if (n == "ordering") {
    OrderingOptions o;
    o.t = grid_opt(c.t, o.t);
    o.n_paths = c.paths.value_or(o.n_paths);
    o.seed = seed;
    return check_ordering(o);
  }
  if (n == "short-time") {
    ShortTimeOptions o;
    if (c.K) o.K = {*c.K};
    if (!c.N.empty()) o.N = {N};
    o.t_small = scalar_opt(c.t, o.t_small);
    o.n_paths = c.paths.value_or(o.n_paths);
    o.seed = seed;
    return check_short_time(o);
  }
  if (n == "coupled-walk") {
    CoupledWalkOptions o;
    if (c.space == "sphere") {
      o.space = SpaceKind::sphere;
      o.a = std::numbers::pi / 2;
    } else if (c.space == "hyperbolic") {
      o.space = SpaceKind::hyperbolic;
    } else if (c.space != "plane" && c.space != "euclidean") {
      throw schema_error("coupled-walk: space must be plane, sphere or hyperbolic");
    }
    o.a = scalar_opt(c.a, o.a);
    o.t = scalar_opt(c.t, o.t);
    o.runs = c.paths.value_or(o.runs);
    o.seed = seed;
    return check_coupled_walk(o);
  }
  if (n == "gradient") {
    GradientOptions o;
    o.t = grid_opt(c.t, o.t);
    o.n_functions = c.functions.value_or(o.n_functions);
    o.seed = seed;
    return check_gradient(o);
  }
  throw schema_error("unknown check " + n);
}

Table report_table(const CheckReport& r, const std::string& command, std::uint64_t seed) {
  Table tab = base_table(command, seed);
  tab.meta.push_back({"check", r.name});
  tab.meta.push_back({"pass", r.pass ? "true" : "false"});
  tab.header = {"label", "value", "tolerance", "pass"};
  for (const auto& ob : r.observed)
    if (!ob.timing) tab.rows.push_back({ob.label, ob.value, ob.tolerance, std::string(ob.pass ? "true" : "false")});
  for (std::size_t i = 0; i < r.notes.size(); ++i) tab.meta.push_back({"note" + std::to_string(i), r.notes[i]});
  return tab;
}

void write_plot_table(const CheckReport& r, const std::string& path, const std::string& command, std::uint64_t seed,
                      const std::string& format) {
  if (path.empty() || r.table_header.empty()) return;
  Table tab = base_table(command, seed);
  tab.meta.push_back({"check", r.name});
  tab.header = r.table_header;
  for (const auto& row : r.table) tab.rows.push_back(std::vector<Cell>(row.begin(), row.end()));
  Output{format, path}.write(tab);
}

void report_timing(const CheckReport& r) {
  for (const auto& ob : r.observed)
    if (ob.timing)
      std::cerr << "# " << r.name << ' ' << ob.label << ' ' << format_double(ob.value) << " limit "
                << format_double(ob.tolerance) << (ob.pass ? "" : " FAIL") << '\n';
}

int cmd_check(const CheckArgs& c, std::uint64_t seed, const Output& out) {
  CheckReport r;
  int code = kOk;
  try {
    r = run_check(c, seed);
    code = r.pass ? kOk : kCheckFailed;
  } catch (const numerical_error& e) {
    // partial report
    r.name = c.name;
    r.fail(std::string("numerical failure: ") + e.what());
    code = kNumerical;
  }
  out.write(report_table(r, "check", seed));
  write_plot_table(r, c.table, "check", seed, out.format);
  report_timing(r);
  return code;
}

// ---- asymptotics ------------------------------------------------------------

struct AsymptoticsArgs {
  double t_flat = 100.0;
  double t_sphere = 5.0;
  double t_hyperbolic = 50.0;
  double dt_hyperbolic = 1e-2;
  std::size_t paths = 100000;
  std::string report;
};

int cmd_asymptotics(const AsymptoticsArgs& p, std::uint64_t seed, const Output& out) {
  AsymptoticsOptions o;
  o.t_flat = p.t_flat;
  o.t_sphere = p.t_sphere;
  o.t_hyperbolic = p.t_hyperbolic;
  o.dt_hyperbolic = p.dt_hyperbolic;
  o.n_paths = p.paths;
  o.seed = seed;
  if (!(o.t_flat > 0.0 && o.t_sphere > 0.0 && o.t_hyperbolic > 0.0 && o.dt_hyperbolic > 0.0))
    throw schema_error("asymptotics: times must be positive");
  const CheckReport r = check_asymptotics(o);
  Table tab = base_table("asymptotics", seed);
  tab.meta.push_back({"pass", r.pass ? "true" : "false"});
  tab.header = r.table_header;
  for (const auto& row : r.table) tab.rows.push_back(std::vector<Cell>(row.begin(), row.end()));
  out.write(tab);
  if (!p.report.empty()) Output{out.format, p.report}.write(report_table(r, "asymptotics", seed));
  return r.pass ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison costs for coupling by reflection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Output out;
  std::uint64_t seed = kCheckSeed;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", out.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-o,--output", out.path, "output file (default stdout)");
    sub->add_option("--seed", seed, "master seed");
  };

  PhiArgs phi_args;
  auto* phi_cmd = app.add_subcommand("phi", "evaluate phi_t(a) on a (t, a) grid");
  phi_cmd->add_option("--K", phi_args.K)->required();
  phi_cmd->add_option("--N", phi_args.N, "dimension in [2, inf]")->required();
  phi_cmd->add_option("--t", phi_args.t);
  phi_cmd->add_option("--t-grid", phi_args.t_grid, "start:stop:step");
  phi_cmd->add_option("--a", phi_args.a);
  phi_cmd->add_option("--a-grid", phi_args.a_grid, "start:stop:step");
  phi_cmd->add_option("--method", phi_args.method)
      ->check(CLI::IsMember({"auto", "closed", "series", "mixture", "survival"}));
  phi_cmd->add_option("--tol", phi_args.tol)->check(CLI::PositiveNumber);
  phi_cmd->add_option("--paths", phi_args.paths)->check(CLI::PositiveNumber);
  common(phi_cmd);

  RhoArgs rho_args;
  auto* rho_cmd = app.add_subcommand("rho-simulate", "simulate the comparison SDE");
  rho_cmd->add_option("--K", rho_args.K)->required();
  rho_cmd->add_option("--N", rho_args.N)->required();
  rho_cmd->add_option("--a", rho_args.a);
  rho_cmd->add_option("--t", rho_args.t)->check(CLI::PositiveNumber);
  rho_cmd->add_option("--dt", rho_args.dt, "default 1e-3 min(t, 1)");
  rho_cmd->add_option("--paths", rho_args.paths)->check(CLI::PositiveNumber);
  rho_cmd->add_flag("--no-absorb", rho_args.no_absorb);
  rho_cmd->add_option("--keep", rho_args.keep, "emit full paths for this many samples");
  rho_cmd->add_option("--every", rho_args.every, "thinning of emitted paths");
  common(rho_cmd);

  CouplingArgs cp_args;
  auto* cp_cmd = app.add_subcommand("coupling-simulate", "coupled geodesic random walks");
  cp_cmd->add_option("--space", cp_args.space)->check(CLI::IsMember({"euclidean", "sphere", "hyperbolic"}));
  cp_cmd->add_option("--a", cp_args.a);
  cp_cmd->add_option("--alpha", cp_args.alpha)->check(CLI::PositiveNumber);
  cp_cmd->add_option("--t", cp_args.t);
  cp_cmd->add_option("--runs", cp_args.runs, "1 emits a trace, more emit terminal distances");
  common(cp_cmd);

  TransportArgs tr_args;
  auto* tr_cmd = app.add_subcommand("transport", "exact optimal transport between two measures");
  tr_cmd->add_option("--cost", tr_args.cost)->required()->check(CLI::ExistingFile);
  tr_cmd->add_option("--mu", tr_args.mu)->required()->check(CLI::ExistingFile);
  tr_cmd->add_option("--nu", tr_args.nu)->required()->check(CLI::ExistingFile);
  tr_cmd->add_flag("--oracle", tr_args.oracle, "cross-check by permutations");
  common(tr_cmd);

  CheckArgs ck_args;
  auto* ck_cmd = app.add_subcommand("check", "run a verification harness");
  ck_cmd->add_option("name", ck_args.name)
      ->required()
      ->check(CLI::IsMember({"closed-vs-mc", "series-vs-mc", "hyperbolic-dual", "tv-compare", "constancy",
                             "monotonicity", "ot-exactness", "cost-properties", "ordering", "short-time",
                             "coupled-walk", "gradient"}));
  ck_cmd->add_option("--K", ck_args.K);
  ck_cmd->add_option("--N", ck_args.N);
  ck_cmd->add_option("--t", ck_args.t, "value or grid");
  ck_cmd->add_option("--a", ck_args.a, "value or grid");
  ck_cmd->add_option("--s-grid", ck_args.s_grid);
  ck_cmd->add_option("--space", ck_args.space);
  ck_cmd->add_option("--cost", ck_args.cost, "phi or theta");
  ck_cmd->add_option("--paths", ck_args.paths);
  ck_cmd->add_option("--functions", ck_args.functions);
  ck_cmd->add_option("--table", ck_args.table, "write plot-ready rows here");
  common(ck_cmd);

  AsymptoticsArgs as_args;
  auto* as_cmd = app.add_subcommand("asymptotics", "long-time scalings of phi");
  as_cmd->add_option("--t-flat", as_args.t_flat);
  as_cmd->add_option("--t-sphere", as_args.t_sphere);
  as_cmd->add_option("--t-hyperbolic", as_args.t_hyperbolic);
  as_cmd->add_option("--dt-hyperbolic", as_args.dt_hyperbolic);
  as_cmd->add_option("--paths", as_args.paths)->check(CLI::PositiveNumber);
  as_cmd->add_option("--report", as_args.report, "write the check report here");
  common(as_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*phi_cmd) return cmd_phi(phi_args, seed, out);
    if (*rho_cmd) return cmd_rho(rho_args, seed, out);
    if (*cp_cmd) return cmd_coupling(cp_args, seed, out);
    if (*tr_cmd) return cmd_transport(tr_args, seed, out);
    if (*ck_cmd) return cmd_check(ck_args, seed, out);
    if (*as_cmd) return cmd_asymptotics(as_args, seed, out);
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
