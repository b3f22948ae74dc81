#include "reflectcost/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reflectcost/cost.hpp"
#include "reflectcost/parallel.hpp"

namespace reflectcost {

namespace {

constexpr std::uint64_t kBridgeSalt = 0xb51d6e5a3c1f2e77ULL;
constexpr double kSqrt8 = 2.0 * std::numbers::sqrt2;
constexpr int kSubsteps = 8;

// One Euler step of rho, with capping and substepping near +-Rbar.
class RhoStepper {
 public:
  RhoStepper(const CurvatureDimension& cd, const SdeConfig& cfg)
      : cd_(cd),
        h_(cfg.step()),
        sqrt_h_(std::sqrt(h_)),
        bounded_(cd.bounded()),
        R_(cd.Rbar),
        inner_(cd.bounded() ? cd.Rbar - cfg.margin(cd) : kInf),
        cap_(cfg.cap()),
        sign_(cfg.mirror_noise ? -1.0 : 1.0) {}

  double h() const { return h_; }

  double advance(double x, double z) const {
    const double noise = sign_ * kSqrt8 * sqrt_h_ * z;
    if (bounded_ && std::abs(x) > inner_) {
      const double hs = h_ / kSubsteps, ns = noise / kSubsteps;
      for (int k = 0; k < kSubsteps; ++k) x = fold(x + capped_drift(x) * hs + ns);
      return x;
    }
    x = x + psi(cd_, x) * h_ + noise;
    return bounded_ ? fold(x) : x;
  }

 private:
  double capped_drift(double x) const {
    const double m = std::min(std::abs(x), R_ * (1.0 - 1e-15));
    const double v = std::clamp(psi(cd_, m), -cap_, cap_);
    return x < 0.0 ? -v : v;
  }

  // Mirror a step that left (-R, R) back inside.
  double fold(double x) const {
    double m = std::abs(x);
    if (m < R_) return x;
    m = 2.0 * R_ - m;
    if (!(m > 0.0 && m < R_)) m = inner_;
    return x < 0.0 ? -m : m;
  }

  CurvatureDimension cd_;
  double h_, sqrt_h_;
  bool bounded_;
  double R_, inner_, cap_, sign_;
};

// Single path of rho with first-passage detection.
class RhoPath {
 public:
  RhoPath(const RhoStepper& st, double a, std::uint64_t seed, bool absorb)
      : st_(st), noise_(seed), bridge_(mix64(seed ^ kBridgeSalt)), x_(a), absorb_(absorb) {}

  // Returns false once the path has been absorbed.
  bool next() {
    const double y = st_.advance(x_, noise_.normal());
    if (absorb_ && crossed(x_, y)) {
      x_ = 0.0;
      alive_ = false;
      return false;
    }
    x_ = y;
    return true;
  }

  double value() const { return x_; }
  bool alive() const { return alive_; }

 private:
  bool crossed(double x, double y) {
    if (x * y <= 0.0) return true;
    const double e = 2.0 * x * y / (8.0 * st_.h());
    if (e > 40.0) return false;
    return bridge_.uniform() < std::exp(-e);
  }

  const RhoStepper& st_;
  CounterRng noise_;
  CounterRng bridge_;
  double x_;
  bool absorb_;
  bool alive_ = true;
};

void check_start(const CurvatureDimension& cd, double a) {
  if (!(std::abs(a) < cd.Rbar)) throw std::domain_error("initial value outside (-Rbar, Rbar)");
}

}  // namespace

SdeConfig SdeConfig::for_horizon(double t, std::size_t n_paths, std::uint64_t seed) {
  SdeConfig cfg;
  cfg.horizon = t;
  cfg.dt = 1e-3 * std::min(t, 1.0);
  cfg.n_paths = n_paths;
  cfg.master_seed = seed;
  return cfg;
}

void SdeConfig::validate(const CurvatureDimension& cd) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (dt > horizon * (1.0 + 1e-12)) throw std::invalid_argument("dt exceeds horizon");
  if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (boundary_margin < 0.0 || drift_cap < 0.0) throw std::invalid_argument("negative margin or cap");
  if (cd.bounded() && !(margin(cd) < cd.Rbar)) throw std::invalid_argument("boundary_margin >= Rbar");
}

std::size_t SdeConfig::steps() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9)));
}

double SdeConfig::margin(const CurvatureDimension& cd) const {
  if (boundary_margin > 0.0) return boundary_margin;
  return cd.bounded() ? 0.05 * cd.Rbar : 0.0;
}

double SdeConfig::cap() const { return drift_cap > 0.0 ? drift_cap : 50.0 / std::sqrt(dt); }

PathEnsemble simulate_rho(const CurvatureDimension& cd, double a, const SdeConfig& cfg) {
  cfg.validate(cd);
  check_start(cd, a);
  const std::size_t steps = cfg.steps(), n = cfg.n_paths;
  const RhoStepper st(cd, cfg);
  PathEnsemble out;
  out.times.resize(static_cast<Eigen::Index>(steps + 1));
  for (std::size_t k = 0; k <= steps; ++k) out.times[static_cast<Eigen::Index>(k)] = k * st.h();
  out.values.setConstant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(steps + 1),
                         std::numeric_limits<double>::quiet_NaN());
  out.absorbed_at.assign(n, std::nullopt);
  out.seed_trace.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      out.seed_trace[i] = derive_seed(cfg.master_seed, i);
      RhoPath path(st, a, out.seed_trace[i], cfg.absorb_at_zero);
      out.values(row, 0) = a;
      for (std::size_t k = 1; k <= steps; ++k) {
        if (!path.next()) {
          out.absorbed_at[i] = k * st.h();
          break;
        }
        out.values(row, static_cast<Eigen::Index>(k)) = path.value();
      }
    }
  });
  return out;
}

Eigen::VectorXd simulate_rho_terminal(const CurvatureDimension& cd, double a, const SdeConfig& cfg) {
  cfg.validate(cd);
  check_start(cd, a);
  const std::size_t steps = cfg.steps(), n = cfg.n_paths;
  const RhoStepper st(cd, cfg);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      RhoPath path(st, a, derive_seed(cfg.master_seed, i), cfg.absorb_at_zero);
      for (std::size_t k = 0; k < steps && path.next(); ++k) {
      }
      out[static_cast<Eigen::Index>(i)] = path.value();
    }
  });
  return out;
}

Estimate survival_probability(const CurvatureDimension& cd, double a, double t, SdeConfig cfg) {
  if (!(a > 0.0)) throw std::domain_error("survival_probability: a must be positive");
  cfg.horizon = t;
  cfg.absorb_at_zero = true;
  cfg.validate(cd);
  check_start(cd, a);
  const std::size_t steps = cfg.steps(), n = cfg.n_paths;
  const RhoStepper st(cd, cfg);
  std::vector<double> survived(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      RhoPath path(st, a, derive_seed(cfg.master_seed, i), true);
      for (std::size_t k = 0; k < steps && path.next(); ++k) {
      }
      survived[i] = path.alive() ? 1.0 : 0.0;
    }
  });
  const double p = pairwise_sum(survived) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

namespace {

// Time-change path theta of the comparison process, started at 0.
// N = 2: Euler on theta. N > 2: Euler on Y = theta^2, reflected at 0.
class ThetaPath {
 public:
  ThetaPath(const CurvatureDimension& cd, const SdeConfig& cfg, double h, std::uint64_t seed)
      : kbar_(cd.Kbar),
        N_(cd.N),
        h_(h),
        sqrt_h_(std::sqrt(h)),
        bounded_(cd.Kbar > 0.0),
        top_(cd.Kbar > 0.0 ? 0.5 * std::numbers::pi / std::sqrt(cd.Kbar) : kInf),
        inner_(cd.Kbar > 0.0 ? top_ - 0.5 * cfg.margin(cd) : kInf),
        cap_(cfg.cap()),
        rng_(seed) {}

  double theta() const { return theta_; }

  // 1 / c_kbar(theta)^2
  double weight() const {
    const double c = comparison_fns(kbar_, theta_).c;
    return 1.0 / (c * c);
  }

  void next() {
    const double z = rng_.normal();
    const bool near_top = bounded_ && std::abs(theta_) > inner_;
    const int sub = near_top ? 8 : 1;
    const double hs = h_ / sub, dw = sqrt_h_ * z / sub;
    for (int k = 0; k < sub; ++k) {
      if (N_ == 2.0) {
        const double drift = std::clamp(-kbar_ * tan_at(theta_), -cap_, cap_);
        theta_ = fold(theta_ + drift * hs + std::numbers::sqrt2 * dw);
      } else {
        const double restoring = std::clamp(kbar_ * tan_at(theta_), -cap_, cap_);
        double y = theta_ * theta_;
        y += (2.0 * (N_ - 1.0) - 2.0 * theta_ * restoring) * hs + kSqrt8 * theta_ * dw;
        theta_ = fold(std::sqrt(std::abs(y)));
      }
    }
  }

 private:
  double tan_at(double th) const {
    if (!bounded_) return tan_k(kbar_, th);
    const double m = std::min(std::abs(th), top_ * (1.0 - 1e-15));
    const double v = tan_k(kbar_, m);
    return th < 0.0 ? -v : v;
  }

  double fold(double th) const {
    if (!bounded_) return th;
    double m = std::abs(th);
    if (m < top_) return th;
    m = 2.0 * top_ - m;
    if (!(m > 0.0 && m < top_)) m = inner_;
    return th < 0.0 ? -m : m;
  }

  double kbar_, N_, h_, sqrt_h_;
  bool bounded_;
  double top_, inner_, cap_;
  CounterRng rng_;
  double theta_ = 0.0;
};

}  // namespace

MixtureSamples sample_zeta(const CurvatureDimension& cd, double t, std::size_t n, SdeConfig cfg) {
  if (!cd.finite_dimension()) throw std::domain_error("sample_zeta: requires N finite");
  cfg.horizon = t;
  cfg.n_paths = n;
  cfg.validate(cd);
  const std::size_t steps = cfg.steps();
  const double h = cfg.step();
  MixtureSamples out;
  out.transform = DisplacementTransform::identity;
  out.t = t;
  out.cd = cd;
  out.samples.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      ThetaPath path(cd, cfg, h, derive_seed(cfg.master_seed, i));
      double prev = path.weight(), acc = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        path.next();
        const double w = path.weight();
        acc += 0.5 * h * (prev + w);
        prev = w;
      }
      out.samples[i] = acc;
    }
  });
  return out;
}

MixtureSamples sample_zeta_hyperbolic(double K, double N, double t, std::size_t n, SdeConfig cfg) {
  if (!(K < 0.0)) throw std::domain_error("sample_zeta_hyperbolic: requires K < 0");
  const CurvatureDimension cd(K, N);
  if (!cd.finite_dimension()) throw std::domain_error("sample_zeta_hyperbolic: requires N finite");
  cfg.horizon = t;
  cfg.n_paths = n;
  cfg.validate(cd);
  const std::size_t steps = cfg.steps();
  const double h = cfg.step(), sqrt_h = std::sqrt(h);
  const double two_sigma = 2.0 * std::sqrt(-2.0 * K / (N - 1.0));
  MixtureSamples out;
  out.transform = DisplacementTransform::s_kbar_half;
  out.t = t;
  out.cd = cd;
  out.samples.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      CounterRng rng(derive_seed(cfg.master_seed, i));
      double w = 0.0, prev = 1.0, acc = 0.0;
      for (std::size_t k = 1; k <= steps; ++k) {
        w += sqrt_h * rng.normal();
        const double cur = std::exp(two_sigma * w + 2.0 * K * (k * h));
        acc += 0.5 * h * (prev + cur);
        prev = cur;
      }
      out.samples[i] = acc;
    }
  });
  return out;
}

std::vector<ConstancyPoint> constancy_statistic(const CurvatureDimension& cd, double a, double t,
                                                const std::vector<double>& s_grid, SdeConfig cfg) {
  if (s_grid.empty()) throw std::invalid_argument("constancy_statistic: empty s-grid");
  if (!(a > 0.0)) throw std::domain_error("constancy_statistic: a must be positive");
  for (std::size_t j = 0; j < s_grid.size(); ++j) {
    if (s_grid[j] < 0.0 || s_grid[j] > t * (1.0 + 1e-12))
      throw std::invalid_argument("constancy_statistic: s outside [0, t]");
    if (j > 0 && s_grid[j] < s_grid[j - 1]) throw std::invalid_argument("constancy_statistic: s-grid not sorted");
  }
  cfg.horizon = t;
  cfg.absorb_at_zero = true;
  cfg.validate(cd);
  check_start(cd, a);
  const std::size_t steps = cfg.steps(), n = cfg.n_paths, ns = s_grid.size();
  const RhoStepper st(cd, cfg);
  std::vector<std::size_t> index(ns);
  for (std::size_t j = 0; j < ns; ++j)
    index[j] = std::min(steps, static_cast<std::size_t>(std::llround(s_grid[j] / st.h())));

  // state[i * ns + j]: rho at s_j, NaN once absorbed
  std::vector<double> state(n * ns, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      RhoPath path(st, a, derive_seed(cfg.master_seed, i), true);
      std::size_t j = 0, k = 0;
      bool alive = true;
      while (j < ns) {
        if (k == index[j]) {
          state[i * ns + j] = alive ? path.value() : std::numeric_limits<double>::quiet_NaN();
          ++j;
          continue;
        }
        if (alive) alive = path.next();
        ++k;
      }
    }
  });

  std::vector<ConstancyPoint> out;
  std::vector<double> contrib(n);
  for (std::size_t j = 0; j < ns; ++j) {
    const double s = s_grid[j];
    const double rest = t - s;
    if (index[j] == 0) {
      const PhiResult r = phi(CostQuery{cd, t, a});
      out.push_back({s, r.value, r.error_bound});
      continue;
    }
    if (rest <= 1e-12 * t) {
      for (std::size_t i = 0; i < n; ++i) contrib[i] = std::isnan(state[i * ns + j]) ? 0.0 : 1.0;
    } else {
      const PhiEvaluator eval(cd, rest);
      parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          const double x = state[i * ns + j];
          contrib[i] = std::isnan(x) ? 0.0 : eval(x).value;
        }
      });
    }
    const MeanSe m = mean_and_se(contrib);
    out.push_back({s, m.mean, m.std_error});
  }
  return out;
}

}  // namespace reflectcost
