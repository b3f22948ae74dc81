#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "reflectcost/comparison.hpp"
#include "reflectcost/cost.hpp"

using namespace reflectcost;
using std::numbers::pi;

namespace {

SdeConfig small_config(double horizon, std::size_t n, double dt = 1e-3) {
  SdeConfig cfg;
  cfg.horizon = horizon;
  cfg.dt = dt;
  cfg.n_paths = n;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  const CurvatureDimension sphere(1.0, 2.0);
  SdeConfig cfg = small_config(1.0, 10);
  cfg.dt = 0.0;
  CHECK_THROWS_AS(simulate_rho(sphere, 1.0, cfg), std::invalid_argument);
  cfg = small_config(1.0, 10);
  cfg.boundary_margin = 4.0;
  CHECK_THROWS_AS(simulate_rho(sphere, 1.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(simulate_rho(sphere, pi, small_config(1.0, 10)), std::domain_error);
  CHECK_THROWS_AS(survival_probability(sphere, 0.0, 1.0, small_config(1.0, 10)), std::domain_error);
  CHECK_THROWS_AS(survival_probability(sphere, 3.2, 1.0, small_config(1.0, 10)), std::domain_error);
  CHECK(SdeConfig::for_horizon(0.25).dt == doctest::Approx(2.5e-4));
  CHECK(SdeConfig::for_horizon(4.0).dt == 1e-3);
}

TEST_CASE("simulate_rho: initial column, grid and boundary") {
  const CurvatureDimension sphere(1.0, 2.0);
  const auto ens = simulate_rho(sphere, pi / 2, small_config(1.0, 2000));
  CHECK(ens.times.size() == 1001);
  CHECK(ens.values.rows() == 2000);
  CHECK((ens.values.col(0).array() == pi / 2).all());
  double top = 0.0;
  for (Eigen::Index i = 0; i < ens.values.rows(); ++i) {
    for (Eigen::Index k = 0; k < ens.values.cols(); ++k) {
      const double x = ens.values(i, k);
      if (std::isnan(x)) {
        CHECK(ens.absorbed_at[static_cast<std::size_t>(i)].has_value());
        CHECK(ens.times[k] >= *ens.absorbed_at[static_cast<std::size_t>(i)] - 1e-12);
      } else {
        top = std::max(top, std::abs(x));
      }
    }
  }
  CHECK(top < pi);
}

TEST_CASE("simulate_rho: Brownian variance for K = 0, N = inf") {
  SdeConfig cfg = small_config(0.5, 100000);
  cfg.absorb_at_zero = false;
  const Eigen::VectorXd x = simulate_rho_terminal(CurvatureDimension(0.0, kInf), 0.0, cfg);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / (x.size() - 1.0);
  // SE of the sample variance of a Gaussian: var * sqrt(2 / (n - 1))
  CHECK(std::abs(var - 8.0 * 0.5) <= 3.0 * 4.0 * std::sqrt(2.0 / (x.size() - 1.0)));
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(4.0 / x.size()));
}

TEST_CASE("simulate_rho: determinism, thread count and mirror symmetry") {
  const CurvatureDimension cd(1.0, 3.0);
  SdeConfig cfg = small_config(0.3, 500);
  const auto a = simulate_rho(cd, 0.7, cfg);
  const auto b = simulate_rho(cd, 0.7, cfg);
  CHECK(a.values.cwiseEqual(b.values).count() + a.values.array().isNaN().count() == a.values.size());
  CHECK(a.seed_trace == b.seed_trace);

  setenv("REFLECTCOST_THREADS", "1", 1);
  const Eigen::VectorXd one = simulate_rho_terminal(cd, 0.7, cfg);
  setenv("REFLECTCOST_THREADS", "3", 1);
  const Eigen::VectorXd three = simulate_rho_terminal(cd, 0.7, cfg);
  unsetenv("REFLECTCOST_THREADS");
  CHECK(one == three);

  SdeConfig mirrored = cfg;
  mirrored.mirror_noise = true;
  const auto neg = simulate_rho(cd, -0.7, mirrored);
  bool same = true;
  for (Eigen::Index i = 0; i < a.values.rows(); ++i)
    for (Eigen::Index k = 0; k < a.values.cols(); ++k) {
      const double p = a.values(i, k), q = neg.values(i, k);
      if (std::isnan(p) != std::isnan(q) || (!std::isnan(p) && p != -q)) same = false;
    }
  CHECK(same);
  CHECK(a.absorbed_at == neg.absorbed_at);
}

TEST_CASE("pathwise comparison under common noise") {
  // (K, N) >= (K', N') in the ordering K >= K', N <= N'
  const std::pair<CurvatureDimension, CurvatureDimension> pairs[] = {
      {CurvatureDimension(1.0, 2.0), CurvatureDimension(0.0, kInf)},
      {CurvatureDimension(1.0, 2.0), CurvatureDimension(1.0, 5.0)},
      {CurvatureDimension(0.0, 3.0), CurvatureDimension(-1.0, 3.0)},
      {CurvatureDimension(-1.0, 2.0), CurvatureDimension(-1.0, kInf)},
  };
  SdeConfig cfg = small_config(1.0, 400);
  for (const auto& [hi, lo] : pairs) {
    const auto p = simulate_rho(hi, 1.0, cfg);
    const auto q = simulate_rho(lo, 1.0, cfg);
    double worst = -kInf;
    for (Eigen::Index i = 0; i < p.values.rows(); ++i)
      for (Eigen::Index k = 0; k < p.values.cols(); ++k) {
        if (std::isnan(p.values(i, k)) || std::isnan(q.values(i, k))) continue;
        worst = std::max(worst, p.values(i, k) - q.values(i, k));
      }
    CHECK(worst <= 10.0 * cfg.dt);
  }
}

TEST_CASE("survival probability") {
  const CurvatureDimension flat(0.0, kInf);
  const Estimate e = survival_probability(flat, 2.0 * std::numbers::sqrt2, 1.0, SdeConfig::for_horizon(1.0));
  CHECK(std::abs(e.value - chi(1.0)) <= 0.005);
  CHECK(std::abs(e.value - chi(1.0)) <= 3.0 * e.std_error + 1e-3);

  SdeConfig one_step = small_config(1e-3, 20000);
  CHECK(survival_probability(flat, 1.0, 1e-3, one_step).value == 1.0);

  // monotone in t and a within 3 SE
  const CurvatureDimension sphere(1.0, 2.0);
  double prev = 1.0, prev_se = 0.0;
  for (double t : {0.1, 0.2, 0.4}) {
    const Estimate s = survival_probability(sphere, 1.0, t, SdeConfig::for_horizon(t, 20000));
    CHECK(s.value <= prev + 3.0 * std::hypot(s.std_error, prev_se));
    prev = s.value;
    prev_se = s.std_error;
  }
  prev = 0.0;
  prev_se = 0.0;
  for (double a : {0.3, 0.9, 1.8}) {
    const Estimate s = survival_probability(sphere, a, 0.2, SdeConfig::for_horizon(0.2, 20000));
    CHECK(s.value + 3.0 * std::hypot(s.std_error, prev_se) >= prev);
    prev = s.value;
    prev_se = s.std_error;
  }
}

TEST_CASE("sample_zeta") {
  const auto flat = sample_zeta(CurvatureDimension(0.0, 2.0), 0.3, 200, small_config(0.3, 200));
  for (double u : flat.samples) CHECK(u == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(flat.transform == DisplacementTransform::identity);

  const auto sph = sample_zeta(CurvatureDimension(1.0, 2.0), 0.5, 2000, SdeConfig::for_horizon(0.5));
  for (double u : sph.samples) CHECK(u >= 0.5 - 1e-12);
  const auto sph5 = sample_zeta(CurvatureDimension(2.0, 5.0), 0.5, 2000, SdeConfig::for_horizon(0.5));
  for (double u : sph5.samples) CHECK(u >= 0.5 - 1e-12);
  const auto hyp = sample_zeta(CurvatureDimension(-1.0, 3.0), 0.5, 2000, SdeConfig::for_horizon(0.5));
  for (double u : hyp.samples) {
    CHECK(u > 0.0);
    CHECK(u <= 0.5 + 1e-12);
  }
  CHECK_THROWS_AS(sample_zeta(CurvatureDimension(1.0, kInf), 0.5, 10, SdeConfig{}), std::domain_error);
}

TEST_CASE("sample_zeta reproduces the series through the mixture") {
  const CurvatureDimension cd(1.0, 2.0);
  const auto ms = sample_zeta(cd, 0.5, 40000, SdeConfig::for_horizon(0.5));
  for (double a : {0.5, pi / 2, 2.5})
    CHECK(std::abs(phi_mixture(ms, a).value - phi_series(cd, 0.5, a).value) <= 0.02);
}

TEST_CASE("sample_zeta_hyperbolic") {
  CHECK_THROWS_AS(sample_zeta_hyperbolic(0.0, 3.0, 1.0, 10, SdeConfig{}), std::domain_error);
  CHECK_THROWS_AS(sample_zeta_hyperbolic(-1.0, kInf, 1.0, 10, SdeConfig{}), std::domain_error);
  const auto ms = sample_zeta_hyperbolic(-1.0, 3.0, 1e-3, 500, small_config(1e-3, 500, 1e-5));
  CHECK(ms.transform == DisplacementTransform::s_kbar_half);
  for (double u : ms.samples) CHECK(std::abs(u - 1e-3) <= 2e-4);

  // E exp(2 s W_s + 2 K s) = exp((2 sigma^2 + 2K) s) with sigma^2 = -2K/(N-1)
  const double K = -1.0, N = 3.0, t = 1.0;
  const auto big = sample_zeta_hyperbolic(K, N, t, 40000, SdeConfig::for_horizon(t));
  const double rate = 2.0 * (-2.0 * K / (N - 1.0)) + 2.0 * K;  // = 0 here
  const double expected = rate == 0.0 ? t : std::expm1(rate * t) / rate;
  double mean = 0.0, sq = 0.0;
  for (double u : big.samples) {
    mean += u;
    sq += u * u;
  }
  mean /= big.samples.size();
  const double se = std::sqrt((sq / big.samples.size() - mean * mean) / big.samples.size());
  CHECK(std::abs(mean - expected) <= 4.0 * se + 1e-3);
}

TEST_CASE("identity and hyperbolic mixtures agree") {
  const CurvatureDimension cd(-1.0, 3.0);
  const auto id = sample_zeta(cd, 1.0, 40000, SdeConfig::for_horizon(1.0));
  const auto hy = sample_zeta_hyperbolic(-1.0, 3.0, 1.0, 40000, SdeConfig::for_horizon(1.0));
  CHECK(phi_mixture(id, 0.0).value == 0.0);
  CHECK(std::abs(phi_mixture(id, 1.0).value - phi_mixture(hy, 1.0).value) <= 0.02);
}

TEST_CASE("constancy statistic") {
  const CurvatureDimension flat(0.0, kInf);
  SdeConfig cfg = SdeConfig::for_horizon(1.0, 40000);
  const auto pts = constancy_statistic(flat, 1.0, 1.0, {0.0, 0.25, 0.5, 0.75, 1.0}, cfg);
  REQUIRE(pts.size() == 5);
  CHECK(pts[0].estimate == phi_closed(0.0, 1.0, 1.0));
  CHECK(pts[0].std_error == 0.0);
  const Estimate surv = survival_probability(flat, 1.0, 1.0, cfg);
  CHECK(pts[4].estimate == doctest::Approx(surv.value).epsilon(1e-14));
  for (const auto& p : pts) CHECK(std::abs(p.estimate - pts[0].estimate) <= 3.0 * p.std_error + 1e-12);

  CHECK_THROWS_AS(constancy_statistic(flat, 1.0, 1.0, {}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(constancy_statistic(flat, 1.0, 1.0, {0.5, 0.25}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(constancy_statistic(flat, 1.0, 1.0, {1.5}, cfg), std::invalid_argument);
}
