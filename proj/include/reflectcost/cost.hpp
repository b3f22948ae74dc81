#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reflectcost/comparison.hpp"
#include "reflectcost/specfun.hpp"

namespace reflectcost {

/// Raised when the spectral series is too slow at the requested time.
class slow_convergence : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

enum class PhiMethod { indicator, closed, series, mixture_mc, survival_mc };

std::string method_name(PhiMethod m);

struct PhiResult {
  double value = 0.0;
  PhiMethod method = PhiMethod::closed;
  double error_bound = 0.0;
};

struct CostQuery {
  CurvatureDimension cd;
  double t = 0.0;
  double a = 0.0;
};

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kSeriesThreshold = 0.005;

/// chi(a / (2 sqrt(2 eta_K(t)))); the indicator of (0, inf) at t = 0.
double phi_closed(double K, double t, double a);

/// Gegenbauer expansion, K > 0 and N finite.
PhiResult phi_series(const CurvatureDimension& cd, double t, double a, double tol = kDefaultTol);

/// P[x + B(s) stays in (0, L) for s <= T], B a standard Brownian motion.
double interval_survival(double x, double T, double L);

/// Mean of chi(d0 / (2 sqrt(2u))) over the mixture samples; for K > 0 the
/// kernel is interval_survival(a / 2, 2u, pi / sqrt(kbar)).
PhiResult phi_mixture(const MixtureSamples& ms, double a);

/// Truncated Gegenbauer coefficients for one (K, N, t).
struct SeriesTable {
  CurvatureDimension cd;
  double t = 0.0;
  std::vector<double> coef;  // signed coefficient of P_{2n+1}
  double tail = 0.0;         // bound on the omitted terms
};

SeriesTable make_series_table(const CurvatureDimension& cd, double t, double tol = kDefaultTol);
PhiResult eval_series(const SeriesTable& table, double a);

/// phi_t for one (K, N, t); picks the method once and reuses it across a.
class PhiEvaluator {
 public:
  PhiEvaluator(const CurvatureDimension& cd, double t, double tol = kDefaultTol,
               std::optional<SdeConfig> mc = std::nullopt);

  PhiResult operator()(double a) const;
  PhiMethod method() const { return method_; }
  const CurvatureDimension& cd() const { return cd_; }
  double t() const { return t_; }

 private:
  CurvatureDimension cd_;
  double t_;
  double tol_;
  PhiMethod method_;
  std::shared_ptr<const MixtureSamples> samples_;
  std::shared_ptr<const SeriesTable> series_;
};

/// Default Monte Carlo ensemble for mixture-backed evaluations.
SdeConfig default_mixture_config(double t);

PhiResult phi(const CostQuery& q, double tol = kDefaultTol);

/// phi_t'(0): closed form, term-wise series derivative, or mixture mean of 1/(2 sqrt(pi u)).
Estimate phi_prime_zero(const CurvatureDimension& cd, double t, std::optional<SdeConfig> mc = std::nullopt);

/// Long-time limit profile Theta_{K,N}.
double theta_limit(const CurvatureDimension& cd, double a);

/// Exponential rate paired with theta_limit.
double kappa(const CurvatureDimension& cd);

}  // namespace reflectcost
