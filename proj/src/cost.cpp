#include "reflectcost/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reflectcost/parallel.hpp"
#include "reflectcost/quadrature.hpp"

namespace reflectcost {

namespace {

double indicator(double a) { return a > 0.0 ? 1.0 : 0.0; }

bool closed_form_applies(const CurvatureDimension& cd) { return cd.K == 0.0 || !cd.finite_dimension(); }

bool series_applies(const CurvatureDimension& cd, double t) {
  return cd.K > 0.0 && cd.finite_dimension() && cd.K * t / (cd.N - 1.0) >= kSeriesThreshold;
}

// a in [0, Rbar]; values a hair above Rbar from rounding are pulled back.
double checked_distance(const CurvatureDimension& cd, double a) {
  if (std::isnan(a) || a < 0.0) throw std::domain_error("phi: negative distance");
  if (cd.bounded() && a > cd.Rbar) {
    if (a > cd.Rbar * (1.0 + 1e-12)) throw std::domain_error("phi: distance beyond Rbar");
    return cd.Rbar;
  }
  return a;
}

std::shared_ptr<const MixtureSamples> mixture_for(const CurvatureDimension& cd, double t, const SdeConfig& mc) {
  if (cd.K < 0.0)
    return std::make_shared<const MixtureSamples>(sample_zeta_hyperbolic(cd.K, cd.N, t, mc.n_paths, mc));
  return std::make_shared<const MixtureSamples>(sample_zeta(cd, t, mc.n_paths, mc));
}

}  // namespace

std::string method_name(PhiMethod m) {
  switch (m) {
    case PhiMethod::indicator:
      return "indicator";
    case PhiMethod::closed:
      return "closed";
    case PhiMethod::series:
      return "series";
    case PhiMethod::mixture_mc:
      return "mixture_mc";
    case PhiMethod::survival_mc:
      return "survival_mc";
  }
  return "unknown";
}

double phi_closed(double K, double t, double a) {
  if (std::isnan(a) || a < 0.0) throw std::domain_error("phi_closed: negative distance");
  if (t < 0.0) throw std::domain_error("phi_closed: negative time");
  if (t == 0.0) return indicator(a);
  return chi(a / (2.0 * std::sqrt(2.0 * eta(K, t))));
}

SeriesTable make_series_table(const CurvatureDimension& cd, double t, double tol) {
  if (!(cd.K > 0.0) || !cd.finite_dimension()) throw std::domain_error("phi_series: requires K > 0, N finite");
  if (!(t > 0.0)) throw std::domain_error("phi_series: t must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("phi_series: tol must be positive");
  if (cd.K * t / (cd.N - 1.0) < kSeriesThreshold)
    throw slow_convergence("phi_series: K t / (N - 1) below the series threshold");
  SeriesTable table;
  table.cd = cd;
  table.t = t;
  int quiet = 0, n = 0;
  for (;; ++n) {
    const double log_c = log_abs_series_coefficient(n, cd, t);
    table.coef.push_back(((n % 2 == 0) ? 1.0 : -1.0) * std::exp(log_c));
    // |P_{2n+1}| <= P_{2n+1}(1) on [-1, 1]
    const double bound = std::exp(log_c + log_gegenbauer_at_one(2 * n + 1, cd.N));
    quiet = bound < 0.5 * tol ? quiet + 1 : 0;
    if (quiet == 2) break;
    if (2 * n + 3 > 200) throw numerical_error("phi_series: no convergence below degree 200");
  }
  for (int k = n + 1; k <= n + 60; ++k)
    table.tail += std::exp(log_abs_series_coefficient(k, cd, t) + log_gegenbauer_at_one(2 * k + 1, cd.N));
  return table;
}

PhiResult eval_series(const SeriesTable& table, double a) {
  const CurvatureDimension& cd = table.cd;
  a = checked_distance(cd, a);
  const double N = cd.N;
  const double x = std::sin(0.5 * std::sqrt(cd.Kbar) * a);
  double p_prev = 1.0, p_cur = (N - 1.0) * x;
  double sum = table.coef[0] * p_cur;
  for (std::size_t n = 1; n < table.coef.size(); ++n) {
    for (int step = 0; step < 2; ++step) {
      const double k = static_cast<double>(2 * n - 1 + step) + 1.0;
      const double next = ((2.0 * k + N - 3.0) / k) * x * p_cur - ((k + N - 3.0) / k) * p_prev;
      p_prev = p_cur;
      p_cur = next;
    }
    sum += table.coef[n] * p_cur;
  }
  return {std::clamp(sum, 0.0, 1.0), PhiMethod::series, table.tail};
}

PhiResult phi_series(const CurvatureDimension& cd, double t, double a, double tol) {
  return eval_series(make_series_table(cd, t, tol), a);
}

double interval_survival(double x, double T, double L) {
  if (!(L > 0.0) || T < 0.0) throw std::domain_error("interval_survival: bad interval or time");
  if (!(x > 0.0 && x < L)) return 0.0;
  if (T == 0.0) return 1.0;
  const double s = std::sqrt(T);
  double p = 0.0;
  if (T <= 0.25 * L * L) {
    // images; |shift| >= 12 s beyond n = 3
    auto cdf = [s](double z) { return 0.5 * erfc(-z / (s * std::numbers::sqrt2)); };
    for (int n = -3; n <= 3; ++n) {
      const double sh = 2.0 * n * L;
      p += cdf(L - x - sh) - cdf(-x - sh) - cdf(L + x - sh) + cdf(x - sh);
    }
  } else {
    const double r = std::numbers::pi * std::numbers::pi * T / (2.0 * L * L);
    for (int k = 1; k <= 61; k += 2)
      p += 4.0 / (k * std::numbers::pi) * std::sin(k * std::numbers::pi * x / L) * std::exp(-k * k * r);
  }
  return std::clamp(p, 0.0, 1.0);
}

PhiResult phi_mixture(const MixtureSamples& ms, double a) {
  if (ms.samples.empty()) throw std::invalid_argument("phi_mixture: no samples");
  double d0;
  if (ms.transform == DisplacementTransform::identity) {
    a = checked_distance(ms.cd, a);
    d0 = a;
  } else {
    if (!(ms.cd.K < 0.0) || !ms.cd.finite_dimension())
      throw std::invalid_argument("phi_mixture: s_kbar_half transform requires K < 0, N finite");
    if (std::isnan(a) || a < 0.0) throw std::domain_error("phi_mixture: negative distance");
    d0 = 2.0 * comparison_fns(ms.cd.Kbar, 0.5 * a).s;
  }
  // For kbar > 0 the argument a/2 + B must also stay below pi / sqrt(kbar).
  const bool two_sided = ms.cd.K > 0.0 && ms.cd.finite_dimension();
  const double L = two_sided ? std::numbers::pi / std::sqrt(ms.cd.Kbar) : kInf;
  std::vector<double> v(ms.samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = ms.samples[i];
    if (!(u > 0.0)) throw std::invalid_argument("phi_mixture: nonpositive sample");
    v[i] = two_sided ? interval_survival(0.5 * d0, 2.0 * u, L) : chi(d0 / (2.0 * std::sqrt(2.0 * u)));
  }
  const MeanSe m = mean_and_se(v);
  return {std::clamp(m.mean, 0.0, 1.0), PhiMethod::mixture_mc, m.std_error};
}

SdeConfig default_mixture_config(double t) { return SdeConfig::for_horizon(t, 100000); }

PhiEvaluator::PhiEvaluator(const CurvatureDimension& cd, double t, double tol, std::optional<SdeConfig> mc)
    : cd_(cd), t_(t), tol_(tol) {
  if (t < 0.0 || std::isnan(t)) throw std::domain_error("phi: negative time");
  if (t == 0.0) {
    method_ = PhiMethod::indicator;
  } else if (closed_form_applies(cd)) {
    method_ = PhiMethod::closed;
  } else if (series_applies(cd, t)) {
    method_ = PhiMethod::series;
    series_ = std::make_shared<const SeriesTable>(make_series_table(cd, t, tol));
  } else {
    method_ = PhiMethod::mixture_mc;
    samples_ = mixture_for(cd, t, mc ? *mc : default_mixture_config(t));
  }
}

PhiResult PhiEvaluator::operator()(double a) const {
  switch (method_) {
    case PhiMethod::indicator:
      return {indicator(checked_distance(cd_, a)), method_, 0.0};
    case PhiMethod::closed:
      return {phi_closed(cd_.K, t_, a), method_, 0.0};
    case PhiMethod::series:
      return eval_series(*series_, a);
    default:
      return phi_mixture(*samples_, checked_distance(cd_, a));
  }
}

PhiResult phi(const CostQuery& q, double tol) { return PhiEvaluator(q.cd, q.t, tol)(q.a); }

Estimate phi_prime_zero(const CurvatureDimension& cd, double t, std::optional<SdeConfig> mc) {
  if (!(t > 0.0)) throw std::domain_error("phi_prime_zero: t must be positive");
  if (closed_form_applies(cd)) return {1.0 / (2.0 * std::sqrt(std::numbers::pi * eta(cd.K, t))), 0.0};
  if (series_applies(cd, t)) {
    // d/da P_{2n+1}(sin(sqrt(kbar) a / 2)) at 0 = (N - 1) C_{2n}^{(N+1)/2}(0) sqrt(kbar) / 2
    const double scale = 0.5 * std::sqrt(cd.Kbar) * (cd.N - 1.0);
    double sum = 0.0;
    int quiet = 0;
    for (int n = 0; 2 * n <= 200; ++n) {
      const double term = series_coefficient(n, cd, t) * gegenbauer(2 * n, cd.N + 2.0, 0.0) * scale;
      sum += term;
      quiet = std::abs(term) <= 1e-17 * std::abs(sum) ? quiet + 1 : 0;
      if (quiet == 2) return {sum, 0.0};
    }
    throw numerical_error("phi_prime_zero: series did not converge");
  }
  // for K > 0 this regime has Kt/(N-1) < 0.005 and the upper-exit term is negligible
  const auto ms = mixture_for(cd, t, mc ? *mc : default_mixture_config(t));
  std::vector<double> v(ms->samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (2.0 * std::sqrt(std::numbers::pi * ms->samples[i]));
  const MeanSe m = mean_and_se(v);
  return {m.mean, m.std_error};
}

double theta_limit(const CurvatureDimension& cd, double a) {
  if (std::isnan(a) || a < 0.0) throw std::domain_error("theta_limit: negative distance");
  if (cd.bounded() && a > cd.Rbar) throw std::domain_error("theta_limit: distance beyond Rbar");
  if (cd.K == 0.0) return a;
  if (!cd.finite_dimension()) return cd.K > 0.0 ? a : chi(0.5 * a * std::sqrt(-cd.K));
  if (cd.K > 0.0) return std::sin(0.5 * std::sqrt(cd.Kbar) * a);
  if (a == 0.0) return 0.0;
  // u = w^2: (2 / Gamma((N-1)/2)) int chi(c w) w^{N-2} e^{-w^2} dw; the weight peaks at sqrt((N-2)/2)
  const double c = std::sqrt(-2.0 * cd.K / (cd.N - 1.0)) * comparison_fns(cd.Kbar, 0.5 * a).s;
  const double p = cd.N - 2.0;
  const double log_norm = std::log(2.0) - std::lgamma(0.5 * (cd.N - 1.0));
  const double peak = std::sqrt(0.5 * p);
  auto f = [&](double w) {
    if (w <= 0.0) return 0.0;
    return chi(c * w) * std::exp(p * std::log(w) - w * w + log_norm);
  };
  const QuadratureResult q = integrate(f, std::max(0.0, peak - 12.0), peak + 12.0, 1e-11);
  if (!q.converged || q.error > 1e-8) throw numerical_error("theta_limit: quadrature did not converge");
  return q.value;
}

double kappa(const CurvatureDimension& cd) {
  if (!cd.finite_dimension()) return std::max(cd.K, 0.0);
  return std::max(cd.N * cd.K / (cd.N - 1.0), 0.0);
}

}  // namespace reflectcost
