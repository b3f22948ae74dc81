#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace reflectcost {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Curvature-dimension pair (K, N) with N in [2, inf].
struct CurvatureDimension {
  double K = 0.0;
  double N = kInf;
  double Rbar = kInf;
  double Kbar = 0.0;
  bool kbar_applicable = false;

  CurvatureDimension() = default;
  CurvatureDimension(double K, double N);

  bool finite_dimension() const { return kbar_applicable; }
  bool bounded() const { return std::isfinite(Rbar); }
};

template <typename Scalar>
struct ComparisonValues {
  Scalar s;
  Scalar c;

  // s/c; throws at a zero of c.
  Scalar tan_ratio() const {
    if (c == Scalar(0) || !std::isfinite(static_cast<double>(s / c)))
      throw std::domain_error("tan_ratio: pole of the comparison function");
    return s / c;
  }
};

/// s_k(theta), c_k(theta): trigonometric for k > 0, linear for k = 0,
/// hyperbolic for k < 0.
template <typename Scalar>
ComparisonValues<Scalar> comparison_fns(Scalar kbar, Scalar theta) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  if (kbar > Scalar(0)) {
    const Scalar r = sqrt(kbar);
    return {sin(r * theta) / r, cos(r * theta)};
  }
  if (kbar < Scalar(0)) {
    const Scalar r = sqrt(-kbar);
    return {sinh(r * theta) / r, cosh(r * theta)};
  }
  return {theta, Scalar(1)};
}

template <typename Scalar>
Scalar tan_k(Scalar kbar, Scalar theta) {
  using std::sqrt;
  if (kbar > Scalar(0)) {
    const Scalar r = sqrt(kbar);
    return std::tan(r * theta) / r;
  }
  if (kbar < Scalar(0)) {
    const Scalar r = sqrt(-kbar);
    return std::tanh(r * theta) / r;
  }
  return theta;
}

namespace detail {

// Cody's rational Chebyshev approximations for erf/erfc.
// Returns erf(y) when want_erfc is false, erfc(y) otherwise, for y >= 0.
template <typename Scalar>
Scalar cody_erf(Scalar y, bool want_erfc) {
  static constexpr double a[5] = {3.1611237438705656, 113.864154151050156, 377.485237685302021,
                                  3209.37758913846947, .185777706184603153};
  static constexpr double b[4] = {23.6012909523441209, 244.024637934444173, 1282.61652607737228,
                                  2844.23683343917062};
  static constexpr double c[9] = {.564188496988670089, 8.88314979438837594, 66.1191906371416295,
                                  298.635138197400131, 881.95222124176909,  1712.04761263407058,
                                  2051.07837782607147, 1230.33935479799725, 2.15311535474403846e-8};
  static constexpr double d[8] = {15.7449261107098347, 117.693950891312499, 537.181101862009858,
                                  1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
                                  3439.36767414372164, 1230.33935480374942};
  static constexpr double p[6] = {.305326634961232344, .360344899949804439, .125781726111229246,
                                  .0160837851487422766, 6.58749161529837803e-4, .0163153871373020978};
  static constexpr double q[5] = {2.56852019228982242, 1.87295284992346047, .527905102951428412,
                                  .0605183413124413191, .00233520497626869185};
  using std::exp;
  using std::floor;

  if (y <= Scalar(0.46875)) {
    const Scalar ysq = y > Scalar(1.11e-16) ? y * y : Scalar(0);
    Scalar num = Scalar(a[4]) * ysq;
    Scalar den = ysq;
    for (int i = 0; i < 3; ++i) {
      num = (num + Scalar(a[i])) * ysq;
      den = (den + Scalar(b[i])) * ysq;
    }
    const Scalar erf_value = y * (num + Scalar(a[3])) / (den + Scalar(b[3]));
    return want_erfc ? Scalar(1) - erf_value : erf_value;
  }

  Scalar erfc_value;
  if (y <= Scalar(4)) {
    Scalar num = Scalar(c[8]) * y;
    Scalar den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + Scalar(c[i])) * y;
      den = (den + Scalar(d[i])) * y;
    }
    erfc_value = (num + Scalar(c[7])) / (den + Scalar(d[7]));
  } else if (y >= Scalar(26.543)) {
    erfc_value = Scalar(0);
  } else {
    const Scalar ysq = Scalar(1) / (y * y);
    Scalar num = Scalar(p[5]) * ysq;
    Scalar den = ysq;
    for (int i = 0; i < 4; ++i) {
      num = (num + Scalar(p[i])) * ysq;
      den = (den + Scalar(q[i])) * ysq;
    }
    erfc_value = ysq * (num + Scalar(p[4])) / (den + Scalar(q[4]));
    erfc_value = (Scalar(0.56418958354775628695) - erfc_value) / y;
  }
  if (erfc_value != Scalar(0)) {
    // exp(-y^2) split to keep the rounding of y^2 out of the exponent
    const Scalar ysq = floor(y * Scalar(16)) / Scalar(16);
    const Scalar del = (y - ysq) * (y + ysq);
    erfc_value *= exp(-ysq * ysq) * exp(-del);
  }
  return want_erfc ? erfc_value : Scalar(1) - erfc_value;
}

}  // namespace detail

template <typename Scalar>
Scalar erf(Scalar x) {
  const Scalar v = detail::cody_erf(x < Scalar(0) ? -x : x, false);
  return x < Scalar(0) ? -v : v;
}

template <typename Scalar>
Scalar erfc(Scalar x) {
  if (x < Scalar(0)) return Scalar(2) - detail::cody_erf(-x, true);
  return detail::cody_erf(x, true);
}

/// chi(r) = P(|Z| <= r) for a standard normal Z.
template <typename Scalar>
Scalar chi(Scalar r) {
  if (std::isnan(static_cast<double>(r)) || r < Scalar(0))
    throw std::domain_error("chi: negative argument");
  if (std::isinf(static_cast<double>(r))) return Scalar(1);
  return reflectcost::erf(r / Scalar(std::numbers::sqrt2));
}

/// (e^{2Kt} - 1) / (2K), continuous at K = 0.
template <typename Scalar>
Scalar eta(Scalar K, Scalar t) {
  if (t < Scalar(0)) throw std::domain_error("eta: negative time");
  if (std::abs(K) * t < Scalar(1e-8)) return t + K * t * t;
  return std::expm1(Scalar(2) * K * t) / (Scalar(2) * K);
}

/// Drift of the comparison diffusion; throws for |u| >= Rbar.
double psi(const CurvatureDimension& cd, double u);

/// Gegenbauer polynomial of parameter (N-1)/2, normalized so P_1 = (N-1)x.
template <typename Scalar>
Scalar gegenbauer(int n, Scalar N, Scalar x) {
  if (n < 0 || n > 200) throw std::domain_error("gegenbauer: degree outside [0, 200]");
  if (n == 0) return Scalar(1);
  Scalar prev = Scalar(1);
  Scalar cur = (N - Scalar(1)) * x;
  for (int k = 2; k <= n; ++k) {
    const Scalar next = ((Scalar(2 * k) + N - Scalar(3)) / Scalar(k)) * x * cur -
                        ((Scalar(k) + N - Scalar(3)) / Scalar(k)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// All P_0..P_n at x.
template <typename Scalar>
std::vector<Scalar> gegenbauer_all(int n, Scalar N, Scalar x) {
  if (n < 0 || n > 200) throw std::domain_error("gegenbauer: degree outside [0, 200]");
  std::vector<Scalar> out(n + 1);
  out[0] = Scalar(1);
  if (n >= 1) out[1] = (N - Scalar(1)) * x;
  for (int k = 2; k <= n; ++k)
    out[k] = ((Scalar(2 * k) + N - Scalar(3)) / Scalar(k)) * x * out[k - 1] -
             ((Scalar(k) + N - Scalar(3)) / Scalar(k)) * out[k - 2];
  return out;
}

/// log P_n(1) = log binom(n + N - 2, n).
template <typename Scalar>
Scalar log_gegenbauer_at_one(int n, Scalar N) {
  using std::lgamma;
  return lgamma(Scalar(n) + N - Scalar(1)) - lgamma(Scalar(n) + Scalar(1)) - lgamma(N - Scalar(1));
}

template <typename Scalar>
Scalar log_beta(Scalar x, Scalar y) {
  using std::lgamma;
  return lgamma(x) + lgamma(y) - lgamma(x + y);
}

/// Coefficient of P_{2n+1} in the spectral expansion of phi (K > 0, N finite).
double series_coefficient(int n, const CurvatureDimension& cd, double t);

/// log|series_coefficient|; the sign is (-1)^n.
double log_abs_series_coefficient(int n, const CurvatureDimension& cd, double t);

/// Mean and standard error of a sample.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

}  // namespace reflectcost
