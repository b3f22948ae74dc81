#include "reflectcost/specfun.hpp"

#include <string>

namespace reflectcost {

CurvatureDimension::CurvatureDimension(double K_, double N_) : K(K_), N(N_) {
  if (!std::isfinite(K_)) throw std::invalid_argument("K must be finite");
  if (std::isnan(N_) || N_ < 2.0) throw std::invalid_argument("N must lie in [2, inf]");
  kbar_applicable = std::isfinite(N_);
  Kbar = kbar_applicable ? K_ / (N_ - 1.0) : 0.0;
  Rbar = (kbar_applicable && K_ > 0.0) ? std::numbers::pi * std::sqrt((N_ - 1.0) / K_) : kInf;
}

double psi(const CurvatureDimension& cd, double u) {
  const double m = std::abs(u);
  if (!(m < cd.Rbar)) throw std::domain_error("psi: |u| >= Rbar");
  const double v = cd.finite_dimension() ? -2.0 * cd.K * tan_k(cd.Kbar, 0.5 * m) : -cd.K * m;
  return u < 0.0 ? -v : v;
}

double log_abs_series_coefficient(int n, const CurvatureDimension& cd, double t) {
  if (!(cd.K > 0.0) || !cd.finite_dimension())
    throw std::domain_error("series_coefficient: requires K > 0 and N finite");
  if (n < 0) throw std::domain_error("series_coefficient: negative index");
  const double N = cd.N;
  const double nn = n;
  return -(2.0 * nn + 1.0) * (2.0 * nn + N) * cd.K * t / (N - 1.0) + std::log(4.0 * nn + N + 1.0) -
         std::log(std::numbers::pi * (2.0 * nn + N)) + log_beta(0.5 * (N - 1.0), nn + 0.5);
}

double series_coefficient(int n, const CurvatureDimension& cd, double t) {
  const double mag = std::exp(log_abs_series_coefficient(n, cd, t));
  return (n % 2 == 0) ? mag : -mag;
}

}  // namespace reflectcost
