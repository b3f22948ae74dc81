#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "reflectcost/specfun.hpp"

namespace reflectcost {

/// Raised when an iteration fails to converge or a scheme leaves its domain.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SdeConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t n_paths = 100000;
  std::uint64_t master_seed = 0x5eedULL;
  /// Distance from +-Rbar where capping engages; 0 selects 0.05 * Rbar.
  double boundary_margin = 0.0;
  /// 0 selects 50 / sqrt(dt).
  double drift_cap = 0.0;
  /// Stop paths at their first passage through 0.
  bool absorb_at_zero = true;
  /// Drive with negated increments (mirror image of the default noise).
  bool mirror_noise = false;

  /// dt = 1e-3 * min(t, 1), horizon = t.
  static SdeConfig for_horizon(double t, std::size_t n_paths = 100000, std::uint64_t seed = 0x5eedULL);

  void validate(const CurvatureDimension& cd) const;
  std::size_t steps() const;
  double step() const { return horizon / static_cast<double>(steps()); }
  double margin(const CurvatureDimension& cd) const;
  double cap() const;
};

struct PathEnsemble {
  Eigen::VectorXd times;
  /// n_paths x grid; NaN after absorption.
  Eigen::MatrixXd values;
  std::vector<std::optional<double>> absorbed_at;
  std::vector<std::uint64_t> seed_trace;
};

enum class DisplacementTransform { identity, s_kbar_half };

struct MixtureSamples {
  DisplacementTransform transform = DisplacementTransform::identity;
  std::vector<double> samples;
  double t = 0.0;
  CurvatureDimension cd;
};

/// Euler-Maruyama paths of d rho = 2 sqrt(2) d beta + psi(rho) dt.
PathEnsemble simulate_rho(const CurvatureDimension& cd, double a, const SdeConfig& cfg);

/// rho(horizon) per path, without storing the paths; absorbed paths report 0.
Eigen::VectorXd simulate_rho_terminal(const CurvatureDimension& cd, double a, const SdeConfig& cfg);

/// P[inf_{s<=t} rho(s) > 0] with the Brownian-bridge crossing correction.
Estimate survival_probability(const CurvatureDimension& cd, double a, double t, SdeConfig cfg);

/// Samples of int_0^t c_kbar(theta(s))^{-2} ds.
MixtureSamples sample_zeta(const CurvatureDimension& cd, double t, std::size_t n, SdeConfig cfg);

/// Samples of int_0^t theta'(s)^2 ds for the geometric Brownian route (K < 0).
MixtureSamples sample_zeta_hyperbolic(double K, double N, double t, std::size_t n, SdeConfig cfg);

struct ConstancyPoint {
  double s = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
};

/// E[phi_{t-s}(rho(s)); tau_0 > s] along one ensemble, for each s in s_grid.
std::vector<ConstancyPoint> constancy_statistic(const CurvatureDimension& cd, double a, double t,
                                                const std::vector<double>& s_grid, SdeConfig cfg);

}  // namespace reflectcost
