#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace berrylab {

/// Scalar field over (time, state).
using Field = std::function<double(double t, double y)>;
/// Function of time only.
using Profile = std::function<double(double t)>;

/// Volatility and drift together with their spatial derivatives.
struct CoefficientField {
  Field sigma;
  Field drift_b;
  Field d_sigma_dy;
  Field d_b_dy;
};

/// Limits of the coefficients as y -> infinity and their time averages
///   sigma_bar(t) = sqrt(1/t * int_0^t sigma_inf(s)^2 ds),
///   b_bar(t)     = 1/t * int_0^t b_inf(s) ds.
/// Empty members are filled in by resolve_limits().
struct LimitProfile {
  Profile sigma_inf;
  Profile b_inf;
  Profile sigma_bar;
  Profile b_bar;
};

struct ModelConstants {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma3 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  /// Left boundary of the state space; -infinity for models on the whole line.
  double l = -std::numeric_limits<double>::infinity();
  /// Exponent q of the Stein-type condition; NaN if no admissible q was found.
  double q = std::numeric_limits<double>::quiet_NaN();
};

/// Constants of the blow-up conditions near a finite left boundary:
///   inf_t b(t,y) >= c1 (y-l)^{-gamma1},  sup_t |d_y b(t,y)| <= c2 (y-l)^{-gamma2}.
struct BoundaryConstants {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct ModelSpec {
  std::string name;
  CoefficientField coefficients;
  LimitProfile limits;
  ModelConstants constants;
  std::optional<BoundaryConstants> boundary;
  bool time_independent = true;
  /// Assumption clauses the constructor asserts; see certify_assumptions().
  std::vector<std::string> claimed_clauses;
  std::vector<std::string> warnings;

  bool has_finite_boundary() const { return constants.l > -std::numeric_limits<double>::infinity(); }
};

/// Fills missing limit profiles: sigma_inf(t) = sigma(t, 1e8) (likewise b),
/// closed-form time averages for time-independent models and composite
/// Gauss-Legendre quadrature otherwise.
ModelSpec resolve_limits(ModelSpec model);

/// The comparison process dY = sigma(t,Y) dB + b1 dt as a model of its own.
/// For a finite boundary the volatility is evaluated at max(y, l + floor).
ModelSpec comparison_model(const ModelSpec& model, double boundary_floor = 0.0);

}  // namespace berrylab
