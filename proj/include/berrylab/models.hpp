#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "berrylab/model.hpp"

namespace berrylab {

/// sigma = sigma0, b = b0. F_t is exactly standard normal.
ModelSpec constant_model(double sigma0, double b0);

/// Bounded coefficients with power-law approach to their limits:
///   sigma(y) = sigma_inf + s3 (1 + max(y,0)^2)^{-alpha/2}
///   b(y)     = b_inf     + b3 (1 + max(y,0)^2)^{-beta/2}
ModelSpec perturbed_model(double sigma_inf, double b_inf, double s3, double b3, double alpha,
                          double beta);

/// Radial part of Brownian motion on d-dimensional hyperbolic space:
/// sigma = 1, b = (d-1)/2 coth y, l = 0.
ModelSpec hyperbolic_radial(int d);

/// Whether the relaxed boundary route applies: 2 c1 / sigma2^2 > 3 and
/// 1 < gamma2 < 1 + (2 c1 / sigma2^2 - 3) / 4.
bool relaxed_boundary_applicable(const ModelSpec& model);

/// Test fixture outside the assumption classes: b = kappa y, sigma = sigma0.
/// The first-variation exponent is the deterministic kappa t.
ModelSpec linear_drift_test_model(double kappa, double sigma0);

/// Builds a registered family from its name ("constant", "perturbed",
/// "hyperbolic") and numeric parameters; missing parameters take defaults.
ModelSpec make_model(const std::string& name, const std::map<std::string, double>& params);

struct ProbeGrid {
  /// Distance of the first y node above a finite boundary.
  double boundary_offset = 1e-3;
  /// Lower end of the y range for models on the whole line.
  double y_min_unbounded = -10.0;
  double y_max = 1e6;
  std::size_t n_y = 400;
  double t_max = 100.0;
  std::size_t n_t = 5;

  std::size_t nodes() const { return n_y * n_t; }
};

enum class Relation { greater, less };

struct ClauseCheck {
  std::string clause;
  double measured = 0.0;
  double required = 0.0;
  Relation relation = Relation::greater;
  double margin = 0.0;  // measured - required
  bool pass = false;
};

/// Slack by which a passing margin must clear its bound.
inline constexpr double kClauseSlack = 1e-9;

struct AssumptionReport {
  std::string grid_description;
  double sigma1 = 0.0, sigma2 = 0.0;          // min / max of sigma on the grid
  double b1 = 0.0, b2 = 0.0;                  // min / max of b on the grid
  double alpha_hat = 0.0, sigma3_hat = 0.0;   // decay fit of sup_t |d_y sigma|
  double beta_hat = 0.0, b3_hat = 0.0;        // decay fit of sup_t |d_y b|
  double stein_condition_margin = 0.0;        // sup LHS - sigma1^2 b1^2 / 2 at best q
  double best_q = 0.0;
  std::vector<ClauseCheck> clauses;

  const ClauseCheck* find(const std::string& clause) const;
  bool passes(const std::string& clause) const;
  std::vector<std::string> passing_clauses() const;
};

/// Grid of exponents q searched for the Stein-type condition.
std::vector<double> stein_q_grid();

AssumptionReport certify_assumptions(const ModelSpec& model, const ProbeGrid& probe = {});

/// CSV with columns clause,measured,required,margin,verdict.
void write_assumption_csv(const AssumptionReport& report, std::ostream& out);

}  // namespace berrylab
