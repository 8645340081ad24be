#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "berrylab/model.hpp"

namespace berrylab {

enum class Scheme { euler, euler_substep };

struct SimConfig {
  double horizon = 1.0;
  std::size_t n_steps = 64;
  std::size_t n_paths = 1;
  std::uint64_t seed = 42;
  double x0 = 1.0;
  /// Offset above a finite boundary l below which a step is intervened on;
  /// default 1e-6 * max(1, x0 - l).
  std::optional<double> boundary_floor;
  Scheme scheme = Scheme::euler_substep;
  /// Simulate the comparison process Y alongside X.
  bool track_comparison = true;
  unsigned threads = 0;

  double dt() const { return horizon / static_cast<double>(n_steps); }
};

/// Largest admissible time step.
inline constexpr double kMaxTimeStep = 1.0 / 64.0;
/// Fraction of steps that may be clamped at the boundary before a run fails.
inline constexpr double kMaxInterventionRate = 0.01;
/// Maximum number of step halvings for the euler_substep scheme.
inline constexpr int kMaxHalvings = 20;

/// Validates cfg against model and returns the effective boundary floor
/// (0 for models without a finite boundary).
double validate_config(const ModelSpec& model, const SimConfig& cfg);

/// N discretized trajectories of X, Y and the driving increments, stored
/// path-major: x(n, k) is path n at grid node k.
struct PathEnsemble {
  std::vector<double> grid;  // t_0 = 0 < ... < t_M = horizon
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  double x0 = 0.0;
  double dt = 0.0;
  std::vector<double> x_paths;                // n_paths * (n_steps + 1)
  std::vector<double> y_paths;                // empty unless tracked
  std::vector<double> brownian_increments;    // n_paths * n_steps
  std::vector<std::uint32_t> boundary_interventions;  // per path
  std::vector<std::uint32_t> substep_retries;         // per path

  double horizon() const { return grid.empty() ? 0.0 : grid.back(); }
  double x(std::size_t n, std::size_t k) const { return x_paths[n * (n_steps + 1) + k]; }
  double y(std::size_t n, std::size_t k) const { return y_paths[n * (n_steps + 1) + k]; }
  double db(std::size_t n, std::size_t k) const { return brownian_increments[n * n_steps + k]; }
  std::span<const double> x_row(std::size_t n) const {
    return {x_paths.data() + n * (n_steps + 1), n_steps + 1};
  }
  std::span<const double> db_row(std::size_t n) const {
    return {brownian_increments.data() + n * n_steps, n_steps};
  }
};

/// Euler-Maruyama simulation of dX = sigma dB + b dt with the comparison
/// process driven by the same increments.
PathEnsemble simulate_ensemble(const ModelSpec& model, const SimConfig& cfg);

/// Path-major CSV export: path,step,time,x,y,db (db empty on the last node).
void write_ensemble_csv(const PathEnsemble& ens, std::ostream& out);

struct ScaledSample {
  double horizon = 0.0;
  std::vector<double> f_values;    // (X_t - x0 - t b_bar(t)) / (sigma_bar(t) sqrt(t))
  std::vector<double> g_values;    // sum_k sigma_inf(t_k) dB_k / (sigma_bar(t) sqrt(t))
  std::vector<double> x_terminal;
  std::size_t interventions = 0;
  std::size_t substep_retries = 0;
};

ScaledSample scaled_statistic(const PathEnsemble& ens, const ModelSpec& model);

/// Same statistic computed on the fly without storing trajectories; equals
/// scaled_statistic(simulate_ensemble(model, cfg), model) bit for bit.
ScaledSample simulate_scaled(const ModelSpec& model, const SimConfig& cfg);

struct LlnResidual {
  std::vector<double> residuals;  // X_t / t - b_bar(t)
  double mean = 0.0;
  double std_dev = 0.0;
};

LlnResidual lln_residual(const PathEnsemble& ens, const ModelSpec& model);
/// From terminal states only (e.g. a ScaledSample).
LlnResidual lln_residual(std::span<const double> x_terminal, double horizon, const ModelSpec& model);

/// (mean over paths of |f - g|^p)^{1/p}, p in [1, 8].
double clt_residual_moment(const ScaledSample& sample, double p);

}  // namespace berrylab
