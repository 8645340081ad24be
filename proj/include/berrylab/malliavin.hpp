#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "berrylab/model.hpp"
#include "berrylab/numerics.hpp"
#include "berrylab/sde.hpp"

namespace berrylab {

/// exp() arguments beyond this are treated as an assumption violation.
inline constexpr double kMaxExponent = 700.0;

/// Z_k = sum_{j<k} [d_y sigma dB_j + (d_y b - (d_y sigma)^2 / 2) dt], per path,
/// stored path-major with n_steps + 1 nodes per path.
struct ZTrajectories {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::vector<double> z;

  double at(std::size_t n, std::size_t k) const { return z[n * (n_steps + 1) + k]; }
  std::span<const double> row(std::size_t n) const {
    return {z.data() + n * (n_steps + 1), n_steps + 1};
  }
};

ZTrajectories z_process(const PathEnsemble& ens, const ModelSpec& model);

/// sum_k (e^{Z_M - Z_k} sigma(t_k, X_k) - sigma_inf(t_k))^2 dt per path.
/// Throws exponent_overflow if Z_M - Z_k exceeds kMaxExponent.
std::vector<double> ds_norm_sq(const PathEnsemble& ens, const ModelSpec& model,
                               const ZTrajectories& z);

/// sum_k sigma_inf(t_k) (e^{Z_M - Z_k} sigma(t_k, X_k) - sigma_inf(t_k)) dt per path.
std::vector<double> stein_pairing(const PathEnsemble& ens, const ModelSpec& model,
                                  const ZTrajectories& z);

struct MalliavinPathRecord {
  std::vector<double> z_traj;
  double ds_norm_sq = 0.0;
  double pairing = 0.0;
  double r_term = 0.0;        // S_t / sigma_bar(t)
  double s_stochastic = 0.0;  // sum (sigma - sigma_inf) dB
  double s_drift = 0.0;       // sum (b - b_inf) dt
};

/// Full records from a stored ensemble; overflow is an error.
std::vector<MalliavinPathRecord> malliavin_path_records(const PathEnsemble& ens,
                                                        const ModelSpec& model);

/// Per-path scalars at one horizon. Paths whose exponent overflowed are
/// flagged and excluded from every summary.
struct MalliavinSample {
  double horizon = 0.0;
  std::vector<double> ds_norm_sq;
  std::vector<double> pairing;
  std::vector<double> r_term;
  std::vector<double> s_stochastic;
  std::vector<double> s_drift;
  std::vector<double> f_values;    // the scaled statistic of each path
  std::vector<double> z_terminal;  // Z_M
  std::vector<double> z_mid;       // Z at node M/2
  std::vector<std::uint8_t> overflowed;
  std::size_t overflow_count = 0;
};

/// Simulates and accumulates in one pass without storing trajectories.
MalliavinSample simulate_malliavin(const ModelSpec& model, const SimConfig& cfg);

/// Same quantities from a stored ensemble.
MalliavinSample malliavin_sample(const PathEnsemble& ens, const ModelSpec& model);

/// Values of paths that did not overflow.
std::vector<double> kept_values(const MalliavinSample& s, std::span<const double> values);

struct SteinBudget {
  double horizon = 0.0;
  std::size_t n = 0;               // paths used
  std::size_t overflowed = 0;      // paths excluded
  double mean_ds_norm_sq = 0.0;
  double mean_abs_pairing = 0.0;
  MeanCi pairing_term;             // (a) mean|pairing| / (t sigma_bar)
  MeanCi derivative_term;          // (b) mean of 2 + 2 ds_norm_sq / (sigma1^2 t)
  MeanCi mean_term;                // (c) |mean F_t| sqrt(t)
  MeanCi r_mean;                   // (d) mean of R_t
  MeanCi r_variance;               // (d) variance of R_t
};

SteinBudget stein_budget(const MalliavinSample& sample, const ModelSpec& model);
SteinBudget stein_budget(const PathEnsemble& ens, const ModelSpec& model);

/// Per-horizon CSV: t, n, overflowed, mean_ds_norm_sq, mean_abs_pairing and
/// the budget terms (a)-(d) with their interval ends.
void write_budget_csv(std::span<const SteinBudget> rows, std::ostream& out);

}  // namespace berrylab
