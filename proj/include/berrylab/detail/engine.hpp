#pragma once

// Path-level Euler-Maruyama engine shared by the ensemble, streaming and
// Monte Carlo estimators. Each path draws its increments from the stream
// (derive_key(seed, n), lane 0); Brownian-bridge refinements for substeps
// come from lane 1, so interventions never shift the main increments.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "berrylab/error.hpp"
#include "berrylab/model.hpp"
#include "berrylab/parallel.hpp"
#include "berrylab/rng.hpp"
#include "berrylab/sde.hpp"

namespace berrylab::detail {

[[noreturn]] inline void throw_bad_coefficient(const char* which, double t, double y, double v) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "model evaluation: " << which << "(t=" << t << ", y=" << y << ") = " << v
      << " is not finite";
  throw Error(ErrorKind::model_evaluation, msg.str());
}

struct PathCounters {
  std::uint32_t interventions = 0;
  std::uint32_t retries = 0;
};

class StepAdvancer {
 public:
  StepAdvancer(const ModelSpec& model, const SimConfig& cfg, double floor)
      : sigma_(model.coefficients.sigma),
        drift_(model.coefficients.drift_b),
        finite_boundary_(model.has_finite_boundary()),
        floor_level_(model.constants.l + floor),
        substep_(cfg.scheme == Scheme::euler_substep) {}

  double sigma(double t, double y) const {
    const double v = sigma_(t, y);
    if (!std::isfinite(v)) throw_bad_coefficient("sigma", t, y, v);
    return v;
  }
  double drift(double t, double y) const {
    const double v = drift_(t, y);
    if (!std::isfinite(v)) throw_bad_coefficient("b", t, y, v);
    return v;
  }

  bool finite_boundary() const { return finite_boundary_; }
  double floor_level() const { return floor_level_; }

  /// One grid step from (t, x) with increment db over dt, given the
  /// coefficients already evaluated at (t, x).
  double advance(double t, double x, double dt, double db, double s, double b,
                 std::uint64_t bridge_key, std::uint64_t step, PathCounters& counters) const {
    const double proposal = x + s * db + b * dt;
    if (!finite_boundary_ || proposal > floor_level_) return proposal;
    return refine(t, x, dt, db, bridge_key, step, 1, 0, counters);
  }

 private:
  double refine(double t, double x, double h, double db, std::uint64_t bridge_key,
                std::uint64_t step, std::uint64_t node, int depth, PathCounters& counters) const {
    if (!substep_ || depth >= kMaxHalvings) {
      ++counters.interventions;
      return floor_level_;
    }
    ++counters.retries;
    const double xi = normal_pair(bridge_key, 1, (step << 22) | node)[0];
    const double half = 0.5 * h;
    const double db1 = 0.5 * db + 0.5 * std::sqrt(h) * xi;
    const double db2 = db - db1;
    const double x1 = half_step(t, x, half, db1, bridge_key, step, 2 * node, depth + 1, counters);
    return half_step(t + half, x1, half, db2, bridge_key, step, 2 * node + 1, depth + 1, counters);
  }

  double half_step(double t, double x, double h, double db, std::uint64_t bridge_key,
                   std::uint64_t step, std::uint64_t node, int depth,
                   PathCounters& counters) const {
    const double proposal = x + sigma(t, x) * db + drift(t, x) * h;
    if (proposal > floor_level_) return proposal;
    return refine(t, x, h, db, bridge_key, step, node, depth, counters);
  }

  const Field& sigma_;
  const Field& drift_;
  bool finite_boundary_;
  double floor_level_;
  bool substep_;
};

struct EngineTotals {
  std::vector<std::uint32_t> interventions;
  std::vector<std::uint32_t> retries;

  std::size_t total_interventions() const {
    std::size_t s = 0;
    for (auto v : interventions) s += v;
    return s;
  }
  std::size_t total_retries() const {
    std::size_t s = 0;
    for (auto v : retries) s += v;
    return s;
  }
};

void check_intervention_rate(const EngineTotals& totals, const SimConfig& cfg);

/// Runs all paths. make_observer(n) returns an object with
///   void step(std::size_t k, double t, double x, double y, double db, double sigma, double b);
///   void finish(double x, double y);
/// Observers for different paths must write to disjoint storage.
template <class MakeObserver>
EngineTotals run_paths(const ModelSpec& model, const SimConfig& cfg, MakeObserver&& make_observer) {
  const double floor = validate_config(model, cfg);
  const StepAdvancer advancer(model, cfg, floor);
  const Field& sigma = model.coefficients.sigma;
  const double b1 = model.constants.b1;
  const double dt = cfg.dt();
  const double sqrt_dt = std::sqrt(dt);
  const double y_floor = advancer.floor_level();
  const bool track = cfg.track_comparison;

  EngineTotals totals;
  totals.interventions.assign(cfg.n_paths, 0);
  totals.retries.assign(cfg.n_paths, 0);

  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      const std::uint64_t key = derive_key(cfg.seed, n);
      GaussianStream noise(key, 0);
      auto observer = make_observer(n);
      PathCounters counters;
      double x = cfg.x0, y = cfg.x0;
      for (std::size_t k = 0; k < cfg.n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double db = sqrt_dt * noise.next();
        const double s = advancer.sigma(t, x);
        const double b = advancer.drift(t, x);
        observer.step(k, t, x, y, db, s, b);
        x = advancer.advance(t, x, dt, db, s, b, key, k, counters);
        if (track) {
          const double y_eval = advancer.finite_boundary() && y < y_floor ? y_floor : y;
          const double sy = sigma(t, y_eval);
          if (!std::isfinite(sy)) throw_bad_coefficient("sigma", t, y_eval, sy);
          y = y + sy * db + b1 * dt;
        }
      }
      observer.finish(x, y);
      totals.interventions[n] = counters.interventions;
      totals.retries[n] = counters.retries;
    }
  }, 16);

  check_intervention_rate(totals, cfg);
  return totals;
}

}  // namespace berrylab::detail
