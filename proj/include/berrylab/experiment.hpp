#pragma once

#include <optional>
#include <string>
#include <vector>

#include "berrylab/config.hpp"
#include "berrylab/distances.hpp"
#include "berrylab/model.hpp"
#include "berrylab/report_io.hpp"
#include "berrylab/sde.hpp"

namespace berrylab {

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<DistanceEstimate> distances;
  std::optional<RateFit> rate;
  Table table;                          // the per-horizon results
  std::vector<std::string> artifacts;   // files written, relative to output_dir
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  std::string error;                    // set on a partial report

  bool passed() const;
};

/// Tolerance bands applied by the verdicts.
namespace thresholds {
inline constexpr double kExactNormalDistance = 0.01;
inline constexpr double kBerryEsseenSlopeLow = -0.65;
inline constexpr double kBerryEsseenSlopeHigh = -0.35;
inline constexpr double kBerryEsseenMinR2 = 0.9;
inline constexpr double kLogRateSlopeLow = -0.7;
inline constexpr double kLogRateSlopeHigh = -0.2;
inline constexpr double kCltSlopeMax = -0.4;
inline constexpr double kLlnTolerance = 0.05;
inline constexpr double kBoundedRatio = 2.0;
inline constexpr double kGrowthBand = 0.2;
inline constexpr double kEstimatorOrderingSlack = 0.05;
}  // namespace thresholds

/// Simulation settings for horizon index i of an experiment: steps chosen
/// so that dt <= 1/steps_per_unit_time, seed derive_key(seed, i).
SimConfig horizon_config(const ExperimentConfig& cfg, std::size_t index);

/// Builds the configured model.
ModelSpec config_model(const ExperimentConfig& cfg);

/// Runs the configured experiment, writes its CSVs, SVG and manifest.json
/// into cfg.output_dir, and returns the report. On failure a partial
/// manifest carrying the error is written before the error propagates.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Subcommand drivers; same output conventions as run_experiment.
ExperimentReport run_simulate(const ExperimentConfig& cfg);
ExperimentReport run_distance(const ExperimentConfig& cfg,
                              const std::optional<std::string>& sample_path = {});
ExperimentReport run_rate(const ExperimentConfig& cfg,
                          const std::optional<std::string>& distances_path = {});

/// Writes the report's per-horizon table (header only if empty).
void emit_csv(const ExperimentReport& report, const std::string& path);

/// JSON manifest: config echo, artifacts, verdicts, warnings, wall clock.
std::string render_manifest(const ExperimentReport& report);

}  // namespace berrylab
