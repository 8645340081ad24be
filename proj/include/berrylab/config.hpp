#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace berrylab {

enum class ExperimentKind { berry_esseen, clt_rate, lln, malliavin_regimes, bounds_suite, log_rate };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

/// Experiment description read from an INI-style document with sections
/// [experiment], [model], [simulation] and [output].
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::berry_esseen;
  std::string model_name;
  std::map<std::string, double> model_params;
  std::vector<double> horizons;
  std::size_t n_paths = 100000;
  std::size_t steps_per_unit_time = 64;
  std::uint64_t seed = 42;
  double x0 = 1.0;
  std::vector<std::string> estimators = {"kolmogorov"};
  double moment_p = 2.0;                 // clt_rate
  std::size_t bootstrap_resamples = 500;
  unsigned threads = 0;
  std::string output_dir = "out";
};

/// Parses and validates a config document. Errors are ErrorKind::parse and
/// name the offending line and key.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::string& path);

/// The document parse_config would read back into `cfg`.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace berrylab
