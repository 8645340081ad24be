#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace berrylab {

enum class DistanceKind { kolmogorov, tv_scheffe };

std::string_view to_string(DistanceKind kind);

struct DistanceEstimate {
  DistanceKind kind = DistanceKind::kolmogorov;
  double t = std::numeric_limits<double>::quiet_NaN();  // horizon, if known
  std::size_t n = 0;
  double value = 0.0;
  double ci_low = 0.0;   // bootstrap 95% percentile interval,
  double ci_high = 0.0;  // widened to contain value
  double bandwidth = std::numeric_limits<double>::quiet_NaN();  // tv only
};

struct BootstrapOptions {
  /// 0 disables resampling; the CI then collapses to the point estimate.
  std::size_t resamples = 500;
  std::uint64_t seed = 42;
  unsigned threads = 0;
};

/// sup_y |F_n(y) - Phi(y)| against the standard normal CDF. The sample
/// need not be sorted.
DistanceEstimate kolmogorov_distance(std::span<const double> sample,
                                     const BootstrapOptions& boot = {});

/// Number of grid points of the Scheffe estimator.
inline constexpr std::size_t kTvGridPoints = 2048;

/// Silverman-type bandwidth 0.9 min(sd, IQR/1.34) n^{-1/5}.
double silverman_bandwidth(std::span<const double> sample);

/// Half the L1 distance between a Gaussian kernel density estimate and
/// the standard normal density.
DistanceEstimate tv_scheffe(std::span<const double> sample, std::optional<double> bandwidth = {},
                            const BootstrapOptions& boot = {});

struct RatePoint {
  double t = 0.0;
  double distance = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct RateFit {
  std::vector<double> horizons;
  std::vector<double> distances;
  double slope = 0.0;
  double intercept = 0.0;  // log of the fitted constant
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  double r2 = 0.0;
};

/// Weighted least squares of log distance on log t with weights
/// 1/(ci_high - ci_low)^2; unit weights when any interval is degenerate.
RateFit rate_fit(std::span<const RatePoint> points);

RatePoint to_rate_point(const DistanceEstimate& d);

/// Columns kind,t,n,value,ci_low,ci_high,bandwidth,slope,slope_lo,slope_hi,r2;
/// one row per estimate, then one "rate_fit" row if a fit is given.
void write_distance_csv(std::span<const DistanceEstimate> estimates, const RateFit* fit,
                        std::ostream& out);

}  // namespace berrylab
