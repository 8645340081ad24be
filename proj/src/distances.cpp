#include "berrylab/distances.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "berrylab/error.hpp"
#include "berrylab/numerics.hpp"
#include "berrylab/parallel.hpp"
#include "berrylab/rng.hpp"

namespace berrylab {

std::string_view to_string(DistanceKind kind) {
  return kind == DistanceKind::kolmogorov ? "kolmogorov" : "tv_scheffe";
}

namespace {

// Stream tags separating the bootstrap draws of the two estimators.
constexpr std::uint64_t kTagKolmogorov = 0x4B53;
constexpr std::uint64_t kTagScheffe = 0x5456;

std::vector<double> checked_sorted(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorKind::empty_sample, "distance: sample is empty");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!std::isfinite(sorted[i]))
      throw Error(ErrorKind::invalid_sample,
                  "distance: sample entry " + std::to_string(i) + " is not finite");
  }
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

// Resample counts per sorted position, drawn from one derived stream.
void resample_counts(std::uint64_t key, std::vector<std::uint32_t>& counts) {
  const std::size_t n = counts.size();
  std::fill(counts.begin(), counts.end(), 0u);
  UniformStream rng(key, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[rng.below(n)];
}

// Percentile interval of the resampled statistics, widened to contain value.
void attach_ci(DistanceEstimate& est, std::vector<double> stats) {
  if (stats.empty()) {
    est.ci_low = est.ci_high = est.value;
    return;
  }
  std::sort(stats.begin(), stats.end());
  est.ci_low = std::clamp(std::min(quantile_sorted(stats, 0.025), est.value), 0.0, 1.0);
  est.ci_high = std::clamp(std::max(quantile_sorted(stats, 0.975), est.value), 0.0, 1.0);
}

// Distinct values of a sorted sample with the group index of each position.
struct Groups {
  std::vector<double> cdf;              // Phi at each distinct value
  std::vector<std::size_t> size;        // multiplicity of each distinct value
  std::vector<std::uint32_t> group_of;  // sorted position -> group
};

Groups group_sorted(const std::vector<double>& sorted) {
  Groups g;
  g.group_of.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1]) {
      g.cdf.push_back(normal_cdf(sorted[i]));
      g.size.push_back(0);
    }
    ++g.size.back();
    g.group_of[i] = static_cast<std::uint32_t>(g.cdf.size() - 1);
  }
  return g;
}

// Counts are per group; both one-sided gaps at every distinct value.
template <class Count>
double ks_from_counts(const std::vector<double>& cdf, const std::vector<Count>& counts,
                      std::size_t n) {
  const double nn = static_cast<double>(n);
  std::size_t below = 0;
  double d = 0.0;
  for (std::size_t j = 0; j < cdf.size(); ++j) {
    const std::size_t upto = below + counts[j];
    d = std::max(d, std::abs(static_cast<double>(upto) / nn - cdf[j]));
    d = std::max(d, std::abs(static_cast<double>(below) / nn - cdf[j]));
    below = upto;
  }
  return d;
}

}  // namespace

DistanceEstimate kolmogorov_distance(std::span<const double> sample, const BootstrapOptions& boot) {
  const auto sorted = checked_sorted(sample);
  const std::size_t n = sorted.size();
  const Groups g = group_sorted(sorted);

  DistanceEstimate est;
  est.kind = DistanceKind::kolmogorov;
  est.n = n;
  est.value = ks_from_counts(g.cdf, g.size, n);

  std::vector<double> stats(boot.resamples);
  const std::uint64_t key = derive_key(boot.seed, kTagKolmogorov);
  parallel_for(
      boot.resamples, boot.threads,
      [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> counts(n), per_group(g.cdf.size());
        for (std::size_t r = begin; r < end; ++r) {
          resample_counts(derive_key(key, r), counts);
          std::fill(per_group.begin(), per_group.end(), 0u);
          for (std::size_t i = 0; i < n; ++i) per_group[g.group_of[i]] += counts[i];
          stats[r] = ks_from_counts(g.cdf, per_group, n);
        }
      },
      4);
  attach_ci(est, std::move(stats));
  return est;
}

double silverman_bandwidth(std::span<const double> sample) {
  const auto sorted = checked_sorted(sample);
  const double sd = std::sqrt(sample_variance(sorted));
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  const double h = 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::degenerate_bandwidth,
                "tv_scheffe: sample has zero spread; bandwidth is degenerate");
  return h;
}

namespace {

struct KdeGrid {
  double lo = 0.0, step = 0.0, h = 0.0;
  std::vector<double> phi;      // reference density on the grid
  std::vector<double> kernel;   // K_h(j step), j = 0..half_width
  double outside_mass = 0.0;    // normal mass beyond the grid ends
};

KdeGrid make_grid(double min, double max, double h) {
  KdeGrid g;
  g.h = h;
  g.lo = min - 4.0 * h;
  const double hi = max + 4.0 * h;
  g.step = (hi - g.lo) / static_cast<double>(kTvGridPoints - 1);
  g.phi.resize(kTvGridPoints);
  for (std::size_t j = 0; j < kTvGridPoints; ++j) g.phi[j] = normal_pdf(g.lo + j * g.step);
  const auto half = static_cast<std::size_t>(
      std::min<double>(kTvGridPoints - 1, std::ceil(8.0 * h / g.step)));
  for (std::size_t j = 0; j <= half; ++j) g.kernel.push_back(normal_pdf(j * g.step / h) / h);
  g.outside_mass = normal_cdf(g.lo) + normal_cdf(-hi);
  return g;
}

// Linear binning of sorted points: bin index and weight on the lower node.
struct Binning {
  std::vector<std::uint32_t> index;
  std::vector<double> frac;
};

Binning bin_points(const std::vector<double>& sorted, const KdeGrid& g) {
  Binning b;
  b.index.resize(sorted.size());
  b.frac.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double pos = (sorted[i] - g.lo) / g.step;
    auto k = static_cast<std::size_t>(pos);
    k = std::min(k, kTvGridPoints - 2);
    b.index[i] = static_cast<std::uint32_t>(k);
    b.frac[i] = pos - static_cast<double>(k);
  }
  return b;
}

// weights[i] is the multiplicity of sorted point i; total is their sum.
template <class Weight>
double scheffe_from_weights(const KdeGrid& g, const Binning& b, const std::vector<Weight>& weights,
                            double total, std::vector<double>& bins, std::vector<double>& dens) {
  std::fill(bins.begin(), bins.end(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0) continue;
    const double w = static_cast<double>(weights[i]);
    bins[b.index[i]] += w * (1.0 - b.frac[i]);
    bins[b.index[i] + 1] += w * b.frac[i];
  }
  const std::ptrdiff_t G = static_cast<std::ptrdiff_t>(kTvGridPoints);
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(g.kernel.size()) - 1;
  std::fill(dens.begin(), dens.end(), 0.0);
  for (std::ptrdiff_t i = 0; i < G; ++i) {
    const double m = bins[static_cast<std::size_t>(i)];
    if (m == 0.0) continue;
    const std::ptrdiff_t from = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t to = std::min<std::ptrdiff_t>(G - 1, i + half);
    for (std::ptrdiff_t j = from; j <= to; ++j)
      dens[static_cast<std::size_t>(j)] += m * g.kernel[static_cast<std::size_t>(std::abs(j - i))];
  }
  double integral = 0.0;
  for (std::size_t j = 0; j < kTvGridPoints; ++j) {
    const double diff = std::abs(dens[j] / total - g.phi[j]);
    integral += (j == 0 || j + 1 == kTvGridPoints) ? 0.5 * diff : diff;
  }
  return std::min(1.0, 0.5 * (integral * g.step + g.outside_mass));
}

}  // namespace

DistanceEstimate tv_scheffe(std::span<const double> sample, std::optional<double> bandwidth,
                            const BootstrapOptions& boot) {
  const auto sorted = checked_sorted(sample);
  const std::size_t n = sorted.size();
  if (n < 100)
    throw Error(ErrorKind::insufficient_sample,
                "tv_scheffe: need at least 100 points, got " + std::to_string(n));
  double h = 0.0;
  if (bandwidth) {
    h = *bandwidth;
    if (!(h > 0.0) || !std::isfinite(h))
      throw Error(ErrorKind::degenerate_bandwidth, "tv_scheffe: bandwidth must be positive");
  } else {
    h = silverman_bandwidth(sorted);
  }

  const KdeGrid grid = make_grid(sorted.front(), sorted.back(), h);
  const Binning binning = bin_points(sorted, grid);
  const double total = static_cast<double>(n);

  DistanceEstimate est;
  est.kind = DistanceKind::tv_scheffe;
  est.n = n;
  est.bandwidth = h;
  {
    std::vector<double> bins(kTvGridPoints), dens(kTvGridPoints);
    const std::vector<std::uint8_t> ones(n, 1);
    est.value = scheffe_from_weights(grid, binning, ones, total, bins, dens);
  }

  std::vector<double> stats(boot.resamples);
  const std::uint64_t key = derive_key(boot.seed, kTagScheffe);
  parallel_for(
      boot.resamples, boot.threads,
      [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> counts(n);
        std::vector<double> bins(kTvGridPoints), dens(kTvGridPoints);
        for (std::size_t r = begin; r < end; ++r) {
          resample_counts(derive_key(key, r), counts);
          stats[r] = scheffe_from_weights(grid, binning, counts, total, bins, dens);
        }
      },
      4);
  attach_ci(est, std::move(stats));
  return est;
}

RatePoint to_rate_point(const DistanceEstimate& d) { return {d.t, d.value, d.ci_low, d.ci_high}; }

RateFit rate_fit(std::span<const RatePoint> points) {
  require(points.size() >= 3,
          "rate_fit: need at least 3 horizons, got " + std::to_string(points.size()));
  RateFit fit;
  std::vector<double> lx, ly, w;
  bool degenerate = false;
  for (const auto& p : points) {
    require(p.t > 0.0, "rate_fit: horizons must be positive");
    if (!(p.distance > 0.0))
      throw Error(ErrorKind::log_domain,
                  "rate_fit: distance at t = " + format_double(p.t) +
                      " is zero; increase the number of paths or drop this horizon");
    fit.horizons.push_back(p.t);
    fit.distances.push_back(p.distance);
    lx.push_back(std::log(p.t));
    ly.push_back(std::log(p.distance));
    const double width = p.ci_high - p.ci_low;
    if (!(width > 0.0)) degenerate = true;
    w.push_back(1.0 / (width * width));
  }
  if (degenerate) w.clear();
  const LinearFit lf = linear_fit(lx, ly, w);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  const double tq = student_t_quantile(0.975, static_cast<double>(points.size() - 2));
  fit.slope_lo = lf.slope - tq * lf.slope_se;
  fit.slope_hi = lf.slope + tq * lf.slope_se;
  return fit;
}

void write_distance_csv(std::span<const DistanceEstimate> estimates, const RateFit* fit,
                        std::ostream& out) {
  out << "kind,t,n,value,ci_low,ci_high,bandwidth,slope,slope_lo,slope_hi,r2\n";
  for (const auto& e : estimates) {
    out << to_string(e.kind) << ',' << format_double(e.t) << ',' << e.n << ','
        << format_double(e.value) << ',' << format_double(e.ci_low) << ','
        << format_double(e.ci_high) << ',' << format_double(e.bandwidth) << ",,,,\n";
  }
  if (fit) {
    out << "rate_fit,,," << ",,,," << format_double(fit->slope) << ','
        << format_double(fit->slope_lo) << ',' << format_double(fit->slope_hi) << ','
        << format_double(fit->r2) << '\n';
  }
}

}  // namespace berrylab
