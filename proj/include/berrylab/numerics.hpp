#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <numbers>
#include <span>
#include <vector>

namespace berrylab {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Fixed-order pairwise summation; result depends only on the input order.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

/// Unbiased sample variance (n - 1 denominator); 0 for n < 2.
double sample_variance(std::span<const double> values);

/// Empirical quantile with linear interpolation between order statistics
/// (type 7). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule via Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Composite 64-node Gauss-Legendre over [a, b] with panels of width at
/// most `panel_width`.
double integrate_gl64(const std::function<double(double)>& f, double a, double b,
                      double panel_width = 4.0);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;   // standard error from the weighted residual scale
  double r2 = 1.0;
  std::size_t n = 0;
};

/// Weighted least squares y = intercept + slope * x. Empty weights means
/// unit weights. Requires at least two distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> weights = {});

/// Two-sided Student-t quantile, e.g. p = 0.975.
double student_t_quantile(double p, double dof);

/// Normal-approximation 95% interval for the mean of `values`.
struct MeanCi {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
  double std_error = 0.0;
};
MeanCi mean_ci(std::span<const double> values);

/// "%.10g" formatting used by every CSV writer; NaN becomes an empty field.
std::string format_double(double value);

}  // namespace berrylab
