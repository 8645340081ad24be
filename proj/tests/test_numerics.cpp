#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "berrylab/error.hpp"
#include "berrylab/numerics.hpp"

using namespace berrylab;

TEST(Numerics, NormalCdfReferenceValues) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145707, 1e-15);
  EXPECT_NEAR(normal_cdf(-4.0), 3.167124183311998e-05, 1e-18);
  EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-16);
}

TEST(Numerics, GaussLegendreIsExactForPolynomials) {
  const auto& rule = gauss_legendre(64);
  double w = 0.0;
  for (double v : rule.weights) w += v;
  EXPECT_NEAR(w, 2.0, 1e-13);
  // x^126 integrates exactly with 64 nodes.
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 126);
  EXPECT_NEAR(s, 2.0 / 127.0, 1e-13);
}

TEST(Numerics, CompositeQuadratureOfSmoothFunction) {
  const double v = integrate_gl64([](double x) { return std::sin(x) * std::sin(x); }, 0.0, 37.0);
  EXPECT_NEAR(v, 37.0 / 2.0 - std::sin(74.0) / 4.0, 1e-11);
}

TEST(Numerics, QuantileType7) {
  const std::vector<double> s = {1, 2, 3, 4, 10};
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 1.0), 10.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.9), 7.6);  // numpy.quantile default
}

TEST(Numerics, PairwiseSumAndMoments) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_DOUBLE_EQ(pairwise_sum(v), 499500.0);
  EXPECT_DOUBLE_EQ(mean(v), 499.5);
  EXPECT_NEAR(sample_variance(v), 1000.0 * 1001.0 / 12.0, 1e-9);
  EXPECT_EQ(sample_variance(std::vector<double>{3.0}), 0.0);
}

TEST(Numerics, LinearFitRecoversExactLine) {
  const std::vector<double> x = {0, 1, 2, 5}, y = {1, 3, 5, 11};
  const LinearFit f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-14);
  EXPECT_THROW(linear_fit(std::vector<double>{1, 1}, std::vector<double>{1, 2}), Error);
}

TEST(Numerics, WeightedFitMatchesHandComputation) {
  // Weight 0 on the outlier removes it.
  const std::vector<double> x = {0, 1, 2, 3}, y = {0, 1, 2, 100}, w = {1, 1, 1, 0};
  const LinearFit f = linear_fit(x, y, w);
  EXPECT_NEAR(f.slope, 1.0, 1e-14);
  EXPECT_NEAR(f.intercept, 0.0, 1e-14);
}

TEST(Numerics, StudentQuantile) {
  EXPECT_NEAR(student_t_quantile(0.975, 1.0), 12.706204736174707, 1e-9);
  EXPECT_NEAR(student_t_quantile(0.975, 10.0), 2.2281388519649385, 1e-9);
}

TEST(Numerics, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333");
  EXPECT_EQ(format_double(std::nan("")), "");
  EXPECT_EQ(format_double(1e-20), "1e-20");
}
