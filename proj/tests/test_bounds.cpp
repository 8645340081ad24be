#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "berrylab/bounds.hpp"
#include "berrylab/error.hpp"
#include "berrylab/models.hpp"
#include "berrylab/numerics.hpp"

using namespace berrylab;

namespace {

// TV between N(0,1) and N(v,a^2) from the density crossings and normal CDFs.
double tv_piecewise(double a, double v) {
  std::vector<double> cuts;
  const double qa = a * a - 1.0, qb = 2.0 * v, qc = -v * v - 2.0 * a * a * std::log(a);
  if (qa == 0.0) {
    if (qb != 0.0) cuts.push_back(-qc / qb);
  } else if (qb * qb - 4 * qa * qc > 0.0) {
    const double r = std::sqrt(qb * qb - 4 * qa * qc);
    cuts = {(-qb - r) / (2 * qa), (-qb + r) / (2 * qa)};
    std::sort(cuts.begin(), cuts.end());
  }
  cuts.insert(cuts.begin(), -INFINITY);
  cuts.push_back(INFINITY);
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double p = normal_cdf(hi) - normal_cdf(lo);
    const double q = normal_cdf((hi - v) / a) - normal_cdf((lo - v) / a);
    tv += std::max(0.0, p - q);
  }
  return tv;
}

McOptions mc(std::size_t n, std::uint64_t seed = 42) {
  McOptions o;
  o.n_paths = n;
  o.seed = seed;
  return o;
}

double width(const Proportion& p) { return p.high - p.low; }

}  // namespace

TEST(GaussianTv, BoundExamples) {
  EXPECT_EQ(gaussian_tv_bound_1d(1.0, 0.0), 0.0);
  EXPECT_NEAR(gaussian_tv_bound_1d(1.0, 0.1), std::sqrt(2.0 / std::numbers::pi) * 0.1, 1e-15);
  EXPECT_NEAR(gaussian_tv_bound_1d(1.0, 0.1), 0.079788, 1e-6);
  GaussianTvQuery q;
  q.d = 2;
  q.a = 1.1;
  q.v = Eigen::VectorXd::Zero(2);
  q.V = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_NEAR(gaussian_tv_bound(q), 0.42, 1e-12);
  EXPECT_NEAR(gaussian_tv_constant(1), std::sqrt(2.0 / std::numbers::pi), 1e-14);
  EXPECT_NEAR(gaussian_tv_constant(2), std::sqrt(std::numbers::pi / 2.0), 1e-14);
  // C(3) = sqrt(2) * 1 / (sqrt(pi) / 2).
  EXPECT_NEAR(gaussian_tv_constant(3), 2.0 * std::sqrt(2.0 / std::numbers::pi), 1e-14);
}

TEST(GaussianTv, CovarianceEntersThroughItsInverseRoot) {
  GaussianTvQuery q;
  q.d = 2;
  q.a = 1.0;
  q.v = Eigen::Vector2d(1.0, 2.0);
  q.V = Eigen::Matrix2d{{4.0, 0.0}, {0.0, 1.0}};
  // |V^{-1/2} v| = |(0.5, 2)|.
  EXPECT_NEAR(gaussian_tv_bound(q), gaussian_tv_constant(2) * std::sqrt(0.25 + 4.0), 1e-12);
  q.V = Eigen::Matrix2d{{1.0, 2.0}, {2.0, 1.0}};
  try {
    gaussian_tv_bound(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::decomposition);
  }
  q.V = Eigen::Matrix2d{{1.0, 0.5}, {0.0, 1.0}};
  EXPECT_THROW(gaussian_tv_bound(q), Error);
  q.v = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(gaussian_tv_bound(q), Error);
}

TEST(GaussianTv, ExactOneDimensionalValues) {
  EXPECT_NEAR(gaussian_tv_exact_1d(1.0, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(gaussian_tv_exact_1d(1.0, 0.1), 2.0 * normal_cdf(0.05) - 1.0, 1e-8);
  EXPECT_NEAR(gaussian_tv_exact_1d(1.0, 0.1), 0.039878, 1e-6);
  EXPECT_LE(gaussian_tv_exact_1d(2.0, 0.0), gaussian_tv_bound_1d(2.0, 0.0));
  EXPECT_EQ(gaussian_tv_bound_1d(2.0, 0.0), 2.0);
}

TEST(GaussianTv, PropertyGridAgainstPiecewiseOracle) {
  for (double a : {0.8, 1.0, 1.25, 0.5, 3.0}) {
    for (double v : {0.0, 0.1, -0.1, 1.0, -1.0, 2.5}) {
      const double exact = gaussian_tv_exact_1d(a, v);
      EXPECT_NEAR(exact, tv_piecewise(a, v), 1e-8) << "a=" << a << " v=" << v;
      EXPECT_LE(exact, std::min(1.0, gaussian_tv_bound_1d(a, v)) + 1e-12) << "a=" << a << " v=" << v;
    }
  }
}

TEST(GaussianTv, BoundIsContinuousInScale) {
  for (double a : {0.9, 1.0, 1.1}) {
    const double h = 1e-9;
    EXPECT_NEAR(gaussian_tv_bound_1d(a + h, 0.0), gaussian_tv_bound_1d(a, 0.0), 1e-8);
    EXPECT_EQ(gaussian_tv_bound_1d(a, 0.0), 2.0 * std::abs(a - 1.0));
  }
}

TEST(Proportion, WilsonAndRuleOfThree) {
  const auto p = make_proportion(5, 100);
  EXPECT_NEAR(p.low, 0.0215437, 1e-6);
  EXPECT_NEAR(p.high, 0.1117505, 1e-6);
  const auto z = make_proportion(0, 300);
  EXPECT_EQ(z.low, 0.0);
  EXPECT_NEAR(z.high, 0.01, 1e-15);
  EXPECT_EQ(make_proportion(7, 7).high, 1.0);
}

TEST(HittingTail, DecaysFasterThanTheBound) {
  const auto r = hitting_tail_mc(constant_model(1, 1), 0.0, 1.0, {1, 2, 3, 4}, mc(20000));
  EXPECT_EQ(r.horizon, 16.0);
  EXPECT_NEAR(r.threshold, -1.0 / 16.0 + 0.05, 1e-15);
  EXPECT_GE(r.fitted_points, 2u);
  EXPECT_TRUE(r.pass) << r.slope;
  EXPECT_LT(r.slope, -0.2);
}

TEST(HittingTail, ReflectionOracleFromTimeZero) {
  // P(inf_{s >= 0} x0 + B_s + s <= 0) = e^{-2 x0}; discrete monitoring and the
  // finite horizon both lower the estimate.
  const auto r = hitting_tail_mc(constant_model(1, 1), 0.0, 1.0, {0.0, 8.0}, mc(20000, 3));
  const double oracle = std::exp(-2.0);
  EXPECT_LE(r.probability[0].p, oracle + 3 * width(r.probability[0]));
  EXPECT_GE(r.probability[0].p, 0.8 * oracle);
  const auto above = hitting_tail_mc(constant_model(1, 1), 2.0, 1.0, {0.0, 1.0}, mc(10000));
  EXPECT_EQ(above.probability[0].p, 1.0);
  EXPECT_THROW(hitting_tail_mc(constant_model(1, 1), 0.0, 1.0, {1, 2}, mc(9999)), Error);
}

TEST(InfTail, Expression) {
  EXPECT_NEAR(inf_tail_eval(1, 1, 1, 0), std::exp(-0.5) + std::exp(-1.0), 1e-15);
  EXPECT_NEAR(inf_tail_eval(1, 1, 1, 0), 0.9744, 1e-4);
  EXPECT_THROW(inf_tail_eval(1, 1, 1, 1), Error);
  double prev = inf_tail_eval(1, 1, 2, 0);
  for (double g = 2.25; g < 30; g += 0.25) {
    const double e = inf_tail_eval(1, 1, g, 0);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 1e-12);
}

TEST(InfTail, CalibratedEnvelopeHolds) {
  const auto r = inf_tail_mc(constant_model(1, 1), 0.0, {1, 2, 3}, 32.0, mc(20000));
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.calibrated_c, 0.1);
  EXPECT_NEAR(r.probability[0].p, std::exp(-2.0), 0.03);
  EXPECT_EQ(r.rows().size(), 3u);
}

TEST(TimeTail, GaussianTailOracle) {
  const std::vector<double> ts = {4, 8, 12, 16};
  const auto r = time_tail_mc(constant_model(1, 1), 0.5, 0.0, 0.0, ts, mc(100000));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double exact = normal_cdf(-std::sqrt(ts[i]));
    EXPECT_NEAR(r.probability[i].p, exact, 3 * width(r.probability[i])) << ts[i];
    EXPECT_NEAR(r.envelope[i], std::exp(-ts[i] / 8.0), 1e-15);
  }
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.envelope.back(), std::exp(-2.0), 1e-15);
}

TEST(TimeTail, Preconditions) {
  const auto m = constant_model(1, 1);
  EXPECT_THROW(time_tail_mc(m, 1.0, 0, 0, {1, 2}, mc(10000)), Error);
  try {
    time_tail_mc(m, 0.5, 0.0, 2.0, {4, 8}, mc(10000));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("(b1 - eps) t > y - x"), std::string::npos);
  }
  // Just inside the admissible range the envelope is close to 1.
  const auto r = time_tail_mc(m, 0.5, 0.0, 1.0, {2.5, 3.0}, mc(10000));
  EXPECT_GT(r.envelope.front(), 0.7);
  EXPECT_TRUE(r.pass);
}

TEST(ExpFunctional, ZeroCoefficientIsExactlyOne) {
  const auto r = exp_functional_mc(Functional::indicator_neg, 1.0, 0.0, 0.0, {4, 8}, mc(10000));
  for (double m : r.mean) EXPECT_EQ(m, 1.0);
  EXPECT_TRUE(r.stabilized);
  EXPECT_THROW(exp_functional_mc(Functional::indicator_neg, 1.0, -0.1, 0.0, {4}, mc(10000)), Error);
}

TEST(ExpFunctional, SubcriticalMeanMatchesOccupationOracle) {
  // For drift a from 0, E exp(c A_inf) with A the time spent below 0 solves
  // a two-piece ODE: 2a / (a + sqrt(a^2 - 2c)).
  const double a = 1.0, c = 0.25;
  const auto r = exp_functional_mc(Functional::indicator_neg, a, c, 0.0, {16, 32, 64, 128}, mc(10000));
  EXPECT_TRUE(r.stabilized);
  EXPECT_GT(r.tilt, 0.0);
  const double oracle = 2 * a / (a + std::sqrt(a * a - 2 * c));
  EXPECT_NEAR(r.mean.back(), oracle, 1.5 * (r.ci_high.back() - r.ci_low.back()) + 0.02);
}

TEST(ExpFunctional, MonotoneInStartingPoint) {
  double prev = INFINITY;
  for (double x0 : {-1.0, 0.0, 1.0, 2.0}) {
    const auto r = exp_functional_mc(Functional::exp_decay, 1.0, 0.25, x0, {16}, mc(10000));
    EXPECT_LT(r.mean[0], prev) << x0;
    prev = r.mean[0];
  }
}

TEST(InverseMoment, GammaRangeAndFarStart) {
  const auto m = hyperbolic_radial(9);
  EXPECT_NEAR(inverse_moment_gamma_limit(m), 2.5, 1e-15);
  McOptions o = mc(2000);
  const auto warn = inverse_moment_proxy(m, 3.0, 1.0, {1, 2}, o);
  EXPECT_TRUE(warn.gamma_warning);
  const auto far = inverse_moment_proxy(m, 1.0, 1e3, {1, 2, 4}, o);
  EXPECT_FALSE(far.gamma_warning);
  for (double v : far.mean) EXPECT_NEAR(v, 1e-3, 1e-5);
  EXPECT_THROW(inverse_moment_proxy(constant_model(1, 1), 1.0, 1.0, {1, 2}, o), Error);
}

TEST(InverseMoment, HyperbolicProxyStabilizes) {
  const auto r = inverse_moment_proxy(hyperbolic_radial(9), 1.0, 1.0, {8, 16, 32}, mc(10000));
  EXPECT_TRUE(r.stabilized);
  for (double v : r.mean) EXPECT_GE(v, 1.0);  // the supremum includes the start
}

TEST(InverseMomentY, DecayExponent) {
  const auto m = constant_model(1, 1);
  const auto one = inverse_moment_y_mc(m, 1.0, 1.0, {4, 8, 16, 32}, mc(10000));
  EXPECT_GE(one.slope, -1.1);
  EXPECT_LE(one.slope, -0.9);
  EXPECT_TRUE(one.pass);
  const auto two = inverse_moment_y_mc(m, 2.0, 1.0, {4, 8, 16, 32}, mc(10000));
  EXPECT_LE(two.slope, -1.8);
  EXPECT_THROW(inverse_moment_y_mc(m, 1.0, 1.0, {4, 8}, mc(10000)), Error);
}

TEST(BoundsCsv, Header) {
  const auto r = inverse_moment_y_mc(constant_model(1, 1), 1.0, 1.0, {1, 2, 4}, mc(10000));
  std::ostringstream out;
  const auto rows = r.rows();
  write_bounds_csv(rows, out);
  EXPECT_EQ(out.str().rfind("op,inputs,t,estimate,ci_low,ci_high,reference,verdict\n", 0), 0u);
  EXPECT_EQ(rows.size(), 4u);
}
