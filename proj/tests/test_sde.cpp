#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "berrylab/error.hpp"
#include "berrylab/models.hpp"
#include "berrylab/numerics.hpp"
#include "berrylab/sde.hpp"

using namespace berrylab;

namespace {

SimConfig config(double horizon, std::size_t steps, std::size_t paths, std::uint64_t seed = 42,
                 double x0 = 1.0) {
  SimConfig c;
  c.horizon = horizon;
  c.n_steps = steps;
  c.n_paths = paths;
  c.seed = seed;
  c.x0 = x0;
  return c;
}

double raw_moment(const std::vector<double>& v, int k) {
  double s = 0.0;
  for (double x : v) s += std::pow(x, k);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(Simulate, ConstantCoefficientsOneStepIsExact) {
  const auto m = constant_model(1.0, 1.0);
  const auto ens = simulate_ensemble(m, config(1.0 / 64.0, 1, 3));
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_EQ(ens.x(n, 0), 1.0);
    EXPECT_EQ(ens.y(n, 0), 1.0);
    EXPECT_EQ(ens.x(n, 1), 1.0 + ens.db(n, 0) + 1.0 / 64.0);
  }
}

TEST(Simulate, NonFiniteDriftNamesLocation) {
  auto m = constant_model(1.0, 1.0);
  m.coefficients.drift_b = [](double, double y) {
    return y >= 2.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  try {
    simulate_ensemble(m, config(4.0, 256, 50, 1, 1.9));
    FAIL() << "expected a model-evaluation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::model_evaluation);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("b(t="), std::string::npos) << msg;
    EXPECT_NE(msg.find("y="), std::string::npos) << msg;
  }
}

TEST(Simulate, RejectsCoarseGrid) {
  EXPECT_THROW(simulate_ensemble(constant_model(1, 1), config(1.0, 32, 1)), Error);
  EXPECT_THROW(simulate_ensemble(hyperbolic_radial(3), config(1.0, 64, 1, 1, -0.5)), Error);
}

TEST(Simulate, BitwiseDeterministicAcrossWorkerCounts) {
  const auto m = hyperbolic_radial(4);
  auto c = config(2.0, 128, 300, 11, 0.3);
  c.threads = 1;
  const auto a = simulate_ensemble(m, c);
  for (unsigned t : {4u, 8u}) {
    c.threads = t;
    const auto b = simulate_ensemble(m, c);
    EXPECT_EQ(a.x_paths, b.x_paths);
    EXPECT_EQ(a.y_paths, b.y_paths);
    EXPECT_EQ(a.brownian_increments, b.brownian_increments);
    EXPECT_EQ(a.boundary_interventions, b.boundary_interventions);
  }
}

TEST(Simulate, PathsUseTheirOwnStreams) {
  // Path n does not depend on how many paths are simulated.
  const auto m = perturbed_model(1, 1, 0.5, 0.5, 1, 2);
  const auto small = simulate_ensemble(m, config(1.0, 64, 5, 3));
  const auto large = simulate_ensemble(m, config(1.0, 64, 50, 3));
  for (std::size_t k = 0; k <= 64; ++k) EXPECT_EQ(small.x(4, k), large.x(4, k));
}

TEST(Simulate, ComparisonProcessStaysBelow) {
  for (const auto& m : {hyperbolic_radial(9), perturbed_model(1, 1, 0.5, 0.5, 1, 2)}) {
    const auto ens = simulate_ensemble(m, config(8.0, 512, 500));
    const double slack = 3.0 * m.constants.sigma2 * std::sqrt(ens.dt);
    std::size_t bad = 0, total = 0;
    for (std::size_t n = 0; n < ens.n_paths; ++n)
      for (std::size_t k = 0; k <= ens.n_steps; ++k, ++total)
        if (ens.x(n, k) < ens.y(n, k) - slack) ++bad;
    EXPECT_LE(static_cast<double>(bad), 1e-3 * static_cast<double>(total)) << m.name;
  }
}

TEST(Simulate, HyperbolicMeanAgreesWithFineGrid) {
  const auto m = hyperbolic_radial(9);
  auto coarse = config(4.0, 512, 10000, 1);
  auto fine = config(4.0, 8192, 10000, 2);
  coarse.track_comparison = fine.track_comparison = false;
  const auto a = simulate_scaled(m, coarse), b = simulate_scaled(m, fine);
  const double se = std::sqrt(sample_variance(a.x_terminal) / 1e4 + sample_variance(b.x_terminal) / 1e4);
  EXPECT_LE(std::abs(mean(a.x_terminal) - mean(b.x_terminal)), 3.0 * se);
}

TEST(Simulate, PositivityNearBoundaryWithFewInterventions) {
  const auto m = hyperbolic_radial(3);
  const auto ens = simulate_ensemble(m, config(2.0, 128, 2000, 5, 0.02));
  for (double x : ens.x_paths) ASSERT_GT(x, 0.0);
  std::size_t clamps = 0;
  for (auto v : ens.boundary_interventions) clamps += v;
  EXPECT_LE(static_cast<double>(clamps), 0.01 * 2000 * 128);
}

TEST(Simulate, ExcessiveInterventionsAreAnError) {
  auto m = hyperbolic_radial(3);
  m.coefficients.drift_b = [](double, double) { return -50.0; };
  auto c = config(1.0, 64, 200, 1, 0.5);
  c.scheme = Scheme::euler;
  try {
    simulate_ensemble(m, c);
    FAIL() << "expected boundary instability";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::boundary_instability);
  }
}

TEST(Simulate, EnsembleCsvIsPathMajor) {
  const auto ens = simulate_ensemble(constant_model(1, 1), config(2.0 / 64.0, 2, 2));
  std::ostringstream out;
  write_ensemble_csv(ens, out);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "path,step,time,x,y,db");
  EXPECT_EQ(lines[1].substr(0, 8), "0,0,0,1,");
  EXPECT_EQ(lines[3].back(), ',');  // no increment after the last node
  EXPECT_EQ(lines[4].substr(0, 4), "1,0,");
}

TEST(Limits, ResolvedFromCoefficientsAndAveraged) {
  // Time-dependent volatility 1 + sin(t)/2; sigma_bar^2 t is its squared integral.
  ModelSpec m = constant_model(1.0, 1.0);
  m.coefficients.sigma = [](double t, double) { return 1.0 + 0.5 * std::sin(t); };
  m.coefficients.drift_b = [](double t, double) { return 2.0 + std::cos(t); };
  m.limits = {};
  m.time_independent = false;
  const ModelSpec r = resolve_limits(m);
  for (double t : {0.7, 3.7, 50.0}) {
    const double exact_sq = t + (1.0 - std::cos(t)) + 0.25 * (t / 2.0 - std::sin(2.0 * t) / 4.0);
    EXPECT_NEAR(r.limits.sigma_bar(t) * r.limits.sigma_bar(t) * t, exact_sq, 1e-10 * exact_sq);
    const double exact_b = (2.0 * t + std::sin(t)) / t;
    EXPECT_NEAR(r.limits.b_bar(t), exact_b, 1e-10 * exact_b);
  }
  EXPECT_DOUBLE_EQ(r.limits.sigma_inf(1.0), 1.0 + 0.5 * std::sin(1.0));
}

TEST(Scaled, ConstantModelCollapsesToReference) {
  const auto m = constant_model(2.0, 3.0);
  const auto s = scaled_statistic(simulate_ensemble(m, config(4.0, 256, 200)), m);
  for (std::size_t n = 0; n < 200; ++n) EXPECT_NEAR(s.f_values[n], s.g_values[n], 1e-12);
  EXPECT_EQ(clt_residual_moment(s, 2.0), clt_residual_moment(s, 2.0));
  EXPECT_LE(clt_residual_moment(s, 2.0), 1e-12);
}

TEST(Scaled, StreamingEqualsEnsembleRoute) {
  const auto m = hyperbolic_radial(9);
  auto c = config(2.0, 128, 64, 9);
  const auto a = scaled_statistic(simulate_ensemble(m, c), m);
  const auto b = simulate_scaled(m, c);
  EXPECT_EQ(a.f_values, b.f_values);
  EXPECT_EQ(a.g_values, b.g_values);
  EXPECT_EQ(a.x_terminal, b.x_terminal);
}

TEST(Scaled, SinglePathEnsemble) {
  const auto m = constant_model(1, 1);
  const auto s = scaled_statistic(simulate_ensemble(m, config(1.0, 64, 1)), m);
  EXPECT_EQ(s.f_values.size(), 1u);
}

TEST(Scaled, ReferenceHasExactNormalLaw) {
  for (const auto& m : {hyperbolic_radial(9), perturbed_model(1, 1, 0.5, 0.5, 1, 2)}) {
    const std::size_t n = 20000;
    const auto s = simulate_scaled(m, config(4.0, 256, n, 17));
    const double rn = std::sqrt(static_cast<double>(n));
    EXPECT_NEAR(mean(s.g_values), 0.0, 4.0 / rn);
    EXPECT_NEAR(sample_variance(s.g_values), 1.0, 0.1);
    // Bands of 5 standard deviations of each raw-moment estimator.
    const double sd[5] = {0, 1.0, std::sqrt(2.0), std::sqrt(15.0), std::sqrt(96.0)};
    const double target[5] = {1, 0, 1, 0, 3};
    for (int k = 1; k <= 4; ++k)
      EXPECT_NEAR(raw_moment(s.g_values, k), target[k], 5.0 * sd[k] / rn) << m.name << " k=" << k;
  }
}

TEST(Scaled, HyperbolicStatisticIsNearStandardNormal) {
  const auto s = simulate_scaled(hyperbolic_radial(9), config(64.0, 4096, 100000, 3));
  EXPECT_GE(mean(s.f_values), -0.1);
  EXPECT_LE(mean(s.f_values), 0.1);
  EXPECT_GE(sample_variance(s.f_values), 0.9);
  EXPECT_LE(sample_variance(s.f_values), 1.1);
}

TEST(Scaled, GridRefinementChangesMeanLittle) {
  for (const auto& m : {constant_model(1, 1), hyperbolic_radial(9)}) {
    const std::size_t n = 10000;
    const auto a = simulate_scaled(m, config(4.0, 256, n, 21));
    const auto b = simulate_scaled(m, config(4.0, 512, n, 22));
    const double se = std::sqrt((sample_variance(a.f_values) + sample_variance(b.f_values)) / n);
    EXPECT_LE(std::abs(mean(a.f_values) - mean(b.f_values)), std::max(1e-2, 4.0 * se)) << m.name;
  }
}

TEST(Lln, ConstantModelResidualLaw) {
  const std::size_t n = 20000;
  const double t = 16.0, x0 = 3.0;
  const auto ens = simulate_ensemble(constant_model(1, 1), config(t, 1024, n, 5, x0));
  const auto r = lln_residual(ens, constant_model(1, 1));
  EXPECT_NEAR(r.mean, x0 / t, 3.0 / std::sqrt(n * t));
  EXPECT_NEAR(r.std_dev, 1.0 / std::sqrt(t), 0.05 / std::sqrt(t));
}

TEST(Lln, RequiresHorizonAtLeastOne) {
  EXPECT_THROW(lln_residual(std::vector<double>{1.0}, 0.0, constant_model(1, 1)), Error);
}

TEST(Clt, FirstMomentIsMeanAbsoluteResidual) {
  const auto m = perturbed_model(1, 1, 0.5, 0.5, 1, 2);
  const auto s = simulate_scaled(m, config(4.0, 256, 1000, 8));
  double direct = 0.0;
  for (std::size_t n = 0; n < 1000; ++n) direct += std::abs(s.f_values[n] - s.g_values[n]);
  direct /= 1000.0;
  EXPECT_NEAR(clt_residual_moment(s, 1.0), direct, 1e-12 * direct);
  EXPECT_THROW(clt_residual_moment(s, 0.5), Error);
  EXPECT_THROW(clt_residual_moment(s, 9.0), Error);
}

TEST(Clt, OverflowIsReported) {
  ScaledSample s;
  s.f_values = {1e300};
  s.g_values = {0.0};
  try {
    clt_residual_moment(s, 8.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::moment_overflow);
  }
}
