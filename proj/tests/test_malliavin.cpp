#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "berrylab/error.hpp"
#include "berrylab/malliavin.hpp"
#include "berrylab/models.hpp"

using namespace berrylab;

namespace {

SimConfig config(double horizon, std::size_t steps, std::size_t paths, std::uint64_t seed = 42) {
  SimConfig c;
  c.horizon = horizon;
  c.n_steps = steps;
  c.n_paths = paths;
  c.seed = seed;
  return c;
}

double ds_closed_form(double k, double s0, double t) {
  return s0 * s0 * ((std::exp(2 * k * t) - 1) / (2 * k) - 2 * (std::exp(k * t) - 1) / k + t);
}

double pairing_closed_form(double k, double s0, double t) {
  return s0 * s0 * ((std::exp(k * t) - 1) / k - t);
}

}  // namespace

TEST(Malliavin, ConstantModelVanishesExactly) {
  const auto m = constant_model(1.5, 2.0);
  const auto ens = simulate_ensemble(m, config(2.0, 128, 20));
  const auto z = z_process(ens, m);
  for (double v : z.z) EXPECT_EQ(v, 0.0);
  for (double v : ds_norm_sq(ens, m, z)) EXPECT_EQ(v, 0.0);
  for (double v : stein_pairing(ens, m, z)) EXPECT_EQ(v, 0.0);
  const auto s = simulate_malliavin(m, config(2.0, 128, 20));
  for (std::size_t n = 0; n < 20; ++n) {
    EXPECT_EQ(s.ds_norm_sq[n], 0.0);
    EXPECT_EQ(s.pairing[n], 0.0);
    EXPECT_EQ(s.r_term[n], 0.0);
  }
}

TEST(Malliavin, LinearDriftClosedForms) {
  const double k = 0.1, s0 = 1.0, t = 4.0;
  const auto m = linear_drift_test_model(k, s0);
  const auto ens = simulate_ensemble(m, config(t, 4096, 3));
  const auto z = z_process(ens, m);
  for (std::size_t n = 0; n < 3; ++n) EXPECT_NEAR(z.at(n, 4096), k * t, 1e-12);
  const double ds_exact = ds_closed_form(k, s0, t), pr_exact = pairing_closed_form(k, s0, t);
  for (double v : ds_norm_sq(ens, m, z)) EXPECT_NEAR(v, ds_exact, 2e-3 * ds_exact);
  for (double v : stein_pairing(ens, m, z)) EXPECT_NEAR(v, pr_exact, 2e-3 * pr_exact);
}

TEST(Malliavin, LinearDriftRiemannErrorIsFirstOrder) {
  const double k = 0.1, t = 4.0;
  const auto m = linear_drift_test_model(k, 1.0);
  const double exact = ds_closed_form(k, 1.0, t);
  double previous = 0.0;
  for (std::size_t steps : {1024u, 2048u, 4096u}) {
    const auto ens = simulate_ensemble(m, config(t, steps, 1));
    const double err = std::abs(ds_norm_sq(ens, m, z_process(ens, m))[0] - exact);
    if (previous > 0.0) EXPECT_NEAR(previous / err, 2.0, 0.1);
    previous = err;
  }
}

TEST(Malliavin, VolatilityAtItsLimitLeavesOnlyTheExponentialTerm) {
  const auto m = perturbed_model(1.3, 1.0, 0.0, 0.5, 1.0, 2.0);
  const auto ens = simulate_ensemble(m, config(4.0, 256, 30, 3));
  const auto z = z_process(ens, m);
  const auto ds = ds_norm_sq(ens, m, z);
  const auto pr = stein_pairing(ens, m, z);
  for (std::size_t n = 0; n < 30; ++n) {
    double ds_o = 0.0, pr_o = 0.0;
    for (std::size_t j = 0; j < 256; ++j) {
      const double e = std::exp(z.at(n, 256) - z.at(n, j)) - 1.0;
      ds_o += 1.3 * 1.3 * e * e * ens.dt;
      pr_o += 1.3 * 1.3 * e * ens.dt;
    }
    EXPECT_NEAR(ds[n], ds_o, 1e-12 * (1.0 + ds_o));
    EXPECT_NEAR(pr[n], pr_o, 1e-12 * (1.0 + std::abs(pr_o)));
    EXPECT_GE(ds[n], 0.0);
  }
}

TEST(Malliavin, StreamingMatchesStoredPaths) {
  const auto m = perturbed_model(1, 1, 0.5, 0.5, 0.6, 1.5);
  const auto cfg = config(4.0, 256, 40, 8);
  const auto ens = simulate_ensemble(m, cfg);
  const auto streamed = simulate_malliavin(m, cfg);
  const auto stored = malliavin_sample(ens, m);
  EXPECT_EQ(streamed.ds_norm_sq, stored.ds_norm_sq);
  EXPECT_EQ(streamed.pairing, stored.pairing);
  EXPECT_EQ(streamed.f_values, stored.f_values);
  const auto records = malliavin_path_records(ens, m);
  for (std::size_t n = 0; n < 40; ++n) {
    EXPECT_NEAR(streamed.ds_norm_sq[n], records[n].ds_norm_sq, 1e-10 * (1 + records[n].ds_norm_sq));
    EXPECT_NEAR(streamed.pairing[n], records[n].pairing, 1e-10 * (1 + std::abs(records[n].pairing)));
    EXPECT_NEAR(streamed.r_term[n], records[n].r_term, 1e-12);
    EXPECT_EQ(streamed.z_terminal[n], records[n].z_traj.back());
    EXPECT_EQ(streamed.z_mid[n], records[n].z_traj[128]);
  }
}

TEST(Malliavin, OverflowIsFlaggedOrThrown) {
  auto m = constant_model(1, 1);
  m.coefficients.d_b_dy = [](double, double) { return 100.0; };
  const auto cfg = config(8.0, 512, 4);
  const auto ens = simulate_ensemble(m, cfg);
  try {
    ds_norm_sq(ens, m, z_process(ens, m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::exponent_overflow);
  }
  const auto s = simulate_malliavin(m, cfg);
  EXPECT_EQ(s.overflow_count, 4u);
  EXPECT_TRUE(kept_values(s, s.ds_norm_sq).empty());
}

TEST(Malliavin, ExponentialMomentOfLateIncrementIsBounded) {
  // exp(2 dZ) = exp(2 int s' dB - 2 int s'^2) exp(int 2 b' + s'^2); the first factor
  // has mean one and b' <= 0, |s'| <= sigma3 for this family.
  const auto m = perturbed_model(1, 1, 0.5, 0.5, 1, 2);
  const double t = 16.0;
  const auto s = simulate_malliavin(m, config(t, 1024, 4000, 12));
  double acc = 0.0;
  for (std::size_t n = 0; n < 4000; ++n) acc += std::exp(2.0 * (s.z_terminal[n] - s.z_mid[n]));
  const double bound = std::exp(m.constants.sigma3 * m.constants.sigma3 * t / 2.0);
  EXPECT_TRUE(std::isfinite(acc));
  EXPECT_LE(acc / 4000.0, bound);
}

TEST(SteinBudget, ConstantModel) {
  const auto m = constant_model(1, 1);
  const std::size_t n = 5000;
  const double t = 4.0;
  const auto b = stein_budget(simulate_malliavin(m, config(t, 256, n, 2)), m);
  EXPECT_EQ(b.n, n);
  EXPECT_EQ(b.pairing_term.mean, 0.0);
  EXPECT_NEAR(b.derivative_term.mean, 2.0, 1e-12);
  EXPECT_LE(b.mean_term.mean, 4.0 * std::sqrt(t / n));
  EXPECT_EQ(b.r_mean.mean, 0.0);
  EXPECT_EQ(b.r_variance.mean, 0.0);
}

TEST(SteinBudget, RequiresUnitHorizon) {
  const auto m = constant_model(1, 1);
  EXPECT_THROW(stein_budget(simulate_malliavin(m, config(0.5, 64, 10)), m), Error);
}

TEST(SteinBudget, CsvHeader) {
  const auto m = perturbed_model(1, 1, 0.5, 0.5, 1, 2);
  std::vector<SteinBudget> rows = {stein_budget(simulate_malliavin(m, config(1.0, 64, 200)), m)};
  std::ostringstream out;
  write_budget_csv(rows, out);
  EXPECT_EQ(out.str().rfind("t,n,overflowed,mean_ds_norm_sq,mean_abs_pairing,a,a_lo,a_hi,", 0), 0u);
}
