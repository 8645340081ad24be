#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "berrylab/error.hpp"
#include "berrylab/models.hpp"

using namespace berrylab;

namespace {

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void expect_derivatives_match(const ModelSpec& m, const std::vector<double>& ys) {
  const auto& c = m.coefficients;
  for (double y : ys) {
    const double h = 1e-6 * std::max(1.0, std::abs(y));
    const double fd_s = (c.sigma(0, y + h) - c.sigma(0, y - h)) / (2 * h);
    const double fd_b = (c.drift_b(0, y + h) - c.drift_b(0, y - h)) / (2 * h);
    EXPECT_NEAR(c.d_sigma_dy(0, y), fd_s, 1e-6 * std::max(1.0, std::abs(fd_s))) << m.name << " y=" << y;
    EXPECT_NEAR(c.d_b_dy(0, y), fd_b, 1e-6 * std::max(1.0, std::abs(fd_b))) << m.name << " y=" << y;
  }
}

}  // namespace

TEST(Models, DerivativeFieldsMatchFiniteDifferences) {
  expect_derivatives_match(perturbed_model(1, 1, 0.5, 0.5, 1, 2), {-3.0, 0.3, 1.0, 5.0, 20.0});
  expect_derivatives_match(perturbed_model(2, 3, 0.4, 1.5, 0.3, 0.7), {0.1, 2.0, 50.0});
  expect_derivatives_match(hyperbolic_radial(5), {0.05, 0.3, 1.0, 5.0, 20.0});
  expect_derivatives_match(linear_drift_test_model(0.1, 1.0), {-2.0, 3.0});
}

TEST(Models, HyperbolicDriftValue) {
  const auto m = hyperbolic_radial(2);
  EXPECT_NEAR(m.coefficients.drift_b(0, 0.5), 1.0820, 1e-4);
  EXPECT_EQ(m.constants.l, 0.0);
  EXPECT_EQ(m.limits.b_inf(3.0), 0.5);
  EXPECT_THROW(hyperbolic_radial(1), Error);
}

TEST(Models, RelaxedRouteApplicabilityIsMonotoneInDimension) {
  bool seen = false;
  for (int d = 2; d <= 40; ++d) {
    const bool a = relaxed_boundary_applicable(hyperbolic_radial(d));
    if (seen) EXPECT_TRUE(a) << d;
    seen = seen || a;
  }
  EXPECT_FALSE(relaxed_boundary_applicable(hyperbolic_radial(8)));
  EXPECT_TRUE(relaxed_boundary_applicable(hyperbolic_radial(9)));
  EXPECT_FALSE(relaxed_boundary_applicable(constant_model(1, 1)));
}

TEST(Models, DecayConstantsBoundTheDerivatives) {
  for (const auto& m : {perturbed_model(1, 1, 0.5, 0.5, 1, 2), perturbed_model(1, 2, 0.3, 1, 0.4, 0.6),
                        hyperbolic_radial(9)}) {
    const auto& k = m.constants;
    for (double y = 0.01; y < 1e5; y *= 1.05) {
      const double w_s = std::pow(std::max(y, 1.0), k.alpha + 1.0);
      const double w_b = std::pow(std::max(y, 1.0), k.beta + 1.0);
      EXPECT_LE(std::abs(m.coefficients.d_sigma_dy(0, y)) * w_s, k.sigma3 * (1 + 1e-9) + 1e-12)
          << m.name << " y=" << y;
      if (m.has_finite_boundary() && y < 1.0) continue;
      EXPECT_LE(std::abs(m.coefficients.d_b_dy(0, y)) * w_b, k.b3 * (1 + 1e-9) + 1e-12)
          << m.name << " y=" << y;
    }
  }
}

TEST(Certifier, PassesExactlyTheClaimedClauses) {
  for (const auto& m :
       {constant_model(1, 1), constant_model(2, 0.5), perturbed_model(1, 1, 0.5, 0.5, 1, 2),
        perturbed_model(1, 4, 0.5, 0.5, 0.3, 2), perturbed_model(1, 1, 0.5, 0.5, 0.3, 0.4),
        perturbed_model(1, 1, 0.9, 0, 1, 2), hyperbolic_radial(2), hyperbolic_radial(3),
        hyperbolic_radial(9), hyperbolic_radial(20)}) {
    const auto rep = certify_assumptions(m);
    EXPECT_EQ(as_set(rep.passing_clauses()), as_set(m.claimed_clauses)) << m.name;
  }
}

TEST(Certifier, DecayFitRecoversExponents) {
  for (auto [a, b] : {std::pair{1.0, 2.0}, {0.3, 0.7}, {0.6, 1.5}}) {
    const auto rep = certify_assumptions(perturbed_model(1, 1, 0.5, 0.5, a, b));
    EXPECT_NEAR(rep.alpha_hat, a, 0.05);
    EXPECT_NEAR(rep.beta_hat, b, 0.05);
  }
  const auto rep = certify_assumptions(constant_model(1, 1));
  EXPECT_TRUE(std::isinf(rep.alpha_hat));
  EXPECT_EQ(rep.sigma1, 1.0);
  EXPECT_EQ(rep.b2, 1.0);
}

TEST(Certifier, RejectsSparseProbe) {
  ProbeGrid g;
  g.n_y = 10;
  g.n_t = 5;
  try {
    certify_assumptions(constant_model(1, 1), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_probe);
  }
}

TEST(Certifier, CsvHasOneRowPerClause) {
  const auto rep = certify_assumptions(hyperbolic_radial(9));
  std::ostringstream out;
  write_assumption_csv(rep, out);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("clause,measured,required,margin,verdict\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), rep.clauses.size() + 1);
  EXPECT_EQ(rep.clauses.size(), 10u);
}

TEST(Models, SteinFailureIsAWarning) {
  const auto m = perturbed_model(1, 1, 0.9, 0, 1, 2);
  ASSERT_EQ(m.warnings.size(), 1u);
  EXPECT_NE(m.warnings[0].find("Stein"), std::string::npos);
  EXPECT_TRUE(std::isnan(m.constants.q));
  EXPECT_TRUE(perturbed_model(1, 1, 0.5, 0.5, 1, 2).warnings.empty());
}

TEST(Models, FactoryValidatesNamesAndParameters) {
  EXPECT_EQ(make_model("hyperbolic", {{"d", 4}}).limits.b_inf(0), 1.5);
  EXPECT_EQ(make_model("perturbed", {}).constants.sigma2, 1.5);
  EXPECT_THROW(make_model("hyperbolic", {{"d", 2.5}}), Error);
  EXPECT_THROW(make_model("hyperbolic", {{"d", 1}}), Error);
  EXPECT_THROW(make_model("constant", {{"d", 3}}), Error);
  EXPECT_THROW(make_model("ornstein", {}), Error);
  EXPECT_THROW(perturbed_model(1, 1, 1.0, 0.5, 1, 2), Error);
}
