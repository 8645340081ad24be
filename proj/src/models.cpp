#include "berrylab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "berrylab/error.hpp"
#include "berrylab/numerics.hpp"

namespace berrylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kBoundedClauses = {
    "sigma_bounds", "sigma_decay", "drift_bounds", "drift_decay", "stein_condition"};

double envelope(double y, double e) {
  const double yp = std::max(y, 0.0);
  return std::pow(1.0 + yp * yp, -0.5 * e);
}

double envelope_dy(double y, double e) {
  if (y <= 0.0) return 0.0;
  return -e * y * std::pow(1.0 + y * y, -0.5 * e - 1.0);
}

double stein_lhs(double q, double dsigma, double db) {
  return q * (q + 1.0) / (q - 1.0) * dsigma * dsigma + 2.0 * q * db;
}

}  // namespace

std::vector<double> stein_q_grid() {
  std::vector<double> qs;
  for (int i = 11; i <= 80; ++i) qs.push_back(i / 10.0);
  return qs;
}

ModelSpec constant_model(double sigma0, double b0) {
  require(sigma0 > 0.0, "constant_model: sigma0 must be positive");
  require(b0 > 0.0, "constant_model: b0 must be positive");
  ModelSpec m;
  m.name = "constant";
  m.coefficients.sigma = [sigma0](double, double) { return sigma0; };
  m.coefficients.drift_b = [b0](double, double) { return b0; };
  m.coefficients.d_sigma_dy = [](double, double) { return 0.0; };
  m.coefficients.d_b_dy = [](double, double) { return 0.0; };
  m.limits.sigma_inf = [sigma0](double) { return sigma0; };
  m.limits.b_inf = [b0](double) { return b0; };
  m.limits.sigma_bar = m.limits.sigma_inf;
  m.limits.b_bar = m.limits.b_inf;
  m.constants = {sigma0, sigma0, 0.0, b0, b0, 0.0, 1.0, 2.0, -kInf, 2.0};
  m.claimed_clauses = kBoundedClauses;
  m.claimed_clauses.push_back("clt_exponent");
  m.claimed_clauses.push_back("berry_esseen_exponents");
  return m;
}

ModelSpec perturbed_model(double sigma_inf, double b_inf, double s3, double b3, double alpha,
                          double beta) {
  require(s3 >= 0.0 && b3 >= 0.0, "perturbed_model: amplitudes must be non-negative");
  require(sigma_inf - s3 > 0.0, "perturbed_model: need sigma_inf - s3 > 0");
  require(b_inf - b3 > 0.0, "perturbed_model: need b_inf - b3 > 0");
  require(alpha > 0.0 && beta > 0.0, "perturbed_model: decay exponents must be positive");

  ModelSpec m;
  m.name = "perturbed";
  m.coefficients.sigma = [=](double, double y) { return sigma_inf + s3 * envelope(y, alpha); };
  m.coefficients.drift_b = [=](double, double y) { return b_inf + b3 * envelope(y, beta); };
  m.coefficients.d_sigma_dy = [=](double, double y) { return s3 * envelope_dy(y, alpha); };
  m.coefficients.d_b_dy = [=](double, double y) { return b3 * envelope_dy(y, beta); };
  m.limits.sigma_inf = [sigma_inf](double) { return sigma_inf; };
  m.limits.b_inf = [b_inf](double) { return b_inf; };
  m.limits.sigma_bar = m.limits.sigma_inf;
  m.limits.b_bar = m.limits.b_inf;

  // |d/dy envelope| <= e (y v 1)^{-e-1}, hence sigma3 = s3 alpha and b3 = b3 beta.
  m.constants.sigma1 = sigma_inf;
  m.constants.sigma2 = sigma_inf + s3;
  m.constants.sigma3 = s3 * alpha;
  m.constants.b1 = b_inf;
  m.constants.b2 = b_inf + b3;
  m.constants.b3 = b3 * beta;
  m.constants.alpha = alpha;
  m.constants.beta = beta;

  // The Stein-type condition, searched over the q grid on a dense y grid.
  const double rhs = 0.5 * sigma_inf * sigma_inf * b_inf * b_inf;
  double best_sup = kInf, best_q = std::numeric_limits<double>::quiet_NaN();
  for (double q : stein_q_grid()) {
    double sup = -kInf;
    for (int i = 0; i <= 4000; ++i) {
      const double y = i < 1000 ? -1.0 + i * 1e-3 : std::pow(10.0, (i - 1000) * 2e-3);
      sup = std::max(sup, stein_lhs(q, s3 * envelope_dy(y, alpha), b3 * envelope_dy(y, beta)));
    }
    if (sup < best_sup) {
      best_sup = sup;
      best_q = q;
    }
  }
  const bool stein_ok = best_sup < rhs - kClauseSlack;
  if (stein_ok) {
    m.constants.q = best_q;
  } else {
    m.warnings.push_back("no q in {1.1, ..., 8} satisfies the Stein-type condition; "
                         "Berry-Esseen hypotheses unmet");
  }

  const double alpha_eff = s3 > 0.0 ? alpha : kInf;
  const double beta_eff = b3 > 0.0 ? beta : kInf;
  m.claimed_clauses = {"sigma_bounds", "sigma_decay", "drift_bounds", "drift_decay"};
  if (stein_ok) m.claimed_clauses.push_back("stein_condition");
  if (beta_eff > 0.5) m.claimed_clauses.push_back("clt_exponent");
  if (alpha_eff > 0.5 && beta_eff > 1.0) m.claimed_clauses.push_back("berry_esseen_exponents");
  return m;
}

ModelSpec hyperbolic_radial(int d) {
  require(d >= 2, "hyperbolic_radial: dimension d must be at least 2 (got " + std::to_string(d) + ")");
  const double half = 0.5 * (d - 1);
  ModelSpec m;
  m.name = "hyperbolic";
  m.coefficients.sigma = [](double, double) { return 1.0; };
  m.coefficients.drift_b = [half](double, double y) { return half / std::tanh(y); };
  m.coefficients.d_sigma_dy = [](double, double) { return 0.0; };
  m.coefficients.d_b_dy = [half](double, double y) {
    const double s = std::sinh(y);
    return -half / (s * s);
  };
  m.limits.sigma_inf = [](double) { return 1.0; };
  m.limits.b_inf = [half](double) { return half; };
  m.limits.sigma_bar = m.limits.sigma_inf;
  m.limits.b_bar = m.limits.b_inf;

  double b3 = 0.0;
  for (int i = 0; i <= 49000; ++i) {
    const double y = 1.0 + i * 1e-3;
    const double s = std::sinh(y);
    b3 = std::max(b3, half * y * y * y / (s * s));
  }
  m.constants = {1.0, 1.0, 0.0, half, kInf, b3, 1.0, 2.0, 0.0, 2.0};
  // b >= c1 / y with c1 = (d-1)/2 (gamma1 = 1) and |d_y b| <= (d-1)/2 y^{-2}.
  m.boundary = BoundaryConstants{1.0, 2.0, half, half};
  m.claimed_clauses = kBoundedClauses;
  m.claimed_clauses.insert(m.claimed_clauses.end(),
                           {"clt_exponent", "berry_esseen_exponents", "boundary_blowup",
                            "boundary_derivative"});
  if (relaxed_boundary_applicable(m)) m.claimed_clauses.push_back("relaxed_exponent");
  return m;
}

bool relaxed_boundary_applicable(const ModelSpec& model) {
  if (!model.boundary) return false;
  const auto& bc = *model.boundary;
  const double ratio = 2.0 * bc.c1 / (model.constants.sigma2 * model.constants.sigma2);
  return ratio > 3.0 && bc.gamma2 > 1.0 && bc.gamma2 < 1.0 + 0.25 * (ratio - 3.0);
}

ModelSpec linear_drift_test_model(double kappa, double sigma0) {
  require(sigma0 > 0.0, "linear_drift_test_model: sigma0 must be positive");
  ModelSpec m;
  m.name = "linear_drift";
  m.coefficients.sigma = [sigma0](double, double) { return sigma0; };
  m.coefficients.drift_b = [kappa](double, double y) { return kappa * y; };
  m.coefficients.d_sigma_dy = [](double, double) { return 0.0; };
  m.coefficients.d_b_dy = [kappa](double, double) { return kappa; };
  m.limits.sigma_inf = [sigma0](double) { return sigma0; };
  m.limits.b_inf = [](double) { return 0.0; };
  m.limits.sigma_bar = m.limits.sigma_inf;
  m.limits.b_bar = m.limits.b_inf;
  m.constants = {sigma0, sigma0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, -kInf,
                 std::numeric_limits<double>::quiet_NaN()};
  m.warnings.push_back("test fixture: linear drift violates the drift bounds");
  return m;
}

ModelSpec make_model(const std::string& name, const std::map<std::string, double>& params) {
  auto take = [&](const std::set<std::string>& allowed) {
    for (const auto& [key, value] : params) {
      if (!allowed.count(key))
        throw Error(ErrorKind::precondition, "model '" + name + "' has no parameter '" + key + "'");
    }
    return [&](const std::string& key, double fallback) {
      auto it = params.find(key);
      return it == params.end() ? fallback : it->second;
    };
  };
  if (name == "constant") {
    auto get = take({"sigma0", "b0"});
    return constant_model(get("sigma0", 1.0), get("b0", 1.0));
  }
  if (name == "perturbed") {
    auto get = take({"sigma_inf", "b_inf", "s3", "b3", "alpha", "beta"});
    return perturbed_model(get("sigma_inf", 1.0), get("b_inf", 1.0), get("s3", 0.5),
                           get("b3", 0.5), get("alpha", 1.0), get("beta", 2.0));
  }
  if (name == "hyperbolic") {
    auto get = take({"d"});
    const double d = get("d", 9.0);
    require(d == std::floor(d), "hyperbolic: d must be an integer");
    return hyperbolic_radial(static_cast<int>(d));
  }
  throw Error(ErrorKind::precondition,
              "unknown model '" + name + "' (expected constant, perturbed or hyperbolic)");
}

// ---------------------------------------------------------------------------

const ClauseCheck* AssumptionReport::find(const std::string& clause) const {
  for (const auto& c : clauses)
    if (c.clause == clause) return &c;
  return nullptr;
}

bool AssumptionReport::passes(const std::string& clause) const {
  const auto* c = find(clause);
  return c && c->pass;
}

std::vector<std::string> AssumptionReport::passing_clauses() const {
  std::vector<std::string> out;
  for (const auto& c : clauses)
    if (c.pass) out.push_back(c.clause);
  return out;
}

namespace {

ClauseCheck make_clause(std::string name, double measured, double required, Relation rel) {
  ClauseCheck c;
  c.clause = std::move(name);
  c.measured = measured;
  c.required = required;
  c.relation = rel;
  c.margin = measured - required;
  c.pass = rel == Relation::greater ? c.margin >= kClauseSlack : c.margin <= -kClauseSlack;
  return c;
}

struct DecayFit {
  double exponent = kInf;   // alpha_hat (or beta_hat)
  double constant = 0.0;    // sup over the grid of |d| (y v 1)^{exponent + 1}
};

// sup_t |derivative| per y node, fitted as C y^{-(e+1)} over y >= 10.
DecayFit fit_decay(const std::vector<double>& ys, const std::vector<double>& sup_abs) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] >= 10.0 && sup_abs[i] > 0.0 && std::isfinite(sup_abs[i])) {
      lx.push_back(std::log(ys[i]));
      ly.push_back(std::log(sup_abs[i]));
    }
  }
  DecayFit fit;
  if (lx.size() >= 2) fit.exponent = -linear_fit(lx, ly).slope - 1.0;
  const double e = std::min(fit.exponent, 50.0);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (sup_abs[i] > 0.0)
      fit.constant = std::max(fit.constant, sup_abs[i] * std::pow(std::max(ys[i], 1.0), e + 1.0));
  }
  return fit;
}

}  // namespace

AssumptionReport certify_assumptions(const ModelSpec& model, const ProbeGrid& probe) {
  if (probe.nodes() < 100)
    throw Error(ErrorKind::insufficient_probe,
                "probe grid has " + std::to_string(probe.nodes()) + " nodes; at least 100 needed");
  require(probe.n_y >= 2 && probe.n_t >= 1, "probe grid needs at least 2 y nodes");
  const bool finite_l = model.has_finite_boundary();
  const double l = model.constants.l;

  std::vector<double> ys;
  if (finite_l) {
    const double lo = std::log(probe.boundary_offset), hi = std::log(probe.y_max - l);
    for (std::size_t i = 0; i < probe.n_y; ++i)
      ys.push_back(l + std::exp(lo + (hi - lo) * i / (probe.n_y - 1.0)));
  } else {
    // A quarter of the nodes cover [y_min, 0] linearly, the rest (0, y_max] log-spaced.
    const std::size_t n_lin = probe.n_y / 4, n_log = probe.n_y - n_lin;
    for (std::size_t i = 0; i < n_lin; ++i)
      ys.push_back(probe.y_min_unbounded * (1.0 - static_cast<double>(i) / n_lin));
    const double lo = std::log(probe.boundary_offset), hi = std::log(probe.y_max);
    for (std::size_t i = 0; i < n_log; ++i)
      ys.push_back(std::exp(lo + (hi - lo) * i / std::max<double>(1.0, n_log - 1.0)));
  }
  std::vector<double> ts;
  for (std::size_t j = 0; j < probe.n_t; ++j)
    ts.push_back(probe.n_t == 1 ? 0.0 : probe.t_max * j / (probe.n_t - 1.0));

  std::ostringstream desc;
  desc << probe.n_y << " y nodes on [" << ys.front() << ", " << ys.back() << "] x " << probe.n_t
       << " t nodes on [0, " << ts.back() << "]";

  AssumptionReport rep;
  rep.grid_description = desc.str();
  rep.sigma1 = rep.b1 = kInf;
  rep.sigma2 = rep.b2 = -kInf;
  const auto& cf = model.coefficients;
  const auto qs = stein_q_grid();
  std::vector<double> sup_dsigma(ys.size(), 0.0), sup_db(ys.size(), 0.0);
  std::vector<double> stein_sup(qs.size(), -kInf);
  double blowup_inf = kInf, deriv_sup = 0.0;

  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    double b_inf_t = kInf;
    double db_sup_t = 0.0;
    for (double t : ts) {
      const double s = cf.sigma(t, y), b = cf.drift_b(t, y);
      const double ds = cf.d_sigma_dy(t, y), db = cf.d_b_dy(t, y);
      rep.sigma1 = std::min(rep.sigma1, s);
      rep.sigma2 = std::max(rep.sigma2, s);
      rep.b1 = std::min(rep.b1, b);
      rep.b2 = std::max(rep.b2, b);
      sup_dsigma[i] = std::max(sup_dsigma[i], std::abs(ds));
      sup_db[i] = std::max(sup_db[i], std::abs(db));
      for (std::size_t j = 0; j < qs.size(); ++j)
        stein_sup[j] = std::max(stein_sup[j], stein_lhs(qs[j], ds, db));
      b_inf_t = std::min(b_inf_t, b);
      db_sup_t = std::max(db_sup_t, std::abs(db));
    }
    if (finite_l && model.boundary && y < l + 1.0) {
      blowup_inf = std::min(blowup_inf, b_inf_t * std::pow(y - l, model.boundary->gamma1));
      deriv_sup = std::max(deriv_sup, db_sup_t * std::pow(y - l, model.boundary->gamma2));
    }
  }

  const DecayFit sfit = fit_decay(ys, sup_dsigma);
  const DecayFit bfit = fit_decay(ys, sup_db);
  rep.alpha_hat = sfit.exponent;
  rep.sigma3_hat = sfit.constant;
  rep.beta_hat = bfit.exponent;
  rep.b3_hat = bfit.constant;

  const auto best = std::min_element(stein_sup.begin(), stein_sup.end());
  rep.best_q = qs[static_cast<std::size_t>(best - stein_sup.begin())];
  const double stein_rhs = 0.5 * rep.sigma1 * rep.sigma1 * rep.b1 * rep.b1;
  rep.stein_condition_margin = *best - stein_rhs;

  rep.clauses.push_back(make_clause("sigma_bounds", rep.sigma1, 0.0, Relation::greater));
  rep.clauses.push_back(make_clause("sigma_decay", rep.alpha_hat, 0.0, Relation::greater));
  rep.clauses.push_back(make_clause("drift_bounds", rep.b1, 0.0, Relation::greater));
  rep.clauses.push_back(make_clause("drift_decay", rep.beta_hat, 0.0, Relation::greater));
  rep.clauses.push_back(make_clause("stein_condition", *best, stein_rhs, Relation::less));
  rep.clauses.push_back(make_clause("clt_exponent", rep.beta_hat, 0.5, Relation::greater));
  rep.clauses.push_back(make_clause("berry_esseen_exponents",
                                    std::min(rep.alpha_hat - 0.5, rep.beta_hat - 1.0), 0.0,
                                    Relation::greater));
  if (finite_l && model.boundary) {
    const auto& bc = *model.boundary;
    rep.clauses.push_back(make_clause("boundary_blowup", blowup_inf, bc.c1, Relation::greater));
    rep.clauses.push_back(make_clause("boundary_derivative", deriv_sup, bc.c2, Relation::less));
    const double ratio = 2.0 * bc.c1 / (rep.sigma2 * rep.sigma2);
    rep.clauses.push_back(make_clause("relaxed_exponent", bc.gamma2,
                                      1.0 + 0.25 * std::max(0.0, ratio - 3.0), Relation::less));
  }
  return rep;
}

void write_assumption_csv(const AssumptionReport& report, std::ostream& out) {
  out << "clause,measured,required,margin,verdict\n";
  char buf[256];
  for (const auto& c : report.clauses) {
    std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%s\n", c.clause.c_str(), c.measured,
                  c.required, c.margin, c.pass ? "pass" : "fail");
    out << buf;
  }
}

}  // namespace berrylab
