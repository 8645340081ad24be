#include "berrylab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "berrylab/detail/engine.hpp"
#include "berrylab/error.hpp"
#include "berrylab/numerics.hpp"
#include "berrylab/sde.hpp"

namespace berrylab {

// ---------------------------------------------------------------------------
// Gaussian TV

double gaussian_tv_constant(int d) {
  require(d >= 1, "gaussian_tv_constant: d must be positive");
  return std::numbers::sqrt2 * std::exp(std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d));
}

double gaussian_tv_bound(const GaussianTvQuery& q) {
  require(q.d >= 1, "gaussian_tv_bound: d must be positive");
  require(q.a > 0.0, "gaussian_tv_bound: scale a must be positive");
  const auto d = static_cast<Eigen::Index>(q.d);
  require(q.v.size() == d, "gaussian_tv_bound: shift has the wrong dimension");
  require(q.V.rows() == d && q.V.cols() == d, "gaussian_tv_bound: covariance has the wrong shape");
  require(q.V.isApprox(q.V.transpose(), 1e-12), "gaussian_tv_bound: covariance is not symmetric");
  const Eigen::LLT<Eigen::MatrixXd> llt(q.V);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::decomposition,
                "gaussian_tv_bound: covariance is not positive definite (Cholesky failed)");
  // |V^{-1/2} v|^2 = v' V^{-1} v = |L^{-1} v|^2 for V = L L'.
  const Eigen::VectorXd w = llt.matrixL().solve(q.v);
  return 2.0 * std::abs(std::pow(q.a, q.d) - 1.0) + gaussian_tv_constant(q.d) * w.norm();
}

double gaussian_tv_bound_1d(double a, double v) {
  GaussianTvQuery q;
  q.d = 1;
  q.a = a;
  q.v = Eigen::VectorXd::Constant(1, v);
  q.V = Eigen::MatrixXd::Identity(1, 1);
  return gaussian_tv_bound(q);
}

double gaussian_tv_exact_1d(double a, double v) {
  require(a > 0.0, "gaussian_tv_exact_1d: scale a must be positive");
  auto gap = [a, v](double x) { return std::abs(normal_pdf(x) - normal_pdf((x - v) / a) / a); };
  // Crossings of the two densities: (a^2 - 1) x^2 + 2 v x - v^2 - 2 a^2 log a = 0.
  std::vector<double> cuts;
  const double qa = a * a - 1.0, qb = 2.0 * v, qc = -v * v - 2.0 * a * a * std::log(a);
  if (std::abs(qa) < 1e-14) {
    if (qb != 0.0) cuts.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0.0) {
      const double r = std::sqrt(disc);
      cuts.push_back((-qb - r) / (2.0 * qa));
      cuts.push_back((-qb + r) / (2.0 * qa));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  double total = 0.0, lo = -inf;
  cuts.push_back(inf);
  for (double hi : cuts) {
    total += Quad::integrate(gap, lo, hi, 20, 1e-13);
    lo = hi;
  }
  return 0.5 * total;
}

// ---------------------------------------------------------------------------
// Shared Monte Carlo plumbing

Proportion make_proportion(std::size_t count, std::size_t n) {
  require(n > 0, "proportion needs a positive sample size");
  Proportion p;
  p.count = count;
  p.n = n;
  const double nn = static_cast<double>(n);
  p.p = static_cast<double>(count) / nn;
  if (count == 0) {
    p.low = 0.0;
    p.high = std::min(1.0, 3.0 / nn);
    return p;
  }
  const double z = 1.959963984540054, z2 = z * z;
  const double centre = (p.p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z / (1.0 + z2 / nn) * std::sqrt(p.p * (1.0 - p.p) / nn + z2 / (4.0 * nn * nn));
  p.low = std::max(0.0, centre - half);
  p.high = std::min(1.0, centre + half);
  return p;
}

void write_bounds_csv(std::span<const BoundsRow> rows, std::ostream& out) {
  out << "op,inputs,t,estimate,ci_low,ci_high,reference,verdict\n";
  for (const auto& r : rows) {
    out << r.op << ',' << r.inputs << ',' << format_double(r.t) << ','
        << format_double(r.estimate) << ',' << format_double(r.ci_low) << ','
        << format_double(r.ci_high) << ',' << format_double(r.reference) << ',' << r.verdict
        << '\n';
  }
}

namespace {

std::string describe(std::initializer_list<std::pair<const char*, double>> items) {
  std::string s;
  for (const auto& [name, value] : items) {
    if (!s.empty()) s += ' ';
    s += name;
    s += '=';
    s += format_double(value);
  }
  return s;
}

void check_grid(const std::vector<double>& grid, const char* what, double min_value) {
  require(!grid.empty(), std::string(what) + ": empty time grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(std::isfinite(grid[i]) && grid[i] >= min_value,
            std::string(what) + ": time grid entries must be >= " + format_double(min_value));
    if (i > 0) require(grid[i] > grid[i - 1], std::string(what) + ": time grid must ascend");
  }
}

SimConfig mc_config(const McOptions& opt, double horizon, double x0, std::uint64_t seed) {
  require(opt.n_paths > 0, "n_paths must be positive");
  require(opt.steps_per_unit > 0, "steps_per_unit must be positive");
  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.n_steps = static_cast<std::size_t>(std::ceil(horizon * static_cast<double>(opt.steps_per_unit) - 1e-9));
  cfg.n_paths = opt.n_paths;
  cfg.seed = seed;
  cfg.x0 = x0;
  cfg.track_comparison = false;
  cfg.threads = opt.threads;
  return cfg;
}

// Grid node of time t; t must fall on the simulation grid.
std::size_t node_of(double t, const SimConfig& cfg) {
  const double dt = cfg.dt();
  const auto k = static_cast<std::size_t>(std::llround(t / dt));
  require(std::abs(static_cast<double>(k) * dt - t) <= 1e-9 * std::max(1.0, t),
          "time " + format_double(t) + " is not a grid node; adjust steps_per_unit");
  return k;
}

std::vector<std::size_t> nodes_of(const std::vector<double>& ts, const SimConfig& cfg) {
  std::vector<std::size_t> out;
  for (double t : ts) out.push_back(node_of(t, cfg));
  return out;
}

// Observer recording the state at selected nodes (the last may be M).
struct SnapshotObserver {
  const std::vector<std::size_t>* nodes;
  double* out;  // nodes->size() values
  std::size_t next = 0;

  void step(std::size_t k, double, double x, double, double, double, double) {
    while (next < nodes->size() && (*nodes)[next] == k) out[next++] = x;
  }
  void finish(double x, double) {
    while (next < nodes->size()) out[next++] = x;
  }
};

// Runs `model` and returns path-major snapshots at the given nodes.
std::vector<double> snapshots(const ModelSpec& model, const SimConfig& cfg,
                              const std::vector<std::size_t>& nodes) {
  std::vector<double> out(cfg.n_paths * nodes.size());
  detail::run_paths(model, cfg, [&](std::size_t n) {
    return SnapshotObserver{&nodes, out.data() + n * nodes.size()};
  });
  return out;
}

// Semi-log least squares of log p on t.
LinearFit semilog_fit(const std::vector<double>& t, const std::vector<double>& p) {
  std::vector<double> ly;
  for (double v : p) ly.push_back(std::log(v));
  return linear_fit(t, ly);
}

bool stable_pair(double m0, double lo0, double hi0, double m1, double lo1, double hi1) {
  const double width = std::max(hi0 - lo0, hi1 - lo1);
  // Identical means count as stable even when both intervals are degenerate.
  return m1 == m0 || std::abs(m1 - m0) < 2.0 * width;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------------------
// Hitting tail

namespace {

struct HitObserver {
  const std::vector<std::size_t>* nodes;
  double level;
  std::uint8_t* hit;  // one flag per grid time

  void step(std::size_t k, double, double x, double, double, double, double) {
    if (x > level) return;
    for (std::size_t i = 0; i < nodes->size(); ++i)
      if (k >= (*nodes)[i]) hit[i] = 1;
  }
  void finish(double x, double) {
    if (x <= level)
      for (std::size_t i = 0; i < nodes->size(); ++i) hit[i] = 1;
  }
};

}  // namespace

HittingTailResult hitting_tail_mc(const ModelSpec& model, double level, double x0,
                                  std::vector<double> t_grid, const McOptions& opt) {
  check_grid(t_grid, "hitting_tail_mc", 0.0);
  require(opt.n_paths >= 10000, "hitting_tail_mc needs N >= 10^4");
  HittingTailResult res;
  res.level = level;
  res.x0 = x0;
  res.t_grid = t_grid;
  res.horizon = 4.0 * t_grid.back();
  require(res.horizon > 0.0, "hitting_tail_mc: max(t_grid) must be positive");

  const ModelSpec cmp = comparison_model(model, 0.0);
  const SimConfig cfg = mc_config(opt, res.horizon, x0, opt.seed);
  const auto nodes = nodes_of(t_grid, cfg);
  const std::size_t m = t_grid.size();
  std::vector<std::uint8_t> hits(cfg.n_paths * m, 0);
  detail::run_paths(cmp, cfg, [&](std::size_t n) {
    return HitObserver{&nodes, level, hits.data() + n * m};
  });
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t count = 0;
    for (std::size_t n = 0; n < cfg.n_paths; ++n) count += hits[n * m + i];
    res.probability.push_back(make_proportion(count, cfg.n_paths));
  }

  const auto& c = model.constants;
  res.threshold = -c.b1 * c.b1 * c.sigma1 * c.sigma1 / (16.0 * std::pow(c.sigma2, 4)) + 0.05;
  std::vector<double> ft, fp;
  for (std::size_t i = 0; i < m && res.probability[i].count > 0; ++i) {
    ft.push_back(t_grid[i]);
    fp.push_back(res.probability[i].p);
  }
  res.fitted_points = ft.size();
  if (ft.size() >= 2) {
    res.slope = semilog_fit(ft, fp).slope;
    res.pass = res.slope <= res.threshold;
  } else {
    res.slope = kNaN;
  }
  return res;
}

std::vector<BoundsRow> HittingTailResult::rows() const {
  std::vector<BoundsRow> out;
  const std::string in = describe({{"L", level}, {"x0", x0}, {"T", horizon}});
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const auto& p = probability[i];
    out.push_back({"hitting_tail", in, t_grid[i], p.p, p.low, p.high, kNaN,
                   p.count == 0 ? "zero_count" : (i < fitted_points ? "fitted" : "unfitted")});
  }
  out.push_back({"hitting_tail_slope", in, kNaN, slope, kNaN, kNaN, threshold,
                 pass ? "pass" : "fail"});
  return out;
}

// ---------------------------------------------------------------------------
// Infimum tail

double inf_tail_eval(double sigma2, double b1, double x, double y) {
  require(x > y, "inf_tail_eval requires x > y");
  require(sigma2 > 0.0, "inf_tail_eval requires sigma2 > 0");
  const double g = x - y;
  return std::exp(-0.5 * g * g) / g + std::exp(-b1 * g / (sigma2 * sigma2));
}

namespace {

struct MinObserver {
  double* out;
  double min = std::numeric_limits<double>::infinity();

  void step(std::size_t, double, double x, double, double, double, double) {
    min = std::min(min, x);
  }
  void finish(double x, double) { *out = std::min(min, x); }
};

std::vector<double> path_minima(const ModelSpec& model, const SimConfig& cfg) {
  std::vector<double> out(cfg.n_paths);
  detail::run_paths(model, cfg, [&](std::size_t n) { return MinObserver{&out[n]}; });
  return out;
}

}  // namespace

InfTailResult inf_tail_mc(const ModelSpec& model, double x, std::vector<double> gaps,
                          double horizon, const McOptions& opt) {
  require(!gaps.empty(), "inf_tail_mc needs at least one gap");
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    require(gaps[i] > 0.0, "inf_tail_mc: gaps x - y must be positive");
    if (i > 0) require(gaps[i] > gaps[i - 1], "inf_tail_mc: gaps must ascend");
  }
  InfTailResult res;
  res.x = x;
  res.horizon = horizon;
  res.gaps = gaps;
  const ModelSpec cmp = comparison_model(model, 0.0);
  const double sigma2 = model.constants.sigma2, b1 = model.constants.b1;

  auto estimate = [&](std::uint64_t seed) {
    const auto minima = path_minima(cmp, mc_config(opt, horizon, x, seed));
    std::vector<Proportion> out;
    for (double g : gaps) {
      std::size_t count = 0;
      for (double m : minima) count += m < x - g ? 1 : 0;
      out.push_back(make_proportion(count, minima.size()));
    }
    return out;
  };
  for (double g : gaps) res.expression.push_back(inf_tail_eval(sigma2, b1, x, x - g));
  const auto calibration = estimate(derive_key(opt.seed, 0xCA1B));
  res.calibrated_c = calibration.front().high / res.expression.front();
  res.probability = estimate(opt.seed);
  res.pass = true;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    res.pass = res.pass && res.probability[i].p <= res.calibrated_c * res.expression[i];
  return res;
}

std::vector<BoundsRow> InfTailResult::rows() const {
  std::vector<BoundsRow> out;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const auto& p = probability[i];
    const double env = calibrated_c * expression[i];
    out.push_back({"inf_tail", describe({{"x", x}, {"gap", gaps[i]}, {"C_calibrated", calibrated_c}}),
                   horizon, p.p, p.low, p.high, env, p.p <= env ? "pass" : "fail"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time tail

TimeTailResult time_tail_mc(const ModelSpec& model, double epsilon, double x, double y,
                            std::vector<double> t_grid, const McOptions& opt) {
  check_grid(t_grid, "time_tail_mc", 0.0);
  const double b1 = model.constants.b1, sigma2 = model.constants.sigma2;
  require(epsilon > 0.0 && epsilon < b1, "time_tail_mc requires 0 < eps < b1");
  for (double t : t_grid)
    require((b1 - epsilon) * t > y - x,
            "time_tail_mc requires (b1 - eps) t > y - x at t = " + format_double(t));

  TimeTailResult res;
  res.epsilon = epsilon;
  res.x = x;
  res.y = y;
  res.t_grid = t_grid;
  res.envelope_rate = -epsilon * epsilon / (2.0 * sigma2 * sigma2);

  const ModelSpec cmp = comparison_model(model, 0.0);
  const SimConfig cfg = mc_config(opt, t_grid.back(), x, opt.seed);
  const auto nodes = nodes_of(t_grid, cfg);
  const auto snaps = snapshots(cmp, cfg, nodes);
  const std::size_t m = t_grid.size();
  std::vector<double> ft, fp;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t count = 0;
    for (std::size_t n = 0; n < cfg.n_paths; ++n) count += snaps[n * m + i] <= y ? 1 : 0;
    res.probability.push_back(make_proportion(count, cfg.n_paths));
    res.envelope.push_back(std::exp(res.envelope_rate * t_grid[i]));
    if (count > 0) {
      ft.push_back(t_grid[i]);
      fp.push_back(res.probability.back().p);
    }
  }
  res.fitted_points = ft.size();
  if (ft.size() >= 2) {
    res.slope = semilog_fit(ft, fp).slope;
    res.pass = res.slope <= res.envelope_rate + 0.05;
  } else {
    // Too few events to fit a rate: compare with the envelope at C = 1.
    res.slope = kNaN;
    res.pass = true;
    for (std::size_t i = 0; i < m; ++i)
      res.pass = res.pass && res.probability[i].p <= res.envelope[i];
  }
  return res;
}

std::vector<BoundsRow> TimeTailResult::rows() const {
  std::vector<BoundsRow> out;
  const std::string in = describe({{"eps", epsilon}, {"x", x}, {"y", y}});
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const auto& p = probability[i];
    out.push_back({"time_tail", in, t_grid[i], p.p, p.low, p.high, envelope[i], ""});
  }
  out.push_back({"time_tail_slope", in, kNaN, slope, kNaN, kNaN, envelope_rate,
                 pass ? "pass" : "fail"});
  return out;
}

// ---------------------------------------------------------------------------
// Exponential functionals of Brownian motion with drift

double functional_value(Functional f, double y) {
  switch (f) {
    case Functional::indicator_neg: return y <= 0.0 ? 1.0 : 0.0;
    case Functional::exp_decay: return y >= 0.0 ? std::exp(-y) : 1.0;
  }
  return 0.0;
}

namespace {

struct TiltedObserver {
  Functional f;
  double c, delta, dt;
  const std::vector<std::size_t>* nodes;
  double* out;
  double log_weight = 0.0;
  std::size_t next = 0;

  void step(std::size_t k, double, double x, double, double db, double, double) {
    while (next < nodes->size() && (*nodes)[next] == k) out[next++] = std::exp(log_weight);
    const double fx = functional_value(f, x);
    const double d = delta * fx / kFunctionalSup;
    log_weight += c * fx * dt + d * db - 0.5 * d * d * dt;
  }
  void finish(double, double) {
    while (next < nodes->size()) out[next++] = std::exp(log_weight);
  }
};

}  // namespace

ExpFunctionalResult exp_functional_mc(Functional f, double a, double c, double x0,
                                      std::vector<double> horizons, const McOptions& opt) {
  require(c >= 0.0, "exp_functional_mc requires c >= 0");
  require(a > 0.0, "exp_functional_mc requires drift a > 0");
  require(opt.n_paths >= 10000, "exp_functional_mc needs N >= 10^4");
  check_grid(horizons, "exp_functional_mc", 0.0);
  require(horizons.front() > 0.0, "exp_functional_mc: horizons must be positive");

  ExpFunctionalResult res;
  res.f = f;
  res.a = a;
  res.c = c;
  res.x0 = x0;
  res.horizons = horizons;
  const double M = kFunctionalSup;
  if (c == 0.0) {
    res.tilt = 0.0;
  } else if (c < a * a / (2.0 * M)) {
    res.tilt = a - std::sqrt(a * a - 2.0 * c * M);
  } else {
    res.tilt = a;
  }

  // Sampling law: unit volatility, drift a - delta f(y) / M.
  ModelSpec q;
  q.name = "tilted_brownian";
  const double delta = res.tilt;
  q.coefficients.sigma = [](double, double) { return 1.0; };
  q.coefficients.drift_b = [=](double, double y) { return a - delta * functional_value(f, y) / M; };
  const SimConfig cfg = mc_config(opt, horizons.back(), x0, opt.seed);
  const auto nodes = nodes_of(horizons, cfg);
  const std::size_t m = horizons.size();
  std::vector<double> weights(cfg.n_paths * m);
  detail::run_paths(q, cfg, [&](std::size_t n) {
    return TiltedObserver{f, c, delta, cfg.dt(), &nodes, weights.data() + n * m};
  });

  std::vector<double> column(cfg.n_paths);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t n = 0; n < cfg.n_paths; ++n) column[n] = weights[n * m + i];
    const MeanCi ci = mean_ci(column);
    res.mean.push_back(ci.mean);
    res.ci_low.push_back(ci.low);
    res.ci_high.push_back(ci.high);
  }
  res.stabilized = m >= 2 && stable_pair(res.mean[m - 2], res.ci_low[m - 2], res.ci_high[m - 2],
                                         res.mean[m - 1], res.ci_low[m - 1], res.ci_high[m - 1]);
  return res;
}

std::vector<BoundsRow> ExpFunctionalResult::rows() const {
  std::vector<BoundsRow> out;
  const std::string in =
      std::string("f=") + (f == Functional::indicator_neg ? "indicator_neg" : "exp_decay") + ' ' +
      describe({{"a", a}, {"c", c}, {"x0", x0}, {"threshold", a * a / (2.0 * kFunctionalSup)}});
  for (std::size_t i = 0; i < horizons.size(); ++i)
    out.push_back({"exp_functional", in, horizons[i], mean[i], ci_low[i], ci_high[i], kNaN,
                   i + 1 == horizons.size() ? (stabilized ? "stabilized" : "not_stabilized") : ""});
  return out;
}

// ---------------------------------------------------------------------------
// Inverse moments

double inverse_moment_gamma_limit(const ModelSpec& model) {
  require(model.has_finite_boundary() && model.boundary.has_value(),
          "inverse moments need a model with a finite boundary");
  const double s2 = model.constants.sigma2;
  return 0.5 * (2.0 * model.boundary->c1 / (s2 * s2) - 3.0);
}

InverseMomentResult inverse_moment_proxy(const ModelSpec& model, double gamma, double x0,
                                         std::vector<double> horizons, const McOptions& opt) {
  require(gamma > 0.0, "inverse_moment_proxy requires gamma > 0");
  const double limit = inverse_moment_gamma_limit(model);
  check_grid(horizons, "inverse_moment_proxy", 0.0);
  require(horizons.front() > 0.0, "inverse_moment_proxy: horizons must be positive");

  InverseMomentResult res;
  res.gamma = gamma;
  res.x0 = x0;
  res.horizons = horizons;
  res.gamma_warning = !(gamma < limit);
  const double l = model.constants.l;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    const SimConfig cfg = mc_config(opt, horizons[i], x0, derive_key(opt.seed, i));
    auto values = path_minima(model, cfg);
    for (auto& v : values) v = std::pow(v - l, -gamma);
    const MeanCi ci = mean_ci(values);
    res.mean.push_back(ci.mean);
    res.ci_low.push_back(ci.low);
    res.ci_high.push_back(ci.high);
  }
  const std::size_t m = horizons.size();
  res.stabilized = m >= 2 && stable_pair(res.mean[m - 2], res.ci_low[m - 2], res.ci_high[m - 2],
                                         res.mean[m - 1], res.ci_low[m - 1], res.ci_high[m - 1]);
  return res;
}

std::vector<BoundsRow> InverseMomentResult::rows() const {
  std::vector<BoundsRow> out;
  const std::string in = describe({{"gamma", gamma}, {"x0", x0}});
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    std::string verdict;
    if (i + 1 == horizons.size()) {
      verdict = stabilized ? "stabilized" : "not_stabilized";
      if (gamma_warning) verdict += ";gamma_outside_range";
    }
    out.push_back({"inverse_moment", in, horizons[i], mean[i], ci_low[i], ci_high[i],
                   std::pow(x0, -gamma), verdict});
  }
  return out;
}

InverseMomentYResult inverse_moment_y_mc(const ModelSpec& model, double gamma, double x0,
                                         std::vector<double> t_grid, const McOptions& opt) {
  require(t_grid.size() >= 3, "inverse_moment_y_mc needs at least 3 horizons");
  check_grid(t_grid, "inverse_moment_y_mc", 1.0);
  require(gamma > 0.0, "inverse_moment_y_mc requires gamma > 0");

  InverseMomentYResult res;
  res.gamma = gamma;
  res.x0 = x0;
  res.t_grid = t_grid;
  const ModelSpec cmp = comparison_model(model, 0.0);
  const SimConfig cfg = mc_config(opt, t_grid.back(), x0, opt.seed);
  const auto nodes = nodes_of(t_grid, cfg);
  const auto snaps = snapshots(cmp, cfg, nodes);
  const std::size_t m = t_grid.size();
  std::vector<double> column(cfg.n_paths), lx, ly;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t n = 0; n < cfg.n_paths; ++n) {
      const double y = snaps[n * m + i];
      column[n] = y >= 1.0 ? std::pow(y, -gamma) : 0.0;
    }
    const MeanCi ci = mean_ci(column);
    res.mean.push_back(ci.mean);
    res.ci_low.push_back(ci.low);
    res.ci_high.push_back(ci.high);
    if (ci.mean > 0.0) {
      lx.push_back(std::log(t_grid[i]));
      ly.push_back(std::log(ci.mean));
    }
  }
  if (lx.size() >= 2) {
    const LinearFit fit = linear_fit(lx, ly);
    res.slope = fit.slope;
    res.r2 = fit.r2;
    res.pass = res.slope <= -gamma + 0.1;
  } else {
    res.slope = kNaN;
    res.r2 = kNaN;
  }
  return res;
}

std::vector<BoundsRow> InverseMomentYResult::rows() const {
  std::vector<BoundsRow> out;
  const std::string in = describe({{"gamma", gamma}, {"x0", x0}});
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    out.push_back({"inverse_moment_y", in, t_grid[i], mean[i], ci_low[i], ci_high[i],
                   std::pow(t_grid[i], -gamma), ""});
  out.push_back({"inverse_moment_y_slope", in, kNaN, slope, kNaN, kNaN, -gamma + 0.1,
                 pass ? "pass" : "fail"});
  return out;
}

}  // namespace berrylab
