#include "berrylab/sde.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "berrylab/detail/engine.hpp"
#include "berrylab/error.hpp"
#include "berrylab/numerics.hpp"

namespace berrylab {

ModelSpec resolve_limits(ModelSpec model) {
  LimitProfile& lim = model.limits;
  const Field sigma = model.coefficients.sigma;
  const Field drift = model.coefficients.drift_b;
  if (!lim.sigma_inf) lim.sigma_inf = [sigma](double t) { return sigma(t, 1e8); };
  if (!lim.b_inf) lim.b_inf = [drift](double t) { return drift(t, 1e8); };
  if (!lim.sigma_bar) {
    if (model.time_independent) {
      lim.sigma_bar = lim.sigma_inf;
    } else {
      lim.sigma_bar = [s = lim.sigma_inf](double t) {
        if (t <= 0.0) return s(0.0);
        return std::sqrt(integrate_gl64([&](double u) { return s(u) * s(u); }, 0.0, t) / t);
      };
    }
  }
  if (!lim.b_bar) {
    if (model.time_independent) {
      lim.b_bar = lim.b_inf;
    } else {
      lim.b_bar = [b = lim.b_inf](double t) {
        if (t <= 0.0) return b(0.0);
        return integrate_gl64(b, 0.0, t) / t;
      };
    }
  }
  return model;
}

ModelSpec comparison_model(const ModelSpec& model, double boundary_floor) {
  ModelSpec cmp = model;
  cmp.name = model.name + "/comparison";
  const double b1 = model.constants.b1;
  if (model.has_finite_boundary()) {
    const double lo = model.constants.l + boundary_floor;
    const Field sigma = model.coefficients.sigma;
    const Field dsigma = model.coefficients.d_sigma_dy;
    cmp.coefficients.sigma = [sigma, lo](double t, double y) { return sigma(t, std::max(y, lo)); };
    cmp.coefficients.d_sigma_dy = [dsigma, lo](double t, double y) {
      return y < lo ? 0.0 : dsigma(t, y);
    };
  }
  cmp.coefficients.drift_b = [b1](double, double) { return b1; };
  cmp.coefficients.d_b_dy = [](double, double) { return 0.0; };
  cmp.limits.b_inf = [b1](double) { return b1; };
  cmp.limits.b_bar = [b1](double) { return b1; };
  cmp.constants.b2 = b1;
  cmp.constants.b3 = 0.0;
  cmp.constants.l = -std::numeric_limits<double>::infinity();
  cmp.boundary.reset();
  cmp.claimed_clauses.clear();
  return cmp;
}

double validate_config(const ModelSpec& model, const SimConfig& cfg) {
  require(cfg.horizon > 0.0 && std::isfinite(cfg.horizon), "simulation horizon must be positive");
  require(cfg.n_steps > 0, "n_steps must be positive");
  require(cfg.n_paths > 0, "n_paths must be positive");
  require(std::isfinite(cfg.x0), "x0 must be finite");
  {
    std::ostringstream msg;
    msg << "time step " << cfg.dt() << " exceeds 2^-6; increase n_steps";
    require(cfg.dt() <= kMaxTimeStep, msg.str());
  }
  require(static_cast<bool>(model.coefficients.sigma) && static_cast<bool>(model.coefficients.drift_b),
          "model '" + model.name + "' lacks coefficient fields");
  if (!model.has_finite_boundary()) return 0.0;
  const double l = model.constants.l;
  const double floor = cfg.boundary_floor.value_or(1e-6 * std::max(1.0, cfg.x0 - l));
  require(floor > 0.0, "boundary floor must be positive");
  require(cfg.x0 > l + floor, "x0 must lie above l + boundary floor");
  return floor;
}

namespace detail {

void check_intervention_rate(const EngineTotals& totals, const SimConfig& cfg) {
  const double steps = static_cast<double>(cfg.n_paths) * static_cast<double>(cfg.n_steps);
  const double rate = static_cast<double>(totals.total_interventions()) / steps;
  if (rate > kMaxInterventionRate) {
    std::ostringstream msg;
    msg << "boundary instability: " << totals.total_interventions() << " of " << steps
        << " steps were clamped at the boundary (rate " << rate
        << "); reduce the time step";
    throw Error(ErrorKind::boundary_instability, msg.str());
  }
}

}  // namespace detail

namespace {

std::vector<double> make_grid(const SimConfig& cfg) {
  std::vector<double> grid(cfg.n_steps + 1);
  const double dt = cfg.dt();
  for (std::size_t k = 0; k < cfg.n_steps; ++k) grid[k] = static_cast<double>(k) * dt;
  grid[cfg.n_steps] = cfg.horizon;
  return grid;
}

struct RecordingObserver {
  double* x_row;
  double* y_row;
  double* db_row;

  void step(std::size_t k, double, double x, double y, double db, double, double) {
    x_row[k] = x;
    if (y_row) y_row[k] = y;
    db_row[k] = db;
  }
  void finish(double x, double y) {
    x_row[steps] = x;
    if (y_row) y_row[steps] = y;
  }
  std::size_t steps;
};

struct Scaling {
  double centre;  // x0 + t * b_bar(t)
  double scale;   // sigma_bar(t) * sqrt(t)
};

Scaling scaling_for(const ModelSpec& model, double horizon, double x0) {
  const double sbar = model.limits.sigma_bar(horizon);
  const double bbar = model.limits.b_bar(horizon);
  if (!(sbar > 0.0) || !std::isfinite(sbar)) {
    std::ostringstream msg;
    msg << "degenerate scaling: sigma_bar(" << horizon << ") = " << sbar;
    throw Error(ErrorKind::degenerate_scaling, msg.str());
  }
  return {x0 + horizon * bbar, sbar * std::sqrt(horizon)};
}

}  // namespace

PathEnsemble simulate_ensemble(const ModelSpec& model, const SimConfig& cfg) {
  validate_config(model, cfg);
  const std::size_t row = cfg.n_steps + 1;
  require(cfg.n_paths * row <= (std::size_t{1} << 28),
          "ensemble too large to store; use the streaming estimators");

  PathEnsemble ens;
  ens.grid = make_grid(cfg);
  ens.n_paths = cfg.n_paths;
  ens.n_steps = cfg.n_steps;
  ens.x0 = cfg.x0;
  ens.dt = cfg.dt();
  ens.x_paths.assign(cfg.n_paths * row, 0.0);
  if (cfg.track_comparison) ens.y_paths.assign(cfg.n_paths * row, 0.0);
  ens.brownian_increments.assign(cfg.n_paths * cfg.n_steps, 0.0);

  auto totals = detail::run_paths(model, cfg, [&](std::size_t n) {
    return RecordingObserver{ens.x_paths.data() + n * row,
                             cfg.track_comparison ? ens.y_paths.data() + n * row : nullptr,
                             ens.brownian_increments.data() + n * cfg.n_steps, cfg.n_steps};
  });
  ens.boundary_interventions = std::move(totals.interventions);
  ens.substep_retries = std::move(totals.retries);
  return ens;
}

void write_ensemble_csv(const PathEnsemble& ens, std::ostream& out) {
  out << "path,step,time,x,y,db\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  const bool has_y = !ens.y_paths.empty();
  for (std::size_t n = 0; n < ens.n_paths; ++n) {
    for (std::size_t k = 0; k <= ens.n_steps; ++k) {
      out << n << ',' << k << ',' << num(ens.grid[k]) << ',' << num(ens.x(n, k)) << ','
          << (has_y ? num(ens.y(n, k)) : std::string()) << ','
          << (k < ens.n_steps ? num(ens.db(n, k)) : std::string()) << '\n';
    }
  }
}

ScaledSample scaled_statistic(const PathEnsemble& ens, const ModelSpec& model_in) {
  require(ens.n_paths > 0 && ens.horizon() > 0.0, "scaled_statistic needs a non-empty ensemble with t > 0");
  const ModelSpec model = resolve_limits(model_in);
  const double t = ens.horizon();
  const Scaling sc = scaling_for(model, t, ens.x0);

  std::vector<double> sigma_inf(ens.n_steps);
  for (std::size_t k = 0; k < ens.n_steps; ++k) sigma_inf[k] = model.limits.sigma_inf(ens.grid[k]);

  ScaledSample out;
  out.horizon = t;
  out.f_values.resize(ens.n_paths);
  out.g_values.resize(ens.n_paths);
  out.x_terminal.resize(ens.n_paths);
  for (std::size_t n = 0; n < ens.n_paths; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ens.n_steps; ++k) acc += sigma_inf[k] * ens.db(n, k);
    const double xt = ens.x(n, ens.n_steps);
    out.x_terminal[n] = xt;
    out.f_values[n] = (xt - sc.centre) / sc.scale;
    out.g_values[n] = acc / sc.scale;
  }
  for (auto v : ens.boundary_interventions) out.interventions += v;
  for (auto v : ens.substep_retries) out.substep_retries += v;
  return out;
}

namespace {

struct ScaledObserver {
  const double* sigma_inf;
  double* g_acc;
  double* x_terminal;
  double acc = 0.0;

  void step(std::size_t k, double, double, double, double db, double, double) {
    acc += sigma_inf[k] * db;
  }
  void finish(double x, double) {
    *g_acc = acc;
    *x_terminal = x;
  }
};

}  // namespace

ScaledSample simulate_scaled(const ModelSpec& model_in, const SimConfig& cfg_in) {
  const ModelSpec model = resolve_limits(model_in);
  SimConfig cfg = cfg_in;
  cfg.track_comparison = false;
  validate_config(model, cfg);
  const auto grid = make_grid(cfg);
  const Scaling sc = scaling_for(model, cfg.horizon, cfg.x0);
  std::vector<double> sigma_inf(cfg.n_steps);
  for (std::size_t k = 0; k < cfg.n_steps; ++k) sigma_inf[k] = model.limits.sigma_inf(grid[k]);

  ScaledSample out;
  out.horizon = cfg.horizon;
  out.f_values.resize(cfg.n_paths);
  out.g_values.resize(cfg.n_paths);
  out.x_terminal.resize(cfg.n_paths);
  auto totals = detail::run_paths(model, cfg, [&](std::size_t n) {
    return ScaledObserver{sigma_inf.data(), &out.g_values[n], &out.x_terminal[n]};
  });
  for (std::size_t n = 0; n < cfg.n_paths; ++n) {
    out.f_values[n] = (out.x_terminal[n] - sc.centre) / sc.scale;
    out.g_values[n] = out.g_values[n] / sc.scale;
  }
  out.interventions = totals.total_interventions();
  out.substep_retries = totals.total_retries();
  return out;
}

LlnResidual lln_residual(std::span<const double> x_terminal, double horizon,
                         const ModelSpec& model_in) {
  require(horizon >= 1.0, "lln_residual requires t >= 1");
  require(!x_terminal.empty(), "lln_residual needs at least one path");
  const ModelSpec model = resolve_limits(model_in);
  const double bbar = model.limits.b_bar(horizon);
  LlnResidual out;
  out.residuals.resize(x_terminal.size());
  for (std::size_t n = 0; n < x_terminal.size(); ++n)
    out.residuals[n] = x_terminal[n] / horizon - bbar;
  out.mean = mean(out.residuals);
  out.std_dev = std::sqrt(sample_variance(out.residuals));
  return out;
}

LlnResidual lln_residual(const PathEnsemble& ens, const ModelSpec& model) {
  std::vector<double> xt(ens.n_paths);
  for (std::size_t n = 0; n < ens.n_paths; ++n) xt[n] = ens.x(n, ens.n_steps);
  return lln_residual(xt, ens.horizon(), model);
}

double clt_residual_moment(const ScaledSample& sample, double p) {
  require(p >= 1.0 && p <= 8.0, "moment order p must lie in [1, 8]");
  require(!sample.f_values.empty() && sample.f_values.size() == sample.g_values.size(),
          "clt_residual_moment needs a non-empty scaled sample");
  std::vector<double> powers(sample.f_values.size());
  for (std::size_t n = 0; n < powers.size(); ++n) {
    powers[n] = std::pow(std::abs(sample.f_values[n] - sample.g_values[n]), p);
    if (!std::isfinite(powers[n])) {
      std::ostringstream msg;
      msg << "moment overflow: |f - g|^" << p << " is not finite at path " << n
          << "; use a smaller p";
      throw Error(ErrorKind::moment_overflow, msg.str());
    }
  }
  const double m = mean(powers);
  if (!std::isfinite(m))
    throw Error(ErrorKind::moment_overflow, "moment overflow in the path average; use a smaller p");
  return std::pow(m, 1.0 / p);
}

}  // namespace berrylab
