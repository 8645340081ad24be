#include "berrylab/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "berrylab/detail/engine.hpp"
#include "berrylab/error.hpp"

namespace berrylab {

namespace {

struct Profiles {
  std::vector<double> sigma_inf;  // at t_k, k < M
  std::vector<double> b_inf;
  double sigma_bar = 0.0;
  double b_bar = 0.0;
};

Profiles profiles_for(const ModelSpec& model, std::size_t n_steps, double dt, double horizon) {
  Profiles p;
  p.sigma_inf.resize(n_steps);
  p.b_inf.resize(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    p.sigma_inf[k] = model.limits.sigma_inf(t);
    p.b_inf[k] = model.limits.b_inf(t);
  }
  p.sigma_bar = model.limits.sigma_bar(horizon);
  p.b_bar = model.limits.b_bar(horizon);
  if (!(p.sigma_bar > 0.0) || !std::isfinite(p.sigma_bar)) {
    std::ostringstream msg;
    msg << "degenerate scaling: sigma_bar(" << horizon << ") = " << p.sigma_bar;
    throw Error(ErrorKind::degenerate_scaling, msg.str());
  }
  return p;
}

double checked(const Field& f, const char* name, double t, double y) {
  const double v = f(t, y);
  if (!std::isfinite(v)) detail::throw_bad_coefficient(name, t, y, v);
  return v;
}

[[noreturn]] void throw_overflow(std::size_t path, double excess) {
  std::ostringstream msg;
  msg << "exponent overflow on path " << path << ": Z_M - Z_k = " << excess << " exceeds "
      << kMaxExponent << "; the model likely violates its decay assumptions";
  throw Error(ErrorKind::exponent_overflow, msg.str());
}

// Streaming form of the two path integrals. With dZ_k = Z_{k+1} - Z_k,
//   S1 <- (S1 + sigma_k^2 dt) e^{2 dZ_k},  S2 <- (S2 + sigma_k sigma_inf_k dt) e^{dZ_k},
// so at the end S1 = sum sigma_k^2 e^{2(Z_M - Z_k)} dt and likewise S2.
struct Accumulator {
  const Field* d_sigma;
  const Field* d_b;
  const Profiles* prof;
  double dt;
  std::size_t mid;

  double z = 0.0, z_min = 0.0, z_mid = 0.0;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  double s_stoch = 0.0, s_drift = 0.0;

  void step(std::size_t k, double t, double x, double db, double s, double b) {
    const double dsig = checked(*d_sigma, "d_sigma_dy", t, x);
    const double dbb = checked(*d_b, "d_b_dy", t, x);
    const double sinf = prof->sigma_inf[k];
    if (k == mid) z_mid = z;
    z_min = std::min(z_min, z);
    const double dz = dsig * db + (dbb - 0.5 * dsig * dsig) * dt;
    const double e = std::exp(dz);
    s1 = (s1 + s * s * dt) * e * e;
    s2 = (s2 + s * sinf * dt) * e;
    s3 += sinf * sinf * dt;
    z += dz;
    s_stoch += (s - sinf) * db;
    s_drift += (b - prof->b_inf[k]) * dt;
  }
};

void store(MalliavinSample& out, std::size_t n, const Accumulator& acc, double x_terminal,
           double centre, double scale) {
  const double ds = acc.s1 - 2.0 * acc.s2 + acc.s3;
  const double pairing = acc.s2 - acc.s3;
  const bool overflow = acc.z - acc.z_min > kMaxExponent || !std::isfinite(ds) ||
                        !std::isfinite(pairing);
  out.ds_norm_sq[n] = std::max(ds, 0.0);
  out.pairing[n] = pairing;
  out.s_stochastic[n] = acc.s_stoch;
  out.s_drift[n] = acc.s_drift;
  out.r_term[n] = (acc.s_stoch + acc.s_drift) / acc.prof->sigma_bar;
  out.f_values[n] = (x_terminal - centre) / scale;
  out.z_terminal[n] = acc.z;
  out.z_mid[n] = acc.z_mid;
  out.overflowed[n] = overflow ? 1 : 0;
}

MalliavinSample allocate(std::size_t n, double horizon) {
  MalliavinSample s;
  s.horizon = horizon;
  for (auto* v : {&s.ds_norm_sq, &s.pairing, &s.r_term, &s.s_stochastic, &s.s_drift, &s.f_values,
                  &s.z_terminal, &s.z_mid})
    v->assign(n, 0.0);
  s.overflowed.assign(n, 0);
  return s;
}

void count_overflows(MalliavinSample& s) {
  s.overflow_count = 0;
  for (auto f : s.overflowed) s.overflow_count += f;
}

struct MalliavinObserver {
  Accumulator acc;
  MalliavinSample* out;
  std::size_t path;
  double centre, scale;

  void step(std::size_t k, double t, double x, double, double db, double s, double b) {
    acc.step(k, t, x, db, s, b);
  }
  void finish(double x, double) { store(*out, path, acc, x, centre, scale); }
};

}  // namespace

ZTrajectories z_process(const PathEnsemble& ens, const ModelSpec& model) {
  ZTrajectories out;
  out.n_paths = ens.n_paths;
  out.n_steps = ens.n_steps;
  out.z.assign(ens.n_paths * (ens.n_steps + 1), 0.0);
  const Field& dsig = model.coefficients.d_sigma_dy;
  const Field& db_dy = model.coefficients.d_b_dy;
  for (std::size_t n = 0; n < ens.n_paths; ++n) {
    double* row = out.z.data() + n * (ens.n_steps + 1);
    double z = 0.0;
    for (std::size_t k = 0; k < ens.n_steps; ++k) {
      const double t = ens.grid[k], x = ens.x(n, k);
      const double ds = checked(dsig, "d_sigma_dy", t, x);
      const double dbb = checked(db_dy, "d_b_dy", t, x);
      row[k] = z;
      z += ds * ens.db(n, k) + (dbb - 0.5 * ds * ds) * ens.dt;
    }
    row[ens.n_steps] = z;
  }
  return out;
}

namespace {

void check_aligned(const PathEnsemble& ens, const ZTrajectories& z) {
  require(z.n_paths == ens.n_paths && z.n_steps == ens.n_steps,
          "Z trajectories are not aligned with the ensemble grid");
}

// Fills e^{Z_M - Z_k} for one path; returns false on overflow.
bool growth_factors(std::span<const double> zrow, std::vector<double>& out, double& excess) {
  const std::size_t m = zrow.size() - 1;
  out.resize(m);
  excess = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double e = zrow[m] - zrow[k];
    excess = std::max(excess, e);
    out[k] = std::exp(e);
  }
  return excess <= kMaxExponent;
}

}  // namespace

std::vector<double> ds_norm_sq(const PathEnsemble& ens, const ModelSpec& model_in,
                               const ZTrajectories& z) {
  check_aligned(ens, z);
  const ModelSpec model = resolve_limits(model_in);
  const Profiles prof = profiles_for(model, ens.n_steps, ens.dt, ens.horizon());
  std::vector<double> out(ens.n_paths), growth;
  for (std::size_t n = 0; n < ens.n_paths; ++n) {
    double excess = 0.0;
    if (!growth_factors(z.row(n), growth, excess)) throw_overflow(n, excess);
    double acc = 0.0;
    for (std::size_t k = 0; k < ens.n_steps; ++k) {
      const double s = checked(model.coefficients.sigma, "sigma", ens.grid[k], ens.x(n, k));
      const double d = growth[k] * s - prof.sigma_inf[k];
      acc += d * d * ens.dt;
    }
    out[n] = acc;
  }
  return out;
}

std::vector<double> stein_pairing(const PathEnsemble& ens, const ModelSpec& model_in,
                                  const ZTrajectories& z) {
  check_aligned(ens, z);
  const ModelSpec model = resolve_limits(model_in);
  const Profiles prof = profiles_for(model, ens.n_steps, ens.dt, ens.horizon());
  std::vector<double> out(ens.n_paths), growth;
  for (std::size_t n = 0; n < ens.n_paths; ++n) {
    double excess = 0.0;
    if (!growth_factors(z.row(n), growth, excess)) throw_overflow(n, excess);
    double acc = 0.0;
    for (std::size_t k = 0; k < ens.n_steps; ++k) {
      const double s = checked(model.coefficients.sigma, "sigma", ens.grid[k], ens.x(n, k));
      acc += prof.sigma_inf[k] * (growth[k] * s - prof.sigma_inf[k]) * ens.dt;
    }
    out[n] = acc;
  }
  return out;
}

std::vector<MalliavinPathRecord> malliavin_path_records(const PathEnsemble& ens,
                                                        const ModelSpec& model_in) {
  const ModelSpec model = resolve_limits(model_in);
  const Profiles prof = profiles_for(model, ens.n_steps, ens.dt, ens.horizon());
  const ZTrajectories z = z_process(ens, model);
  const auto ds = ds_norm_sq(ens, model, z);
  const auto pairing = stein_pairing(ens, model, z);
  std::vector<MalliavinPathRecord> out(ens.n_paths);
  for (std::size_t n = 0; n < ens.n_paths; ++n) {
    auto& r = out[n];
    const auto row = z.row(n);
    r.z_traj.assign(row.begin(), row.end());
    r.ds_norm_sq = ds[n];
    r.pairing = pairing[n];
    for (std::size_t k = 0; k < ens.n_steps; ++k) {
      const double t = ens.grid[k], x = ens.x(n, k);
      r.s_stochastic += (checked(model.coefficients.sigma, "sigma", t, x) - prof.sigma_inf[k]) *
                        ens.db(n, k);
      r.s_drift += (checked(model.coefficients.drift_b, "b", t, x) - prof.b_inf[k]) * ens.dt;
    }
    r.r_term = (r.s_stochastic + r.s_drift) / prof.sigma_bar;
  }
  return out;
}

MalliavinSample simulate_malliavin(const ModelSpec& model_in, const SimConfig& cfg_in) {
  const ModelSpec model = resolve_limits(model_in);
  SimConfig cfg = cfg_in;
  cfg.track_comparison = false;
  validate_config(model, cfg);
  const double t = cfg.horizon;
  const Profiles prof = profiles_for(model, cfg.n_steps, cfg.dt(), t);
  const double centre = cfg.x0 + t * prof.b_bar, scale = prof.sigma_bar * std::sqrt(t);

  MalliavinSample out = allocate(cfg.n_paths, t);
  detail::run_paths(model, cfg, [&](std::size_t n) {
    return MalliavinObserver{Accumulator{&model.coefficients.d_sigma_dy, &model.coefficients.d_b_dy,
                                         &prof, cfg.dt(), cfg.n_steps / 2},
                             &out, n, centre, scale};
  });
  count_overflows(out);
  return out;
}

MalliavinSample malliavin_sample(const PathEnsemble& ens, const ModelSpec& model_in) {
  const ModelSpec model = resolve_limits(model_in);
  const double t = ens.horizon();
  const Profiles prof = profiles_for(model, ens.n_steps, ens.dt, t);
  const double centre = ens.x0 + t * prof.b_bar, scale = prof.sigma_bar * std::sqrt(t);
  MalliavinSample out = allocate(ens.n_paths, t);
  for (std::size_t n = 0; n < ens.n_paths; ++n) {
    Accumulator acc{&model.coefficients.d_sigma_dy, &model.coefficients.d_b_dy, &prof, ens.dt,
                    ens.n_steps / 2};
    for (std::size_t k = 0; k < ens.n_steps; ++k) {
      const double tk = ens.grid[k], x = ens.x(n, k);
      acc.step(k, tk, x, ens.db(n, k), checked(model.coefficients.sigma, "sigma", tk, x),
               checked(model.coefficients.drift_b, "b", tk, x));
    }
    store(out, n, acc, ens.x(n, ens.n_steps), centre, scale);
  }
  count_overflows(out);
  return out;
}

std::vector<double> kept_values(const MalliavinSample& s, std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t n = 0; n < values.size(); ++n)
    if (!s.overflowed[n]) out.push_back(values[n]);
  return out;
}

namespace {

MeanCi scaled_ci(std::vector<double> values, double factor) {
  for (auto& v : values) v *= factor;
  return mean_ci(values);
}

// Normal-approximation interval for the sample variance.
MeanCi variance_ci(std::span<const double> values) {
  MeanCi ci;
  const std::size_t n = values.size();
  ci.mean = sample_variance(values);
  if (n < 2) {
    ci.low = ci.high = ci.mean;
    return ci;
  }
  const double m = mean(values);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - m;
    sq[i] = d * d * d * d;
  }
  const double m4 = mean(sq);
  ci.std_error = std::sqrt(std::max(0.0, m4 - ci.mean * ci.mean) / static_cast<double>(n));
  ci.low = std::max(0.0, ci.mean - 1.96 * ci.std_error);
  ci.high = ci.mean + 1.96 * ci.std_error;
  return ci;
}

}  // namespace

SteinBudget stein_budget(const MalliavinSample& sample, const ModelSpec& model_in) {
  const double t = sample.horizon;
  require(t >= 1.0, "stein_budget requires t >= 1");
  const ModelSpec model = resolve_limits(model_in);
  const double sbar = model.limits.sigma_bar(t);
  const double sigma1 = model.constants.sigma1;
  require(sigma1 > 0.0, "stein_budget needs sigma1 > 0");

  SteinBudget out;
  out.horizon = t;
  out.overflowed = sample.overflow_count;
  const auto ds = kept_values(sample, sample.ds_norm_sq);
  auto abs_pair = kept_values(sample, sample.pairing);
  for (auto& v : abs_pair) v = std::abs(v);
  const auto f = kept_values(sample, sample.f_values);
  const auto r = kept_values(sample, sample.r_term);
  out.n = ds.size();
  if (out.n == 0)
    throw Error(ErrorKind::exponent_overflow, "stein_budget: every path overflowed");

  out.mean_ds_norm_sq = mean(ds);
  out.mean_abs_pairing = mean(abs_pair);
  out.pairing_term = scaled_ci(abs_pair, 1.0 / (t * sbar));
  std::vector<double> deriv(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) deriv[i] = 2.0 + 2.0 / (sigma1 * sigma1 * t) * ds[i];
  out.derivative_term = mean_ci(deriv);

  const MeanCi fm = mean_ci(f);
  const double rt = std::sqrt(t);
  out.mean_term.mean = std::abs(fm.mean) * rt;
  out.mean_term.std_error = fm.std_error * rt;
  out.mean_term.low = (fm.low <= 0.0 && fm.high >= 0.0)
                          ? 0.0
                          : std::min(std::abs(fm.low), std::abs(fm.high)) * rt;
  out.mean_term.high = std::max(std::abs(fm.low), std::abs(fm.high)) * rt;

  out.r_mean = mean_ci(r);
  out.r_variance = variance_ci(r);
  return out;
}

SteinBudget stein_budget(const PathEnsemble& ens, const ModelSpec& model) {
  return stein_budget(malliavin_sample(ens, model), model);
}

void write_budget_csv(std::span<const SteinBudget> rows, std::ostream& out) {
  out << "t,n,overflowed,mean_ds_norm_sq,mean_abs_pairing,"
         "a,a_lo,a_hi,b,b_lo,b_hi,c,c_lo,c_hi,d_mean,d_mean_lo,d_mean_hi,d_var,d_var_lo,d_var_hi\n";
  for (const auto& r : rows) {
    out << format_double(r.horizon) << ',' << r.n << ',' << r.overflowed << ','
        << format_double(r.mean_ds_norm_sq) << ',' << format_double(r.mean_abs_pairing);
    for (const MeanCi* ci :
         {&r.pairing_term, &r.derivative_term, &r.mean_term, &r.r_mean, &r.r_variance}) {
      out << ',' << format_double(ci->mean) << ',' << format_double(ci->low) << ','
          << format_double(ci->high);
    }
    out << '\n';
  }
}

}  // namespace berrylab
