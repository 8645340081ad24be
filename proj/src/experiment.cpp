#include "berrylab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "berrylab/bounds.hpp"
#include "berrylab/error.hpp"
#include "berrylab/malliavin.hpp"
#include "berrylab/models.hpp"
#include "berrylab/numerics.hpp"
#include "berrylab/rng.hpp"

namespace berrylab {

bool ExperimentReport::passed() const {
  if (!error.empty()) return false;
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

SimConfig horizon_config(const ExperimentConfig& cfg, std::size_t index) {
  require(index < cfg.horizons.size(), "horizon index out of range");
  const double t = cfg.horizons[index];
  SimConfig sim;
  sim.horizon = t;
  sim.n_steps = static_cast<std::size_t>(
      std::ceil(t * static_cast<double>(cfg.steps_per_unit_time) - 1e-9));
  sim.n_paths = cfg.n_paths;
  sim.seed = derive_key(cfg.seed, index);
  sim.x0 = cfg.x0;
  sim.threads = cfg.threads;
  sim.track_comparison = false;
  return sim;
}

ModelSpec config_model(const ExperimentConfig& cfg) {
  return make_model(cfg.model_name, cfg.model_params);
}

void emit_csv(const ExperimentReport& report, const std::string& path) {
  write_table_csv(report.table, path);
}

std::string render_manifest(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  const auto& c = r.config;
  j["experiment"] = std::string(to_string(c.experiment));
  j["config"] = {
      {"model", {{"name", c.model_name}, {"params", c.model_params}}},
      {"horizons", c.horizons},
      {"n_paths", c.n_paths},
      {"steps_per_unit_time", c.steps_per_unit_time},
      {"seed", c.seed},
      {"x0", c.x0},
      {"estimators", c.estimators},
      {"moment_p", c.moment_p},
      {"bootstrap_resamples", c.bootstrap_resamples},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
  };
  j["artifacts"] = r.artifacts;
  auto verdicts = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["verdicts"] = verdicts;
  j["passed"] = r.passed();
  j["warnings"] = r.warnings;
  j["wall_clock_seconds"] = r.wall_seconds;
  if (!r.error.empty()) {
    j["status"] = "partial";
    j["error"] = r.error;
  } else {
    j["status"] = "complete";
  }
  return j.dump(2) + "\n";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

void save_table(ExperimentReport& rep, const Table& table, const std::string& name) {
  write_table_csv(table, out_path(rep.config, name));
  rep.artifacts.push_back(name);
}

void save_text(ExperimentReport& rep, const std::string& text, const std::string& name) {
  write_text_file(out_path(rep.config, name), text);
  rep.artifacts.push_back(name);
}

Table table_from_csv_text(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = s.find(',', start);
      cells.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  if (std::getline(in, line)) t.columns = split(line);
  while (std::getline(in, line)) t.rows.push_back(split(line));
  return t;
}

Table distance_table(const std::vector<DistanceEstimate>& est, const RateFit* fit) {
  std::ostringstream buf;
  write_distance_csv(est, fit, buf);
  return table_from_csv_text(buf.str());
}

std::string fmt(double v) { return format_double(v); }

template <class Body>
ExperimentReport guarded(const ExperimentConfig& cfg, Body&& body) {
  ExperimentReport rep;
  rep.config = cfg;
  const auto start = Clock::now();
  auto finish = [&] {
    rep.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    write_text_file(out_path(cfg, "manifest.json"), render_manifest(rep));
  };
  try {
    body(rep);
  } catch (const std::exception& e) {
    rep.error = e.what();
    try {
      finish();
    } catch (...) {
    }
    throw;
  }
  finish();
  return rep;
}

// Certifier report for the configured model, saved alongside the results.
void certify(ExperimentReport& rep, const ModelSpec& model) {
  for (const auto& w : model.warnings) rep.warnings.push_back(model.name + ": " + w);
  const AssumptionReport ar = certify_assumptions(model);
  std::ostringstream buf;
  write_assumption_csv(ar, buf);
  save_text(rep, buf.str(), "assumptions.csv");
  for (const auto& clause : model.claimed_clauses)
    if (!ar.passes(clause))
      rep.warnings.push_back("certifier rejects claimed clause " + clause);
}

BootstrapOptions boot_for(const ExperimentConfig& cfg, std::size_t index) {
  return {cfg.bootstrap_resamples, derive_key(cfg.seed, index), cfg.threads};
}

std::vector<DistanceEstimate> estimate_all(const ExperimentConfig& cfg, std::span<const double> sample,
                                           std::size_t index, double t) {
  std::vector<DistanceEstimate> out;
  for (const auto& name : cfg.estimators) {
    DistanceEstimate d = name == "tv_scheffe" ? tv_scheffe(sample, std::nullopt, boot_for(cfg, index))
                                              : kolmogorov_distance(sample, boot_for(cfg, index));
    d.t = t;
    out.push_back(d);
  }
  return out;
}

DistanceKind primary_kind(const ExperimentConfig& cfg) {
  return std::find(cfg.estimators.begin(), cfg.estimators.end(), "kolmogorov") != cfg.estimators.end()
             ? DistanceKind::kolmogorov
             : DistanceKind::tv_scheffe;
}

std::vector<DistanceEstimate> of_kind(const std::vector<DistanceEstimate>& all, DistanceKind k) {
  std::vector<DistanceEstimate> out;
  for (const auto& d : all)
    if (d.kind == k) out.push_back(d);
  return out;
}

void distance_plot(ExperimentReport& rep, const std::vector<DistanceEstimate>& primary,
                   const std::string& name) {
  LogLogPlot plot;
  plot.title = std::string(to_string(rep.config.experiment)) + ": " + rep.config.model_name;
  plot.y_label = primary.empty() ? "distance" : std::string(to_string(primary.front().kind));
  for (const auto& d : primary) {
    plot.x.push_back(d.t);
    plot.y.push_back(d.value);
    plot.y_low.push_back(d.ci_low);
    plot.y_high.push_back(d.ci_high);
  }
  if (rep.rate) plot.fit = std::make_pair(rep.rate->slope, rep.rate->intercept);
  save_text(rep, render_loglog_svg(plot), name);
}

// Distances at every horizon, the rate fit when there are >= 3 horizons.
void distance_sweep(ExperimentReport& rep, const ModelSpec& model) {
  const auto& cfg = rep.config;
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    const ScaledSample s = simulate_scaled(model, horizon_config(cfg, i));
    if (s.interventions > 0)
      rep.warnings.push_back("t=" + fmt(s.horizon) + ": " + std::to_string(s.interventions) +
                             " boundary interventions");
    const auto d = estimate_all(cfg, s.f_values, i, s.horizon);
    rep.distances.insert(rep.distances.end(), d.begin(), d.end());
  }
  const auto primary = of_kind(rep.distances, primary_kind(cfg));
  if (primary.size() >= 3) {
    std::vector<RatePoint> pts;
    for (const auto& d : primary) pts.push_back(to_rate_point(d));
    rep.rate = rate_fit(pts);
  }
  rep.table = distance_table(rep.distances, rep.rate ? &*rep.rate : nullptr);
}

void rate_verdict(ExperimentReport& rep, double lo, double hi, double min_r2) {
  Verdict v{"rate_slope", false, ""};
  if (!rep.rate) {
    v.detail = "rate fit needs at least 3 horizons";
  } else {
    const auto& r = *rep.rate;
    v.pass = r.slope >= lo && r.slope <= hi && r.r2 >= min_r2;
    v.detail = "slope " + fmt(r.slope) + " in [" + fmt(lo) + ", " + fmt(hi) + "], r2 " +
               fmt(r.r2) + (min_r2 > 0.0 ? " >= " + fmt(min_r2) : "");
  }
  rep.verdicts.push_back(v);
}

void ordering_verdict(ExperimentReport& rep) {
  const auto ks = of_kind(rep.distances, DistanceKind::kolmogorov);
  const auto tv = of_kind(rep.distances, DistanceKind::tv_scheffe);
  if (ks.empty() || tv.size() != ks.size()) return;
  Verdict v{"estimator_ordering", true, "kolmogorov <= tv_scheffe + 0.05 at every horizon"};
  for (std::size_t i = 0; i < ks.size(); ++i)
    v.pass = v.pass && ks[i].value <= tv[i].value + thresholds::kEstimatorOrderingSlack;
  rep.verdicts.push_back(v);
}

void berry_esseen_body(ExperimentReport& rep, bool log_rate) {
  const ModelSpec model = config_model(rep.config);
  certify(rep, model);
  distance_sweep(rep, model);
  const std::string stem = log_rate ? "log_rate" : "berry_esseen";
  save_table(rep, rep.table, stem + ".csv");
  distance_plot(rep, of_kind(rep.distances, primary_kind(rep.config)), stem + ".svg");
  if (log_rate) {
    rate_verdict(rep, thresholds::kLogRateSlopeLow, thresholds::kLogRateSlopeHigh, 0.0);
  } else if (rep.config.model_name == "constant") {
    // F_t is exactly normal: only sampling noise remains at every horizon.
    Verdict v{"exact_normal_collapse", true, ""};
    double worst = 0.0;
    for (const auto& d : of_kind(rep.distances, DistanceKind::kolmogorov)) worst = std::max(worst, d.value);
    v.pass = worst <= thresholds::kExactNormalDistance;
    v.detail = "max kolmogorov distance " + fmt(worst) + " <= " + fmt(thresholds::kExactNormalDistance);
    rep.verdicts.push_back(v);
  } else {
    rate_verdict(rep, thresholds::kBerryEsseenSlopeLow, thresholds::kBerryEsseenSlopeHigh,
                 thresholds::kBerryEsseenMinR2);
  }
  ordering_verdict(rep);
}

void clt_body(ExperimentReport& rep) {
  const auto& cfg = rep.config;
  const ModelSpec model = config_model(cfg);
  certify(rep, model);
  rep.table.columns = {"t", "n", "p", "moment"};
  std::vector<double> lx, ly, ts, ms;
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    const ScaledSample s = simulate_scaled(model, horizon_config(cfg, i));
    const double m = clt_residual_moment(s, cfg.moment_p);
    rep.table.rows.push_back({fmt(s.horizon), std::to_string(s.f_values.size()), fmt(cfg.moment_p), fmt(m)});
    ts.push_back(s.horizon);
    ms.push_back(m);
    if (m > 0.0) {
      lx.push_back(std::log(s.horizon));
      ly.push_back(std::log(m));
    }
  }
  Verdict v{"clt_slope", false, "moment is zero at some horizon (exact collapse)"};
  LogLogPlot plot;
  plot.title = "clt_rate: " + cfg.model_name;
  plot.y_label = "residual moment";
  plot.x = ts;
  plot.y = ms;
  if (lx.size() >= 2) {
    const LinearFit fit = linear_fit(lx, ly);
    plot.fit = std::make_pair(fit.slope, fit.intercept);
    rep.table.rows.push_back({"fit", "", "", fmt(fit.slope)});
    v.pass = fit.slope <= thresholds::kCltSlopeMax;
    v.detail = "slope " + fmt(fit.slope) + " <= " + fmt(thresholds::kCltSlopeMax);
  }
  save_table(rep, rep.table, "clt_rate.csv");
  save_text(rep, render_loglog_svg(plot), "clt_rate.svg");
  rep.verdicts.push_back(v);
}

void lln_body(ExperimentReport& rep) {
  const auto& cfg = rep.config;
  const ModelSpec model = resolve_limits(config_model(cfg));
  certify(rep, model);
  rep.table.columns = {"t", "n", "mean_x_over_t", "b_bar", "mean_residual", "std_dev"};
  double last = kNaN;
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    const ScaledSample s = simulate_scaled(model, horizon_config(cfg, i));
    const LlnResidual r = lln_residual(s.x_terminal, s.horizon, model);
    const double bbar = model.limits.b_bar(s.horizon);
    rep.table.rows.push_back({fmt(s.horizon), std::to_string(s.x_terminal.size()),
                              fmt(r.mean + bbar), fmt(bbar), fmt(r.mean), fmt(r.std_dev)});
    last = r.mean;
  }
  save_table(rep, rep.table, "lln.csv");
  rep.verdicts.push_back({"lln", std::abs(last) <= thresholds::kLlnTolerance,
                          "|mean(X_t/t) - b_bar| = " + fmt(std::abs(last)) + " <= " +
                              fmt(thresholds::kLlnTolerance) + " at t = " + fmt(cfg.horizons.back())});
}

void malliavin_body(ExperimentReport& rep) {
  const auto& cfg = rep.config;
  const ModelSpec model = config_model(cfg);
  certify(rep, model);
  std::vector<SteinBudget> rows;
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    const MalliavinSample s = simulate_malliavin(model, horizon_config(cfg, i));
    rows.push_back(stein_budget(s, model));
    if (s.overflow_count > 0)
      rep.warnings.push_back("t=" + fmt(s.horizon) + ": " + std::to_string(s.overflow_count) +
                             " paths overflowed and were excluded");
  }
  std::ostringstream buf;
  write_budget_csv(rows, buf);
  rep.table = table_from_csv_text(buf.str());
  save_table(rep, rep.table, "malliavin.csv");

  const auto& c = model.constants;
  const double a = c.sigma3 > 0.0 ? c.alpha : std::numeric_limits<double>::infinity();
  const double b = c.b3 > 0.0 ? c.beta : std::numeric_limits<double>::infinity();
  const double ab = std::min(a, b);
  std::vector<double> ts, ds, lx, ly;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rows) {
    ts.push_back(r.horizon);
    ds.push_back(r.mean_ds_norm_sq);
    lo = std::min(lo, r.mean_ds_norm_sq);
    hi = std::max(hi, r.mean_ds_norm_sq);
    if (r.mean_ds_norm_sq > 0.0) {
      lx.push_back(std::log(r.horizon));
      ly.push_back(std::log(r.mean_ds_norm_sq));
    }
  }
  LogLogPlot plot;
  plot.title = "malliavin_regimes: " + cfg.model_name;
  plot.y_label = "mean |DS_t|^2";
  plot.x = ts;
  plot.y = ds;
  std::optional<LinearFit> growth;
  if (lx.size() >= 2) {
    growth = linear_fit(lx, ly);
    plot.fit = std::make_pair(growth->slope, growth->intercept);
  }
  save_text(rep, render_loglog_svg(plot), "malliavin.svg");
  if (ab > 0.5) {
    rep.verdicts.push_back({"bounded_regime", hi <= thresholds::kBoundedRatio * lo,
                            "max/min mean ds_norm_sq = " + fmt(lo > 0.0 ? hi / lo : kNaN) +
                                " <= " + fmt(thresholds::kBoundedRatio)});
  } else {
    const double target = 1.0 - 2.0 * ab;
    Verdict v{"growth_regime", false, "growth fit needs two positive means"};
    if (growth) {
      v.pass = std::abs(growth->slope - target) <= thresholds::kGrowthBand;
      v.detail = "exponent " + fmt(growth->slope) + " within " + fmt(target) + " +/- " +
                 fmt(thresholds::kGrowthBand);
    }
    rep.verdicts.push_back(v);
  }
}

void bounds_body(ExperimentReport& rep) {
  const auto& cfg = rep.config;
  const ModelSpec model = config_model(cfg);
  certify(rep, model);
  const McOptions opt{cfg.n_paths, cfg.steps_per_unit_time, cfg.seed, cfg.threads};
  std::vector<BoundsRow> rows;
  auto add = [&](const std::vector<BoundsRow>& r) { rows.insert(rows.end(), r.begin(), r.end()); };

  bool tv_ok = true;
  for (double a : {0.8, 1.0, 1.25}) {
    for (double v : {-1.0, -0.1, 0.0, 0.1, 1.0}) {
      const double exact = gaussian_tv_exact_1d(a, v), bound = gaussian_tv_bound_1d(a, v);
      const bool ok = exact <= std::min(1.0, bound) + 1e-12;
      tv_ok = tv_ok && ok;
      rows.push_back({"gaussian_tv", "d=1 a=" + fmt(a) + " v=" + fmt(v), kNaN, exact, exact, exact,
                      bound, ok ? "pass" : "fail"});
    }
  }
  rep.verdicts.push_back({"gaussian_tv_lemma", tv_ok, "exact TV <= min(1, bound) on the grid"});

  const auto hit = hitting_tail_mc(model, 0.0, cfg.x0, cfg.horizons, opt);
  add(hit.rows());
  rep.verdicts.push_back({"hitting_tail", hit.pass,
                          "slope " + fmt(hit.slope) + " <= " + fmt(hit.threshold)});
  for (double gamma : {1.0, 2.0}) {
    const auto inv = inverse_moment_y_mc(model, gamma, cfg.x0, cfg.horizons, opt);
    add(inv.rows());
    rep.verdicts.push_back({"inverse_moment_y_gamma" + fmt(gamma), inv.pass,
                            "slope " + fmt(inv.slope) + " <= " + fmt(-gamma + 0.1)});
  }
  const double eps = 0.5 * model.constants.b1;
  const auto tt = time_tail_mc(model, eps, 0.0, 0.0, cfg.horizons, opt);
  add(tt.rows());
  rep.verdicts.push_back({"time_tail", tt.pass,
                          "slope " + fmt(tt.slope) + " vs envelope rate " + fmt(tt.envelope_rate)});
  const auto it = inf_tail_mc(model, cfg.x0, {1.0, 2.0, 3.0}, 4.0 * cfg.horizons.back(), opt);
  add(it.rows());
  rep.verdicts.push_back({"inf_tail", it.pass, "calibrated C = " + fmt(it.calibrated_c)});
  for (double c : {0.25, 0.75}) {
    const auto ef = exp_functional_mc(Functional::indicator_neg, 1.0, c, 0.0, {16, 32, 64, 128}, opt);
    add(ef.rows());
    const bool expect = c < 0.5;
    rep.verdicts.push_back({"exp_functional_c" + fmt(c), ef.stabilized == expect,
                            std::string("stabilized=") + (ef.stabilized ? "true" : "false") +
                                ", expected " + (expect ? "true" : "false")});
  }
  if (model.has_finite_boundary() && model.boundary) {
    const auto im = inverse_moment_proxy(model, 1.0, cfg.x0, {8, 16, 32}, opt);
    add(im.rows());
    rep.verdicts.push_back({"inverse_moment_proxy", im.stabilized || im.gamma_warning,
                            std::string("stabilized=") + (im.stabilized ? "true" : "false")});
    if (im.gamma_warning) rep.warnings.push_back("inverse moment: gamma outside admissible range");
  }
  std::ostringstream buf;
  write_bounds_csv(rows, buf);
  rep.table = table_from_csv_text(buf.str());
  save_table(rep, rep.table, "bounds.csv");
}

std::vector<double> read_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read sample file '" + path + "'");
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comma = line.find(',');
    const std::string cell = line.substr(0, comma);
    if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) {
      if (line_no == 1) continue;  // header
      throw Error(ErrorKind::parse, path + " line " + std::to_string(line_no) + ": not a number");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  return guarded(cfg, [](ExperimentReport& rep) {
    switch (rep.config.experiment) {
      case ExperimentKind::berry_esseen: berry_esseen_body(rep, false); break;
      case ExperimentKind::log_rate: berry_esseen_body(rep, true); break;
      case ExperimentKind::clt_rate: clt_body(rep); break;
      case ExperimentKind::lln: lln_body(rep); break;
      case ExperimentKind::malliavin_regimes: malliavin_body(rep); break;
      case ExperimentKind::bounds_suite: bounds_body(rep); break;
    }
  });
}

ExperimentReport run_simulate(const ExperimentConfig& cfg) {
  return guarded(cfg, [](ExperimentReport& rep) {
    const auto& c = rep.config;
    const ModelSpec model = config_model(c);
    rep.table.columns = {"t", "path", "f", "g", "x_terminal"};
    for (std::size_t i = 0; i < c.horizons.size(); ++i) {
      const ScaledSample s = simulate_scaled(model, horizon_config(c, i));
      for (std::size_t n = 0; n < s.f_values.size(); ++n)
        rep.table.rows.push_back({fmt(s.horizon), std::to_string(n), fmt(s.f_values[n]),
                                  fmt(s.g_values[n]), fmt(s.x_terminal[n])});
    }
    save_table(rep, rep.table, "scaled.csv");
  });
}

ExperimentReport run_distance(const ExperimentConfig& cfg, const std::optional<std::string>& sample_path) {
  return guarded(cfg, [&](ExperimentReport& rep) {
    if (sample_path) {
      const auto sample = read_sample(*sample_path);
      rep.distances = estimate_all(rep.config, sample, 0, kNaN);
    } else {
      const ModelSpec model = config_model(rep.config);
      for (std::size_t i = 0; i < rep.config.horizons.size(); ++i) {
        const ScaledSample s = simulate_scaled(model, horizon_config(rep.config, i));
        const auto d = estimate_all(rep.config, s.f_values, i, s.horizon);
        rep.distances.insert(rep.distances.end(), d.begin(), d.end());
      }
    }
    rep.table = distance_table(rep.distances, nullptr);
    save_table(rep, rep.table, "distances.csv");
    ordering_verdict(rep);
  });
}

ExperimentReport run_rate(const ExperimentConfig& cfg, const std::optional<std::string>& distances_path) {
  return guarded(cfg, [&](ExperimentReport& rep) {
    if (distances_path) {
      const Table in = read_table_csv(*distances_path);
      auto col = [&](const std::string& name) {
        const auto it = std::find(in.columns.begin(), in.columns.end(), name);
        if (it == in.columns.end())
          throw Error(ErrorKind::parse, *distances_path + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - in.columns.begin());
      };
      const std::size_t ck = col("kind"), ct = col("t"), cv = col("value"), cl = col("ci_low"),
                        ch = col("ci_high"), cn = col("n");
      const std::string want(to_string(primary_kind(rep.config)));
      for (const auto& row : in.rows) {
        if (row.size() < in.columns.size() || row[ck] != want) continue;
        DistanceEstimate d;
        d.kind = primary_kind(rep.config);
        d.t = std::stod(row[ct]);
        d.n = std::stoul(row[cn]);
        d.value = std::stod(row[cv]);
        d.ci_low = std::stod(row[cl]);
        d.ci_high = std::stod(row[ch]);
        rep.distances.push_back(d);
      }
      std::vector<RatePoint> pts;
      for (const auto& d : rep.distances) pts.push_back(to_rate_point(d));
      rep.rate = rate_fit(pts);
      rep.table = distance_table(rep.distances, &*rep.rate);
    } else {
      distance_sweep(rep, config_model(rep.config));
    }
    save_table(rep, rep.table, "rate.csv");
    distance_plot(rep, of_kind(rep.distances, primary_kind(rep.config)), "rate.svg");
    if (rep.config.experiment == ExperimentKind::log_rate)
      rate_verdict(rep, thresholds::kLogRateSlopeLow, thresholds::kLogRateSlopeHigh, 0.0);
    else
      rate_verdict(rep, thresholds::kBerryEsseenSlopeLow, thresholds::kBerryEsseenSlopeHigh,
                   thresholds::kBerryEsseenMinR2);
  });
}

}  // namespace berrylab
