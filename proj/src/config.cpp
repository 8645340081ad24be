#include "berrylab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "berrylab/error.hpp"
#include "berrylab/models.hpp"
#include "berrylab/numerics.hpp"

namespace berrylab {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKinds[] = {
    {ExperimentKind::berry_esseen, "berry_esseen"},
    {ExperimentKind::clt_rate, "clt_rate"},
    {ExperimentKind::lln, "lln"},
    {ExperimentKind::malliavin_regimes, "malliavin_regimes"},
    {ExperimentKind::bounds_suite, "bounds_suite"},
    {ExperimentKind::log_rate, "log_rate"},
};

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& key, const std::string& msg) {
  std::ostringstream out;
  out << "config line " << line;
  if (!key.empty()) out << " (" << key << ")";
  out << ": " << msg;
  throw Error(ErrorKind::parse, out.str());
}

double to_double(std::string_view v, std::size_t line, const std::string& key) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out))
    fail(line, key, "'" + std::string(v) + "' is not a number");
  return out;
}

std::uint64_t to_u64(std::string_view v, std::size_t line, const std::string& key) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end)
    fail(line, key, "'" + std::string(v) + "' is not a non-negative integer");
  return out;
}

// "a, b, c" or "[a, b, c]".
std::vector<std::string_view> split_list(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = trim(v.substr(1, v.size() - 2));
  std::vector<std::string_view> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v = v.substr(comma + 1);
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds)
    if (k == kind) return name;
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (const auto& [k, n] : kKinds)
    if (n == name) return k;
  return std::nullopt;
}

ExperimentConfig parse_config(std::string_view text) {
  static const std::map<std::string, std::set<std::string>> kAllowed = {
      {"experiment", {"name"}},
      {"simulation",
       {"horizons", "n_paths", "steps_per_unit_time", "seed", "x0", "estimators", "moment_p",
        "bootstrap_resamples", "threads"}},
      {"output", {"dir"}},
  };
  std::map<std::string, Entry> entries;  // "section.key"
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "", "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "model" && !kAllowed.count(section))
        fail(line_no, "", "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "", "expected 'key = value'");
    if (section.empty()) fail(line_no, "", "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const std::string path = section + "." + key;
    if (key.empty()) fail(line_no, "", "empty key");
    if (section != "model" && !kAllowed.at(section).count(key)) fail(line_no, path, "unknown key");
    if (entries.count(path))
      fail(line_no, path, "duplicate key (first set on line " + std::to_string(entries[path].line) + ")");
    entries[path] = {value, line_no};
  }

  auto need = [&](const std::string& path) -> const Entry& {
    auto it = entries.find(path);
    if (it == entries.end()) fail(line_no, path, "missing required key");
    return it->second;
  };

  ExperimentConfig cfg;
  {
    const Entry& e = need("experiment.name");
    const auto kind = parse_experiment_kind(e.value);
    if (!kind) fail(e.line, "experiment.name", "unknown experiment '" + e.value + "'");
    cfg.experiment = *kind;
  }
  {
    const Entry& e = need("model.name");
    cfg.model_name = e.value;
    for (const auto& [path, entry] : entries) {
      if (path.rfind("model.", 0) != 0 || path == "model.name") continue;
      cfg.model_params[path.substr(6)] = to_double(entry.value, entry.line, path);
    }
    try {
      (void)make_model(cfg.model_name, cfg.model_params);
    } catch (const Error& err) {
      std::string key = "model";
      std::size_t line = e.line;
      for (const auto& [name, value] : cfg.model_params) {
        (void)value;
        if (std::string(err.what()).find(name) != std::string::npos) {
          key = "model." + name;
          line = entries["model." + name].line;
          break;
        }
      }
      fail(line, key, err.what());
    }
  }
  {
    const Entry& e = need("simulation.horizons");
    for (auto item : split_list(e.value)) {
      const double t = to_double(item, e.line, "simulation.horizons");
      if (!(t > 0.0)) fail(e.line, "simulation.horizons", "horizons must be positive");
      cfg.horizons.push_back(t);
    }
    if (cfg.horizons.empty()) fail(e.line, "simulation.horizons", "no horizons given");
    for (std::size_t i = 1; i < cfg.horizons.size(); ++i) {
      if (!(cfg.horizons[i] > cfg.horizons[i - 1]))
        fail(e.line, "simulation.horizons", "horizons must be sorted ascending and distinct");
    }
  }
  auto opt = [&](const std::string& path) -> const Entry* {
    auto it = entries.find(path);
    return it == entries.end() ? nullptr : &it->second;
  };
  if (const Entry* e = opt("simulation.n_paths")) {
    cfg.n_paths = to_u64(e->value, e->line, "simulation.n_paths");
    if (cfg.n_paths == 0) fail(e->line, "simulation.n_paths", "must be positive");
  }
  if (const Entry* e = opt("simulation.steps_per_unit_time")) {
    cfg.steps_per_unit_time = to_u64(e->value, e->line, "simulation.steps_per_unit_time");
    if (cfg.steps_per_unit_time < 64)
      fail(e->line, "simulation.steps_per_unit_time", "must be at least 64 (time step <= 2^-6)");
  }
  if (const Entry* e = opt("simulation.seed")) cfg.seed = to_u64(e->value, e->line, "simulation.seed");
  if (const Entry* e = opt("simulation.x0")) cfg.x0 = to_double(e->value, e->line, "simulation.x0");
  if (const Entry* e = opt("simulation.threads"))
    cfg.threads = static_cast<unsigned>(to_u64(e->value, e->line, "simulation.threads"));
  if (const Entry* e = opt("simulation.moment_p")) {
    cfg.moment_p = to_double(e->value, e->line, "simulation.moment_p");
    if (cfg.moment_p < 1.0 || cfg.moment_p > 8.0)
      fail(e->line, "simulation.moment_p", "moment order must lie in [1, 8]");
  }
  if (const Entry* e = opt("simulation.bootstrap_resamples"))
    cfg.bootstrap_resamples = to_u64(e->value, e->line, "simulation.bootstrap_resamples");
  if (const Entry* e = opt("simulation.estimators")) {
    cfg.estimators.clear();
    for (auto item : split_list(e->value)) {
      if (item != "kolmogorov" && item != "tv_scheffe")
        fail(e->line, "simulation.estimators", "unknown estimator '" + std::string(item) + "'");
      cfg.estimators.emplace_back(item);
    }
    if (cfg.estimators.empty()) fail(e->line, "simulation.estimators", "no estimators given");
  }
  if (const Entry* e = opt("output.dir")) cfg.output_dir = e->value;

  const std::size_t hl = entries["simulation.horizons"].line;
  const std::size_t m = cfg.horizons.size();
  switch (cfg.experiment) {
    case ExperimentKind::berry_esseen:
      if (m < 2) fail(hl, "simulation.horizons", "berry_esseen needs at least 2 horizons");
      break;
    case ExperimentKind::log_rate:
      if (m < 3) fail(hl, "simulation.horizons", "log_rate needs at least 3 horizons");
      if (cfg.horizons.front() < 2.0) fail(hl, "simulation.horizons", "log_rate needs t >= 2");
      break;
    case ExperimentKind::clt_rate:
      if (m < 3) fail(hl, "simulation.horizons", "clt_rate needs at least 3 horizons");
      break;
    case ExperimentKind::malliavin_regimes:
      if (m < 2) fail(hl, "simulation.horizons", "malliavin_regimes needs at least 2 horizons");
      if (cfg.horizons.front() < 1.0) fail(hl, "simulation.horizons", "malliavin_regimes needs t >= 1");
      break;
    case ExperimentKind::lln:
      if (cfg.horizons.front() < 1.0) fail(hl, "simulation.horizons", "lln needs t >= 1");
      break;
    case ExperimentKind::bounds_suite:
      if (m < 3) fail(hl, "simulation.horizons", "bounds_suite needs at least 3 horizons");
      if (cfg.horizons.front() < 1.0) fail(hl, "simulation.horizons", "bounds_suite needs t >= 1");
      break;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\nname = " << to_string(cfg.experiment) << "\n\n[model]\nname = "
      << cfg.model_name << '\n';
  for (const auto& [k, v] : cfg.model_params) out << k << " = " << format_double(v) << '\n';
  out << "\n[simulation]\nhorizons = ";
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i)
    out << (i ? ", " : "") << format_double(cfg.horizons[i]);
  out << "\nn_paths = " << cfg.n_paths << "\nsteps_per_unit_time = " << cfg.steps_per_unit_time
      << "\nseed = " << cfg.seed << "\nx0 = " << format_double(cfg.x0) << "\nestimators = ";
  for (std::size_t i = 0; i < cfg.estimators.size(); ++i)
    out << (i ? ", " : "") << cfg.estimators[i];
  out << "\nmoment_p = " << format_double(cfg.moment_p)
      << "\nbootstrap_resamples = " << cfg.bootstrap_resamples << "\nthreads = " << cfg.threads
      << "\n\n[output]\ndir = " << cfg.output_dir << '\n';
  return out.str();
}

}  // namespace berrylab
