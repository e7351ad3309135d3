#include "soqdot/runner/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace soqdot::runner {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError({{key, "expected a finite real number, got '" + v + "'"}});
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError({{key, "expected a non-negative integer, got '" + v + "'"}});
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError({{key, "expected a boolean (true/false), got '" + v + "'"}});
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field real(T RunConfig::*group, double T::*member) {
  return {[=](RunConfig& c, const std::string& v) { (c.*group).*member = to_double("", v); },
          [=](const RunConfig& c) { return fmt_double((c.*group).*member); }};
}

Field real_top(double RunConfig::*member) {
  return {[=](RunConfig& c, const std::string& v) { c.*member = to_double("", v); },
          [=](const RunConfig& c) { return fmt_double(c.*member); }};
}

template <class T>
Field count(T RunConfig::*group, std::size_t T::*member) {
  return {[=](RunConfig& c, const std::string& v) { (c.*group).*member = to_uint("", v); },
          [=](const RunConfig& c) { return std::to_string((c.*group).*member); }};
}

template <class T>
Field flag(T RunConfig::*group, bool T::*member) {
  return {[=](RunConfig& c, const std::string& v) { (c.*group).*member = to_bool("", v); },
          [=](const RunConfig& c) { return std::string((c.*group).*member ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    using S = SweepSettings;
    using V = VmcSettings;
    using P = analytic::ModelParams;
    t["scenario"] = {[](RunConfig& c, const std::string& v) { c.scenario = parse_scenario(v); },
                     [](const RunConfig& c) { return scenario_name(c.scenario); }};
    t["seed"] = {[](RunConfig& c, const std::string& v) { c.seed = to_uint("", v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    t["output_dir"] = {[](RunConfig& c, const std::string& v) { c.output_dir = v; },
                       [](const RunConfig& c) { return c.output_dir; }};
    t["to_physical"] = {[](RunConfig& c, const std::string& v) { c.to_physical = to_bool("", v); },
                        [](const RunConfig& c) { return std::string(c.to_physical ? "true" : "false"); }};
    t["alpha"] = real(&RunConfig::params, &P::alpha);
    t["beta"] = real(&RunConfig::params, &P::beta);
    t["e_field"] = real(&RunConfig::params, &P::e_field);
    t["ell"] = real(&RunConfig::params, &P::ell);
    t["b_field"] = real(&RunConfig::params, &P::b_field);
    t["coulomb.strength"] = real_top(&RunConfig::coulomb_strength);
    t["coulomb.softening"] = real_top(&RunConfig::coulomb_softening);
    t["discord.grid"] = {[](RunConfig& c, const std::string& v) { c.discord_grid = to_uint("", v); },
                         [](const RunConfig& c) { return std::to_string(c.discord_grid); }};

    t["sweep.alpha_min"] = real(&RunConfig::sweep, &S::alpha_min);
    t["sweep.alpha_max"] = real(&RunConfig::sweep, &S::alpha_max);
    t["sweep.alpha_count"] = count(&RunConfig::sweep, &S::alpha_count);
    t["sweep.e_min"] = real(&RunConfig::sweep, &S::e_min);
    t["sweep.e_max"] = real(&RunConfig::sweep, &S::e_max);
    t["sweep.e_count"] = count(&RunConfig::sweep, &S::e_count);
    t["sweep.orbitals"] = count(&RunConfig::sweep, &S::orbitals);
    t["sweep.n_keep"] = count(&RunConfig::sweep, &S::n_keep);
    t["sweep.pair_window"] = real(&RunConfig::sweep, &S::pair_window);
    t["sweep.grid_points"] = count(&RunConfig::sweep, &S::grid_points);
    t["sweep.averaged_post"] = flag(&RunConfig::sweep, &S::averaged_post);
    t["sweep.degeneracy_tol"] = real(&RunConfig::sweep, &S::degeneracy_tol);
    t["sweep.continuation_step"] = real(&RunConfig::sweep, &S::continuation_step);
    t["sweep.convergence_probe"] = flag(&RunConfig::sweep, &S::convergence_probe);
    t["sweep.probe_orbitals"] = count(&RunConfig::sweep, &S::probe_orbitals);

    t["vmc.wells"] = count(&RunConfig::vmc, &V::wells);
    t["vmc.n_samples"] = count(&RunConfig::vmc, &V::n_samples);
    t["vmc.walkers"] = count(&RunConfig::vmc, &V::walkers);
    t["vmc.jastrow_b"] = real(&RunConfig::vmc, &V::jastrow_b);
    t["vmc.lagrange_lambda"] = real(&RunConfig::vmc, &V::lagrange_lambda);
    t["vmc.spin_leak"] = real(&RunConfig::vmc, &V::spin_leak);
    t["vmc.polarized"] = flag(&RunConfig::vmc, &V::polarized);
    t["vmc.rashba_phase"] = flag(&RunConfig::vmc, &V::rashba_phase);
    t["vmc.spin_step"] = real(&RunConfig::vmc, &V::spin_step);
    t["vmc.bins"] = count(&RunConfig::vmc, &V::bins);
    t["vmc.optimize"] = flag(&RunConfig::vmc, &V::optimize);
    t["vmc.optimize_samples"] = count(&RunConfig::vmc, &V::optimize_samples);
    return t;
  }();
  return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<FieldError> errors)
    : InvalidArgument([&] {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& e : errors) os << "\n  " << (e.field.empty() ? "<input>" : e.field) << ": " << e.message;
        return os.str();
      }()),
      errors_(std::move(errors)) {}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"analytic", "measure", "discord", "witness",
                                              "memory",   "ci-sweep", "vmc"};
  return names;
}

std::string scenario_name(Scenario s) { return scenario_names()[static_cast<std::size_t>(s)]; }

Scenario parse_scenario(const std::string& name) {
  const auto& names = scenario_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    throw ConfigError({{"scenario", "unknown scenario '" + name + "' (expected one of: " + all + ")"}});
  }
  return static_cast<Scenario>(it - names.begin());
}

void set_field(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& t = fields();
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError({{key, "unknown key"}});
  try {
    it->second.set(cfg, value);
  } catch (const ConfigError& e) {
    // Re-tag with the key; the converters do not know it.
    std::vector<FieldError> errs = e.errors();
    for (auto& fe : errs) fe.field = key;
    throw ConfigError(std::move(errs));
  }
}

ParseResult parse_config(const std::string& text, bool lenient) {
  ParseResult out;
  std::vector<FieldError> errors;
  std::map<std::string, std::size_t> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back({"line " + std::to_string(lineno), "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back({"line " + std::to_string(lineno), "empty key"});
      continue;
    }
    if (seen.count(key)) {
      errors.push_back({key, "duplicate key (first on line " + std::to_string(seen[key]) + ")"});
      continue;
    }
    seen[key] = lineno;
    if (!fields().count(key)) {
      if (lenient) {
        out.warnings.push_back("ignoring unknown key '" + key + "'");
      } else {
        errors.push_back({key, "unknown key"});
      }
      continue;
    }
    try {
      set_field(out.config, key, value);
    } catch (const ConfigError& e) {
      errors.insert(errors.end(), e.errors().begin(), e.errors().end());
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  auto soft = validate_config(out.config);
  out.warnings.insert(out.warnings.end(), soft.begin(), soft.end());
  return out;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, f] : fields()) out += key + " = " + f.get(cfg) + "\n";
  return out;
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<FieldError> errors;
  std::vector<std::string> warnings;
  const auto& p = cfg.params;
  if (!(p.beta > 0.0)) errors.push_back({"beta", "must be > 0"});
  if (p.alpha < 0.0) errors.push_back({"alpha", "must be >= 0"});
  if (!(p.ell > 0.0)) errors.push_back({"ell", "must be > 0"});
  const bool closed_form = cfg.scenario != Scenario::CiSweep && cfg.scenario != Scenario::Vmc;
  if (p.beta > 0.0 && p.alpha >= 0.0) {
    const double r = p.alpha / std::sqrt(p.beta);
    if (closed_form && r >= 1.0) {
      errors.push_back({"alpha", "alpha/sqrt(beta) must be < 1 for the perturbative model"});
    } else if (r >= 0.7) {
      warnings.push_back("alpha/sqrt(beta) = " + fmt_double(r) + " is outside the validated range (< 0.7)");
    }
  }
  if (cfg.coulomb_strength < 0.0) errors.push_back({"coulomb.strength", "must be >= 0"});
  if (!(cfg.coulomb_softening > 0.0)) errors.push_back({"coulomb.softening", "must be > 0"});
  if (cfg.discord_grid < 4) errors.push_back({"discord.grid", "must be >= 4"});

  const auto& s = cfg.sweep;
  if (s.alpha_count < 1) errors.push_back({"sweep.alpha_count", "must be >= 1"});
  if (s.e_count < 1) errors.push_back({"sweep.e_count", "must be >= 1"});
  if (s.alpha_min < 0.0) errors.push_back({"sweep.alpha_min", "must be >= 0"});
  if (s.alpha_max < s.alpha_min) errors.push_back({"sweep.alpha_max", "must be >= sweep.alpha_min"});
  if (s.e_max < s.e_min) errors.push_back({"sweep.e_max", "must be >= sweep.e_min"});
  if (s.orbitals < 2) errors.push_back({"sweep.orbitals", "must be >= 2"});
  if (s.n_keep < 1) errors.push_back({"sweep.n_keep", "must be >= 1"});
  if (!(s.pair_window > 0.0)) errors.push_back({"sweep.pair_window", "must be > 0"});
  if (s.grid_points < 64) errors.push_back({"sweep.grid_points", "must be >= 64"});
  if (!(s.degeneracy_tol >= 0.0)) errors.push_back({"sweep.degeneracy_tol", "must be >= 0"});
  if (!(s.continuation_step > 0.0)) errors.push_back({"sweep.continuation_step", "must be > 0"});

  const auto& v = cfg.vmc;
  if (v.wells != 1 && v.wells != 2 && v.wells != 4) errors.push_back({"vmc.wells", "must be 1, 2 or 4"});
  if (v.n_samples < 10000) errors.push_back({"vmc.n_samples", "must be >= 10000"});
  if (v.walkers < 1 || v.walkers > v.n_samples) errors.push_back({"vmc.walkers", "must be in [1, vmc.n_samples]"});
  if (v.jastrow_b < 0.0) errors.push_back({"vmc.jastrow_b", "must be >= 0"});
  if (v.spin_leak < 0.0) errors.push_back({"vmc.spin_leak", "must be >= 0"});
  if (!(v.spin_step > 0.0 && v.spin_step <= 2.0 * std::numbers::pi)) errors.push_back({"vmc.spin_step", "must be in (0, 2 pi]"});
  if (v.bins < 1) errors.push_back({"vmc.bins", "must be >= 1"});
  if (v.optimize_samples < 1000) errors.push_back({"vmc.optimize_samples", "must be >= 1000"});

  if (cfg.output_dir.empty()) errors.push_back({"output_dir", "must not be empty"});
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return warnings;
}

}  // namespace soqdot::runner
