// soqdot <scenario> [--config FILE] [--alpha F] [--beta F] [--e-field F] [--ell F]
//        [--seed N] [--out DIR] [--to-physical] [--lenient] [--set key=value ...]

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "soqdot/runner/runner.hpp"

namespace {

using namespace soqdot::runner;

int fail(const std::string& kind, const std::string& message, int code,
         const std::vector<FieldError>& fields = {}) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  if (!fields.empty()) {
    j["fields"] = nlohmann::ordered_json::array();
    for (const auto& f : fields) j["fields"].push_back({{"field", f.field}, {"message", f.message}});
  }
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-orbit double quantum dot toolkit"};
  std::string scenario;
  std::string config_path;
  std::optional<double> alpha, beta, e_field, ell;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool to_physical = false;
  bool lenient = false;
  std::vector<std::string> sets;

  app.add_option("scenario", scenario, "analytic | measure | discord | witness | memory | ci-sweep | vmc")->required();
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--alpha", alpha, "Rashba strength");
  app.add_option("--beta", beta, "confinement strength");
  app.add_option("--e-field", e_field, "electric field E0");
  app.add_option("--ell", ell, "interdot distance");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--to-physical", to_physical, "append GaAs-unit columns");
  app.add_flag("--lenient", lenient, "warn on unknown config keys instead of failing");
  app.add_option("--set", sets, "extra key=value overrides, e.g. vmc.n_samples=20000");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitConfig);
  }

  RunConfig cfg;
  std::vector<std::string> warnings;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw ConfigError({{"--config", "cannot read '" + config_path + "'"}});
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    ParseResult parsed = parse_config(text, lenient);
    cfg = parsed.config;
    warnings = parsed.warnings;

    set_field(cfg, "scenario", scenario);
    auto num = [](double v) { return format_real(v); };
    if (alpha) set_field(cfg, "alpha", num(*alpha));
    if (beta) set_field(cfg, "beta", num(*beta));
    if (e_field) set_field(cfg, "e_field", num(*e_field));
    if (ell) set_field(cfg, "ell", num(*ell));
    if (seed) set_field(cfg, "seed", std::to_string(*seed));
    if (out_dir) set_field(cfg, "output_dir", *out_dir);
    if (to_physical) cfg.to_physical = true;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError({{"--set", "expected key=value, got '" + kv + "'"}});
      set_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto soft = validate_config(cfg);
    warnings.insert(warnings.end(), soft.begin(), soft.end());
  } catch (const ConfigError& e) {
    return fail("config", e.what(), kExitConfig, e.errors());
  }

  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  try {
    const RunSummary s = run(cfg, warnings);
    for (const auto& p : s.written) std::cout << p.string() << "\n";
  } catch (const soqdot::InvalidArgument& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const std::exception& e) {
    return fail("numeric", e.what(), kExitNumeric);
  }
  return kExitOk;
}
