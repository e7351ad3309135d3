#pragma once

// Run configuration for the soqdot CLI. The on-disk format is flat
// `key = value` text with `#` comments; dotted prefixes group module
// settings (`vmc.n_samples = 20000`).

#include <cstdint>
#include <string>
#include <vector>

#include "soqdot/analytic_model.hpp"
#include "soqdot/error.hpp"

namespace soqdot::runner {

enum class Scenario { Analytic, Measure, Discord, Witness, Memory, CiSweep, Vmc };

std::string scenario_name(Scenario s);
/// Throws ConfigError on an unknown name.
Scenario parse_scenario(const std::string& name);
const std::vector<std::string>& scenario_names();

struct SweepSettings {
  double alpha_min = 0.0;
  double alpha_max = 0.9;
  std::size_t alpha_count = 10;
  double e_min = 0.0;
  double e_max = 4.0;
  std::size_t e_count = 10;
  std::size_t orbitals = 30;
  std::size_t n_keep = 60;
  double pair_window = 30.0;
  std::size_t grid_points = 1024;
  bool averaged_post = false;
  double degeneracy_tol = 1e-3;
  double continuation_step = 0.02;
  bool convergence_probe = false;
  std::size_t probe_orbitals = 24;
};

struct VmcSettings {
  std::size_t wells = 4;
  std::size_t n_samples = 100000;
  std::size_t walkers = 4;
  double jastrow_b = 0.5;
  double lagrange_lambda = 1.0;
  double spin_leak = 0.0;
  bool polarized = false;
  bool rashba_phase = false;
  double spin_step = 0.7853981633974483;
  std::size_t bins = 128;
  bool optimize = false;
  std::size_t optimize_samples = 20000;
};

struct RunConfig {
  Scenario scenario = Scenario::Analytic;
  analytic::ModelParams params;
  std::uint64_t seed = 1;
  std::string output_dir = "soqdot-out";
  bool to_physical = false;
  double coulomb_strength = 1.0;
  double coulomb_softening = 0.1;
  std::size_t discord_grid = 64;
  SweepSettings sweep;
  VmcSettings vmc;
};

struct FieldError {
  std::string field;
  std::string message;
};

class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<FieldError> errors);
  [[nodiscard]] const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

struct ParseResult {
  RunConfig config;
  std::vector<std::string> warnings;
};

/// Defaults for omitted keys. Unknown keys are errors unless `lenient`, in
/// which case they become warnings. Collects every problem before throwing.
ParseResult parse_config(const std::string& text, bool lenient = false);

/// Every key, sorted, one per line, numbers at full precision.
std::string serialize_config(const RunConfig& cfg);

/// Sets one key from its text form; used by the parser and CLI overrides.
void set_field(RunConfig& cfg, const std::string& key, const std::string& value);

/// Range checks across fields. Hard violations throw ConfigError; soft ones
/// come back as warnings.
std::vector<std::string> validate_config(const RunConfig& cfg);

}  // namespace soqdot::runner
