#include "soqdot/runner/runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include <unistd.h>

#include "soqdot/analytic_model.hpp"
#include "soqdot/dqd_solver.hpp"
#include "soqdot/quantum_state.hpp"
#include "soqdot/vmc.hpp"

#ifndef SOQDOT_VERSION
#define SOQDOT_VERSION "unknown"
#endif

namespace soqdot::runner {

namespace fs = std::filesystem;
namespace a = soqdot::analytic;
namespace qs = soqdot::qstate;

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::string units, std::vector<std::string> header)
    : units_(std::move(units)), header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("CsvTable: row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out = "# units: " + units_ + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

namespace {

constexpr const char* kDimensionless =
    "dimensionless; energies in hbar*omega0, lengths in d0, fields in hbar*omega0/(e d0), entropies in nats";

// quantity,value[,physical_value,physical_unit]
class Report {
 public:
  explicit Report(bool physical) : physical_(physical) {}
  void add(const std::string& q, double v, double phys = 0.0, const std::string& unit = {}) {
    rows_.push_back({q, v, phys, unit});
  }
  [[nodiscard]] std::string str() const {
    std::vector<std::string> header{"quantity", "value"};
    if (physical_) {
      header.emplace_back("physical_value");
      header.emplace_back("physical_unit");
    }
    CsvTable t(kDimensionless, header);
    for (const auto& r : rows_) {
      std::vector<std::string> cells{r.q, format_real(r.v)};
      if (physical_) {
        cells.push_back(r.unit.empty() ? "" : format_real(r.phys));
        cells.push_back(r.unit);
      }
      t.add_row(std::move(cells));
    }
    return t.str();
  }

 private:
  struct Row {
    std::string q;
    double v;
    double phys;
    std::string unit;
  };
  bool physical_;
  std::vector<Row> rows_;
};

// quantity,numeric,closed_form,closed_form_exact
class Comparison {
 public:
  void add(const std::string& q, double numeric, double printed, double exact) {
    t_.add_row({q, format_real(numeric), format_real(printed), format_real(exact)});
  }
  void add(const std::string& q, double numeric, double printed) { add(q, numeric, printed, printed); }
  [[nodiscard]] std::string str() const { return t_.str(); }

 private:
  CsvTable t_{kDimensionless, {"quantity", "numeric", "closed_form", "closed_form_exact"}};
};

void add_params(Report& r, const RunConfig& cfg) {
  const auto& p = cfg.params;
  r.add("alpha", p.alpha);
  r.add("beta", p.beta, dqd::gaas::energy_meV(p.beta), "meV");
  r.add("e_field", p.e_field, dqd::gaas::field_V_per_um(p.e_field), "V/um");
  r.add("ell", p.ell, dqd::gaas::length_nm(p.ell), "nm");
  r.add("b_field", p.b_field);
}

struct PostMeasurement {
  double gamma0;
  double gamma1;
  qs::DensityMatrix spin;
  qs::DensityMatrix orbital;
};

PostMeasurement measure_spin1_up(const a::ModelStates& st) {
  const auto proj = a::spin_projectors();
  const auto rec = qs::projective_measure(st.rho_AB, proj, a::basis::kSpin1);
  if (!rec[1].post_state) throw NumericError("measurement: outcome 1 has zero probability");
  const auto& post = *rec[1].post_state;
  return {rec[0].probability, rec[1].probability, post.reduce({a::basis::kSpin1, a::basis::kSpin2}),
          post.reduce({a::basis::kOrbital})};
}

ScenarioResult run_analytic(const RunConfig& cfg) {
  const auto r = a::closed_form_report(cfg.params);
  Report rep(cfg.to_physical);
  add_params(rep, cfg);
  rep.add("Z", r.Z);
  rep.add("gamma0", r.gamma0);
  rep.add("gamma1", r.gamma1);
  rep.add("S_spin_pre", r.S_spin_pre);
  rep.add("S_orb_pre", r.S_orb_pre);
  rep.add("S_spin_post", r.S_spin_post);
  rep.add("S_orb_post", r.S_orb_post);
  rep.add("S_spin_pre_exact", r.S_spin_pre_exact);
  rep.add("S_orb_pre_exact", r.S_orb_pre_exact);
  rep.add("S_spin_post_exact", r.S_spin_post_exact);
  rep.add("S_orb_post_exact", r.S_orb_post_exact);
  rep.add("fidelity", r.fidelity);
  rep.add("fidelity_asymptotic", r.fidelity_asymptotic);
  rep.add("concurrence_pre", r.concurrence_pre);
  rep.add("concurrence_pre_exact", r.concurrence_pre_exact);
  rep.add("concurrence_post", r.concurrence_post);
  rep.add("conditional_entropy_post", r.conditional_entropy_post);
  rep.add("discord_difference", r.discord_difference);
  rep.add("witness_prob", r.witness_prob);
  rep.add("witness", r.witness);
  rep.add("S_AB_pure", r.S_AB_pure);
  rep.add("S_AB_mixed", r.S_AB_mixed);
  rep.add("S_RB", r.S_RB);
  rep.add("S_QB", r.S_QB);
  rep.add("S_QB_corrected", r.S_QB_corrected);
  rep.add("S_rhoA", r.S_rhoA);
  rep.add("S_rhoA_S", r.S_rhoA_S);
  return {{{"report.csv", rep.str()}}, {}};
}

ScenarioResult run_measure(const RunConfig& cfg) {
  const auto st = a::build_states(cfg.params);
  const auto r = a::closed_form_report(cfg.params);
  const auto pm = measure_spin1_up(st);
  Comparison c;
  c.add("gamma0", pm.gamma0, r.gamma0);
  c.add("gamma1", pm.gamma1, r.gamma1);
  c.add("S_spin_pre", qs::von_neumann_entropy(st.rho_S), r.S_spin_pre, r.S_spin_pre_exact);
  c.add("S_orb_pre", qs::von_neumann_entropy(st.rho_or), r.S_orb_pre, r.S_orb_pre_exact);
  c.add("S_spin_post", qs::von_neumann_entropy(pm.spin), r.S_spin_post, r.S_spin_post_exact);
  c.add("S_orb_post", qs::von_neumann_entropy(pm.orbital), r.S_orb_post, r.S_orb_post_exact);
  c.add("fidelity", qs::uhlmann_fidelity(pm.spin, st.rho_S), r.fidelity);
  c.add("concurrence_pre", qs::concurrence2q(st.rho_S), r.concurrence_pre, r.concurrence_pre_exact);
  c.add("concurrence_post", qs::concurrence2q(pm.spin), r.concurrence_post);
  c.add("conditional_entropy_post", qs::conditional_entropy(pm.spin, {0}), r.conditional_entropy_post);
  return {{{"report.csv", c.str()}}, {}};
}

ScenarioResult run_discord(const RunConfig& cfg) {
  const auto st = a::build_states(cfg.params);
  const auto r = a::closed_form_report(cfg.params);
  const auto pm = measure_spin1_up(st);
  qs::DiscordOptions opt;
  opt.grid_theta = opt.grid_phi = cfg.discord_grid;
  const auto pre = qs::quantum_discord(st.rho_S, qs::Side::B, opt);
  const auto post = qs::quantum_discord(pm.spin, qs::Side::B, opt);
  Comparison c;
  c.add("discord_pre", pre.discord, r.discord_difference);
  c.add("discord_post", post.discord, 0.0);
  c.add("discord_difference", pre.discord - post.discord, r.discord_difference);
  return {{{"report.csv", c.str()}}, {}};
}

ScenarioResult run_witness(const RunConfig& cfg) {
  const auto st = a::build_states(cfg.params);
  const auto r = a::closed_form_report(cfg.params);
  const auto w = qs::quantum_witness(st.rho_S, a::noninvasive_witness_protocol());
  Comparison c;
  c.add("witness", w.witness, r.witness);
  c.add("direct_probability", w.direct_probability, r.witness_prob);
  c.add("blind_probability", w.blind_probability, r.witness_prob);
  return {{{"report.csv", c.str()}}, {}};
}

ScenarioResult run_memory(const RunConfig& cfg) {
  const auto st = a::build_states(cfg.params);
  const auto r = a::closed_form_report(cfg.params);
  const auto u = qs::berta_uncertainty(st.rho_S, a::sigma_z_basis(), a::sigma_x_basis(), 0);
  Comparison c;
  c.add("S_AB_pure", qs::conditional_entropy(st.rho_AB, {a::basis::kSpin1}), r.S_AB_pure);
  c.add("S_AB_mixed", u.S_AB, r.S_AB_mixed);
  c.add("S_RB", u.S_RB, r.S_RB);
  c.add("S_QB", u.S_QB, r.S_QB, r.S_QB_corrected);
  c.add("c", u.c, 0.5);
  c.add("uncertainty_lhs", u.lhs, r.S_RB + r.S_QB_corrected);
  c.add("uncertainty_rhs", u.rhs, std::log(2.0) + r.S_AB_mixed);
  c.add("uncertainty_slack", u.slack, r.S_RB + r.S_QB_corrected - std::log(2.0) - r.S_AB_mixed);
  c.add("S_rhoA_S", qs::von_neumann_entropy(st.rho_S.reduce({0})), r.S_rhoA_S);
  return {{{"report.csv", c.str()}}, {}};
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return v;
}

ScenarioResult run_ci_sweep(const RunConfig& cfg) {
  const auto& s = cfg.sweep;
  dqd::SweepSpec spec;
  spec.alphas = linspace(s.alpha_min, s.alpha_max, s.alpha_count);
  spec.e_fields = linspace(s.e_min, s.e_max, s.e_count);
  spec.beta = cfg.params.beta;
  spec.ell = cfg.params.ell;
  spec.b_field = cfg.params.b_field;
  spec.coulomb = {cfg.coulomb_strength, cfg.coulomb_softening};
  spec.ci.n_orbitals = s.orbitals;
  spec.ci.n_keep = s.n_keep;
  spec.ci.pair_window = s.pair_window;
  spec.ci.convergence_probe = s.convergence_probe;
  spec.ci.probe_orbitals = s.probe_orbitals;
  spec.grid.n_points = s.grid_points;
  spec.single_particle.refinement_probe = false;
  spec.post_mode = s.averaged_post ? dqd::PostEntropyMode::Averaged : dqd::PostEntropyMode::OutcomeOne;
  spec.degeneracy_tol = s.degeneracy_tol;
  spec.continuation_step = s.continuation_step;
  const auto rows = dqd::entropy_sweep(spec);

  std::vector<std::string> header{"alpha", "e_field", "ell", "coulomb", "S_pre", "S_post", "delta_S",
                                  "overlap_flag", "overlap"};
  if (cfg.to_physical) {
    header.emplace_back("e_field_V_per_um");
    header.emplace_back("ell_nm");
  }
  CsvTable t(kDimensionless, header);
  std::size_t flagged = 0;
  for (const auto& r : rows) {
    std::vector<std::string> cells{format_real(r.alpha),  format_real(r.e_field), format_real(r.ell),
                                   format_real(r.coulomb), format_real(r.S_pre),  format_real(r.S_post),
                                   format_real(r.delta_S), r.overlap_flag ? "1" : "0", format_real(r.overlap)};
    if (cfg.to_physical) {
      cells.push_back(format_real(dqd::gaas::field_V_per_um(r.e_field)));
      cells.push_back(format_real(dqd::gaas::length_nm(r.ell)));
    }
    t.add_row(std::move(cells));
    flagged += r.overlap_flag;
  }
  ScenarioResult out{{{"sweep.csv", t.str()}}, {}};
  if (flagged) out.notes.push_back(std::to_string(flagged) + " sweep rows flagged: continuation overlap < 0.5");
  return out;
}

dqd::PotentialKind wells_kind(std::size_t wells) {
  switch (wells) {
    case 1: return dqd::PotentialKind::SingleDot;
    case 2: return dqd::PotentialKind::DoubleDot;
    default: return dqd::PotentialKind::FourDot;
  }
}

ScenarioResult run_vmc(const RunConfig& cfg) {
  const auto& v = cfg.vmc;
  vmc::Hamiltonian h;
  h.potential = {wells_kind(v.wells), cfg.params.beta, cfg.params.ell, cfg.params.e_field};
  h.alpha = cfg.params.alpha;
  h.b_field = cfg.params.b_field;
  h.coulomb = {cfg.coulomb_strength, cfg.coulomb_softening};

  vmc::TrialParams tp;
  tp.jastrow_b = v.jastrow_b;
  tp.lagrange_lambda = v.lagrange_lambda;
  tp.spin_leak = v.spin_leak;
  tp.spins = v.polarized ? vmc::SpinPattern::Polarized : vmc::SpinPattern::Alternating;
  if (v.rashba_phase) tp.phase = vmc::homogeneous_rashba_phase(cfg.params.alpha);

  ScenarioResult out;
  std::optional<vmc::OptimizeResult> opt;
  if (v.optimize) {
    vmc::OptimizeOptions oo;
    oo.samples_per_eval = v.optimize_samples;
    opt = vmc::optimize_params(h, cfg.seed, tp, oo);
    tp = opt->params;
    if (!opt->converged) out.notes.push_back("optimizer stopped without reaching the relative tolerance");
  }

  vmc::VmcOptions vo;
  vo.n_samples = v.n_samples;
  vo.n_walkers = v.walkers;
  vo.spin_step = v.spin_step;
  vo.bins = v.bins;
  const auto est = vmc::metropolis_run(tp, h, vo, cfg.seed);
  if (est.acceptance_flag) out.notes.push_back("position acceptance outside [0.2, 0.8]");

  const auto pd = vmc::pair_distribution(est);
  std::vector<std::string> header{"x1_bin", "x2_bin", "density"};
  if (cfg.to_physical) {
    header.emplace_back("x1_nm");
    header.emplace_back("x2_nm");
  }
  CsvTable t("x in d0, density in 1/d0^2 (integrates to 1 over the box)", header);
  for (std::size_t i = 0; i < pd.x.size(); ++i) {
    for (std::size_t j = 0; j < pd.x.size(); ++j) {
      std::vector<std::string> cells{format_real(pd.x[i]), format_real(pd.x[j]),
                                     format_real(pd.density[i * pd.x.size() + j])};
      if (cfg.to_physical) {
        cells.push_back(format_real(dqd::gaas::length_nm(pd.x[i])));
        cells.push_back(format_real(dqd::gaas::length_nm(pd.x[j])));
      }
      t.add_row(std::move(cells));
    }
  }

  Report rep(cfg.to_physical);
  add_params(rep, cfg);
  rep.add("jastrow_b", tp.jastrow_b);
  rep.add("lagrange_lambda", tp.lagrange_lambda);
  rep.add("spin_leak", tp.spin_leak);
  rep.add("energy_mean", est.energy_mean, dqd::gaas::energy_meV(est.energy_mean), "meV");
  rep.add("energy_err", est.energy_err, dqd::gaas::energy_meV(est.energy_err), "meV");
  rep.add("energy_variance", est.energy_variance);
  rep.add("energy_imag_mean", est.energy_imag_mean);
  rep.add("sigma_z2_mean", est.constraint_mean);
  rep.add("sigma_z2_err", est.constraint_err);
  rep.add("s2_mean", est.s2_mean);
  rep.add("lagrangian", est.lagrangian);
  rep.add("acceptance_position", est.acceptance_position);
  rep.add("acceptance_spin", est.acceptance_spin);
  rep.add("localization_fraction", est.localization_fraction);
  rep.add("centroid_mean", est.centroid_mean, dqd::gaas::length_nm(est.centroid_mean), "nm");
  rep.add("centroid_err", est.centroid_err, dqd::gaas::length_nm(est.centroid_err), "nm");
  rep.add("out_of_range", est.pair.out_of_range);
  rep.add("n_samples", static_cast<double>(est.n_samples));
  rep.add("node_rejections", static_cast<double>(est.node_rejections));

  nlohmann::ordered_json meta;
  meta["params"] = {{"alpha", cfg.params.alpha},
                    {"beta", cfg.params.beta},
                    {"e_field", cfg.params.e_field},
                    {"ell", cfg.params.ell},
                    {"b_field", cfg.params.b_field},
                    {"wells", v.wells},
                    {"coulomb_strength", cfg.coulomb_strength},
                    {"coulomb_softening", cfg.coulomb_softening},
                    {"jastrow_b", tp.jastrow_b},
                    {"lagrange_lambda", tp.lagrange_lambda},
                    {"spin_leak", tp.spin_leak}};
  meta["seed"] = cfg.seed;
  meta["n_samples"] = est.n_samples;
  meta["acceptance"] = {{"position", est.acceptance_position}, {"spin", est.acceptance_spin},
                        {"flag", est.acceptance_flag}};
  meta["energy"] = {{"mean", est.energy_mean}, {"err", est.energy_err}};
  meta["constraint_residual"] = est.constraint_mean - 1.0;
  if (opt) {
    meta["optimizer"] = {{"passes", opt->passes}, {"converged", opt->converged},
                         {"objective", opt->objective}, {"objective_at_start", opt->objective_at_start}};
  }

  out.files = {{"pairdist.csv", t.str()}, {"report.csv", rep.str()}, {"vmc.jsonl", meta.dump() + "\n"}};
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ScenarioResult compute(const RunConfig& cfg) {
  validate_config(cfg);
  switch (cfg.scenario) {
    case Scenario::Analytic: return run_analytic(cfg);
    case Scenario::Measure: return run_measure(cfg);
    case Scenario::Discord: return run_discord(cfg);
    case Scenario::Witness: return run_witness(cfg);
    case Scenario::Memory: return run_memory(cfg);
    case Scenario::CiSweep: return run_ci_sweep(cfg);
    case Scenario::Vmc: return run_vmc(cfg);
  }
  throw InvalidArgument("compute: unhandled scenario");
}

void write_atomically(const fs::path& dir, const std::vector<OutputFile>& files) {
  fs::create_directories(dir);
  const std::string suffix = ".tmp-" + std::to_string(::getpid());
  std::vector<fs::path> temps;
  try {
    for (const auto& f : files) {
      const fs::path tmp = dir / (f.name + suffix);
      temps.push_back(tmp);
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      os.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
      os.close();
      if (!os) throw std::runtime_error("could not write " + tmp.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
  for (std::size_t k = 0; k < files.size(); ++k) fs::rename(temps[k], dir / files[k].name);
}

RunSummary run(const RunConfig& cfg, const std::vector<std::string>& warnings) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  ScenarioResult res = compute(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::ordered_json m;
  m["tool"] = "soqdot";
  m["version"] = SOQDOT_VERSION;
  m["scenario"] = scenario_name(cfg.scenario);
  m["seed"] = cfg.seed;
  nlohmann::ordered_json conf = nlohmann::ordered_json::object();
  std::istringstream in(serialize_config(cfg));
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    conf[line.substr(0, eq)] = line.substr(eq + 3);
  }
  m["config"] = conf;
  m["outputs"] = nlohmann::ordered_json::array();
  for (const auto& f : res.files) m["outputs"].push_back(f.name);
  m["warnings"] = warnings;
  m["notes"] = res.notes;
  m["started_at"] = started;
  m["wall_time_s"] = wall;
  res.files.push_back({"manifest.json", m.dump(2) + "\n"});

  write_atomically(cfg.output_dir, res.files);
  RunSummary s;
  s.wall_seconds = wall;
  for (const auto& f : res.files) s.written.push_back(fs::path(cfg.output_dir) / f.name);
  return s;
}

}  // namespace soqdot::runner
