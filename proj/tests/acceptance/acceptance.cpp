// Acceptance report: one PASS/FAIL line per criterion, with the measured
// numbers underneath. Criteria whose failure is a known model deviation are
// tagged; only an unexplained failure makes the process exit non-zero.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "soqdot/analytic_model.hpp"
#include "soqdot/dqd_solver.hpp"
#include "soqdot/runner/runner.hpp"
#include "soqdot/vmc.hpp"

namespace {

namespace fs = std::filesystem;
namespace a = soqdot::analytic;
namespace qs = soqdot::qstate;
namespace dqd = soqdot::dqd;
namespace vmc = soqdot::vmc;
namespace rn = soqdot::runner;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void note(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    details.emplace_back(buf);
  }
  void require(bool ok, const char* fmt, auto... args) {
    if (!ok) pass = false;
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    details.emplace_back(std::string(ok ? "ok   " : "FAIL ") + buf);
  }
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;          // 0 = none
  const char* known_gap;    // non-null when a failure is an understood deviation
  std::function<Outcome()> run;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

a::ModelParams params(double alpha, double beta) {
  a::ModelParams p;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}

// `quantity,value,...` rows of a report CSV
std::map<std::string, double> report_fields(const std::string& csv) {
  std::map<std::string, double> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string key, value;
    std::getline(row, key, ',');
    std::getline(row, value, ',');
    try {
      out[key] = std::stod(value);
    } catch (...) {
    }
  }
  return out;
}

const rn::OutputFile& output(const rn::ScenarioResult& r, const std::string& name) {
  for (const auto& f : r.files)
    if (f.name == name) return f;
  throw std::runtime_error("missing output " + name);
}

// ---------------------------------------------------------------------------

Outcome closed_form_equivalence() {
  Outcome o;
  struct Field {
    const char* name;
    double worst_ratio = 0.0;  // |numeric - closed| / tol
    double worst_alpha = 0.0, worst_beta = 0.0;
  };
  std::vector<Field> fields = {{"gamma0"},         {"gamma1"},       {"S_spin_pre"},  {"S_orb_pre"},
                               {"S_spin_post"},    {"S_orb_post"},   {"concurrence_pre"},
                               {"concurrence_post"}, {"S(A|B)_post"}, {"fidelity"},
                               {"discord_difference"}, {"P_B(1) direct"}, {"P_B(1) blind"},
                               {"S_AB_pure"},      {"S_AB_mixed"},   {"S_RB"},        {"S_QB"}};
  double worst_qb_corrected = 0.0;
  double worst_z_shortcut = 0.0;

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> log_beta(std::log(0.5), std::log(10.0));
  std::uniform_real_distribution<double> ratio(0.02, 0.7);
  const auto proj = a::spin_projectors();
  const auto protocol = a::noninvasive_witness_protocol();
  const auto zb = a::sigma_z_basis();
  const auto xb = a::sigma_x_basis();
  qs::DiscordOptions dopt;
  dopt.grid_theta = dopt.grid_phi = 24;

  for (int k = 0; k < 100; ++k) {
    const double beta = std::exp(log_beta(rng));
    const double alpha = ratio(rng) * std::sqrt(beta);
    const auto p = params(alpha, beta);
    const double tol = std::max(1e-9, 3.0 * std::pow(alpha * alpha / beta, 2));
    const auto st = a::build_states(p);
    const auto r = a::closed_form_report(p);
    const auto rec = qs::projective_measure(st.rho_AB, proj, a::basis::kSpin1);
    const auto& post = *rec[1].post_state;
    const auto spin_post = post.reduce({a::basis::kSpin1, a::basis::kSpin2});
    const auto w = qs::quantum_witness(st.rho_S, protocol);
    const auto u = qs::berta_uncertainty(st.rho_S, zb, xb, 0);
    const double d_pre = qs::quantum_discord(st.rho_S, qs::Side::B, dopt).discord;
    const double d_post = qs::quantum_discord(spin_post, qs::Side::B, dopt).discord;

    const double numeric[] = {rec[0].probability,
                              rec[1].probability,
                              qs::von_neumann_entropy(st.rho_S),
                              qs::von_neumann_entropy(st.rho_or),
                              qs::von_neumann_entropy(spin_post),
                              qs::von_neumann_entropy(post.reduce({a::basis::kOrbital})),
                              qs::concurrence2q(st.rho_S),
                              qs::concurrence2q(spin_post),
                              qs::conditional_entropy(spin_post, {0}),
                              qs::uhlmann_fidelity(spin_post, st.rho_S),
                              d_pre - d_post,
                              w.direct_probability,
                              w.blind_probability,
                              qs::conditional_entropy(st.rho_AB, {a::basis::kSpin1}),
                              u.S_AB,
                              u.S_RB,
                              u.S_QB};
    const double closed[] = {r.gamma0,         r.gamma1,           r.S_spin_pre_exact, r.S_orb_pre_exact,
                             r.S_spin_post_exact, r.S_orb_post_exact, r.concurrence_pre_exact,
                             r.concurrence_post, r.conditional_entropy_post, r.fidelity,
                             r.discord_difference, r.witness_prob, r.witness_prob,
                             r.S_AB_pure,        r.S_AB_mixed,       r.S_RB,             r.S_QB};
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const double ratio_f = std::abs(numeric[f] - closed[f]) / tol;
      if (k == 0 || ratio_f > fields[f].worst_ratio) {
        fields[f].worst_ratio = ratio_f;
        fields[f].worst_alpha = alpha;
        fields[f].worst_beta = beta;
      }
    }
    worst_qb_corrected = std::max(worst_qb_corrected, std::abs(u.S_QB - r.S_QB_corrected) / tol);
    worst_z_shortcut = std::max(worst_z_shortcut, std::abs(numeric[2] - r.S_spin_pre) / tol);
  }
  for (const auto& f : fields) {
    o.require(f.worst_ratio <= 1.0, "%-20s worst |num-closed|/tol = %.3g (alpha=%.3f beta=%.3f)", f.name,
              f.worst_ratio, f.worst_alpha, f.worst_beta);
  }
  o.note("info S_QB with the missing ln 2 restored: worst ratio %.3g", worst_qb_corrected);
  o.note("info S_spin_pre printed with Z~1: worst ratio %.3g (entropies compared to exact-Z forms)",
         worst_z_shortcut);
  return o;
}

Outcome memory_signs() {
  Outcome o;
  int evaluations = 0, neg_ok = 0, pos_ok = 0, slack_ok = 0;
  double min_slack = 1e9;
  for (double beta : {0.5, 1.0, 3.0, 10.0}) {
    for (int k = 1; k <= 40; ++k) {
      const double alpha = std::sqrt(beta) * k / 41.0;
      const auto p = params(alpha, beta);
      const auto st = a::build_states(p);
      const auto r = a::closed_form_report(p);
      const auto u = qs::berta_uncertainty(st.rho_S, a::sigma_z_basis(), a::sigma_x_basis(), 0);
      const double pure = qs::conditional_entropy(st.rho_AB, {a::basis::kSpin1});
      ++evaluations;
      neg_ok += pure < 0.0 && r.S_AB_pure < 0.0;
      pos_ok += u.S_AB > 0.0 && r.S_AB_mixed > 0.0;
      slack_ok += u.slack >= -1e-9;
      min_slack = std::min(min_slack, u.slack);
    }
  }
  o.require(neg_ok == evaluations, "S(A|B)_pure < 0 in %d/%d cases", neg_ok, evaluations);
  o.require(pos_ok == evaluations, "S(A|B)_mixed > 0 in %d/%d cases", pos_ok, evaluations);
  o.require(slack_ok == evaluations, "Berta slack >= -1e-9 in %d/%d evaluations (min %.3g)", slack_ok,
            evaluations, min_slack);

  const auto p = params(0.4, 1.0);
  const auto st = a::build_states(p);
  const auto r = a::closed_form_report(p);
  const double pure = qs::conditional_entropy(st.rho_AB, {a::basis::kSpin1});
  const double mixed = qs::conditional_entropy(st.rho_S, {0});
  o.require(std::abs(pure - r.S_AB_pure) < 1e-9, "alpha=0.4: numeric S(A|B)_pure %.12f vs formula %.12f",
            pure, r.S_AB_pure);
  o.require(std::abs(mixed - r.S_AB_mixed) < 1e-9, "alpha=0.4: numeric S(A|B)_mixed %.12f vs formula %.12f",
            mixed, r.S_AB_mixed);
  o.require(std::abs(r.S_AB_pure + 0.112516) < 5e-7 && std::abs(r.S_AB_mixed - 0.078928) < 5e-7,
            "quoted spot values %s reproduced to their 6 decimals", "-0.112516 / +0.078928");
  return o;
}

Outcome witness() {
  Outcome o;
  double worst = 0.0;
  const auto protocol = a::noninvasive_witness_protocol();
  for (double beta : {0.5, 1.0, 10.0}) {
    for (int k = 1; k <= 40; ++k) {
      const auto st = a::build_states(params(std::sqrt(beta) * k / 41.0, beta));
      worst = std::max(worst, qs::quantum_witness(st.rho_S, protocol).witness);
    }
  }
  o.require(worst < 1e-10, "model protocol on rho^S over 120 (alpha, beta): max W = %.3g", worst);

  // |+>|up> through CNOT (H (x) I): the blind measurement destroys the coherence
  // that the channel turns into a B population.
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd ket(4);
  ket << r, 0.0, r, 0.0;
  const qs::SubsystemShape two{{2, 2}};
  const auto rho = qs::pure_density(qs::StateVector(ket, two));
  const qs::ComplexMatrix h{{r, r}, {r, -r}};
  const qs::ComplexMatrix cnot{{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0},
                               {0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 1.0, 0.0}};
  qs::WitnessProtocol joint = protocol;
  joint.channel = {cnot * qs::embed(h, two, 0)};
  const double w = qs::quantum_witness(rho, joint).witness;
  o.require(w > 0.1, "coherent counterexample with a joint channel: W = %.6f", w);
  return o;
}

Outcome solver_sanity() {
  Outcome o;
  const dqd::PotentialSpec single{dqd::PotentialKind::SingleDot, 1.0, 0.0, 0.0};
  const auto orb = dqd::solve_single_particle(dqd::Grid1D{}, single, 12);
  double worst = 0.0;
  for (std::size_t n = 0; n < 10; ++n) worst = std::max(worst, std::abs(orb.energies[n] / (n + 0.5) - 1.0));
  o.require(worst < 1e-3, "single dot, n < 10: worst relative error %.3g", worst);

  const dqd::PotentialSpec dd{dqd::PotentialKind::DoubleDot, 1.0, 0.8, 0.0};
  dqd::SingleParticleOptions spo;
  spo.refinement_probe = false;
  const auto orbs = dqd::solve_single_particle(dqd::Grid1D{}, dd, 20, spo);
  dqd::CiOptions co;
  co.n_orbitals = 20;
  co.pair_window = 1e9;
  co.n_keep = 400;  // every pair
  co.convergence_probe = false;
  const auto ci = dqd::ci_diagonalize(orbs, dqd::CoulombParams{0.0, 0.1}, co);
  std::vector<double> pairs;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = i; j < 20; ++j) {
      pairs.push_back(orbs.energies[i] + orbs.energies[j]);
      if (i != j) pairs.push_back(orbs.energies[i] + orbs.energies[j]);
    }
  std::sort(pairs.begin(), pairs.end());
  double dev = 0.0;
  for (std::size_t k = 0; k < ci.states.size(); ++k) dev = std::max(dev, std::abs(ci.states[k].energy - pairs[k]));
  o.require(ci.states.size() == pairs.size() && dev < 1e-9,
            "zero-Coulomb CI, 20 orbitals, %zu states: max |E - (e_i + e_j)| = %.3g", ci.states.size(), dev);
  return o;
}

Outcome perturbative_consistency() {
  Outcome o;
  const dqd::PotentialSpec pot{dqd::PotentialKind::DoubleDot, 10.0, 4.0, 0.0};
  dqd::SingleParticleOptions spo;
  spo.refinement_probe = false;
  const auto orbs = dqd::solve_single_particle(dqd::default_grid(pot), pot, 30, spo);
  dqd::CiOptions co;
  co.n_orbitals = 30;
  co.n_keep = 60;
  co.convergence_probe = false;
  const auto ci = dqd::ci_diagonalize(orbs, dqd::CoulombParams{0.0, 0.1}, co);
  const std::vector<double> alphas{0.05, 0.1, 0.2, 0.3};
  const auto targets = dqd::track_target(ci, alphas);
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const double alpha = alphas[k];
    const auto so = dqd::add_spin_orbit(ci, alpha);
    const auto state = dqd::expand_state(so, ci.states.size(), targets[k].coefficients);
    const auto rdm = dqd::numeric_rdms(state).spin_rdm;
    auto ev = soqdot::linalg::hermitian_eig(rdm.matrix()).eigenvalues;
    std::sort(ev.rbegin(), ev.rend());
    const auto p = params(alpha, 10.0);
    const double major = 1.0 / p.Z(), minor = p.w() / p.Z();
    const double tol = 3.0 * std::pow(alpha * alpha / 10.0, 2);
    const double dev = std::max({std::abs(ev[0] - major), std::abs(ev[1] - minor), std::abs(ev[2]), std::abs(ev[3])});
    o.require(dev <= tol,
              "alpha=%.2f: weights %.6g %.3g %.3g %.3g vs {%.6g, %.3g}; dev %.3g, tol %.3g (overlap %.3f)", alpha,
              ev[0], ev[1], ev[2], ev[3], major, minor, dev, tol, targets[k].overlap);
    // exp(-i alpha sum_k x_k sigma^y_k) removes the coupling exactly; the spin of
    // each electron then flips with weight alpha^2 Var(x) = alpha^2 / (2 beta).
    o.note("info alpha=%.2f: (1 - top weight) / (alpha^2/beta) = %.4f; analytic model has 5/16 = 0.3125",
           alpha, (1.0 - ev[0]) / (alpha * alpha / 10.0));
  }
  return o;
}

Outcome sweep_trends() {
  Outcome o;
  rn::RunConfig cfg;
  cfg.scenario = rn::Scenario::CiSweep;
  const auto res = rn::compute(cfg);
  std::istringstream in(output(res, "sweep.csv").content);
  std::string line;
  std::getline(in, line);  // units
  std::getline(in, line);  // header
  struct Row {
    double alpha, e, s_pre, s_post, delta, overlap;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    std::vector<double> c;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) c.push_back(std::stod(cell));
    rows.push_back({c[0], c[1], c[4], c[5], c[6], c[8]});
  }
  o.require(rows.size() == 100, "%zu rows on the 10 x 10 (alpha, E0) grid", rows.size());

  double worst_a = -1e9, worst_c = 0.0, min_overlap = 1.0;
  int b_violations = 0, d_violations = 0;
  std::map<double, std::vector<Row>> by_e, by_alpha;
  for (const auto& r : rows) {
    worst_a = std::max(worst_a, r.s_post - r.s_pre);
    if (r.alpha == 0.0) worst_c = std::max({worst_c, std::abs(r.s_pre), std::abs(r.s_post)});
    min_overlap = std::min(min_overlap, r.overlap);
    by_e[r.e].push_back(r);
    by_alpha[r.alpha].push_back(r);
  }
  for (auto& [e, v] : by_e) {
    std::sort(v.begin(), v.end(), [](const Row& x, const Row& y) { return x.alpha < y.alpha; });
    for (std::size_t k = 1; k < v.size(); ++k) b_violations += v[k].delta < v[k - 1].delta - 1e-9;
  }
  std::string d_report;
  for (auto& [alpha, v] : by_alpha) {
    std::sort(v.begin(), v.end(), [](const Row& x, const Row& y) { return x.e < y.e; });
    if (v.back().s_pre < v.front().s_pre - 1e-9) {
      ++d_violations;
      char buf[96];
      std::snprintf(buf, sizeof buf, " a=%.1f:%.4f<%.4f", alpha, v.back().s_pre, v.front().s_pre);
      if (alpha > 0.0) d_report += buf;
    }
  }
  o.require(worst_a <= 1e-9, "(a) max S_post - S_pre = %.3g", worst_a);
  o.require(b_violations == 0, "(b) S_pre - S_post non-decreasing in alpha: %d violations", b_violations);
  o.require(worst_c <= 1e-9, "(c) alpha = 0 entropies: max |S| = %.3g", worst_c);
  o.require(d_violations == 0, "(d) S_pre(E0=4) >= S_pre(E0=0): %d of %zu alphas violate%s", d_violations,
            by_alpha.size(), d_report.c_str());
  o.note("info weakest continuation overlap %.4f", min_overlap);
  return o;
}

std::map<std::string, double> vmc_report(double beta, double e_field, std::uint64_t seed) {
  rn::RunConfig cfg;
  cfg.scenario = rn::Scenario::Vmc;
  cfg.params.beta = beta;
  cfg.params.e_field = e_field;
  cfg.seed = seed;
  return report_fields(output(rn::compute(cfg), "report.csv").content);
}

Outcome vmc_trends() {
  Outcome o;
  std::map<double, std::map<std::string, double>> runs;
  double slowest = 0.0;
  for (double beta : {10.0, 3.0, 1.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    runs[beta] = vmc_report(beta, 0.0, 7);
    slowest = std::max(slowest, elapsed(t0));
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto field = vmc_report(10.0, 1.0, 7);
  slowest = std::max(slowest, elapsed(t0));

  const double l10 = runs[10.0]["localization_fraction"];
  const double l3 = runs[3.0]["localization_fraction"];
  const double l1 = runs[1.0]["localization_fraction"];
  o.require(l10 >= 0.95, "beta=10 localized pair mass %.4f (>= 0.95)", l10);
  o.require(l10 > l3 && l3 > l1, "ordering beta=10 > 3 > 1: %.4f > %.4f > %.4f", l10, l3, l1);
  const double c0 = runs[10.0]["centroid_mean"], e0 = runs[10.0]["centroid_err"];
  const double c1 = field.at("centroid_mean"), e1 = field.at("centroid_err");
  const double sigma = std::hypot(e0, e1);
  const double shift = c1 - c0;
  o.require(shift < 0.0 && std::abs(shift) > 3.0 * sigma,
            "E0=1 centroid shift %.5f toward -x (force direction), %.1f sigma (sigma %.2g)", shift,
            std::abs(shift) / sigma, sigma);
  o.require(runs[10.0]["n_samples"] == 1e5, "%.0f samples per run, seed 7", runs[10.0]["n_samples"]);
  o.require(slowest < 300.0, "slowest run %.1f s (< 300 s)", slowest);
  return o;
}

Outcome zero_variance() {
  Outcome o;
  for (auto [kind, n] : {std::pair{dqd::PotentialKind::DoubleDot, 2}, std::pair{dqd::PotentialKind::FourDot, 4}}) {
    vmc::Hamiltonian h;
    h.potential = {kind, 10.0, 4.0, 0.0};
    h.alpha = 0.0;
    h.coulomb.strength = 0.0;
    vmc::TrialParams tp;
    tp.jastrow_b = 0.0;
    tp.spins = vmc::SpinPattern::Polarized;
    vmc::VmcOptions opt;
    opt.n_samples = 20000;
    const auto est = vmc::metropolis_run(tp, h, opt, 3);
    const double target = n * 10.0 / 2.0;
    o.require(est.energy_variance < 1e-10 && std::abs(est.energy_mean - target) < 1e-8,
              "%d wells, beta=10: E = %.12f (N beta/2 = %.1f), variance %.3g", n, est.energy_mean, target,
              est.energy_variance);
  }
  return o;
}

struct CliResult {
  int code = -1;
  std::map<std::string, std::string> csv;
};

CliResult run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(SOQDOT_CLI_PATH) + " " + args + " --out " + out.string() + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (fs::exists(out)) {
    for (const auto& e : fs::directory_iterator(out)) {
      if (e.path().extension() != ".csv") continue;
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      r.csv[e.path().filename().string()] = ss.str();
    }
  }
  return r;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("soqdot-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"analytic", "--alpha 0.4 --beta 1 --to-physical"},
      {"measure", "--alpha 0.3 --beta 2"},
      {"discord", "--alpha 0.4 --beta 1"},
      {"witness", "--alpha 0.4 --beta 1"},
      {"memory", "--alpha 0.4 --beta 1"},
      {"ci-sweep", "--set sweep.alpha_count=3 --set sweep.e_count=2 --set sweep.orbitals=16 --set sweep.n_keep=30"},
      {"vmc", "--beta 3 --set vmc.n_samples=20000 --seed 5"},
  };
  for (const auto& [scenario, args] : runs) {
    const auto first = run_cli(scenario + " " + args, root / (scenario + "-1"));
    const auto second = run_cli(scenario + " " + args, root / (scenario + "-2"));
    const bool same = first.code == 0 && second.code == 0 && !first.csv.empty() && first.csv == second.csv;
    o.require(same, "%-9s exit %d/%d, %zu CSV file(s) byte-identical", scenario.c_str(), first.code, second.code,
              first.csv.size());
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "closed-form vs numeric equivalence over 100 (alpha, beta)", 10.0,
       "printed S_orb_pre drops the orbital coherence; Eq. (12) fidelity is not the Uhlmann fidelity of the "
       "stated states; printed S(Q|B) is ln 2 low",
       closed_form_equivalence},
      {2, "sign claims and Berta bound", 0.0, nullptr, memory_signs},
      {3, "witness zero for the model protocol, positive for a coherent counterexample", 0.0, nullptr, witness},
      {4, "solver sanity: harmonic levels and additive CI spectra", 30.0, nullptr, solver_sanity},
      {5, "decoupled-dot spin-RDM weights vs {1, w}/Z to O(alpha^4)", 0.0,
       "exact gauge result gives spin-flip weight alpha^2/beta; the analytic model has 5/16 of that",
       perturbative_consistency},
      {6, "10 x 10 (alpha, E0) entropy sweep trends", 600.0,
       "S_pre saturates in E0 from above, so S_pre(E0=4) sits slightly below S_pre(E0=0)", sweep_trends},
      {7, "VMC localization ordering and field-driven centroid shift", 0.0, nullptr, vmc_trends},
      {8, "VMC zero-variance check on the exact eigenstate", 0.0, nullptr, zero_variance},
      {9, "CLI determinism", 0.0, nullptr, determinism},
  };

  int unexplained = 0, red = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    bool threw = false;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.details.push_back(std::string("FAIL threw: ") + e.what());
      threw = true;
    }
    const double secs = elapsed(t0);
    if (c.budget_s > 0.0) out.require(secs < c.budget_s, "runtime %.1f s (budget %.0f s)", secs, c.budget_s);
    if (!out.pass) {
      ++red;
      if (!c.known_gap || threw) ++unexplained;
    }
    std::printf("criterion %d: %s  %s (%.1f s)%s%s\n", c.id, out.pass ? "PASS" : "FAIL", c.title, secs,
                !out.pass && c.known_gap ? " [known deviation: " : "",
                !out.pass && c.known_gap ? (std::string(c.known_gap) + "]").c_str() : "");
    for (const auto& d : out.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("summary: %d of %zu criteria pass; %d fail with a known deviation; %d unexplained\n",
              static_cast<int>(criteria.size()) - red, criteria.size(), red - unexplained, unexplained);
  return unexplained == 0 ? 0 : 1;
}
