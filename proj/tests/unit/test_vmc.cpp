#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "soqdot/error.hpp"
#include "soqdot/vmc.hpp"

using namespace soqdot;
using namespace soqdot::vmc;
using dqd::PotentialKind;
using dqd::PotentialSpec;

namespace {

Hamiltonian free_hamiltonian(PotentialKind kind, double beta, double ell) {
  Hamiltonian h;
  h.potential = PotentialSpec{kind, beta, ell, 0.0};
  h.alpha = 0.0;
  h.coulomb.strength = 0.0;
  return h;
}

TrialParams exact_trial() {
  TrialParams tp;
  tp.jastrow_b = 0.0;
  tp.spins = SpinPattern::Polarized;
  return tp;
}

VmcOptions small_run(std::size_t n) {
  VmcOptions o;
  o.n_samples = n;
  return o;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

TEST_CASE("parameter validation") {
  TrialParams tp;
  tp.jastrow_b = -1.0;
  CHECK_THROWS_AS(tp.validate(), InvalidArgument);
  tp = {};
  tp.spin_leak = -0.5;
  CHECK_THROWS_AS(tp.validate(), InvalidArgument);
  VmcOptions o;
  o.n_walkers = 0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o = {};
  o.burn_in_fraction = 1.5;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  const TrialWavefunction psi(TrialParams{}, Hamiltonian{}.potential);
  CHECK_THROWS_AS(static_cast<void>(psi.amplitude(WalkerConfig({0.0}, {0.0}))), InvalidArgument);
}

TEST_CASE("walker angles wrap into [0, 2pi)") {
  WalkerConfig w({0.0, 1.0}, {-0.5, 7.0});
  for (double s : w.s) {
    CHECK(s >= 0.0);
    CHECK(s < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("antisymmetry of the trial amplitude") {
  const Hamiltonian h;
  TrialParams tp;
  tp.spins = SpinPattern::Polarized;
  const WalkerConfig a({-1.1, -0.3, 0.5, 1.2}, {0.3, 1.0, 2.0, 4.0});
  WalkerConfig b = a;
  std::swap(b.x[0], b.x[2]);
  std::swap(b.s[0], b.s[2]);
  const Complex pa = trial_amplitude(a, tp, h.potential);
  const Complex pb = trial_amplitude(b, tp, h.potential);
  CHECK(std::abs(pa + pb) < 1e-12 * std::abs(pa));
  // coincident particles with equal spins sit on a node
  WalkerConfig c = a;
  c.x[1] = c.x[0];
  c.s[1] = c.s[0];
  CHECK(std::abs(trial_amplitude(c, tp, h.potential)) < 1e-12 * std::abs(pa));
}

TEST_CASE("separated wells without Jastrow: |psi|^2 factorizes into Gaussians") {
  const double beta = 10.0;
  const auto h = free_hamiltonian(PotentialKind::FourDot, beta, 6.0);
  const TrialWavefunction psi(exact_trial(), h.potential);
  const auto c = psi.centers();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.3);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const WalkerConfig ref({c[0], c[1], c[2], c[3]}, {0.0, 0.0, 0.0, 0.0});
  const double p_ref = std::norm(psi.amplitude(ref));
  for (int k = 0; k < 20; ++k) {
    WalkerConfig w({0, 0, 0, 0}, {ang(rng), ang(rng), ang(rng), ang(rng)});
    double gauss = 1.0;
    for (std::size_t p = 0; p < 4; ++p) {
      w.x[p] = c[p] + g(rng);
      gauss *= std::exp(-beta * (w.x[p] - c[p]) * (w.x[p] - c[p]));
    }
    CHECK(std::abs(std::norm(psi.amplitude(w)) / p_ref / gauss - 1.0) < 1e-6);
  }
}

TEST_CASE("exact eigenstate trial: local energy is N beta / 2 everywhere") {
  for (auto [kind, beta, ell] : {std::tuple{PotentialKind::SingleDot, 1.0, 0.0},
                                 std::tuple{PotentialKind::FourDot, 10.0, 4.0}}) {
    const auto h = free_hamiltonian(kind, beta, ell);
    const TrialWavefunction psi(exact_trial(), h.potential);
    const double n = double(psi.n_particles());
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 0.5 / std::sqrt(beta));
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < 50; ++k) {
      WalkerConfig w;
      for (double c : psi.centers()) {
        w.x.push_back(c + g(rng));
        w.s.push_back(ang(rng));
      }
      const auto lv = psi.local(w, h);
      REQUIRE_FALSE(lv.node);
      CHECK(std::abs(lv.energy - n * beta / 2.0) < 1e-8);
      CHECK(std::abs(lv.energy_imag) < 1e-8);
      CHECK(lv.sigma_z2 == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("Rashba phase removes a homogeneous spin-orbit term exactly") {
  auto h = free_hamiltonian(PotentialKind::SingleDot, 1.0, 0.0);
  h.alpha = 0.3;
  auto tp = exact_trial();
  tp.phase = homogeneous_rashba_phase(h.alpha);
  const TrialWavefunction psi(tp, h.potential);
  for (double x : {-1.0, 0.2, 0.9}) {
    for (double s : {0.1, 1.7, 4.0}) {
      CHECK(psi.local(WalkerConfig({x}, {s}), h).energy ==
            doctest::Approx(0.5 - 0.5 * h.alpha * h.alpha).epsilon(1e-10));
    }
  }
}

TEST_CASE("Metropolis: zero-variance run and reproducibility") {
  const auto h = free_hamiltonian(PotentialKind::FourDot, 10.0, 4.0);
  const auto est = metropolis_run(exact_trial(), h, small_run(20000), 42);
  CHECK(est.energy_mean == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(est.energy_variance < 1e-10);
  CHECK_FALSE(est.acceptance_flag);
  CHECK(est.acceptance_position > 0.2);
  CHECK(est.acceptance_position < 0.8);

  const auto again = metropolis_run(exact_trial(), h, small_run(20000), 42);
  CHECK(again.centroid_mean == est.centroid_mean);
  CHECK(again.pair.mass == est.pair.mass);
  const auto other = metropolis_run(exact_trial(), h, small_run(20000), 43);
  CHECK(other.centroid_mean != est.centroid_mean);
}

TEST_CASE("local-energy variance grows as the trial leaves the eigenstate") {
  const auto h = free_hamiltonian(PotentialKind::FourDot, 10.0, 4.0);
  auto tp = exact_trial();
  const auto exact = metropolis_run(tp, h, small_run(10000), 7);
  tp.jastrow_b = 0.5;
  const auto off = metropolis_run(tp, h, small_run(10000), 7);
  CHECK(exact.energy_variance < off.energy_variance);
  CHECK(off.energy_mean > 20.0 - 3.0 * off.energy_err);
}

TEST_CASE("sampled marginal of one well matches the Gaussian density") {
  const double beta = 1.0;
  const auto h = free_hamiltonian(PotentialKind::SingleDot, beta, 0.0);
  auto opt = small_run(100000);
  opt.record_trace = true;
  const auto est = metropolis_run(exact_trial(), h, opt, 11);
  auto xs = est.trace_x1;
  REQUIRE(xs.size() == est.n_samples);
  std::sort(xs.begin(), xs.end());
  const double sigma = 1.0 / std::sqrt(2.0 * beta);
  double ks = 0.0;
  const double n = double(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i] / sigma);
    ks = std::max({ks, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
  }
  CHECK(ks < 0.02);
  CHECK(est.energy_mean == doctest::Approx(0.5).epsilon(1e-10));

  // chi-square probe on a thinned chain: the kernel leaves |psi|^2 invariant
  const std::size_t bins = 20, thin = 10;
  std::vector<double> obs(bins, 0.0);
  double used = 0.0;
  for (std::size_t i = 0; i < est.trace_x1.size(); i += thin) {
    const double z = est.trace_x1[i] / sigma;
    const double u = normal_cdf(z);
    obs[std::min(bins - 1, std::size_t(u * double(bins)))] += 1.0;
    used += 1.0;
  }
  double chi2 = 0.0;
  for (double o : obs) chi2 += (o - used / bins) * (o - used / bins) / (used / bins);
  CHECK(chi2 / double(bins - 1) < 3.0);
}

TEST_CASE("blocking error of white noise matches sigma / sqrt n") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<double> x(1 << 16);
  for (auto& v : x) v = g(rng);
  const double expected = 1.0 / std::sqrt(double(x.size()));
  CHECK(blocking_error(x) == doctest::Approx(expected).epsilon(0.25));
}

TEST_CASE("pair distribution integrates to one") {
  const auto h = free_hamiltonian(PotentialKind::FourDot, 10.0, 4.0);
  auto opt = small_run(5000);
  opt.bins = 32;
  const auto est = metropolis_run(exact_trial(), h, opt, 1);
  const auto pd = pair_distribution(est);
  REQUIRE(pd.x.size() == 32);
  const double dx = pd.x[1] - pd.x[0];
  double total = 0.0;
  for (double d : pd.density) total += d * dx * dx;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("optimizer: non-interacting limit needs no Jastrow") {
  // wells close enough that the Jastrow factor visibly distorts the product state
  const auto h = free_hamiltonian(PotentialKind::FourDot, 10.0, 1.5);
  OptimizeOptions o;
  o.samples_per_eval = 4000;
  o.max_passes = 4;
  TrialParams start;
  start.spins = SpinPattern::Polarized;
  start.jastrow_b = 1.0;
  const auto r = optimize_params(h, 3, start, o);
  CHECK(r.params.jastrow_b < 0.05);
  CHECK(r.params.spin_leak < 0.01);
  CHECK(r.objective < r.objective_at_start);
  REQUIRE(r.constraint_residual.size() >= 2);
  for (std::size_t k = 1; k < r.constraint_residual.size(); ++k)
    CHECK(r.constraint_residual[k] <= r.constraint_residual[k - 1] + 1e-12);
}
