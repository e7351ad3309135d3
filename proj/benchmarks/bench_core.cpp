#include <random>

#include <benchmark/benchmark.h>

#include "soqdot/dqd_solver.hpp"
#include "soqdot/linalg.hpp"
#include "soqdot/vmc.hpp"

namespace {

using soqdot::linalg::ComplexMatrix;

ComplexMatrix random_hermitian(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = {g(rng), g(rng)};
  return ComplexMatrix(Eigen::MatrixXcd(0.5 * (a + a.adjoint())));
}

void BM_HermitianEig(benchmark::State& state) {
  const auto a = random_hermitian(static_cast<std::size_t>(state.range(0)), 11);
  for (auto _ : state) benchmark::DoNotOptimize(soqdot::linalg::hermitian_eig(a));
}
BENCHMARK(BM_HermitianEig)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SingleParticle(benchmark::State& state) {
  soqdot::dqd::PotentialSpec pot;
  soqdot::dqd::SingleParticleOptions opt;
  opt.refinement_probe = false;
  const auto grid = soqdot::dqd::default_grid(pot);
  for (auto _ : state)
    benchmark::DoNotOptimize(soqdot::dqd::solve_single_particle(grid, pot, 40, opt));
}
BENCHMARK(BM_SingleParticle)->Unit(benchmark::kMillisecond);

// Orbital count sets the CI size: about n^2 pairs and n^4 Coulomb integrals.
void BM_CiDiagonalize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  soqdot::dqd::PotentialSpec pot;
  soqdot::dqd::SingleParticleOptions sp;
  sp.refinement_probe = false;
  const auto orbitals = soqdot::dqd::solve_single_particle(soqdot::dqd::default_grid(pot), pot, n, sp);
  soqdot::dqd::CiOptions opt;
  opt.n_orbitals = n;
  opt.convergence_probe = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(soqdot::dqd::ci_diagonalize(orbitals, soqdot::dqd::CoulombParams{}, opt));
}
BENCHMARK(BM_CiDiagonalize)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Metropolis(benchmark::State& state) {
  soqdot::vmc::Hamiltonian h;
  soqdot::vmc::TrialParams tp;
  soqdot::vmc::VmcOptions opt;
  opt.n_samples = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(soqdot::vmc::metropolis_run(tp, h, opt, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Metropolis)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
