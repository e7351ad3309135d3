#pragma once

// Continuous-spin variational Monte Carlo for N electrons in N wells.
//
// Each discrete spin is traded for an angle s in [0, 2pi): a spinor (u, d)
// becomes the scalar u e^{is} + d e^{-is}, and the Pauli matrices act as
//
//   sigma_x = cos 2s - sin 2s d/ds,  sigma_y = sin 2s + cos 2s d/ds,
//   sigma_z = -i d/ds.
//
// The trial state is a Slater determinant of Gaussian well orbitals times
// such spin functions, times a pair Jastrow factor.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "soqdot/dqd_solver.hpp"

namespace soqdot::vmc {

using Complex = std::complex<double>;

struct WalkerConfig {
  std::vector<double> x;
  std::vector<double> s;  // wrapped into [0, 2pi)

  WalkerConfig() = default;
  WalkerConfig(std::vector<double> positions, std::vector<double> angles);
  [[nodiscard]] std::size_t size() const { return x.size(); }
  void wrap();
};

/// Spinor rotation exp(-i theta(x) sigma_y) applied to every orbital's spin.
/// All three callables must be supplied.
struct SpinorPhase {
  std::function<double(double)> theta;
  std::function<double(double)> dtheta;
  std::function<double(double)> d2theta;
};

/// theta(x) = alpha x. Removes a homogeneous Rashba term exactly for a
/// single particle.
SpinorPhase homogeneous_rashba_phase(double alpha);

enum class SpinPattern { Alternating, Polarized };

struct TrialParams {
  double jastrow_b = 0.5;        // J = b sum_{i<j} d^2 / (1 + d^2), d = x_i - x_j
  double lagrange_lambda = 1.0;  // multiplier on <sigma_z^2> - 1
  double spin_leak = 0.0;        // weight of the e^{+-3is} harmonics in each spinor
  SpinPattern spins = SpinPattern::Alternating;
  std::optional<SpinorPhase> phase;

  void validate() const;
};

struct Hamiltonian {
  dqd::PotentialSpec potential{dqd::PotentialKind::FourDot, 1.0, 0.8, 0.0};
  double alpha = 0.4;
  double b_field = 0.0;
  dqd::CoulombParams coulomb;  // strength 0 switches it off

  void validate() const;
  [[nodiscard]] std::size_t n_particles() const;
};

struct LocalValues {
  double energy = 0.0;
  double energy_imag = 0.0;
  double sigma_z2 = 0.0;  // mean over particles
  double s2 = 0.0;        // mean single-particle s^2
  bool node = false;      // |psi| below 1e-12 of its natural scale; other fields unset
};

class TrialWavefunction {
 public:
  TrialWavefunction(TrialParams tp, const dqd::PotentialSpec& pot);

  [[nodiscard]] std::size_t n_particles() const { return centers_.size(); }
  [[nodiscard]] const std::vector<double>& centers() const { return centers_; }
  [[nodiscard]] const TrialParams& params() const { return tp_; }

  /// Zero at a singular determinant.
  [[nodiscard]] Complex amplitude(const WalkerConfig& cfg) const;
  [[nodiscard]] LocalValues local(const WalkerConfig& cfg, const Hamiltonian& h) const;

 private:
  TrialParams tp_;
  double beta_ = 1.0;
  std::vector<double> centers_;
  std::vector<std::pair<double, double>> spinors_;  // (u, d) at theta = 0
};

Complex trial_amplitude(const WalkerConfig& cfg, const TrialParams& tp, const dqd::PotentialSpec& pot);
double local_energy(const WalkerConfig& cfg, const TrialParams& tp, const Hamiltonian& h);

struct PairHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t bins = 128;
  std::vector<double> mass;  // bins x bins, row = x1 bin; sums to 1 over in-range samples
  double out_of_range = 0.0;  // fraction of samples outside the box

  [[nodiscard]] double width() const { return (hi - lo) / static_cast<double>(bins); }
  [[nodiscard]] double center(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * width(); }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return mass[i * bins + j]; }
};

struct VmcOptions {
  std::size_t n_samples = 100000;  // measured sweeps, all walkers together
  std::size_t n_walkers = 4;
  double burn_in_fraction = 0.1;
  double position_step = 0.0;  // initial; 0 means 1/sqrt(beta)
  double spin_step = 0.7853981633974483;  // full width of the uniform angle shift
  std::size_t bins = 128;
  double box_half_width = 5.0;      // histogram box: minima -+ this / sqrt(beta)
  double localization_window = 1.5;  // in units of 1/sqrt(beta)
  bool record_trace = false;

  void validate() const;
};

struct VmcEstimate {
  double energy_mean = 0.0;
  double energy_err = 0.0;
  double energy_variance = 0.0;
  double energy_imag_mean = 0.0;
  double constraint_mean = 0.0;  // <sigma_z^2>
  double constraint_err = 0.0;
  double s2_mean = 0.0;
  double lagrangian = 0.0;  // energy + lambda (<sigma_z^2> - 1)
  double acceptance_position = 0.0;
  double acceptance_spin = 0.0;
  bool acceptance_flag = false;  // position acceptance outside [0.2, 0.8]
  std::size_t node_rejections = 0;
  PairHistogram pair;
  double localization_fraction = 0.0;
  double centroid_mean = 0.0;  // mean position over all particles
  double centroid_err = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> trace_x1;  // particle-1 positions when record_trace
};

/// Blocking (Flyvbjerg-Petersen) standard error: the largest error over
/// blocking levels that still have at least 32 blocks.
double blocking_error(const std::vector<double>& series);

VmcEstimate metropolis_run(const TrialParams& tp, const Hamiltonian& h, const VmcOptions& opt,
                           std::uint64_t seed);

/// Normalized density rho(x1, x2) on the histogram grid, integrating to 1.
struct PairDistribution {
  std::vector<double> x;  // bin centers
  std::vector<double> density;  // row-major, row = x1
};
PairDistribution pair_distribution(const VmcEstimate& est);

struct OptimizeOptions {
  std::size_t samples_per_eval = 20000;
  std::size_t max_passes = 20;
  double rel_tol = 1e-3;
  std::size_t grid_points = 9;
  double jastrow_max = 4.0;
  double spin_leak_max = 0.5;
  double golden_tol = 1e-2;  // relative to the bracket
};

struct OptimizeResult {
  TrialParams params;
  double objective = 0.0;
  double objective_at_start = 0.0;
  std::vector<double> objective_history;  // per pass
  std::vector<double> constraint_residual;  // |<sigma_z^2> - 1| per pass
  std::size_t passes = 0;
  bool converged = false;
};

/// Coordinate descent on (jastrow_b, spin_leak) for the Lagrangian, with the
/// multiplier doubled after every pass. Every evaluation reuses `seed`.
OptimizeResult optimize_params(const Hamiltonian& h, std::uint64_t seed, TrialParams start = {},
                               const OptimizeOptions& opt = {});

}  // namespace soqdot::vmc
