#pragma once

// Numerical double-dot model: finite-difference orbitals, two-electron CI
// with a softened 1D Coulomb kernel, Rashba coupling in the CI eigenbasis,
// reduced density matrices and (alpha, E0) entropy sweeps.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "soqdot/quantum_state.hpp"

namespace soqdot::dqd {

/// Uniform grid of interior nodes x_i = x_min + (i+1) h, h = (x_max-x_min)/(n+1).
/// The wavefunction is pinned to zero at x_min and x_max, so the trapezoid rule
/// reduces to h * sum over nodes.
struct Grid1D {
  double x_min = -12.0;
  double x_max = 12.0;
  std::size_t n_points = 1024;

  void validate() const;
  [[nodiscard]] double spacing() const { return (x_max - x_min) / static_cast<double>(n_points + 1); }
  [[nodiscard]] double x(std::size_t i) const { return x_min + static_cast<double>(i + 1) * spacing(); }
};

enum class PotentialKind { SingleDot, DoubleDot, FourDot };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::DoubleDot;
  double beta = 1.0;
  double ell = 0.8;
  double e_field = 0.0;

  void validate() const;
  /// Parabola centers: {0}, {-ell/2, ell/2} or {-3ell/2, -ell/2, ell/2, 3ell/2}.
  [[nodiscard]] std::vector<double> centers() const;
  /// Minima of each branch of V(x) + E0 x (centers shifted by -E0/beta^2).
  [[nodiscard]] std::vector<double> minima() const;
  /// (beta^2/2) min_k (x - c_k)^2, without the field.
  [[nodiscard]] double confinement(double x) const;
  /// V(x) + E0 x.
  [[nodiscard]] double operator()(double x) const { return confinement(x) + e_field * x; }
};

/// Default box [-12, 12] with 1024 nodes, widened at the same spacing when
/// some minimum +- 5/sqrt(beta) falls outside it.
Grid1D default_grid(const PotentialSpec& pot, Grid1D base = {});

struct OrbitalSet {
  Grid1D grid;
  std::vector<double> energies;  // ascending
  Eigen::MatrixXd orbitals;      // n_points x n_orbitals, h * sum phi_i phi_j = delta_ij
  double refinement_change = 0.0;  // max relative change of the lowest levels at h/2
  bool refinement_warning = false;
};

struct SingleParticleOptions {
  bool refinement_probe = true;
  double refinement_tol = 1e-4;
  std::size_t probe_levels = 10;
};

OrbitalSet solve_single_particle(const Grid1D& grid, const PotentialSpec& pot,
                                 std::size_t n_orbitals = 80,
                                 const SingleParticleOptions& opt = {});

struct CoulombParams {
  double strength = 1.0;
  double softening = 0.1;
  void validate() const;
};

/// Two-electron configuration |i j b>: b=+1 symmetric (i <= j), b=-1
/// antisymmetric (i < j).
struct PairState {
  std::size_t i = 0;
  std::size_t j = 0;
  int b = +1;
};

struct CiBasis {
  std::vector<PairState> symmetric;
  std::vector<PairState> antisymmetric;
  std::size_t n_orbitals = 0;  // orbitals referenced by the pairs
};

/// All pairs drawn from the first `n_orbitals` orbitals whose energy sum lies
/// within `window` of the lowest pair energy.
CiBasis make_ci_basis(const OrbitalSet& orbitals, std::size_t n_orbitals, double window);

/// Coulomb integrals <ij|kl> = G(ik, jl) over orbital-pair densities.
class CoulombIntegrals {
 public:
  CoulombIntegrals(const OrbitalSet& orbitals, std::size_t n_orbitals, const CoulombParams& cp);
  [[nodiscard]] double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;
  [[nodiscard]] std::size_t n_orbitals() const { return n_; }

 private:
  [[nodiscard]] std::size_t pair(std::size_t a, std::size_t c) const;
  std::size_t n_ = 0;
  Eigen::MatrixXd g_;
};

/// Coulomb matrix on one symmetry sector: 2 n_ij n_kl (<ij|kl> + b <ij|lk>).
Eigen::MatrixXd coulomb_block(const std::vector<PairState>& pairs, const CoulombIntegrals& g);

/// Coulomb matrix on the whole basis, symmetric sector first. Blocks with
/// different b are exactly zero.
qstate::ComplexMatrix coulomb_matrix_elements(const OrbitalSet& orbitals, const CiBasis& basis,
                                              const CoulombParams& cp);

struct CiOptions {
  std::size_t n_orbitals = 80;
  double pair_window = 30.0;  // dimensionless energy above the lowest pair
  std::size_t n_keep = 20;    // CI states passed on to the spin-orbit block
  bool convergence_probe = true;
  std::size_t probe_orbitals = 60;
  double convergence_tol = 1e-4;
};

struct CiState {
  double energy = 0.0;
  int b = +1;
  /// Psi(x1,x2) = sum_ab C_ab phi_a(x1) phi_b(x2); C symmetric or antisymmetric.
  Eigen::MatrixXd coefficients;
};

struct CiResult {
  std::vector<CiState> states;  // lowest n_keep, ascending
  std::size_t n_orbitals = 0;   // orbital pool size
  std::size_t dim_symmetric = 0;
  std::size_t dim_antisymmetric = 0;
  Eigen::MatrixXd d1;  // <Psi_m| d/dx1 |Psi_n>
  Eigen::MatrixXd d2;  // <Psi_m| d/dx2 |Psi_n>
  double convergence_change = 0.0;
  bool converged = true;
  bool probe_run = false;
  std::size_t truncated_states = 0;  // CI states left out of n_keep
};

CiResult ci_diagonalize(const OrbitalSet& orbitals, const CoulombParams& cp,
                        const CiOptions& opt = {});

/// Antisymmetric two-particle spin-orbital sector: symmetric orbital states
/// carry the singlet, antisymmetric ones the three triplets.
enum class SpinLabel { Singlet, TPlus, TZero, TMinus };

struct SoBasisState {
  std::size_t ci_index = 0;
  SpinLabel spin = SpinLabel::Singlet;
};

struct SoResult {
  std::vector<SoBasisState> basis;
  std::vector<double> energies;  // ascending
  Eigen::MatrixXd eigenvectors;  // real columns over `basis`
  double hermiticity_defect = 0.0;
};

SoResult add_spin_orbit(const CiResult& ci, double alpha, double b_field = 0.0);

/// Spin vector of a label in the (uu, ud, du, dd) order.
Eigen::Vector4d spin_vector(SpinLabel s);

/// Pure state over (CI state, spin 1, spin 2), shape {n_ci, 2, 2}.
qstate::StateVector expand_state(const SoResult& so, std::size_t n_ci,
                                 const Eigen::VectorXd& coefficients);

struct Rdms {
  qstate::DensityMatrix spin_rdm;     // shape {2,2}
  qstate::DensityMatrix orbital_rdm;  // in the CI eigenbasis
};

Rdms numeric_rdms(const qstate::StateVector& state);

struct TargetSelection {
  Eigen::VectorXd coefficients;  // normalized, over SoResult::basis
  double energy = 0.0;
  double overlap = 0.0;  // weakest step weight along the continuation path
  bool ambiguous = false;  // overlap < 0.5
};

/// CI index of the triplet closest to antisym(phi_0 phi_1).
std::size_t reference_triplet(const CiResult& ci);

/// That triplet times T+, as a vector over the SO basis.
Eigen::VectorXd reference_vector(const CiResult& ci, const SoResult& so);

/// Projects `previous` onto the cluster of (near-)degenerate SO eigenstates
/// carrying most of its weight; ties go to the lower energy.
TargetSelection select_target(const SoResult& so, const Eigen::VectorXd& previous,
                              double degeneracy_tol = 1e-3);

/// Adiabatic continuation from alpha = 0 through the sorted `alphas`, in
/// steps no larger than `max_step`. Returns one selection per alpha.
std::vector<TargetSelection> track_target(const CiResult& ci, std::vector<double> alphas,
                                          double b_field = 0.0, double degeneracy_tol = 1e-3,
                                          double max_step = 0.02);

enum class PostEntropyMode { OutcomeOne, Averaged };

struct SweepSpec {
  std::vector<double> alphas;
  std::vector<double> e_fields;
  double beta = 1.0;
  double ell = 0.8;
  double b_field = 0.0;
  CoulombParams coulomb;
  CiOptions ci;
  Grid1D grid;
  SingleParticleOptions single_particle;
  PostEntropyMode post_mode = PostEntropyMode::OutcomeOne;
  double degeneracy_tol = 1e-3;
  double continuation_step = 0.02;
};

struct SweepRow {
  double alpha = 0.0;
  double e_field = 0.0;
  double ell = 0.0;
  double coulomb = 0.0;
  double S_pre = 0.0;
  double S_post = 0.0;
  double delta_S = 0.0;
  bool overlap_flag = false;
  double overlap = 0.0;
};

/// Rows sorted by alpha, then E0.
std::vector<SweepRow> entropy_sweep(const SweepSpec& spec);

/// Orbital entropies before and after Pi_1 on spin 1 for one target state.
struct EntropyPair {
  double S_pre = 0.0;
  double S_post = 0.0;
};
EntropyPair measured_entropies(const qstate::StateVector& state, PostEntropyMode mode);

/// GaAs reporting units: beta = 1 <-> 11.4 meV, d0 = 10 nm, E0 = 1 <-> 1.1 V/um.
namespace gaas {
inline constexpr double kEnergyMeV = 11.4;
inline constexpr double kLengthNm = 10.0;
inline constexpr double kFieldVPerUm = 1.1;
inline double energy_meV(double e) { return kEnergyMeV * e; }
inline double length_nm(double x) { return kLengthNm * x; }
inline double field_V_per_um(double e0) { return kFieldVPerUm * e0; }
}  // namespace gaas

}  // namespace soqdot::dqd
