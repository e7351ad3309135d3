#pragma once

// States, measurement channels and information measures. Everything here is
// computed from matrices alone; nothing refers to the closed forms in
// analytic_model.hpp, so the two can cross-check each other.
//
// Logarithms are natural throughout (entropies in nats).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "soqdot/linalg.hpp"

namespace soqdot::qstate {

using linalg::Complex;
using linalg::ComplexMatrix;

inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPositivityTol = 1e-9;

/// Tensor-factor dimensions of a state space, first factor slowest.
struct SubsystemShape {
  std::vector<std::size_t> dims;

  [[nodiscard]] std::size_t total() const;
  [[nodiscard]] std::size_t factors() const { return dims.size(); }
  /// Factor indices not in `subset`, ascending.
  [[nodiscard]] std::vector<std::size_t> complement(std::span<const std::size_t> subset) const;
  /// Shape restricted to the listed factors.
  [[nodiscard]] SubsystemShape restrict(std::span<const std::size_t> subset) const;

  friend bool operator==(const SubsystemShape&, const SubsystemShape&) = default;
};

class StateVector {
 public:
  StateVector(Eigen::VectorXcd amplitudes, SubsystemShape shape);

  [[nodiscard]] const Eigen::VectorXcd& amplitudes() const { return amp_; }
  [[nodiscard]] const SubsystemShape& shape() const { return shape_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }

 private:
  Eigen::VectorXcd amp_;
  SubsystemShape shape_;
};

/// Hermitian, unit-trace, positive semidefinite (to kPositivityTol).
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix matrix, SubsystemShape shape);
  /// Single-factor convenience.
  explicit DensityMatrix(ComplexMatrix matrix);

  [[nodiscard]] const ComplexMatrix& matrix() const { return m_; }
  [[nodiscard]] const SubsystemShape& shape() const { return shape_; }
  [[nodiscard]] std::size_t dim() const { return m_.dim(); }

  /// Reduced state on the listed factors.
  [[nodiscard]] DensityMatrix reduce(std::span<const std::size_t> keep) const;
  [[nodiscard]] DensityMatrix reduce(std::initializer_list<std::size_t> keep) const {
    return reduce(std::span<const std::size_t>(keep.begin(), keep.size()));
  }

  /// Rescale a positive operator to unit trace and validate.
  static DensityMatrix normalized(const ComplexMatrix& m, SubsystemShape shape);

 private:
  ComplexMatrix m_;
  SubsystemShape shape_;
};

struct MeasurementRecord {
  std::size_t outcome = 0;
  double probability = 0.0;
  std::optional<DensityMatrix> post_state;  // empty when probability is zero
};

/// Lift an operator on factor `subsystem` to the full space (I ⊗ op ⊗ I).
ComplexMatrix embed(const ComplexMatrix& op, const SubsystemShape& shape, std::size_t subsystem);

DensityMatrix pure_density(const StateVector& psi);

double von_neumann_entropy(const DensityMatrix& rho);

/// S(AB) - S(B), where A is the set of factors `a_factors` and B is the rest.
double conditional_entropy(const DensityMatrix& rho_ab, std::span<const std::size_t> a_factors);
double conditional_entropy(const DensityMatrix& rho_ab, std::initializer_list<std::size_t> a_factors);

/// Squared Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Wootters concurrence of a two-qubit state.
double concurrence2q(const DensityMatrix& rho);

/// Born-rule outcomes of a complete orthogonal projector set on one factor.
std::vector<MeasurementRecord> projective_measure(const DensityMatrix& rho,
                                                  std::span<const ComplexMatrix> projectors,
                                                  std::size_t subsystem);

/// Unrecorded measurement: sum_k P_k rho P_k.
DensityMatrix dephase(const DensityMatrix& rho, std::span<const ComplexMatrix> projectors,
                      std::size_t subsystem);

/// sum_i L_i rho L_i^dagger; operators act on the full space.
DensityMatrix kraus_apply(const DensityMatrix& rho, std::span<const ComplexMatrix> operators);

/// Leggett-Garg style witness |tr{probe (N(rho) - N(Xi))}|, Xi the blind-measured
/// state. Channel operators either act on the measured factor (dimension
/// dims[measured]) or on the full space.
struct WitnessProtocol {
  std::vector<ComplexMatrix> channel;
  std::vector<ComplexMatrix> blind;
  ComplexMatrix probe;
  std::size_t measured = 0;
  std::size_t probed = 1;
};

struct WitnessResult {
  double witness = 0.0;
  double direct_probability = 0.0;  // tr{probe N(rho)}
  double blind_probability = 0.0;   // tr{probe N(Xi)}
};

WitnessResult quantum_witness(const DensityMatrix& rho, const WitnessProtocol& protocol);

enum class Side { A, B };

struct DiscordOptions {
  std::size_t grid_theta = 64;
  std::size_t grid_phi = 64;
  double tolerance = 1e-8;
  std::size_t max_refine_iterations = 2000;
};

struct DiscordResult {
  double discord = 0.0;
  double theta = 0.0;  // optimal Bloch angles of the measurement axis
  double phi = 0.0;
  double classical_conditional = 0.0;  // min_j sum p_j S(rho_{other|j})
};

/// Ollivier-Zurek discord of a two-qubit state, measuring `measured`:
/// D = S(measured) - S(AB) + min_{rank-1 projective} sum_j p_j S(rho_{other|j}).
DiscordResult quantum_discord(const DensityMatrix& rho_ab, Side measured,
                              const DiscordOptions& opt = {});

/// Columns of `x` and `y` are orthonormal bases on factor `a_factor`.
struct UncertaintyRecord {
  double S_RB = 0.0;  // S(R|B), X-measured
  double S_QB = 0.0;  // S(Q|B), Y-measured
  double c = 0.0;     // max overlap |<x_m|y_n>|^2
  double S_AB = 0.0;  // S(A|B) of the input
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

UncertaintyRecord berta_uncertainty(const DensityMatrix& rho_ab, const ComplexMatrix& x_basis,
                                    const ComplexMatrix& y_basis, std::size_t a_factor = 0);

/// Rank-1 projectors onto the columns of a basis matrix.
std::vector<ComplexMatrix> basis_projectors(const ComplexMatrix& basis);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace soqdot::qstate
