#pragma once

// Closed-form two-electron double-dot model with perturbative Rashba
// coupling. States live in a 12-dim truncated product space:
//
//   orbital {psi^A_01, psi^S_11, psi^S_00} (x) spin_1 (x) spin_2
//
// with spin index 0 = up, 1 = down. The measurement labels used by the
// projectors are |1> = up and |0> = down.
//
// w = 5 a^2 / 16 b shows up everywhere; Z = 1 + w.

#include <string>
#include <vector>

#include "soqdot/quantum_state.hpp"

namespace soqdot::analytic {

using qstate::ComplexMatrix;
using qstate::DensityMatrix;
using qstate::StateVector;
using qstate::SubsystemShape;

struct ModelParams {
  double alpha = 0.4;
  double beta = 1.0;
  double e_field = 0.0;
  double ell = 0.8;
  double b_field = 0.0;  // accepted, ignored by the closed forms

  /// Throws InvalidArgument unless beta > 0, alpha >= 0, alpha/sqrt(beta) < 1.
  void validate() const;

  [[nodiscard]] double w() const { return 5.0 * alpha * alpha / (16.0 * beta); }
  [[nodiscard]] double Z() const { return 1.0 + w(); }
};

namespace basis {
inline constexpr std::size_t kPsiA01 = 0;
inline constexpr std::size_t kPsiS11 = 1;
inline constexpr std::size_t kPsiS00 = 2;
inline constexpr std::size_t kUp = 0;
inline constexpr std::size_t kDown = 1;
// factors of the 12-dim shape
inline constexpr std::size_t kOrbital = 0;
inline constexpr std::size_t kSpin1 = 1;
inline constexpr std::size_t kSpin2 = 2;
}  // namespace basis

SubsystemShape model_shape();  // {3, 2, 2}
SubsystemShape spin_shape();   // {2, 2}

struct ModelStates {
  StateVector phi_M;
  DensityMatrix rho_AB;  // |phi_M><phi_M|, shape {3,2,2}
  DensityMatrix rho_S;   // spin RDM, shape {2,2}
  DensityMatrix rho_or;  // orbital RDM, 3x3
  double Z = 1.0;
};

ModelStates build_states(const ModelParams& p);

/// Pi_k on one spin: k=0 projects on down, k=1 on up.
ComplexMatrix spin_projector(int outcome);
std::vector<ComplexMatrix> spin_projectors();

struct MeasurementOutcomes {
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  DensityMatrix sigma1;   // spin, outcome 0
  DensityMatrix sigma2;   // spin, outcome 1
  DensityMatrix varrho1;  // orbital, outcome 0
  DensityMatrix varrho2;  // orbital, outcome 1
};

/// The post-measurement matrices as closed forms (not by projecting phi_M).
MeasurementOutcomes measurement_outcomes(const ModelParams& p);

struct ClosedFormReport {
  double gamma0 = 0.0;
  double gamma1 = 0.0;

  // Printed forms; the pre/post entropies assume Z ~ 1.
  double S_spin_pre = 0.0;
  double S_orb_pre = 0.0;
  double S_spin_post = 0.0;
  double S_orb_post = 0.0;
  double fidelity = 0.0;
  double fidelity_asymptotic = 0.0;
  double concurrence_pre = 0.0;
  double concurrence_post = 0.0;
  double conditional_entropy_post = 0.0;
  double discord_difference = 0.0;
  double witness_prob = 0.0;  // G_B(1) = P_B(1)
  double witness = 0.0;
  double S_AB_pure = 0.0;
  double S_AB_mixed = 0.0;
  double S_RB = 0.0;
  double S_QB = 0.0;
  double S_rhoA = 0.0;
  double S_rhoA_S = 0.0;

  // Same quantities without the Z ~ 1 shortcut: full entropies of the
  // density matrices as written, every eigenvalue kept.
  double S_spin_pre_exact = 0.0;
  double S_orb_pre_exact = 0.0;
  double S_spin_post_exact = 0.0;
  double S_orb_post_exact = 0.0;
  double concurrence_pre_exact = 0.0;

  // The printed S(Q|B) drops a ln 2 from the x-dephased spectrum.
  double S_QB_corrected = 0.0;

  double Z = 1.0;
  std::vector<std::string> z_approx_fields;
};

ClosedFormReport closed_form_report(const ModelParams& p);

/// Flip channel {|0><1|, |1><0|} on spin A, blind z measurement on A, probe
/// Pi_1 on B. Acts on the two-qubit spin space.
qstate::WitnessProtocol noninvasive_witness_protocol();

/// Columns: sigma_z eigenbasis {|1>, |0>} and sigma_x eigenbasis
/// (|0> +- |1>)/sqrt 2, in the (up, down) index order.
ComplexMatrix sigma_z_basis();
ComplexMatrix sigma_x_basis();

}  // namespace soqdot::analytic
