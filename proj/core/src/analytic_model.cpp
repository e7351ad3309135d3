#include "soqdot/analytic_model.hpp"

#include <cmath>
#include <initializer_list>
#include <sstream>

#include "soqdot/error.hpp"

namespace soqdot::analytic {

using linalg::Complex;
using linalg::Index;

namespace {

double xlnx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double shannon(std::initializer_list<double> ps) {
  double s = 0.0;
  for (double p : ps) s -= xlnx(p);
  return s;
}

Index spin_index(std::size_t s1, std::size_t s2) { return static_cast<Index>(2 * s1 + s2); }

Index full_index(std::size_t orb, std::size_t s1, std::size_t s2) {
  return static_cast<Index>(4 * orb + 2 * s1 + s2);
}

// (1/4)|11><11| + |00><00| - (1/2)(|11><00| + h.c.) on the orbital triple,
// i.e. |v><v| with v = psi^S_11 / 2 - psi^S_00.
Eigen::MatrixXcd symmetric_pair_block() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  const auto s11 = static_cast<Index>(basis::kPsiS11);
  const auto s00 = static_cast<Index>(basis::kPsiS00);
  m(s11, s11) = 0.25;
  m(s00, s00) = 1.0;
  m(s11, s00) = -0.5;
  m(s00, s11) = -0.5;
  return m;
}

}  // namespace

void ModelParams::validate() const {
  std::ostringstream os;
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(e_field) ||
      !std::isfinite(ell) || !std::isfinite(b_field)) {
    throw InvalidArgument("ModelParams: non-finite parameter");
  }
  if (!(beta > 0.0)) {
    os << "ModelParams: beta must be > 0 (got " << beta << ")";
    throw InvalidArgument(os.str());
  }
  if (alpha < 0.0) {
    os << "ModelParams: alpha must be >= 0 (got " << alpha << ")";
    throw InvalidArgument(os.str());
  }
  if (alpha / std::sqrt(beta) >= 1.0) {
    os << "ModelParams: alpha/sqrt(beta) = " << alpha / std::sqrt(beta)
       << " is outside the perturbative range (< 1)";
    throw InvalidArgument(os.str());
  }
}

SubsystemShape model_shape() { return SubsystemShape{{3, 2, 2}}; }
SubsystemShape spin_shape() { return SubsystemShape{{2, 2}}; }

ModelStates build_states(const ModelParams& p) {
  p.validate();
  using namespace basis;
  const double Z = p.Z();
  const double c = p.alpha / (2.0 * std::sqrt(p.beta));
  const double r2 = 1.0 / std::sqrt(2.0);

  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(12);
  amp(full_index(kPsiA01, kUp, kUp)) = 1.0;
  // (c/2) psi^S_11 - c psi^S_00, each times chi_A = (ud - du)/sqrt 2
  for (auto [orb, coef] : {std::pair{kPsiS11, 0.5 * c}, std::pair{kPsiS00, -c}}) {
    amp(full_index(orb, kUp, kDown)) += coef * r2;
    amp(full_index(orb, kDown, kUp)) -= coef * r2;
  }
  amp /= std::sqrt(Z);

  StateVector phi(amp, model_shape());
  DensityMatrix rho_ab = qstate::pure_density(phi);
  DensityMatrix rho_s = rho_ab.reduce({kSpin1, kSpin2});
  DensityMatrix rho_or = rho_ab.reduce({kOrbital});
  return ModelStates{std::move(phi), std::move(rho_ab), std::move(rho_s), std::move(rho_or), Z};
}

ComplexMatrix spin_projector(int outcome) {
  if (outcome == 0) return ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}};
  if (outcome == 1) return ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}};
  throw InvalidArgument("spin_projector: outcome must be 0 or 1");
}

std::vector<ComplexMatrix> spin_projectors() { return {spin_projector(0), spin_projector(1)}; }

MeasurementOutcomes measurement_outcomes(const ModelParams& p) {
  p.validate();
  using namespace basis;
  const double w = p.w();
  const double a2b = p.alpha * p.alpha / p.beta;
  const double g0 = 5.0 * p.alpha * p.alpha / (10.0 * p.alpha * p.alpha + 32.0 * p.beta);

  Eigen::MatrixXcd s1 = Eigen::MatrixXcd::Zero(4, 4);
  s1(spin_index(kDown, kUp), spin_index(kDown, kUp)) = 1.0;

  Eigen::MatrixXcd s2 = Eigen::MatrixXcd::Zero(4, 4);
  s2(spin_index(kUp, kUp), spin_index(kUp, kUp)) = 1.0;
  s2(spin_index(kUp, kDown), spin_index(kUp, kDown)) = 0.5 * w;
  s2 /= 1.0 + 0.5 * w;

  const Eigen::MatrixXcd v = symmetric_pair_block();
  Eigen::MatrixXcd r1 = 0.8 * v;
  Eigen::MatrixXcd r2 = (a2b / 8.0) * v;
  r2(static_cast<Index>(kPsiA01), static_cast<Index>(kPsiA01)) += 1.0;
  r2 /= 1.0 + 0.5 * w;

  return MeasurementOutcomes{g0,
                             1.0 - g0,
                             DensityMatrix(ComplexMatrix(std::move(s1)), spin_shape()),
                             DensityMatrix(ComplexMatrix(std::move(s2)), spin_shape()),
                             DensityMatrix(ComplexMatrix(std::move(r1))),
                             DensityMatrix(ComplexMatrix(std::move(r2)))};
}

ClosedFormReport closed_form_report(const ModelParams& p) {
  p.validate();
  const double a2 = p.alpha * p.alpha;
  const double b = p.beta;
  const double w = p.w();
  const double Z = p.Z();
  const double half_w = 0.5 * w;  // 5 a^2 / 32 b

  ClosedFormReport r;
  r.Z = Z;
  r.gamma0 = 5.0 * a2 / (10.0 * a2 + 32.0 * b);
  r.gamma1 = (5.0 * a2 + 32.0 * b) / (10.0 * a2 + 32.0 * b);

  const double o11 = a2 / (16.0 * b);
  const double o00 = a2 / (4.0 * b);
  r.S_spin_pre = -xlnx(w);
  r.S_orb_pre = -xlnx(o11) - xlnx(o00);
  r.S_spin_post = -r.gamma1 * xlnx(half_w);
  r.S_orb_post = r.S_spin_post;

  r.S_spin_pre_exact = shannon({1.0 / Z, w / Z});
  r.S_orb_pre_exact = shannon({1.0 / Z, o11 / Z, o00 / Z});
  r.S_spin_post_exact = shannon({1.0 / (1.0 + half_w), half_w / (1.0 + half_w)});
  r.S_orb_post_exact = r.S_spin_post_exact;

  r.fidelity = (1.0 + w / std::sqrt(2.0)) / (1.0 + half_w) / (1.0 + w);
  r.fidelity_asymptotic = 1.0 - 5.0 * (3.0 - std::sqrt(2.0)) * a2 / (32.0 * b);

  r.concurrence_pre = w;
  r.concurrence_pre_exact = w / Z;
  r.concurrence_post = 0.0;
  r.conditional_entropy_post = 0.0;

  r.discord_difference = half_w * std::log(4.0);

  r.witness_prob = (1.0 + half_w) / Z;
  r.witness = 0.0;

  const double x = 5.0 * a2 / (32.0 * b * Z);
  const double y = (5.0 * a2 + 32.0 * b) / (32.0 * b * Z);
  const double root = std::sqrt(25.0 * a2 * a2 + 256.0 * b * b);
  const double u = (5.0 * a2 + 16.0 * b + root) / (32.0 * b * Z);
  const double v = (5.0 * a2 + 16.0 * b - root) / (32.0 * b * Z);
  r.S_AB_pure = xlnx(x) + xlnx(y);
  r.S_AB_mixed = -xlnx(1.0 / Z) + xlnx(x) - xlnx(w / Z) + xlnx(y);
  r.S_RB = -xlnx(1.0 / Z) - xlnx(x) + xlnx(y);
  r.S_QB = xlnx(x) + xlnx(y) - xlnx(u) - xlnx(v);
  r.S_QB_corrected = r.S_QB + std::log(2.0);

  const double q = a2 / (32.0 * b);
  const double h = 1.0 / (2.0 * Z);
  r.S_rhoA = -3.0 * xlnx(h * q) - 3.0 * xlnx(h * 4.0 * q) - xlnx(h * (1.0 + q)) -
             xlnx(h * (1.0 + 4.0 * q));
  r.S_rhoA_S = -xlnx((1.0 + half_w) / Z) - xlnx(half_w / Z);

  r.z_approx_fields = {"S_spin_pre", "S_orb_pre", "S_spin_post", "S_orb_post",
                       "concurrence_pre"};
  return r;
}

qstate::WitnessProtocol noninvasive_witness_protocol() {
  qstate::WitnessProtocol proto;
  // |0><1| and |1><0| with |1> = up (index 0), |0> = down (index 1)
  proto.channel = {ComplexMatrix{{0.0, 0.0}, {1.0, 0.0}}, ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}};
  proto.blind = spin_projectors();
  proto.probe = spin_projector(1);
  proto.measured = 0;
  proto.probed = 1;
  return proto;
}

ComplexMatrix sigma_z_basis() { return ComplexMatrix::identity(2); }

ComplexMatrix sigma_x_basis() {
  const double r2 = 1.0 / std::sqrt(2.0);
  return ComplexMatrix{{r2, -r2}, {r2, r2}};
}

}  // namespace soqdot::analytic
