#include "soqdot/quantum_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "soqdot/error.hpp"

namespace soqdot::qstate {

using linalg::Index;

namespace {

constexpr double kZeroProbability = 1e-14;
constexpr double kProjectorTol = 1e-9;

double entropy_from_eigenvalues(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda < -kPositivityTol) {
      std::ostringstream os;
      os << "entropy: eigenvalue " << lambda << " below -" << kPositivityTol;
      throw NumericError(os.str());
    }
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

double clamped_sqrt(double x) {
  if (x < -kPositivityTol) return std::numeric_limits<double>::quiet_NaN();
  return x > 0.0 ? std::sqrt(x) : 0.0;
}

void check_projector_set(std::span<const ComplexMatrix> projectors, std::size_t dim) {
  if (projectors.empty()) throw InvalidArgument("projector set is empty");
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const auto& p = projectors[i];
    if (p.dim() != dim) {
      std::ostringstream os;
      os << "projector " << i << " has dimension " << p.dim() << ", expected " << dim;
      throw InvalidArgument(os.str());
    }
    if (p.hermiticity_defect() > kProjectorTol) {
      throw InvalidArgument("projector is not Hermitian");
    }
    for (std::size_t j = 0; j < projectors.size(); ++j) {
      const Eigen::MatrixXcd prod = p.mat() * projectors[j].mat();
      const Eigen::MatrixXcd expect =
          i == j ? p.mat() : Eigen::MatrixXcd::Zero(prod.rows(), prod.cols());
      if ((prod - expect).cwiseAbs().maxCoeff() > kProjectorTol) {
        throw InvalidArgument("projector set is not orthogonal");
      }
    }
    sum += p.mat();
  }
  const double defect =
      (sum - Eigen::MatrixXcd::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
  if (defect > kProjectorTol) {
    std::ostringstream os;
    os << "projector set is incomplete (max |sum P - I| = " << defect << ")";
    throw InvalidArgument(os.str());
  }
}

void check_factor(const SubsystemShape& shape, std::size_t subsystem) {
  if (subsystem >= shape.factors()) {
    std::ostringstream os;
    os << "subsystem index " << subsystem << " out of range for " << shape.factors()
       << " factors";
    throw InvalidArgument(os.str());
  }
}

// Entropy of a 2x2 Hermitian positive matrix with unit trace.
double qubit_entropy(const Eigen::Matrix2cd& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double r = std::sqrt((a - d) * (a - d) + 4.0 * std::norm(m(0, 1)));
  const std::array<double, 2> ev{0.5 * (a + d + r), 0.5 * (a + d - r)};
  double s = 0.0;
  for (double lambda : ev) {
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// SubsystemShape

std::size_t SubsystemShape::total() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::size_t> SubsystemShape::complement(std::span<const std::size_t> subset) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    if (std::find(subset.begin(), subset.end(), f) == subset.end()) out.push_back(f);
  }
  return out;
}

SubsystemShape SubsystemShape::restrict(std::span<const std::size_t> subset) const {
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  SubsystemShape out;
  for (std::size_t f : sorted) {
    if (f >= dims.size()) throw InvalidArgument("SubsystemShape::restrict: factor out of range");
    out.dims.push_back(dims[f]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// States

StateVector::StateVector(Eigen::VectorXcd amplitudes, SubsystemShape shape)
    : amp_(std::move(amplitudes)), shape_(std::move(shape)) {
  if (shape_.dims.empty()) shape_.dims = {static_cast<std::size_t>(amp_.size())};
  if (shape_.total() != static_cast<std::size_t>(amp_.size())) {
    throw InvalidArgument("StateVector: shape does not match amplitude count");
  }
  if (!amp_.allFinite()) throw InvalidArgument("StateVector: non-finite amplitude");
  const double norm2 = amp_.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "StateVector: not normalized (sum |a|^2 = " << norm2 << ")";
    throw InvalidArgument(os.str());
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, SubsystemShape shape)
    : m_(std::move(matrix)), shape_(std::move(shape)) {
  if (shape_.dims.empty()) shape_.dims = {m_.dim()};
  if (shape_.total() != m_.dim()) {
    std::ostringstream os;
    os << "DensityMatrix: shape product " << shape_.total() << " does not match dimension "
       << m_.dim();
    throw InvalidArgument(os.str());
  }
  const double defect = m_.hermiticity_defect();
  if (defect > linalg::kHermitianTol) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian (defect " << defect << ")";
    throw InvalidArgument(os.str());
  }
  m_ = ComplexMatrix(Eigen::MatrixXcd(0.5 * (m_.mat() + m_.mat().adjoint())));
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " differs from 1";
    throw InvalidArgument(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_.mat(), Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev < -kPositivityTol) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << min_ev;
    throw InvalidArgument(os.str());
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix)
    : DensityMatrix(std::move(matrix), SubsystemShape{}) {}

DensityMatrix DensityMatrix::reduce(std::span<const std::size_t> keep) const {
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  ComplexMatrix reduced = linalg::partial_trace(m_, shape_.dims, sorted);
  return DensityMatrix(std::move(reduced), shape_.restrict(sorted));
}

DensityMatrix DensityMatrix::normalized(const ComplexMatrix& m, SubsystemShape shape) {
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw InvalidArgument("DensityMatrix::normalized: non-positive trace");
  return DensityMatrix(Complex(1.0 / tr) * m, std::move(shape));
}

// ---------------------------------------------------------------------------
// Operations

ComplexMatrix embed(const ComplexMatrix& op, const SubsystemShape& shape, std::size_t subsystem) {
  check_factor(shape, subsystem);
  if (op.dim() != shape.dims[subsystem]) {
    std::ostringstream os;
    os << "embed: operator dimension " << op.dim() << " does not match factor dimension "
       << shape.dims[subsystem];
    throw InvalidArgument(os.str());
  }
  std::size_t before = 1, after = 1;
  for (std::size_t f = 0; f < subsystem; ++f) before *= shape.dims[f];
  for (std::size_t f = subsystem + 1; f < shape.factors(); ++f) after *= shape.dims[f];
  return linalg::kron(linalg::kron(ComplexMatrix::identity(before), op),
                      ComplexMatrix::identity(after));
}

DensityMatrix pure_density(const StateVector& psi) {
  return DensityMatrix(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()), psi.shape());
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix().mat(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return entropy_from_eigenvalues(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

double conditional_entropy(const DensityMatrix& rho_ab, std::span<const std::size_t> a_factors) {
  const auto& shape = rho_ab.shape();
  if (a_factors.empty()) throw InvalidArgument("conditional_entropy: A block is empty");
  for (std::size_t f : a_factors) check_factor(shape, f);
  const auto b_factors = shape.complement(a_factors);
  if (b_factors.empty()) throw InvalidArgument("conditional_entropy: B block is empty");
  return von_neumann_entropy(rho_ab) - von_neumann_entropy(rho_ab.reduce(b_factors));
}

double conditional_entropy(const DensityMatrix& rho_ab,
                           std::initializer_list<std::size_t> a_factors) {
  return conditional_entropy(rho_ab, std::span<const std::size_t>(a_factors.begin(), a_factors.size()));
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    std::ostringstream os;
    os << "uhlmann_fidelity: dimension mismatch (" << rho.dim() << " vs " << sigma.dim() << ")";
    throw InvalidArgument(os.str());
  }
  const ComplexMatrix sqrt_rho = linalg::matrix_function(rho.matrix(), clamped_sqrt);
  const ComplexMatrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  const ComplexMatrix hermitian_inner(Eigen::MatrixXcd(0.5 * (inner.mat() + inner.mat().adjoint())));
  const ComplexMatrix root = linalg::matrix_function(hermitian_inner, clamped_sqrt);
  const double t = root.trace().real();
  return t * t;
}

double concurrence2q(const DensityMatrix& rho) {
  if (rho.dim() != 4) {
    std::ostringstream os;
    os << "concurrence2q: expected a two-qubit state, got dimension " << rho.dim();
    throw InvalidArgument(os.str());
  }
  const ComplexMatrix yy = linalg::kron(pauli::y(), pauli::y());
  const ComplexMatrix tilde = yy * rho.matrix().conjugate() * yy;
  // R = rho tilde has the same spectrum as sqrt(rho) tilde sqrt(rho).
  const ComplexMatrix sqrt_rho = linalg::matrix_function(rho.matrix(), clamped_sqrt);
  const ComplexMatrix r = sqrt_rho * tilde * sqrt_rho;
  const ComplexMatrix rh(Eigen::MatrixXcd(0.5 * (r.mat() + r.mat().adjoint())));
  auto ev = linalg::hermitian_eig(rh).eigenvalues;
  std::array<double, 4> roots{};
  for (std::size_t i = 0; i < 4; ++i) {
    double v = ev[i];
    if (v < 0.0) {
      if (v < -1e-10) {
        std::ostringstream os;
        os << "concurrence2q: eigenvalue " << v << " of rho*tilde(rho) below -1e-10";
        throw NumericError(os.str());
      }
      v = 0.0;
    }
    roots[i] = std::sqrt(v);
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return std::max(0.0, roots[0] - roots[1] - roots[2] - roots[3]);
}

std::vector<MeasurementRecord> projective_measure(const DensityMatrix& rho,
                                                  std::span<const ComplexMatrix> projectors,
                                                  std::size_t subsystem) {
  const auto& shape = rho.shape();
  check_factor(shape, subsystem);
  check_projector_set(projectors, shape.dims[subsystem]);
  const double tr = rho.matrix().trace().real();
  std::vector<MeasurementRecord> out;
  out.reserve(projectors.size());
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    const ComplexMatrix p = embed(projectors[k], shape, subsystem);
    const ComplexMatrix projected = p * rho.matrix() * p;
    MeasurementRecord rec;
    rec.outcome = k;
    rec.probability = std::clamp(projected.trace().real() / tr, 0.0, 1.0);
    if (rec.probability > kZeroProbability) {
      rec.post_state = DensityMatrix(Complex(1.0 / projected.trace().real()) * projected, shape);
    } else {
      rec.probability = 0.0;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

DensityMatrix dephase(const DensityMatrix& rho, std::span<const ComplexMatrix> projectors,
                      std::size_t subsystem) {
  const auto& shape = rho.shape();
  check_factor(shape, subsystem);
  check_projector_set(projectors, shape.dims[subsystem]);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(static_cast<Index>(rho.dim()),
                                                static_cast<Index>(rho.dim()));
  for (const auto& proj : projectors) {
    const ComplexMatrix p = embed(proj, shape, subsystem);
    acc += p.mat() * rho.matrix().mat() * p.mat();
  }
  return DensityMatrix(ComplexMatrix(std::move(acc)), shape);
}

DensityMatrix kraus_apply(const DensityMatrix& rho, std::span<const ComplexMatrix> operators) {
  if (operators.empty()) throw InvalidArgument("kraus_apply: empty operator set");
  const auto n = static_cast<Index>(rho.dim());
  Eigen::MatrixXcd completeness = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& l : operators) {
    if (l.dim() != rho.dim()) {
      std::ostringstream os;
      os << "kraus_apply: operator dimension " << l.dim() << " does not match state dimension "
         << rho.dim();
      throw InvalidArgument(os.str());
    }
    completeness += l.mat().adjoint() * l.mat();
    acc += l.mat() * rho.matrix().mat() * l.mat().adjoint();
  }
  const double defect = (completeness - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > kProjectorTol) {
    std::ostringstream os;
    os << "kraus_apply: operators are not trace preserving (max |sum L^dag L - I| = " << defect
       << ")";
    throw InvalidArgument(os.str());
  }
  return DensityMatrix(ComplexMatrix(std::move(acc)), rho.shape());
}

WitnessResult quantum_witness(const DensityMatrix& rho, const WitnessProtocol& protocol) {
  const auto& shape = rho.shape();
  check_factor(shape, protocol.measured);
  check_factor(shape, protocol.probed);
  std::vector<ComplexMatrix> channel;
  channel.reserve(protocol.channel.size());
  for (const auto& l : protocol.channel) {
    if (l.dim() == rho.dim()) {
      channel.push_back(l);
    } else if (l.dim() == shape.dims[protocol.measured]) {
      channel.push_back(embed(l, shape, protocol.measured));
    } else {
      throw InvalidArgument("quantum_witness: channel operator matches neither the measured "
                            "factor nor the full space");
    }
  }
  const DensityMatrix blind = dephase(rho, protocol.blind, protocol.measured);
  const ComplexMatrix probe = embed(protocol.probe, shape, protocol.probed);
  WitnessResult out;
  out.direct_probability = (probe * kraus_apply(rho, channel).matrix()).trace().real();
  out.blind_probability = (probe * kraus_apply(blind, channel).matrix()).trace().real();
  out.witness = std::abs(out.direct_probability - out.blind_probability);
  return out;
}

// ---------------------------------------------------------------------------
// Discord

namespace {

struct DiscordObjective {
  Eigen::Matrix4cd rho;
  int measured = 1;  // factor index

  // sum_j p_j S(rho_{other|j}) for the measurement along Bloch axis (theta, phi).
  double operator()(double theta, double phi) const {
    const Complex e = std::polar(1.0, phi);
    Eigen::Vector2cd up(std::cos(0.5 * theta), e * std::sin(0.5 * theta));
    Eigen::Vector2cd down(-std::conj(e) * std::sin(0.5 * theta), std::cos(0.5 * theta));
    double total = 0.0;
    for (const auto* v : {&up, &down}) {
      // Conditional (unnormalized) state of the other qubit.
      Eigen::Matrix2cd cond = Eigen::Matrix2cd::Zero();
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          Complex acc = 0.0;
          for (int m1 = 0; m1 < 2; ++m1) {
            for (int m2 = 0; m2 < 2; ++m2) {
              const int row = measured == 1 ? 2 * a + m1 : 2 * m1 + a;
              const int col = measured == 1 ? 2 * b + m2 : 2 * m2 + b;
              acc += std::conj((*v)(m1)) * rho(row, col) * (*v)(m2);
            }
          }
          cond(a, b) = acc;
        }
      }
      const double p = cond.trace().real();
      if (p > kZeroProbability) total += p * qubit_entropy(cond / p);
    }
    return total;
  }
};

// Nelder-Mead on (theta, phi) starting from a grid point.
std::pair<Eigen::Vector2d, double> refine(const DiscordObjective& f, Eigen::Vector2d start,
                                          Eigen::Vector2d step, double tol,
                                          std::size_t max_iter) {
  std::array<Eigen::Vector2d, 3> pts{start, start + Eigen::Vector2d(step(0), 0.0),
                                     start + Eigen::Vector2d(0.0, step(1))};
  std::array<double, 3> vals{};
  for (std::size_t i = 0; i < 3; ++i) vals[i] = f(pts[i](0), pts[i](1));
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const auto best = order[0], mid = order[1], worst = order[2];
    if (vals[worst] - vals[best] <= tol &&
        (pts[worst] - pts[best]).cwiseAbs().maxCoeff() < 1e-6) {
      break;
    }
    const Eigen::Vector2d centroid = 0.5 * (pts[best] + pts[mid]);
    const Eigen::Vector2d refl = centroid + (centroid - pts[worst]);
    const double f_refl = f(refl(0), refl(1));
    if (f_refl < vals[best]) {
      const Eigen::Vector2d exp = centroid + 2.0 * (centroid - pts[worst]);
      const double f_exp = f(exp(0), exp(1));
      if (f_exp < f_refl) {
        pts[worst] = exp;
        vals[worst] = f_exp;
      } else {
        pts[worst] = refl;
        vals[worst] = f_refl;
      }
    } else if (f_refl < vals[mid]) {
      pts[worst] = refl;
      vals[worst] = f_refl;
    } else {
      const Eigen::Vector2d contr = centroid + 0.5 * (pts[worst] - centroid);
      const double f_contr = f(contr(0), contr(1));
      if (f_contr < vals[worst]) {
        pts[worst] = contr;
        vals[worst] = f_contr;
      } else {
        for (auto i : {mid, worst}) {
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          vals[i] = f(pts[i](0), pts[i](1));
        }
      }
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  return {pts[static_cast<std::size_t>(it - vals.begin())], *it};
}

}  // namespace

DiscordResult quantum_discord(const DensityMatrix& rho_ab, Side measured,
                              const DiscordOptions& opt) {
  if (rho_ab.dim() != 4 || rho_ab.shape().dims != std::vector<std::size_t>{2, 2}) {
    throw InvalidArgument("quantum_discord: expected a two-qubit state with shape (2,2)");
  }
  if (opt.grid_theta < 2 || opt.grid_phi < 1) {
    throw InvalidArgument("quantum_discord: grid too small");
  }
  DiscordObjective f{rho_ab.matrix().mat(), measured == Side::A ? 0 : 1};

  const double dtheta = std::numbers::pi / static_cast<double>(opt.grid_theta - 1);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(opt.grid_phi);
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d best_pt(0.0, 0.0);
  for (std::size_t i = 0; i < opt.grid_theta; ++i) {
    for (std::size_t j = 0; j < opt.grid_phi; ++j) {
      const double th = dtheta * static_cast<double>(i);
      const double ph = dphi * static_cast<double>(j);
      const double v = f(th, ph);
      if (v < best) {
        best = v;
        best_pt = {th, ph};
      }
    }
  }
  auto [pt, val] = refine(f, best_pt, Eigen::Vector2d(0.5 * dtheta, 0.5 * dphi), opt.tolerance,
                          opt.max_refine_iterations);
  if (val > best) {
    val = best;
    pt = best_pt;
  }
  const std::size_t kept = measured == Side::A ? 0 : 1;
  DiscordResult out;
  out.classical_conditional = val;
  out.theta = pt(0);
  out.phi = pt(1);
  out.discord = von_neumann_entropy(rho_ab.reduce({kept})) - von_neumann_entropy(rho_ab) + val;
  return out;
}

// ---------------------------------------------------------------------------
// Entropic uncertainty

std::vector<ComplexMatrix> basis_projectors(const ComplexMatrix& basis) {
  const auto n = static_cast<Index>(basis.dim());
  const Eigen::MatrixXcd gram = basis.mat().adjoint() * basis.mat();
  if ((gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() > kProjectorTol) {
    throw InvalidArgument("basis columns are not a complete orthonormal set");
  }
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    out.push_back(ComplexMatrix::outer(basis.mat().col(k), basis.mat().col(k)));
  }
  return out;
}

UncertaintyRecord berta_uncertainty(const DensityMatrix& rho_ab, const ComplexMatrix& x_basis,
                                    const ComplexMatrix& y_basis, std::size_t a_factor) {
  const auto& shape = rho_ab.shape();
  check_factor(shape, a_factor);
  if (x_basis.dim() != shape.dims[a_factor] || y_basis.dim() != shape.dims[a_factor]) {
    throw InvalidArgument("berta_uncertainty: basis dimension does not match factor A");
  }
  const auto px = basis_projectors(x_basis);
  const auto py = basis_projectors(y_basis);
  const std::array<std::size_t, 1> a{a_factor};
  const auto b_factors = shape.complement(a);
  const double s_b = von_neumann_entropy(rho_ab.reduce(b_factors));

  UncertaintyRecord rec;
  rec.S_RB = von_neumann_entropy(dephase(rho_ab, px, a_factor)) - s_b;
  rec.S_QB = von_neumann_entropy(dephase(rho_ab, py, a_factor)) - s_b;
  rec.S_AB = von_neumann_entropy(rho_ab) - s_b;
  const Eigen::MatrixXcd overlap = x_basis.mat().adjoint() * y_basis.mat();
  rec.c = overlap.cwiseAbs2().maxCoeff();
  rec.lhs = rec.S_RB + rec.S_QB;
  rec.rhs = std::log(1.0 / rec.c) + rec.S_AB;
  rec.slack = rec.lhs - rec.rhs;
  return rec;
}

// ---------------------------------------------------------------------------

namespace pauli {
ComplexMatrix x() { return ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix y() { return ComplexMatrix{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}}; }
ComplexMatrix z() { return ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

}  // namespace soqdot::qstate
