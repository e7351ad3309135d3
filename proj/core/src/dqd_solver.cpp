#include "soqdot/dqd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "soqdot/analytic_model.hpp"
#include "soqdot/error.hpp"
#include "soqdot/linalg.hpp"

namespace soqdot::dqd {

using linalg::Index;

namespace {

Index idx(std::size_t i) { return static_cast<Index>(i); }

double pair_norm(const PairState& p) { return p.i == p.j ? 0.5 : 1.0 / std::sqrt(2.0); }

// Largest-magnitude entry made positive, so eigenvectors come out with a
// reproducible sign.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0.0) v = -v;
}

std::vector<double> potential_diagonal(const Grid1D& grid, const PotentialSpec& pot) {
  const double h = grid.spacing();
  std::vector<double> d(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) d[i] = 1.0 / (h * h) + pot(grid.x(i));
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid and potential

void Grid1D::validate() const {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw InvalidArgument("Grid1D: need finite x_min < x_max");
  }
  if (n_points < 64) {
    std::ostringstream os;
    os << "Grid1D: n_points = " << n_points << " is below the minimum of 64";
    throw InvalidArgument(os.str());
  }
}

void PotentialSpec::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("PotentialSpec: beta must be > 0");
  if (!(ell >= 0.0) || !std::isfinite(ell)) throw InvalidArgument("PotentialSpec: ell must be >= 0");
  if (!std::isfinite(e_field)) throw InvalidArgument("PotentialSpec: non-finite e_field");
}

std::vector<double> PotentialSpec::centers() const {
  switch (kind) {
    case PotentialKind::SingleDot:
      return {0.0};
    case PotentialKind::DoubleDot:
      return {-0.5 * ell, 0.5 * ell};
    case PotentialKind::FourDot:
      return {-1.5 * ell, -0.5 * ell, 0.5 * ell, 1.5 * ell};
  }
  return {};
}

std::vector<double> PotentialSpec::minima() const {
  auto c = centers();
  for (double& x : c) x -= e_field / (beta * beta);
  return c;
}

double PotentialSpec::confinement(double x) const {
  double best = std::numeric_limits<double>::infinity();
  for (double c : centers()) best = std::min(best, (x - c) * (x - c));
  return 0.5 * beta * beta * best;
}

Grid1D default_grid(const PotentialSpec& pot, Grid1D base) {
  pot.validate();
  base.validate();
  const auto mins = pot.minima();
  const double reach = 5.0 / std::sqrt(pot.beta);
  const double lo = *std::min_element(mins.begin(), mins.end()) - reach;
  const double hi = *std::max_element(mins.begin(), mins.end()) + reach;
  const double h = base.spacing();
  Grid1D g = base;
  if (lo < base.x_min) {
    const auto extra = static_cast<std::size_t>(std::ceil((base.x_min - lo) / h));
    g.x_min -= static_cast<double>(extra) * h;
    g.n_points += extra;
  }
  if (hi > base.x_max) {
    const auto extra = static_cast<std::size_t>(std::ceil((hi - base.x_max) / h));
    g.x_max += static_cast<double>(extra) * h;
    g.n_points += extra;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Single particle

OrbitalSet solve_single_particle(const Grid1D& grid, const PotentialSpec& pot,
                                 std::size_t n_orbitals, const SingleParticleOptions& opt) {
  grid.validate();
  pot.validate();
  if (n_orbitals == 0 || n_orbitals > grid.n_points / 4) {
    std::ostringstream os;
    os << "solve_single_particle: n_orbitals = " << n_orbitals << " must be in [1, n_points/4 = "
       << grid.n_points / 4 << "]";
    throw InvalidArgument(os.str());
  }
  const double h = grid.spacing();
  const auto diag = potential_diagonal(grid, pot);
  const std::vector<double> off(grid.n_points - 1, -0.5 / (h * h));
  auto eig = linalg::tridiagonal_lowest(diag, off, n_orbitals);

  OrbitalSet out;
  out.grid = grid;
  out.energies = std::move(eig.eigenvalues);
  out.orbitals = eig.eigenvectors / std::sqrt(h);
  for (Index k = 0; k < out.orbitals.cols(); ++k) fix_sign(out.orbitals.col(k));

  if (opt.refinement_probe) {
    Grid1D fine = grid;
    fine.n_points = 2 * grid.n_points + 1;  // spacing h/2 on the same box
    const double hf = fine.spacing();
    const auto fdiag = potential_diagonal(fine, pot);
    const std::vector<double> foff(fine.n_points - 1, -0.5 / (hf * hf));
    const auto fine_ev = linalg::tridiagonal_eigenvalues(fdiag, foff);
    const std::size_t levels = std::min(opt.probe_levels, n_orbitals);
    for (std::size_t k = 0; k < levels; ++k) {
      const double scale = std::max(std::abs(fine_ev[k]), pot.beta);
      out.refinement_change =
          std::max(out.refinement_change, std::abs(out.energies[k] - fine_ev[k]) / scale);
    }
    out.refinement_warning = out.refinement_change > opt.refinement_tol;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coulomb

void CoulombParams::validate() const {
  if (!(strength >= 0.0) || !std::isfinite(strength)) {
    throw InvalidArgument("CoulombParams: strength must be >= 0");
  }
  if (!(softening > 0.0) || !std::isfinite(softening)) {
    throw InvalidArgument("CoulombParams: softening must be > 0");
  }
}

CiBasis make_ci_basis(const OrbitalSet& orbitals, std::size_t n_orbitals, double window) {
  const std::size_t n = std::min(n_orbitals, orbitals.energies.size());
  if (n < 2) throw InvalidArgument("make_ci_basis: need at least two orbitals");
  if (!(window >= 0.0)) throw InvalidArgument("make_ci_basis: window must be >= 0");
  const auto& e = orbitals.energies;
  const double cutoff = 2.0 * e[0] + window;
  CiBasis basis;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (e[i] + e[j] > cutoff) continue;
      basis.symmetric.push_back({i, j, +1});
      if (i != j) basis.antisymmetric.push_back({i, j, -1});
      basis.n_orbitals = std::max(basis.n_orbitals, j + 1);
    }
  }
  if (basis.antisymmetric.empty()) {
    throw InvalidArgument("make_ci_basis: pair window excludes every antisymmetric pair");
  }
  return basis;
}

CoulombIntegrals::CoulombIntegrals(const OrbitalSet& orbitals, std::size_t n_orbitals,
                                   const CoulombParams& cp)
    : n_(n_orbitals) {
  cp.validate();
  if (n_ > static_cast<std::size_t>(orbitals.orbitals.cols())) {
    throw InvalidArgument("CoulombIntegrals: more orbitals requested than available");
  }
  const std::size_t np = n_ * (n_ + 1) / 2;
  g_ = Eigen::MatrixXd::Zero(idx(np), idx(np));
  if (cp.strength == 0.0) return;

  const auto& grid = orbitals.grid;
  const auto npts = idx(grid.n_points);
  const double h = grid.spacing();
  Eigen::MatrixXd rho(npts, idx(np));
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t c = a; c < n_; ++c) {
      rho.col(idx(pair(a, c))) = orbitals.orbitals.col(idx(a)).cwiseProduct(orbitals.orbitals.col(idx(c)));
    }
  }
  // The kernel only depends on |x1 - x2|, so build it from one row.
  Eigen::VectorXd row(npts);
  const double lam2 = cp.softening * cp.softening;
  for (Index d = 0; d < npts; ++d) {
    const double dx = static_cast<double>(d) * h;
    row(d) = cp.strength / std::sqrt(dx * dx + lam2);
  }
  Eigen::MatrixXd kernel(npts, npts);
  for (Index i = 0; i < npts; ++i) {
    for (Index j = 0; j < npts; ++j) kernel(i, j) = row(std::abs(i - j));
  }
  const Eigen::MatrixXd k_rho = kernel * rho;
  g_.noalias() = (h * h) * rho.transpose() * k_rho;
  g_ = 0.5 * (g_ + g_.transpose()).eval();
}

std::size_t CoulombIntegrals::pair(std::size_t a, std::size_t c) const {
  if (a > c) std::swap(a, c);
  return a * n_ - a * (a - 1) / 2 + (c - a);
}

double CoulombIntegrals::operator()(std::size_t i, std::size_t j, std::size_t k,
                                    std::size_t l) const {
  return g_(idx(pair(i, k)), idx(pair(j, l)));
}

Eigen::MatrixXd coulomb_block(const std::vector<PairState>& pairs, const CoulombIntegrals& g) {
  const auto n = idx(pairs.size());
  Eigen::MatrixXd v(n, n);
  for (Index p = 0; p < n; ++p) {
    const auto& a = pairs[static_cast<std::size_t>(p)];
    for (Index q = p; q < n; ++q) {
      const auto& c = pairs[static_cast<std::size_t>(q)];
      const double direct = g(a.i, a.j, c.i, c.j);
      const double exchange = g(a.i, a.j, c.j, c.i);
      const double val = 2.0 * pair_norm(a) * pair_norm(c) * (direct + a.b * exchange);
      v(p, q) = val;
      v(q, p) = val;
    }
  }
  return v;
}

qstate::ComplexMatrix coulomb_matrix_elements(const OrbitalSet& orbitals, const CiBasis& basis,
                                              const CoulombParams& cp) {
  CoulombIntegrals g(orbitals, basis.n_orbitals, cp);
  const auto ns = idx(basis.symmetric.size());
  const auto na = idx(basis.antisymmetric.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ns + na, ns + na);
  m.topLeftCorner(ns, ns) = coulomb_block(basis.symmetric, g).cast<linalg::Complex>();
  m.bottomRightCorner(na, na) = coulomb_block(basis.antisymmetric, g).cast<linalg::Complex>();
  return qstate::ComplexMatrix(std::move(m));
}

// ---------------------------------------------------------------------------
// CI

namespace {

struct SectorEig {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
};

SectorEig diagonalize_sector(const std::vector<PairState>& pairs, const OrbitalSet& orbitals,
                             const CoulombIntegrals& g, bool vectors) {
  Eigen::MatrixXd h = coulomb_block(pairs, g);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    h(idx(p), idx(p)) += orbitals.energies[pairs[p].i] + orbitals.energies[pairs[p].j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("ci_diagonalize: eigensolver failed");
  SectorEig out;
  out.energies = es.eigenvalues();
  if (vectors) out.vectors = es.eigenvectors();
  return out;
}

std::vector<double> merged_lowest(const SectorEig& s, const SectorEig& a, std::size_t count) {
  std::vector<double> all(s.energies.data(), s.energies.data() + s.energies.size());
  all.insert(all.end(), a.energies.data(), a.energies.data() + a.energies.size());
  std::sort(all.begin(), all.end());
  all.resize(std::min(count, all.size()));
  return all;
}

}  // namespace

CiResult ci_diagonalize(const OrbitalSet& orbitals, const CoulombParams& cp, const CiOptions& opt) {
  cp.validate();
  if (opt.n_keep == 0) throw InvalidArgument("ci_diagonalize: n_keep must be positive");
  const std::size_t pool = std::min(opt.n_orbitals, orbitals.energies.size());
  const CiBasis basis = make_ci_basis(orbitals, pool, opt.pair_window);
  const CoulombIntegrals g(orbitals, basis.n_orbitals, cp);

  const SectorEig sym = diagonalize_sector(basis.symmetric, orbitals, g, true);
  const SectorEig anti = diagonalize_sector(basis.antisymmetric, orbitals, g, true);

  // (energy, b, column) over both sectors, lowest first.
  std::vector<std::tuple<double, int, Index>> order;
  for (Index k = 0; k < sym.energies.size(); ++k) order.emplace_back(sym.energies(k), +1, k);
  for (Index k = 0; k < anti.energies.size(); ++k) order.emplace_back(anti.energies(k), -1, k);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });

  CiResult out;
  out.n_orbitals = pool;
  out.dim_symmetric = basis.symmetric.size();
  out.dim_antisymmetric = basis.antisymmetric.size();
  const std::size_t keep = std::min(opt.n_keep, order.size());
  out.truncated_states = order.size() - keep;

  const auto m = idx(basis.n_orbitals);
  for (std::size_t s = 0; s < keep; ++s) {
    const auto [energy, b, col] = order[s];
    const auto& pairs = b > 0 ? basis.symmetric : basis.antisymmetric;
    Eigen::VectorXd v = (b > 0 ? sym.vectors : anti.vectors).col(col);
    fix_sign(v);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& ps = pairs[p];
      const double amp = v(idx(p)) * pair_norm(ps);
      c(idx(ps.i), idx(ps.j)) += amp;
      c(idx(ps.j), idx(ps.i)) += b * amp;
    }
    out.states.push_back(CiState{energy, b, std::move(c)});
  }

  // <phi_a| d/dx |phi_c> by central differences; zero outside the box.
  const Eigen::MatrixXd phi = orbitals.orbitals.leftCols(m);
  const Index npts = phi.rows();
  Eigen::MatrixXd dphi = Eigen::MatrixXd::Zero(npts, m);
  dphi.topRows(npts - 1) += phi.bottomRows(npts - 1);
  dphi.bottomRows(npts - 1) -= phi.topRows(npts - 1);
  const Eigen::MatrixXd d = 0.5 * phi.transpose() * dphi;  // h * (1/2h)

  const auto n = idx(keep);
  out.d1.resize(n, n);
  out.d2.resize(n, n);
  for (Index a = 0; a < n; ++a) {
    const auto& ca = out.states[static_cast<std::size_t>(a)].coefficients;
    for (Index b = 0; b < n; ++b) {
      const auto& cb = out.states[static_cast<std::size_t>(b)].coefficients;
      out.d1(a, b) = ca.cwiseProduct(d * cb).sum();
      out.d2(a, b) = (ca * d).cwiseProduct(cb).sum();
    }
  }

  if (opt.convergence_probe && pool > opt.probe_orbitals && opt.probe_orbitals >= 2) {
    const CiBasis small = make_ci_basis(orbitals, opt.probe_orbitals, opt.pair_window);
    const auto lo_s = diagonalize_sector(small.symmetric, orbitals, g, false);
    const auto lo_a = diagonalize_sector(small.antisymmetric, orbitals, g, false);
    const auto coarse = merged_lowest(lo_s, lo_a, keep);
    const auto fine = merged_lowest(sym, anti, keep);
    for (std::size_t k = 0; k < std::min(coarse.size(), fine.size()); ++k) {
      const double scale = std::max(std::abs(fine[k]), 1.0);
      out.convergence_change = std::max(out.convergence_change, std::abs(fine[k] - coarse[k]) / scale);
    }
    out.probe_run = true;
    out.converged = out.convergence_change <= opt.convergence_tol;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spin-orbit block

Eigen::Vector4d spin_vector(SpinLabel s) {
  const double r2 = 1.0 / std::sqrt(2.0);
  switch (s) {
    case SpinLabel::TPlus:
      return {1.0, 0.0, 0.0, 0.0};
    case SpinLabel::TZero:
      return {0.0, r2, r2, 0.0};
    case SpinLabel::TMinus:
      return {0.0, 0.0, 0.0, 1.0};
    case SpinLabel::Singlet:
      return {0.0, r2, -r2, 0.0};
  }
  return Eigen::Vector4d::Zero();
}

SoResult add_spin_orbit(const CiResult& ci, double alpha, double b_field) {
  if (!std::isfinite(alpha) || !std::isfinite(b_field)) {
    throw InvalidArgument("add_spin_orbit: non-finite alpha or field");
  }
  SoResult out;
  for (std::size_t m = 0; m < ci.states.size(); ++m) {
    if (ci.states[m].b > 0) {
      out.basis.push_back({m, SpinLabel::Singlet});
    } else {
      for (auto s : {SpinLabel::TPlus, SpinLabel::TZero, SpinLabel::TMinus}) out.basis.push_back({m, s});
    }
  }
  // -i sigma^y is real: [[0,-1],[1,0]]. Lift to each particle.
  Eigen::Matrix2d y;
  y << 0.0, -1.0, 1.0, 0.0;
  Eigen::Matrix4d y1 = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d y2 = Eigen::Matrix4d::Zero();
  for (Index a = 0; a < 2; ++a) {
    for (Index b = 0; b < 2; ++b) {
      y1.block<2, 2>(2 * a, 2 * b) = y(a, b) * Eigen::Matrix2d::Identity();
      y2.block<2, 2>(2 * a, 2 * b) = (a == b ? 1.0 : 0.0) * y;
    }
  }
  Eigen::Matrix4d sz = Eigen::Matrix4d::Zero();
  sz.diagonal() << 2.0, 0.0, 0.0, -2.0;

  const auto n = idx(out.basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Index p = 0; p < n; ++p) {
    const auto& bp = out.basis[static_cast<std::size_t>(p)];
    const Eigen::Vector4d cp = spin_vector(bp.spin);
    for (Index q = 0; q < n; ++q) {
      const auto& bq = out.basis[static_cast<std::size_t>(q)];
      const Eigen::Vector4d cq = spin_vector(bq.spin);
      const auto mp = idx(bp.ci_index);
      const auto mq = idx(bq.ci_index);
      double v = alpha * (ci.d1(mp, mq) * cp.dot(y1 * cq) + ci.d2(mp, mq) * cp.dot(y2 * cq));
      if (mp == mq) v += b_field * cp.dot(sz * cq);
      if (p == q) v += ci.states[bp.ci_index].energy;
      h(p, q) = v;
    }
  }
  out.hermiticity_defect = n > 0 ? (h - h.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (out.hermiticity_defect > 1e-9) {
    std::ostringstream os;
    os << "add_spin_orbit: Hamiltonian not Hermitian (defect " << out.hermiticity_defect << ")";
    throw NumericError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("add_spin_orbit: eigensolver failed");
  out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  out.eigenvectors = es.eigenvectors();
  for (Index k = 0; k < n; ++k) fix_sign(out.eigenvectors.col(k));
  return out;
}

qstate::StateVector expand_state(const SoResult& so, std::size_t n_ci,
                                 const Eigen::VectorXd& coefficients) {
  if (static_cast<std::size_t>(coefficients.size()) != so.basis.size()) {
    throw InvalidArgument("expand_state: coefficient count does not match the SO basis");
  }
  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(idx(4 * n_ci));
  for (std::size_t p = 0; p < so.basis.size(); ++p) {
    const auto& b = so.basis[p];
    if (b.ci_index >= n_ci) throw InvalidArgument("expand_state: CI index out of range");
    const Eigen::Vector4d s = spin_vector(b.spin);
    for (Index k = 0; k < 4; ++k) amp(idx(4 * b.ci_index) + k) += coefficients(idx(p)) * s(k);
  }
  return qstate::StateVector(std::move(amp), qstate::SubsystemShape{{n_ci, 2, 2}});
}

Rdms numeric_rdms(const qstate::StateVector& state) {
  if (state.shape().factors() != 3 || state.shape().dims[1] != 2 || state.shape().dims[2] != 2) {
    throw InvalidArgument("numeric_rdms: expected shape {n, 2, 2}");
  }
  const auto rho = qstate::pure_density(state);
  return Rdms{rho.reduce({1, 2}), rho.reduce({0})};
}

std::size_t reference_triplet(const CiResult& ci) {
  double best = -1.0;
  std::size_t ref = ci.states.size();
  for (std::size_t m = 0; m < ci.states.size(); ++m) {
    const auto& s = ci.states[m];
    if (s.b > 0) continue;
    const double ov = std::abs(s.coefficients(0, 1) - s.coefficients(1, 0)) / std::sqrt(2.0);
    if (ov > best + 1e-12) {
      best = ov;
      ref = m;
    }
  }
  if (ref == ci.states.size()) throw NumericError("reference_triplet: no antisymmetric CI state retained");
  return ref;
}

Eigen::VectorXd reference_vector(const CiResult& ci, const SoResult& so) {
  const std::size_t ref = reference_triplet(ci);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(idx(so.basis.size()));
  for (std::size_t p = 0; p < so.basis.size(); ++p) {
    if (so.basis[p].ci_index == ref && so.basis[p].spin == SpinLabel::TPlus) v(idx(p)) = 1.0;
  }
  return v;
}

TargetSelection select_target(const SoResult& so, const Eigen::VectorXd& previous,
                              double degeneracy_tol) {
  const auto n = idx(so.energies.size());
  if (previous.size() != n) throw InvalidArgument("select_target: vector size does not match SO basis");
  const Eigen::VectorXd amp = so.eigenvectors.transpose() * previous;
  double best_weight = -1.0;
  Index best_lo = 0, best_hi = 0;
  for (Index lo = 0; lo < n;) {
    Index hi = lo + 1;
    while (hi < n && so.energies[static_cast<std::size_t>(hi)] -
                             so.energies[static_cast<std::size_t>(hi - 1)] <= degeneracy_tol) {
      ++hi;
    }
    const double weight = amp.segment(lo, hi - lo).squaredNorm();
    if (weight > best_weight + 1e-12) {
      best_weight = weight;
      best_lo = lo;
      best_hi = hi;
    }
    lo = hi;
  }
  TargetSelection out;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  double energy = 0.0;
  for (Index k = best_lo; k < best_hi; ++k) {
    v += amp(k) * so.eigenvectors.col(k);
    energy += amp(k) * amp(k) * so.energies[static_cast<std::size_t>(k)];
  }
  out.coefficients = v / std::sqrt(best_weight);
  out.energy = energy / best_weight;
  out.overlap = best_weight / previous.squaredNorm();
  out.ambiguous = out.overlap < 0.5;
  return out;
}

std::vector<TargetSelection> track_target(const CiResult& ci, std::vector<double> alphas,
                                          double b_field, double degeneracy_tol, double max_step) {
  if (!(max_step > 0.0)) throw InvalidArgument("track_target: max_step must be positive");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("track_target: alpha must be >= 0");
  }
  std::vector<std::size_t> order(alphas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return alphas[x] < alphas[y]; });

  std::vector<TargetSelection> out(alphas.size());
  Eigen::VectorXd state;
  double a_prev = 0.0;
  double worst = 1.0;
  {
    const SoResult so = add_spin_orbit(ci, 0.0, b_field);
    auto sel = select_target(so, reference_vector(ci, so), degeneracy_tol);
    state = sel.coefficients;
    worst = sel.overlap;
  }
  for (std::size_t k : order) {
    const double target = alphas[k];
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((target - a_prev) / max_step)));
    TargetSelection sel;
    for (std::size_t s = 1; s <= steps; ++s) {
      const double a = a_prev + (target - a_prev) * static_cast<double>(s) / static_cast<double>(steps);
      const SoResult so = add_spin_orbit(ci, a, b_field);
      sel = select_target(so, state, degeneracy_tol);
      state = sel.coefficients;
      worst = std::min(worst, sel.overlap);
    }
    sel.overlap = worst;
    sel.ambiguous = worst < 0.5;
    out[k] = sel;
    a_prev = target;
  }
  return out;
}

EntropyPair measured_entropies(const qstate::StateVector& state, PostEntropyMode mode) {
  const auto rho = qstate::pure_density(state);
  EntropyPair out;
  out.S_pre = qstate::von_neumann_entropy(rho.reduce({0}));
  const auto projectors = analytic::spin_projectors();
  const auto records = qstate::projective_measure(rho, projectors, 1);
  if (mode == PostEntropyMode::OutcomeOne) {
    const auto& r = records[1];
    out.S_post = r.post_state ? qstate::von_neumann_entropy(r.post_state->reduce({0})) : 0.0;
  } else {
    for (const auto& r : records) {
      if (r.post_state) out.S_post += r.probability * qstate::von_neumann_entropy(r.post_state->reduce({0}));
    }
  }
  return out;
}

std::vector<SweepRow> entropy_sweep(const SweepSpec& spec) {
  if (spec.alphas.empty() || spec.e_fields.empty()) {
    throw InvalidArgument("entropy_sweep: empty parameter grid");
  }
  spec.coulomb.validate();
  std::vector<SweepRow> rows;
  rows.reserve(spec.alphas.size() * spec.e_fields.size());
  for (double e0 : spec.e_fields) {
    PotentialSpec pot{PotentialKind::DoubleDot, spec.beta, spec.ell, e0};
    const Grid1D grid = default_grid(pot, spec.grid);
    const std::size_t n_orb = std::min(spec.ci.n_orbitals, grid.n_points / 4);
    const OrbitalSet orbitals = solve_single_particle(grid, pot, n_orb, spec.single_particle);
    const CiResult ci = ci_diagonalize(orbitals, spec.coulomb, spec.ci);
    const auto targets = track_target(ci, spec.alphas, spec.b_field, spec.degeneracy_tol,
                                      spec.continuation_step);
    for (std::size_t k = 0; k < spec.alphas.size(); ++k) {
      const SoResult so = add_spin_orbit(ci, spec.alphas[k], spec.b_field);
      const auto state = expand_state(so, ci.states.size(), targets[k].coefficients);
      const auto ent = measured_entropies(state, spec.post_mode);
      SweepRow row;
      row.alpha = spec.alphas[k];
      row.e_field = e0;
      row.ell = spec.ell;
      row.coulomb = spec.coulomb.strength;
      row.S_pre = ent.S_pre;
      row.S_post = ent.S_post;
      row.delta_S = ent.S_pre - ent.S_post;
      row.overlap = targets[k].overlap;
      row.overlap_flag = targets[k].ambiguous;
      rows.push_back(row);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.alpha, a.e_field) < std::tie(b.alpha, b.e_field);
  });
  return rows;
}

}  // namespace soqdot::dqd
