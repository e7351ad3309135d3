#include "soqdot/vmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "soqdot/error.hpp"

namespace soqdot::vmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxHarmonic = 7;
constexpr int kHarmonics = 2 * kMaxHarmonic + 1;

// Odd Fourier series in s, harmonics -7..7.
struct SpinFunction {
  std::array<Complex, kHarmonics> c{};

  Complex& operator[](int m) { return c[static_cast<std::size_t>(m + kMaxHarmonic)]; }
  Complex operator[](int m) const { return c[static_cast<std::size_t>(m + kMaxHarmonic)]; }

  [[nodiscard]] Complex eval(double s) const {
    Complex out = 0.0;
    for (int m = -kMaxHarmonic; m <= kMaxHarmonic; ++m) {
      const Complex cm = (*this)[m];
      if (cm != 0.0) out += cm * std::polar(1.0, m * s);
    }
    return out;
  }
};

SpinFunction operator+(SpinFunction a, const SpinFunction& b) {
  for (std::size_t k = 0; k < a.c.size(); ++k) a.c[k] += b.c[k];
  return a;
}

SpinFunction operator*(Complex z, SpinFunction a) {
  for (auto& v : a.c) v *= z;
  return a;
}

// Harmonics that would leave the window are dropped; the trial never
// populates |m| > 3, so second powers of the Pauli operators stay exact.
SpinFunction sigma_x(const SpinFunction& f) {
  SpinFunction out;
  for (int m = -kMaxHarmonic; m <= kMaxHarmonic; ++m) {
    const Complex cm = f[m];
    if (cm == 0.0) continue;
    if (m + 2 <= kMaxHarmonic) out[m + 2] += 0.5 * (1.0 - m) * cm;
    if (m - 2 >= -kMaxHarmonic) out[m - 2] += 0.5 * (1.0 + m) * cm;
  }
  return out;
}

SpinFunction sigma_y(const SpinFunction& f) {
  const Complex i(0.0, 1.0);
  SpinFunction out;
  for (int m = -kMaxHarmonic; m <= kMaxHarmonic; ++m) {
    const Complex cm = f[m];
    if (cm == 0.0) continue;
    if (m + 2 <= kMaxHarmonic) out[m + 2] += 0.5 * i * (m - 1.0) * cm;
    if (m - 2 >= -kMaxHarmonic) out[m - 2] += 0.5 * i * (m + 1.0) * cm;
  }
  return out;
}

SpinFunction sigma_z(const SpinFunction& f) {
  SpinFunction out;
  for (int m = -kMaxHarmonic; m <= kMaxHarmonic; ++m) out[m] = static_cast<double>(m) * f[m];
  return out;
}

// a e^{is} + b e^{-is} + leak (a e^{3is} + b e^{-3is})
SpinFunction spinor_function(double a, double b, double leak) {
  SpinFunction f;
  f[1] = a;
  f[-1] = b;
  f[3] = leak * a;
  f[-3] = leak * b;
  return f;
}

struct JastrowTerms {
  double dx = 0.0;   // dJ/dx_n
  double dxx = 0.0;  // d2J/dx_n^2
};

double jastrow(const std::vector<double>& x, double b) {
  if (b == 0.0) return 0.0;
  double j = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    for (std::size_t q = p + 1; q < x.size(); ++q) {
      const double d2 = (x[p] - x[q]) * (x[p] - x[q]);
      j += d2 / (1.0 + d2);
    }
  }
  return b * j;
}

JastrowTerms jastrow_terms(const std::vector<double>& x, std::size_t n, double b) {
  JastrowTerms t;
  if (b == 0.0) return t;
  for (std::size_t q = 0; q < x.size(); ++q) {
    if (q == n) continue;
    const double d = x[n] - x[q];
    const double u = 1.0 + d * d;
    t.dx += 2.0 * d / (u * u);
    t.dxx += (2.0 - 6.0 * d * d) / (u * u * u);
  }
  t.dx *= b;
  t.dxx *= b;
  return t;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

WalkerConfig::WalkerConfig(std::vector<double> positions, std::vector<double> angles)
    : x(std::move(positions)), s(std::move(angles)) {
  if (x.size() != s.size()) throw InvalidArgument("WalkerConfig: positions and angles differ in length");
  wrap();
}

void WalkerConfig::wrap() {
  for (double& a : s) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
  }
}

SpinorPhase homogeneous_rashba_phase(double alpha) {
  return SpinorPhase{[alpha](double x) { return alpha * x; }, [alpha](double) { return alpha; },
                     [](double) { return 0.0; }};
}

void TrialParams::validate() const {
  if (!std::isfinite(jastrow_b) || jastrow_b < 0.0) throw InvalidArgument("TrialParams: jastrow_b must be >= 0");
  if (!std::isfinite(lagrange_lambda)) throw InvalidArgument("TrialParams: lagrange_lambda must be finite");
  if (!std::isfinite(spin_leak) || spin_leak < 0.0) throw InvalidArgument("TrialParams: spin_leak must be >= 0");
  if (phase && (!phase->theta || !phase->dtheta || !phase->d2theta)) {
    throw InvalidArgument("TrialParams: phase needs theta, dtheta and d2theta");
  }
}

void Hamiltonian::validate() const {
  potential.validate();
  coulomb.validate();
  if (!std::isfinite(alpha) || !std::isfinite(b_field)) throw InvalidArgument("Hamiltonian: non-finite parameter");
}

std::size_t Hamiltonian::n_particles() const { return potential.centers().size(); }

TrialWavefunction::TrialWavefunction(TrialParams tp, const dqd::PotentialSpec& pot) : tp_(std::move(tp)) {
  tp_.validate();
  pot.validate();
  beta_ = pot.beta;
  centers_ = pot.minima();
  spinors_.reserve(centers_.size());
  for (std::size_t k = 0; k < centers_.size(); ++k) {
    const bool up = tp_.spins == SpinPattern::Polarized || k % 2 == 0;
    spinors_.emplace_back(up ? 1.0 : 0.0, up ? 0.0 : 1.0);
  }
}

Complex TrialWavefunction::amplitude(const WalkerConfig& cfg) const {
  const auto n = n_particles();
  if (cfg.size() != n) throw InvalidArgument("trial amplitude: walker size does not match the well count");
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    const double x = cfg.x[p];
    const double th = tp_.phase ? tp_.phase->theta(x) : 0.0;
    const double c = std::cos(th), s = std::sin(th);
    for (std::size_t k = 0; k < n; ++k) {
      const auto [u, d] = spinors_[k];
      const double dx = x - centers_[k];
      const double phi = std::exp(-0.5 * beta_ * dx * dx);
      const SpinFunction f = spinor_function(u * c - d * s, d * c + u * s, tp_.spin_leak);
      m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = phi * f.eval(cfg.s[p]);
    }
  }
  const Complex det = m.partialPivLu().determinant();
  if (!std::isfinite(det.real()) || !std::isfinite(det.imag())) return 0.0;
  return det * std::exp(jastrow(cfg.x, tp_.jastrow_b));
}

LocalValues TrialWavefunction::local(const WalkerConfig& cfg, const Hamiltonian& h) const {
  const auto n = n_particles();
  if (cfg.size() != n) throw InvalidArgument("local energy: walker size does not match the well count");
  const auto N = static_cast<Eigen::Index>(n);
  const Complex I(0.0, 1.0);

  // Row p holds orbital values at particle p; one matrix per operator.
  Eigen::MatrixXcd g(N, N), gx(N, N), gxx(N, N), gy(N, N), gyx(N, N), gz(N, N), gzz(N, N), gs2(N, N);
  double scale = 1.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double x = cfg.x[p];
    const double sp = cfg.s[p];
    const double th = tp_.phase ? tp_.phase->theta(x) : 0.0;
    const double t1 = tp_.phase ? tp_.phase->dtheta(x) : 0.0;
    const double t2 = tp_.phase ? tp_.phase->d2theta(x) : 0.0;
    const double c = std::cos(th), s = std::sin(th);
    double row_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto [u, d] = spinors_[k];
      const double a = u * c - d * s;
      const double b = d * c + u * s;
      const double a1 = -t1 * b, b1 = t1 * a;
      const double a2 = -t2 * b - t1 * t1 * a, b2 = t2 * a - t1 * t1 * b;
      const SpinFunction f0 = spinor_function(a, b, tp_.spin_leak);
      const SpinFunction f1 = spinor_function(a1, b1, tp_.spin_leak);
      const SpinFunction f2 = spinor_function(a2, b2, tp_.spin_leak);

      const double dx = x - centers_[k];
      const double phi = std::exp(-0.5 * beta_ * dx * dx);
      const double phi1 = -beta_ * dx * phi;
      const double phi2 = (beta_ * beta_ * dx * dx - beta_) * phi;

      const Complex v0 = f0.eval(sp), v1 = f1.eval(sp), v2 = f2.eval(sp);
      const SpinFunction y0 = sigma_y(f0);
      const SpinFunction z0 = sigma_z(f0);
      const SpinFunction x0 = sigma_x(f0);
      const SpinFunction s2 = 0.25 * (sigma_x(x0) + sigma_y(y0) + sigma_z(z0));
      const auto P = static_cast<Eigen::Index>(p), K = static_cast<Eigen::Index>(k);
      g(P, K) = phi * v0;
      gx(P, K) = phi1 * v0 + phi * v1;
      gxx(P, K) = phi2 * v0 + 2.0 * phi1 * v1 + phi * v2;
      gy(P, K) = phi * y0.eval(sp);
      gyx(P, K) = phi1 * y0.eval(sp) + phi * sigma_y(f1).eval(sp);
      gz(P, K) = phi * z0.eval(sp);
      gzz(P, K) = phi * sigma_z(z0).eval(sp);
      gs2(P, K) = phi * s2.eval(sp);
      row_max = std::max(row_max, std::abs(g(P, K)));
    }
    scale *= row_max;
  }

  LocalValues out;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(g);
  const Complex det = lu.determinant();
  if (!(scale > 0.0) || !(std::abs(det) >= 1e-12 * scale)) {
    out.node = true;
    return out;
  }
  const Eigen::MatrixXcd inv = lu.inverse();
  // Row p of an operator matrix replaces row p of g; the determinant ratio
  // is that row dotted with column p of the inverse.
  auto ratio = [&](const Eigen::MatrixXcd& op, Eigen::Index p) -> Complex {
    return op.row(p).transpose().cwiseProduct(inv.col(p)).sum();
  };

  Complex e = 0.0;
  double sz2 = 0.0, s2 = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto P = static_cast<Eigen::Index>(p);
    const JastrowTerms jt = jastrow_terms(cfg.x, p, tp_.jastrow_b);
    const Complex rx = ratio(gx, P);
    const Complex rxx = ratio(gxx, P);
    const Complex ry = ratio(gy, P);
    const Complex ryx = ratio(gyx, P);
    e += -0.5 * (rxx + 2.0 * jt.dx * rx + jt.dxx + jt.dx * jt.dx);
    e += h.potential(cfg.x[p]);
    e += -I * h.alpha * (ryx + jt.dx * ry);
    e += h.b_field * ratio(gz, P);
    sz2 += ratio(gzz, P).real();
    s2 += ratio(gs2, P).real();
  }
  if (h.coulomb.strength != 0.0) {
    const double l2 = h.coulomb.softening * h.coulomb.softening;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double d = cfg.x[p] - cfg.x[q];
        e += h.coulomb.strength / std::sqrt(d * d + l2);
      }
    }
  }
  out.energy = e.real();
  out.energy_imag = e.imag();
  out.sigma_z2 = sz2 / static_cast<double>(n);
  out.s2 = s2 / static_cast<double>(n);
  return out;
}

Complex trial_amplitude(const WalkerConfig& cfg, const TrialParams& tp, const dqd::PotentialSpec& pot) {
  return TrialWavefunction(tp, pot).amplitude(cfg);
}

double local_energy(const WalkerConfig& cfg, const TrialParams& tp, const Hamiltonian& h) {
  const LocalValues v = TrialWavefunction(tp, h.potential).local(cfg, h);
  if (v.node) throw NumericError("local_energy: configuration sits on a node of the trial state");
  return v.energy;
}

void VmcOptions::validate() const {
  std::ostringstream os;
  if (n_samples < 1) throw InvalidArgument("VmcOptions: n_samples must be positive");
  if (n_walkers < 1 || n_walkers > n_samples) throw InvalidArgument("VmcOptions: n_walkers must be in [1, n_samples]");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) throw InvalidArgument("VmcOptions: burn_in_fraction must be in [0, 1)");
  if (!(position_step >= 0.0) || !(spin_step > 0.0 && spin_step <= kTwoPi)) {
    throw InvalidArgument("VmcOptions: steps out of range");
  }
  if (bins < 1 || !(box_half_width > 0.0) || !(localization_window > 0.0)) {
    throw InvalidArgument("VmcOptions: histogram settings out of range");
  }
}

double blocking_error(const std::vector<double>& series) {
  std::vector<double> y = series;
  double best = 0.0;
  while (y.size() >= 32) {
    const double m = mean_of(y);
    double var = 0.0;
    for (double v : y) var += (v - m) * (v - m);
    var /= static_cast<double>(y.size() - 1);
    best = std::max(best, std::sqrt(var / static_cast<double>(y.size())));
    std::vector<double> next(y.size() / 2);
    for (std::size_t k = 0; k < next.size(); ++k) next[k] = 0.5 * (y[2 * k] + y[2 * k + 1]);
    y.swap(next);
  }
  return best;
}

namespace {

struct WalkStats {
  std::uint64_t accepted_x = 0, tried_x = 0, accepted_s = 0, tried_s = 0;
};

// Metropolis walkers on |psi|^2; calls on_sample(cfg) once per measured
// sweep, walkers in index order.
template <class F>
WalkStats walk(const TrialWavefunction& psi, double beta, const VmcOptions& opt, std::uint64_t seed,
               F&& on_sample) {
  const std::size_t n = psi.n_particles();
  const std::vector<double>& minima = psi.centers();
  WalkStats st;
  std::uint64_t seeder = seed;
  for (std::size_t w = 0; w < opt.n_walkers; ++w) {
    const std::size_t samples = opt.n_samples / opt.n_walkers + (w < opt.n_samples % opt.n_walkers ? 1 : 0);
    const auto burn = static_cast<std::size_t>(std::ceil(opt.burn_in_fraction * static_cast<double>(samples)));
    std::mt19937_64 rng(splitmix64(seeder));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double step = opt.position_step > 0.0 ? opt.position_step : 1.0 / std::sqrt(beta);
    WalkerConfig cfg;
    cfg.x.resize(n);
    cfg.s.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      cfg.x[p] = minima[p] + 0.1 * gauss(rng) / std::sqrt(beta);
      cfg.s[p] = kTwoPi * unit(rng);
    }
    double prob = std::norm(psi.amplitude(cfg));
    for (int tries = 0; !(prob > 0.0) && tries < 1000; ++tries) {
      for (std::size_t p = 0; p < n; ++p) cfg.s[p] = kTwoPi * unit(rng);
      prob = std::norm(psi.amplitude(cfg));
    }
    if (!(prob > 0.0)) throw NumericError("metropolis_run: could not find a starting point off the nodes");

    std::uint64_t win_acc = 0, win_try = 0;
    for (std::size_t sweep = 0; sweep < burn + samples; ++sweep) {
      const bool measuring = sweep >= burn;
      for (std::size_t p = 0; p < n; ++p) {
        const double old_x = cfg.x[p];
        cfg.x[p] = old_x + step * gauss(rng);
        double trial = std::norm(psi.amplitude(cfg));
        bool ok = trial >= prob || unit(rng) * prob < trial;
        if (ok) {
          prob = trial;
        } else {
          cfg.x[p] = old_x;
        }
        if (measuring) {
          ++st.tried_x;
          st.accepted_x += ok;
        } else {
          ++win_try;
          win_acc += ok;
        }

        const double old_s = cfg.s[p];
        cfg.s[p] = std::fmod(old_s + opt.spin_step * (unit(rng) - 0.5) + kTwoPi, kTwoPi);
        trial = std::norm(psi.amplitude(cfg));
        ok = trial >= prob || unit(rng) * prob < trial;
        if (ok) {
          prob = trial;
        } else {
          cfg.s[p] = old_s;
        }
        if (measuring) {
          ++st.tried_s;
          st.accepted_s += ok;
        }
      }
      if (measuring) {
        on_sample(cfg);
      } else if (win_try >= 50 * n) {
        const double rate = static_cast<double>(win_acc) / static_cast<double>(win_try);
        if (rate > 0.6) step *= 1.2;
        else if (rate < 0.4) step *= 0.8;
        win_acc = win_try = 0;
      }
    }
  }
  return st;
}

}  // namespace

VmcEstimate metropolis_run(const TrialParams& tp, const Hamiltonian& h, const VmcOptions& opt,
                           std::uint64_t seed) {
  h.validate();
  opt.validate();
  const TrialWavefunction psi(tp, h.potential);
  const std::size_t n = psi.n_particles();
  const double beta = h.potential.beta;
  const std::vector<double>& minima = psi.centers();

  PairHistogram hist;
  hist.bins = opt.bins;
  hist.lo = *std::min_element(minima.begin(), minima.end()) - opt.box_half_width / std::sqrt(beta);
  hist.hi = *std::max_element(minima.begin(), minima.end()) + opt.box_half_width / std::sqrt(beta);
  std::vector<std::uint64_t> counts(opt.bins * opt.bins, 0);
  std::uint64_t out_of_range = 0;
  const double window = opt.localization_window / std::sqrt(beta);
  auto near_center = [&](double x) {
    for (double c : minima) {
      if (std::abs(x - c) <= window) return true;
    }
    return false;
  };
  auto bin_of = [&](double x) -> long {
    return static_cast<long>(std::floor((x - hist.lo) / hist.width()));
  };

  std::vector<double> energies, energies_imag, sz2, s2, centroid, trace;
  energies.reserve(opt.n_samples);
  std::uint64_t localized = 0;
  std::size_t nodes = 0;

  const WalkStats st = walk(psi, beta, opt, seed, [&](const WalkerConfig& cfg) {
    const LocalValues lv = psi.local(cfg, h);
    if (lv.node) {
      ++nodes;
      return;
    }
    energies.push_back(lv.energy);
    energies_imag.push_back(lv.energy_imag);
    sz2.push_back(lv.sigma_z2);
    s2.push_back(lv.s2);
    double c = 0.0;
    for (double x : cfg.x) c += x;
    centroid.push_back(c / static_cast<double>(n));
    if (opt.record_trace) trace.push_back(cfg.x[0]);

    const double x1 = cfg.x[0];
    const double x2 = n > 1 ? cfg.x[1] : cfg.x[0];
    if (near_center(x1) && near_center(x2)) ++localized;
    const long i = bin_of(x1), j = bin_of(x2);
    const auto B = static_cast<long>(opt.bins);
    if (i < 0 || j < 0 || i >= B || j >= B) {
      ++out_of_range;
    } else {
      ++counts[static_cast<std::size_t>(i) * opt.bins + static_cast<std::size_t>(j)];
    }
  });

  VmcEstimate est;
  est.seed = seed;
  est.n_samples = energies.size();
  est.node_rejections = nodes;
  if (energies.empty()) throw NumericError("metropolis_run: every sample was rejected at a node");
  est.energy_mean = mean_of(energies);
  est.energy_err = blocking_error(energies);
  double var = 0.0;
  for (double e : energies) var += (e - est.energy_mean) * (e - est.energy_mean);
  est.energy_variance = var / static_cast<double>(energies.size());
  est.energy_imag_mean = mean_of(energies_imag);
  est.constraint_mean = mean_of(sz2);
  est.constraint_err = blocking_error(sz2);
  est.s2_mean = mean_of(s2);
  est.lagrangian = est.energy_mean + tp.lagrange_lambda * (est.constraint_mean - 1.0);
  auto rate = [](std::uint64_t a, std::uint64_t t) { return t ? static_cast<double>(a) / static_cast<double>(t) : 0.0; };
  est.acceptance_position = rate(st.accepted_x, st.tried_x);
  est.acceptance_spin = rate(st.accepted_s, st.tried_s);
  est.acceptance_flag = est.acceptance_position < 0.2 || est.acceptance_position > 0.8;
  est.localization_fraction = static_cast<double>(localized) / static_cast<double>(est.n_samples);
  est.centroid_mean = mean_of(centroid);
  est.centroid_err = blocking_error(centroid);

  const std::uint64_t in_range = est.n_samples - out_of_range;
  est.pair = hist;
  est.pair.mass.assign(counts.size(), 0.0);
  if (in_range > 0) {
    for (std::size_t k = 0; k < counts.size(); ++k) {
      est.pair.mass[k] = static_cast<double>(counts[k]) / static_cast<double>(in_range);
    }
  }
  est.pair.out_of_range = static_cast<double>(out_of_range) / static_cast<double>(est.n_samples);
  est.trace_x1 = std::move(trace);
  return est;
}

PairDistribution pair_distribution(const VmcEstimate& est) {
  const PairHistogram& hp = est.pair;
  if (hp.mass.size() != hp.bins * hp.bins || hp.bins == 0) throw InvalidArgument("pair_distribution: histogram is empty");
  PairDistribution out;
  out.x.resize(hp.bins);
  for (std::size_t k = 0; k < hp.bins; ++k) out.x[k] = hp.center(k);
  const double area = hp.width() * hp.width();
  out.density.resize(hp.mass.size());
  for (std::size_t k = 0; k < hp.mass.size(); ++k) out.density[k] = hp.mass[k] / area;
  return out;
}

OptimizeResult optimize_params(const Hamiltonian& h, std::uint64_t seed, TrialParams start,
                               const OptimizeOptions& opt) {
  h.validate();
  start.validate();
  if (opt.grid_points < 3 || opt.max_passes < 1 || opt.samples_per_eval < 1) {
    throw InvalidArgument("optimize_params: need grid_points >= 3, max_passes >= 1, samples_per_eval >= 1");
  }
  VmcOptions vo;
  vo.n_samples = opt.samples_per_eval;
  vo.n_walkers = 2;

  struct Eval {
    double objective;
    double residual;
  };
  // Samples drawn from |psi_ref|^2 are reused for every candidate with
  // weights |psi / psi_ref|^2, so neighbouring candidates share their noise.
  struct Sample {
    WalkerConfig cfg;
    double prob;
  };
  std::vector<Sample> pool;
  auto resample = [&](const TrialParams& ref) {
    pool.clear();
    const TrialWavefunction psi(ref, h.potential);
    walk(psi, h.potential.beta, vo, seed,
         [&](const WalkerConfig& cfg) { pool.push_back({cfg, std::norm(psi.amplitude(cfg))}); });
  };
  auto evaluate = [&](const TrialParams& tp) {
    const TrialWavefunction psi(tp, h.potential);
    double sw = 0.0, se = 0.0, sz = 0.0;
    for (const Sample& smp : pool) {
      if (!(smp.prob > 0.0)) continue;
      const LocalValues lv = psi.local(smp.cfg, h);
      if (lv.node) continue;
      const double wgt = std::norm(psi.amplitude(smp.cfg)) / smp.prob;
      sw += wgt;
      se += wgt * lv.energy;
      sz += wgt * lv.sigma_z2;
    }
    if (!(sw > 0.0)) return Eval{std::numeric_limits<double>::infinity(), 0.0};
    const double sz2 = sz / sw;
    return Eval{se / sw + tp.lagrange_lambda * (sz2 - 1.0), std::abs(sz2 - 1.0)};
  };

  OptimizeResult res;
  res.params = start;
  resample(start);
  Eval cur = evaluate(start);
  res.objective_at_start = cur.objective;

  struct Coord {
    double TrialParams::*field;
    double hi;
  };
  const std::array<Coord, 2> coords{Coord{&TrialParams::jastrow_b, opt.jastrow_max},
                                    Coord{&TrialParams::spin_leak, opt.spin_leak_max}};
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

  double previous = 0.0;
  for (std::size_t pass = 0; pass < opt.max_passes; ++pass) {
    for (const Coord& co : coords) {
      resample(res.params);
      cur = evaluate(res.params);
      auto at = [&](double v) {
        TrialParams tp = res.params;
        tp.*(co.field) = v;
        return evaluate(tp);
      };
      // Grid bracket.
      const double step = co.hi / static_cast<double>(opt.grid_points - 1);
      std::size_t best_k = 0;
      Eval best = at(0.0);
      for (std::size_t k = 1; k < opt.grid_points; ++k) {
        const Eval e = at(step * static_cast<double>(k));
        if (e.objective < best.objective) {
          best = e;
          best_k = k;
        }
      }
      double best_v = step * static_cast<double>(best_k);
      // Golden section inside the neighbouring grid cells.
      double a = std::max(0.0, best_v - step), b = std::min(co.hi, best_v + step);
      double c = b - golden * (b - a), d = a + golden * (b - a);
      Eval fc = at(c), fd = at(d);
      while (b - a > opt.golden_tol * co.hi) {
        if (fc.objective < fd.objective) {
          b = d;
          d = c;
          fd = fc;
          c = b - golden * (b - a);
          fc = at(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + golden * (b - a);
          fd = at(d);
        }
      }
      if (fc.objective < best.objective) {
        best = fc;
        best_v = c;
      }
      if (fd.objective < best.objective) {
        best = fd;
        best_v = d;
      }
      if (best.objective <= cur.objective) {
        res.params.*(co.field) = best_v;
        cur = best;
      }
    }
    resample(res.params);
    cur = evaluate(res.params);
    res.objective_history.push_back(cur.objective);
    res.constraint_residual.push_back(cur.residual);
    res.objective = cur.objective;
    res.passes = pass + 1;
    if (pass > 0 && std::abs(cur.objective - previous) <= opt.rel_tol * std::max(std::abs(previous), 1e-12)) {
      res.converged = true;
      break;
    }
    previous = cur.objective;
    res.params.lagrange_lambda *= 2.0;
  }
  return res;
}

}  // namespace soqdot::vmc
