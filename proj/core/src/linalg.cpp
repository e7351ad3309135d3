#include "soqdot/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "soqdot/error.hpp"

namespace soqdot::linalg {

namespace {

void require_finite(const Eigen::MatrixXcd& m) {
  if (!m.allFinite()) {
    throw InvalidArgument("ComplexMatrix: non-finite entry");
  }
}

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim)
    : m_(Eigen::MatrixXcd::Zero(static_cast<Index>(dim), static_cast<Index>(dim))) {}

ComplexMatrix::ComplexMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    std::ostringstream os;
    os << "ComplexMatrix: not square (" << m_.rows() << "x" << m_.cols() << ")";
    throw InvalidArgument(os.str());
  }
  require_finite(m_);
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  const auto n = static_cast<Index>(rows.size());
  m_.resize(n, n);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != n) {
      throw InvalidArgument("ComplexMatrix: ragged initializer");
    }
    Index j = 0;
    for (const auto& v : row) m_(i, j++) = v;
    ++i;
  }
  require_finite(m_);
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  return ComplexMatrix(Eigen::MatrixXcd::Identity(static_cast<Index>(dim), static_cast<Index>(dim)));
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Index>(values.size()),
                                              static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Index>(i), static_cast<Index>(i)) = values[i];
  }
  return ComplexMatrix(std::move(m));
}

ComplexMatrix ComplexMatrix::outer(const Eigen::VectorXcd& ket, const Eigen::VectorXcd& bra) {
  if (ket.size() != bra.size()) throw InvalidArgument("outer: length mismatch");
  return ComplexMatrix(Eigen::MatrixXcd(ket * bra.adjoint()));
}

ComplexMatrix ComplexMatrix::adjoint() const { return ComplexMatrix(Eigen::MatrixXcd(m_.adjoint())); }

ComplexMatrix ComplexMatrix::conjugate() const {
  return ComplexMatrix(Eigen::MatrixXcd(m_.conjugate()));
}

double ComplexMatrix::max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

double ComplexMatrix::hermiticity_defect() const {
  if (m_.size() == 0) return 0.0;
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("ComplexMatrix +: dimension mismatch");
  return ComplexMatrix(Eigen::MatrixXcd(a.m_ + b.m_));
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("ComplexMatrix -: dimension mismatch");
  return ComplexMatrix(Eigen::MatrixXcd(a.m_ - b.m_));
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("ComplexMatrix *: dimension mismatch");
  return ComplexMatrix(Eigen::MatrixXcd(a.m_ * b.m_));
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  return ComplexMatrix(Eigen::MatrixXcd(s * a.m_));
}

HermitianEig hermitian_eig(const ComplexMatrix& a) {
  const double defect = a.hermiticity_defect();
  if (defect > kHermitianTol) {
    std::ostringstream os;
    os << "hermitian_eig: matrix is not Hermitian (max |A_ij - conj(A_ji)| = " << defect << ")";
    throw InvalidArgument(os.str());
  }
  const Eigen::MatrixXcd sym = 0.5 * (a.mat() + a.mat().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("hermitian_eig: eigensolver did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return HermitianEig{std::vector<double>(ev.data(), ev.data() + ev.size()),
                      ComplexMatrix(solver.eigenvectors())};
}

ComplexMatrix matrix_function(const ComplexMatrix& a, const std::function<double(double)>& f) {
  const HermitianEig eig = hermitian_eig(a);
  const auto n = static_cast<Index>(a.dim());
  Eigen::VectorXd fv(n);
  for (Index i = 0; i < n; ++i) {
    const double lambda = eig.eigenvalues[static_cast<std::size_t>(i)];
    const double y = f(lambda);
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os << "matrix_function: function undefined at eigenvalue " << lambda;
      throw DomainError(os.str());
    }
    fv(i) = y;
  }
  const Eigen::MatrixXcd& v = eig.eigenvectors.mat();
  Eigen::MatrixXcd out = v * fv.asDiagonal() * v.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return ComplexMatrix(std::move(out));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto na = static_cast<Index>(a.dim());
  const auto nb = static_cast<Index>(b.dim());
  Eigen::MatrixXcd out(na * nb, na * nb);
  for (Index i = 0; i < na; ++i) {
    for (Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a.mat()(i, j) * b.mat();
    }
  }
  return ComplexMatrix(std::move(out));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> shape,
                            std::span<const std::size_t> keep) {
  const std::size_t total = product(shape);
  if (total != m.dim()) {
    std::ostringstream os;
    os << "partial_trace: shape product " << total << " does not match dimension " << m.dim();
    throw InvalidArgument(os.str());
  }
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  std::vector<bool> kept(shape.size(), false);
  for (std::size_t k : keep) {
    if (k >= shape.size() || kept[k]) throw InvalidArgument("partial_trace: bad keep index");
    kept[k] = true;
  }

  // Strides of the full index and of the kept/traced sub-indices.
  const std::size_t nf = shape.size();
  std::vector<std::size_t> stride(nf);
  {
    std::size_t s = 1;
    for (std::size_t f = nf; f-- > 0;) {
      stride[f] = s;
      s *= shape[f];
    }
  }
  std::vector<std::size_t> kept_f, traced_f;
  for (std::size_t f = 0; f < nf; ++f) (kept[f] ? kept_f : traced_f).push_back(f);

  auto offsets = [&](const std::vector<std::size_t>& factors) {
    std::size_t count = 1;
    for (std::size_t f : factors) count *= shape[f];
    std::vector<std::size_t> off(count, 0);
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t rem = c;
      std::size_t o = 0;
      for (std::size_t idx = factors.size(); idx-- > 0;) {
        const std::size_t f = factors[idx];
        o += (rem % shape[f]) * stride[f];
        rem /= shape[f];
      }
      off[c] = o;
    }
    return off;
  };
  const auto kept_off = offsets(kept_f);
  const auto traced_off = offsets(traced_f);

  const auto nk = static_cast<Index>(kept_off.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nk, nk);
  const Eigen::MatrixXcd& a = m.mat();
  for (Index i = 0; i < nk; ++i) {
    for (Index j = 0; j < nk; ++j) {
      Complex acc = 0.0;
      for (std::size_t t : traced_off) {
        acc += a(static_cast<Index>(kept_off[static_cast<std::size_t>(i)] + t),
                 static_cast<Index>(kept_off[static_cast<std::size_t>(j)] + t));
      }
      out(i, j) = acc;
    }
  }
  return ComplexMatrix(std::move(out));
}

double trace_norm(const ComplexMatrix& m) {
  if (m.dim() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.mat());
  return svd.singularValues().sum();
}

TridiagonalEig tridiagonal_lowest(std::span<const double> diag, std::span<const double> offdiag,
                                  std::size_t count) {
  const auto n = static_cast<Index>(diag.size());
  if (offdiag.size() + 1 != diag.size()) {
    throw InvalidArgument("tridiagonal_lowest: off-diagonal must have n-1 entries");
  }
  if (count > diag.size()) throw InvalidArgument("tridiagonal_lowest: count exceeds dimension");
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(offdiag.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericError("tridiagonal_lowest: eigensolver did not converge");
  }
  TridiagonalEig out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + static_cast<Index>(count));
  out.eigenvectors = solver.eigenvectors().leftCols(static_cast<Index>(count));
  return out;
}

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag,
                                            std::span<const double> offdiag) {
  const auto n = static_cast<Index>(diag.size());
  if (offdiag.size() + 1 != diag.size()) {
    throw InvalidArgument("tridiagonal_eigenvalues: off-diagonal must have n-1 entries");
  }
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(offdiag.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("tridiagonal_eigenvalues: eigensolver did not converge");
  }
  return {solver.eigenvalues().data(), solver.eigenvalues().data() + n};
}

}  // namespace soqdot::linalg
