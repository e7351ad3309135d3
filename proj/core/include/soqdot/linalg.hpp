#pragma once

// Dense complex linear algebra used by every other module: Hermitian
// eigendecomposition, spectral matrix functions, tensor products and
// partial traces.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace soqdot::linalg {

using Complex = std::complex<double>;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-9;

/// Square complex matrix with finite entries.
///
/// Thin value wrapper over Eigen::MatrixXcd; construction validates shape and
/// finiteness so downstream code can rely on both.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  explicit ComplexMatrix(Eigen::MatrixXcd m);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);
  static ComplexMatrix outer(const Eigen::VectorXcd& ket, const Eigen::VectorXcd& bra);

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  [[nodiscard]] const Eigen::MatrixXcd& mat() const { return m_; }

  Complex operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Index>(i), static_cast<Index>(j));
  }

  [[nodiscard]] ComplexMatrix adjoint() const;
  [[nodiscard]] ComplexMatrix conjugate() const;
  [[nodiscard]] Complex trace() const { return m_.trace(); }
  [[nodiscard]] double max_abs() const;
  /// Largest |A_ij - conj(A_ji)|.
  [[nodiscard]] double hermiticity_defect() const;

  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator*(Complex s, const ComplexMatrix& a);

 private:
  Eigen::MatrixXcd m_;
};

struct HermitianEig {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns
};

/// Eigendecomposition of a Hermitian matrix. Inputs within kHermitianTol of
/// Hermitian are symmetrized first; anything further off is rejected.
HermitianEig hermitian_eig(const ComplexMatrix& a);

/// V diag(f(lambda)) V^dagger for Hermitian `a`. Throws DomainError if `f`
/// returns a non-finite value at any eigenvalue.
ComplexMatrix matrix_function(const ComplexMatrix& a, const std::function<double(double)>& f);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace out every tensor factor not listed in `keep`. `shape` lists the
/// factor dimensions (row-major ordering, first factor slowest).
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> shape,
                            std::span<const std::size_t> keep);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

/// Lowest `count` eigenpairs of the real symmetric tridiagonal matrix with the
/// given diagonal and sub-diagonal. Eigenvector columns are Euclidean-normalized.
struct TridiagonalEig {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenvectors;
};
TridiagonalEig tridiagonal_lowest(std::span<const double> diag, std::span<const double> offdiag,
                                  std::size_t count);

/// Eigenvalues only (all of them, ascending).
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag,
                                            std::span<const double> offdiag);

}  // namespace soqdot::linalg
