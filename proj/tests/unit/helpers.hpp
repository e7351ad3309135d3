#pragma once

#include <cstdint>
#include <random>

#include "soqdot/linalg.hpp"

namespace testutil {

using soqdot::linalg::ComplexMatrix;

inline Eigen::MatrixXcd random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  const Eigen::MatrixXcd m = random_matrix(n, rng);
  return ComplexMatrix(Eigen::MatrixXcd((m + m.adjoint()) / 2.0));
}

// Wishart-like: G G^dagger / tr
inline ComplexMatrix random_density(std::size_t n, std::mt19937_64& rng) {
  const Eigen::MatrixXcd g = random_matrix(n, rng);
  Eigen::MatrixXcd r = g * g.adjoint();
  r /= r.trace().real();
  return ComplexMatrix(Eigen::MatrixXcd((r + r.adjoint()) / 2.0));
}

inline Eigen::VectorXcd random_ket(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {g(rng), g(rng)};
  return v.normalized();
}

inline double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
