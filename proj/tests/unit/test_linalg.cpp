#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "soqdot/error.hpp"
#include "unit/helpers.hpp"

using namespace soqdot;
using namespace soqdot::linalg;
using testutil::max_diff;

TEST_CASE("hermitian_eig reconstructs a 50x50 random Hermitian matrix") {
  std::mt19937_64 rng(11);
  const auto a = testutil::random_hermitian(50, rng);
  const auto eig = hermitian_eig(a);
  REQUIRE(eig.eigenvalues.size() == 50);
  for (std::size_t k = 1; k < 50; ++k) CHECK(eig.eigenvalues[k] >= eig.eigenvalues[k - 1]);
  Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(eig.eigenvalues.data(), 50);
  const auto& v = eig.eigenvectors.mat();
  const Eigen::MatrixXcd rec = v * lam.cast<Complex>().asDiagonal() * v.adjoint();
  CHECK(max_diff(rec, a.mat()) < 1e-10);
  CHECK(max_diff(v.adjoint() * v, Eigen::MatrixXcd::Identity(50, 50)) < 1e-10);
}

TEST_CASE("hermitian_eig rejects clearly non-Hermitian input") {
  ComplexMatrix a{{1.0, 2.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(hermitian_eig(a), InvalidArgument);
}

TEST_CASE("ComplexMatrix rejects non-finite entries and ragged rows") {
  CHECK_THROWS_AS((ComplexMatrix{{1.0, NAN}, {0.0, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS((ComplexMatrix{{1.0, 0.0}, {0.0}}), InvalidArgument);
}

TEST_CASE("matrix_function sqrt squares back to a random PSD matrix") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rho = testutil::random_density(8, rng);
    const auto root = matrix_function(rho, [](double x) { return std::sqrt(std::max(x, 0.0)); });
    CHECK(max_diff((root * root).mat(), rho.mat()) < 1e-9);
  }
}

TEST_CASE("matrix_function reports a domain error for log of zero") {
  const std::vector<double> d{1.0, 0.0};
  const auto m = ComplexMatrix::diagonal(d);
  CHECK_THROWS_AS(matrix_function(m, [](double x) { return std::log(x); }), DomainError);
}

TEST_CASE("kron: trace factorizes and dimensions multiply") {
  std::mt19937_64 rng(13);
  const ComplexMatrix a(testutil::random_matrix(3, rng));
  const ComplexMatrix b(testutil::random_matrix(3, rng));
  const auto k = kron(a, b);
  CHECK(k.dim() == 9);
  CHECK(std::abs(k.trace() - a.trace() * b.trace()) < 1e-12);
  CHECK(std::abs(k(4, 8) - a(1, 2) * b(1, 2)) < 1e-14);
}

TEST_CASE("partial_trace composes on a (2,2,3) state") {
  std::mt19937_64 rng(14);
  const auto rho = testutil::random_density(12, rng);
  const std::vector<std::size_t> shape{2, 2, 3};
  const std::vector<std::size_t> keep01{0, 1};
  const std::vector<std::size_t> keep0{0};
  const auto step1 = partial_trace(rho, shape, keep01);
  const std::vector<std::size_t> shape2{2, 2};
  const auto step2 = partial_trace(step1, shape2, keep0);
  const auto direct = partial_trace(rho, shape, keep0);
  CHECK(max_diff(step2.mat(), direct.mat()) < 1e-13);
  CHECK(std::abs(direct.trace() - Complex(1.0)) < 1e-13);
}

TEST_CASE("partial_trace of a product state returns the factor") {
  std::mt19937_64 rng(15);
  const auto a = testutil::random_density(2, rng);
  const auto b = testutil::random_density(3, rng);
  const std::vector<std::size_t> shape{2, 3};
  const std::vector<std::size_t> keep1{1};
  CHECK(max_diff(partial_trace(kron(a, b), shape, keep1).mat(), b.mat()) < 1e-13);
}

TEST_CASE("partial_trace validates its arguments") {
  const auto id = ComplexMatrix::identity(4);
  const std::vector<std::size_t> shape{2, 3};
  const std::vector<std::size_t> keep{0};
  CHECK_THROWS_AS(partial_trace(id, shape, keep), InvalidArgument);
  const std::vector<std::size_t> good{2, 2};
  const std::vector<std::size_t> bad{5};
  CHECK_THROWS_AS(partial_trace(id, good, bad), InvalidArgument);
}

TEST_CASE("trace_norm equals the sum of |eigenvalues| for Hermitian input") {
  std::mt19937_64 rng(16);
  const auto a = testutil::random_hermitian(20, rng);
  double s = 0.0;
  for (double l : hermitian_eig(a).eigenvalues) s += std::abs(l);
  CHECK(std::abs(trace_norm(a) - s) < 1e-10);
}

TEST_CASE("tridiagonal solvers agree with the discrete Laplacian spectrum") {
  const std::size_t n = 200;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  const auto all = tridiagonal_eigenvalues(d, e);
  const auto low = tridiagonal_lowest(d, e, 5);
  for (std::size_t k = 0; k < 5; ++k) {
    const double exact = 2.0 - 2.0 * std::cos(std::numbers::pi * double(k + 1) / double(n + 1));
    CHECK(all[k] == doctest::Approx(exact).epsilon(1e-12));
    CHECK(low.eigenvalues[k] == doctest::Approx(exact).epsilon(1e-12));
    CHECK(low.eigenvectors.col(Eigen::Index(k)).norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(tridiagonal_lowest(d, std::vector<double>(3, 0.0), 2), InvalidArgument);
}
