#include <doctest.h>

#include <vector>

#include "tvpf/banded.hpp"
#include "tvpf/error.hpp"

using namespace tvpf;

namespace {

BandedMatrix random_cyclic(std::size_t d, double diag_shift) {
  BandedMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    m.diag(i) = diag_shift + 0.1 * static_cast<double>(i % 3);
    if (i > 0) m.lower(i) = -0.3 + 0.05 * static_cast<double>(i % 4);
    if (i + 1 < d) m.upper(i) = 0.7 - 0.1 * static_cast<double>(i % 5);
  }
  m.top_right() = 0.4;
  m.bottom_left() = -0.6;
  return m;
}

Eigen::VectorXd solve_with(const BandedMatrix& m, const Eigen::VectorXd& rhs) {
  Eigen::VectorXd x = rhs;
  BandedSolver(m).solve(std::span<double>(x.data(), static_cast<std::size_t>(x.size())));
  return x;
}

}  // namespace

TEST_SUITE("mesh-mol") {

TEST_CASE("banded storage matches dense view") {
  BandedMatrix m = random_cyclic(5, 3.0);
  const Eigen::MatrixXd dense = m.to_dense();
  CHECK(dense(0, 4) == doctest::Approx(0.4));
  CHECK(dense(4, 0) == doctest::Approx(-0.6));
  CHECK(dense(2, 2) == m.diag(2));
  CHECK(dense(2, 1) == m.lower(2));
  CHECK(dense(2, 3) == m.upper(2));
  CHECK(dense(0, 2) == 0.0);
  CHECK(m(4, 0) == dense(4, 0));

  const std::vector<double> x{1, -2, 3, 0.5, -1};
  std::vector<double> y(5);
  m.apply(x, y);
  const Eigen::VectorXd expected = dense * Eigen::Map<const Eigen::VectorXd>(x.data(), 5);
  for (int i = 0; i < 5; ++i) CHECK(y[i] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("shifted returns alpha I + beta A") {
  const BandedMatrix m = random_cyclic(4, 1.0);
  const Eigen::MatrixXd expected = 2.0 * Eigen::MatrixXd::Identity(4, 4) - 0.25 * m.to_dense();
  CHECK((m.shifted(2.0, -0.25).to_dense() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("tridiagonal solve matches a dense solve") {
  BandedMatrix m(6);
  for (std::size_t i = 0; i < 6; ++i) {
    m.diag(i) = 4.0;
    if (i > 0) m.lower(i) = -1.0;
    if (i < 5) m.upper(i) = -1.5;
  }
  Eigen::VectorXd rhs(6);
  rhs << 1, 2, 3, 4, 5, 6;
  const Eigen::VectorXd x = solve_with(m, rhs);
  const Eigen::VectorXd ref = m.to_dense().lu().solve(rhs);
  CHECK((x - ref).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("cyclic solve matches a dense solve") {
  for (std::size_t d : {2u, 3u, 7u, 50u}) {
    CAPTURE(d);
    const BandedMatrix m = random_cyclic(d, 3.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(d), -1.0, 2.0);
    const Eigen::VectorXd x = solve_with(m, rhs);
    const Eigen::VectorXd ref = m.to_dense().lu().solve(rhs);
    CHECK((x - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("one-dimensional system") {
  BandedMatrix m(1);
  m.diag(0) = 4.0;
  Eigen::VectorXd rhs(1);
  rhs << 2.0;
  CHECK(solve_with(m, rhs)[0] == doctest::Approx(0.5));
}

TEST_CASE("singular matrix is reported") {
  BandedMatrix m(3);
  CHECK_THROWS_AS(BandedSolver{m}, SolverError);
}

}
