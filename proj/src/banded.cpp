#include "tvpf/banded.hpp"

#include <cassert>
#include <cmath>

#include "tvpf/error.hpp"

namespace tvpf {

BandedMatrix::BandedMatrix(std::size_t dim)
    : lower_(dim, 0.0), diag_(dim, 0.0), upper_(dim, 0.0) {}

double BandedMatrix::operator()(std::size_t row, std::size_t col) const {
  const std::size_t n = dim();
  double value = 0.0;
  if (row == col) value += diag_[row];
  if (col + 1 == row) value += lower_[row];
  if (row + 1 == col) value += upper_[row];
  if (n >= 2 && row == 0 && col == n - 1) value += top_right_;
  if (n >= 2 && row == n - 1 && col == 0) value += bottom_left_;
  return value;
}

void BandedMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = dim();
  assert(x.size() == n && y.size() == n);
  if (n == 0) return;
  if (n == 1) {
    y[0] = diag_[0] * x[0];
    return;
  }
  y[0] = diag_[0] * x[0] + upper_[0] * x[1] + top_right_ * x[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    y[i] = lower_[i] * x[i - 1] + diag_[i] * x[i] + upper_[i] * x[i + 1];
  }
  y[n - 1] = lower_[n - 1] * x[n - 2] + diag_[n - 1] * x[n - 1] +
             bottom_left_ * x[0];
}

BandedMatrix BandedMatrix::shifted(double alpha, double beta) const {
  BandedMatrix out(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    out.lower_[i] = beta * lower_[i];
    out.diag_[i] = alpha + beta * diag_[i];
    out.upper_[i] = beta * upper_[i];
  }
  out.top_right_ = beta * top_right_;
  out.bottom_left_ = beta * bottom_left_;
  return out;
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd dense(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      dense(r, c) = (*this)(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
  }
  return dense;
}

BandedSolver::BandedSolver(const BandedMatrix& matrix) {
  const std::size_t n = matrix.dim();
  if (n == 0) return;
  if (n == 1 && matrix.has_corners()) {
    throw SolverError("corner entries require dimension >= 2");
  }

  std::vector<double> diag(n);
  lower_.resize(n);
  std::vector<double> upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower_[i] = matrix.lower(i);
    diag[i] = matrix.diag(i);
    upper[i] = matrix.upper(i);
  }
  lower_[0] = 0.0;
  upper[n - 1] = 0.0;

  cyclic_ = matrix.has_corners();
  if (cyclic_) {
    // A = T + u v^T with u = (gamma, 0, ..., 0, bottom_left) and
    // v = (1, 0, ..., 0, top_right / gamma).
    gamma_ = diag[0] != 0.0 ? -diag[0] : -1.0;
    top_right_ = matrix.top_right();
    diag[0] -= gamma_;
    diag[n - 1] -= matrix.bottom_left() * matrix.top_right() / gamma_;
  }

  inv_pivot_.resize(n);
  upper_star_.resize(n);
  double pivot = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) pivot = diag[i] - lower_[i] * upper_star_[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw SolverError("zero pivot in banded factorization at row " +
                        std::to_string(i));
    }
    inv_pivot_[i] = 1.0 / pivot;
    upper_star_[i] = upper[i] * inv_pivot_[i];
  }

  if (cyclic_) {
    z_.assign(n, 0.0);
    z_[0] = gamma_;
    z_[n - 1] += matrix.bottom_left();
    thomas(z_);
    z_denominator_ = 1.0 + z_[0] + top_right_ * z_[n - 1] / gamma_;
    if (z_denominator_ == 0.0 || !std::isfinite(z_denominator_)) {
      throw SolverError("singular rank-one correction in cyclic factorization");
    }
  }
}

void BandedSolver::thomas(std::span<double> rhs) const {
  const std::size_t n = inv_pivot_.size();
  rhs[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) {
    rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] -= upper_star_[i] * rhs[i + 1];
  }
}

void BandedSolver::solve(std::span<double> rhs) const {
  const std::size_t n = inv_pivot_.size();
  assert(rhs.size() == n);
  if (n == 0) return;
  thomas(rhs);
  if (!cyclic_) return;
  const double factor =
      (rhs[0] + top_right_ * rhs[n - 1] / gamma_) / z_denominator_;
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= factor * z_[i];
}

}  // namespace tvpf
