#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tvpf {

/**
 * Square tridiagonal matrix with two optional wrap-around corner entries:
 * (0, d-1) and (d-1, 0). This covers both the Dirichlet stencils (no corners)
 * and the periodic circulant stencils.
 *
 * For d == 2 the corner positions coincide with the off-diagonals; the corner
 * value is then added to the off-diagonal value.
 */
class BandedMatrix {
 public:
  BandedMatrix() = default;
  explicit BandedMatrix(std::size_t dim);

  std::size_t dim() const noexcept { return diag_.size(); }

  // Row i holds lower(i) at column i-1 (i >= 1) and upper(i) at column i+1
  // (i <= d-2).
  double& lower(std::size_t i) { return lower_[i]; }
  double& diag(std::size_t i) { return diag_[i]; }
  double& upper(std::size_t i) { return upper_[i]; }
  double lower(std::size_t i) const { return lower_[i]; }
  double diag(std::size_t i) const { return diag_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }

  double& top_right() { return top_right_; }
  double& bottom_left() { return bottom_left_; }
  double top_right() const { return top_right_; }
  double bottom_left() const { return bottom_left_; }

  bool has_corners() const noexcept {
    return top_right_ != 0.0 || bottom_left_ != 0.0;
  }

  // Entry lookup; zero outside the stored pattern.
  double operator()(std::size_t row, std::size_t col) const;

  // y = A x
  void apply(std::span<const double> x, std::span<double> y) const;

  // alpha * I + beta * A
  BandedMatrix shifted(double alpha, double beta) const;

  Eigen::MatrixXd to_dense() const;

 private:
  std::vector<double> lower_;
  std::vector<double> diag_;
  std::vector<double> upper_;
  double top_right_ = 0.0;
  double bottom_left_ = 0.0;
};

/**
 * Prefactorized solver for BandedMatrix systems. Plain Thomas elimination when
 * there are no corner entries; otherwise the corners are treated as a rank-one
 * correction (Sherman-Morrison) on top of a modified tridiagonal system, so
 * every solve stays O(d).
 *
 * Immutable after construction; solve() may be called concurrently.
 */
class BandedSolver {
 public:
  BandedSolver() = default;
  // Throws SolverError when a pivot vanishes or the correction is singular.
  explicit BandedSolver(const BandedMatrix& matrix);

  std::size_t dim() const noexcept { return inv_pivot_.size(); }

  // Overwrites rhs with the solution.
  void solve(std::span<double> rhs) const;

 private:
  void thomas(std::span<double> rhs) const;

  std::vector<double> lower_;
  std::vector<double> upper_star_;
  std::vector<double> inv_pivot_;
  // Rank-one correction data (cyclic case only).
  bool cyclic_ = false;
  double gamma_ = 0.0;
  double top_right_ = 0.0;
  std::vector<double> z_;
  double z_denominator_ = 0.0;
};

}  // namespace tvpf
