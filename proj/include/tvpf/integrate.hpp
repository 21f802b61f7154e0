#pragma once

#include <span>

#include <Eigen/Dense>

#include "tvpf/banded.hpp"
#include "tvpf/mesh.hpp"

namespace tvpf {

// Implicit trapezoidal (Crank-Nicolson) is the only scheme.
struct IntegratorConfig {
  int substeps = 4;  // K per observation interval

  void validate() const;

  bool operator==(const IntegratorConfig&) const = default;
};

/**
 * Advances du/dt = A u + theta b over one interval of fixed length with K
 * trapezoidal substeps:
 *
 *   (I - dt/2 A) u_{k+1} = (I + dt/2 A) u_k + dt theta b,   dt = interval / K.
 *
 * The factorization of (I - dt/2 A) is computed once here and shared by every
 * call, so one stepper serves a whole particle ensemble. Immutable after
 * construction and safe to use from several threads.
 */
class TrapezoidalStepper {
 public:
  TrapezoidalStepper(const LinearOdeSystem& system, double interval,
                     IntegratorConfig cfg);

  double interval() const noexcept { return interval_; }
  double substep() const noexcept { return dt_; }
  int substeps() const noexcept { return substeps_; }
  std::size_t dim() const noexcept { return explicit_part_.dim(); }

  // theta held fixed over the interval.
  void advance(std::span<double> u, double theta) const;

  // theta sampled at each substep midpoint; t0 is the interval start.
  void advance(std::span<double> u, const ScalarFunction& theta, double t0) const;

 private:
  void substep_once(std::span<double> u, std::span<double> scratch,
                    double theta) const;

  double interval_;
  int substeps_;
  double dt_;
  BandedMatrix explicit_part_;  // I + dt/2 A
  Eigen::VectorXd loading_;
  BandedSolver implicit_solver_;  // (I - dt/2 A)^{-1}
};

Eigen::VectorXd step_constant_theta(const LinearOdeSystem& system,
                                    const Eigen::VectorXd& u, double theta,
                                    double t0, double t1,
                                    const IntegratorConfig& cfg);

Eigen::VectorXd step_varying_theta(const LinearOdeSystem& system,
                                   const Eigen::VectorXd& u,
                                   const ScalarFunction& theta, double t0,
                                   double t1, const IntegratorConfig& cfg);

}  // namespace tvpf
