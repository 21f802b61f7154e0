#include "tvpf/integrate.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "tvpf/error.hpp"

namespace tvpf {

void IntegratorConfig::validate() const {
  if (substeps < 1) {
    throw ValidationError("integrator substeps must be >= 1, got " +
                          std::to_string(substeps));
  }
}

TrapezoidalStepper::TrapezoidalStepper(const LinearOdeSystem& system,
                                       double interval, IntegratorConfig cfg)
    : interval_(interval), substeps_(cfg.substeps) {
  cfg.validate();
  if (!(interval > 0.0) || !std::isfinite(interval)) {
    throw ValidationError("integration interval must be positive");
  }
  if (static_cast<std::size_t>(system.loading.size()) != system.dim()) {
    throw ValidationError("loading vector does not match system dimension");
  }
  dt_ = interval / substeps_;
  explicit_part_ = system.matrix.shifted(1.0, 0.5 * dt_);
  implicit_solver_ = BandedSolver(system.matrix.shifted(1.0, -0.5 * dt_));
  loading_ = system.loading;
}

void TrapezoidalStepper::substep_once(std::span<double> u,
                                      std::span<double> scratch,
                                      double theta) const {
  explicit_part_.apply(u, scratch);
  const double source = dt_ * theta;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = scratch[i] + source * loading_[static_cast<Eigen::Index>(i)];
  }
  implicit_solver_.solve(u);
}

void TrapezoidalStepper::advance(std::span<double> u, double theta) const {
  std::vector<double> scratch(u.size());
  for (int k = 0; k < substeps_; ++k) substep_once(u, scratch, theta);
}

void TrapezoidalStepper::advance(std::span<double> u, const ScalarFunction& theta,
                                 double t0) const {
  std::vector<double> scratch(u.size());
  for (int k = 0; k < substeps_; ++k) {
    substep_once(u, scratch, theta(t0 + (k + 0.5) * dt_));
  }
}

namespace {

void check_state(const LinearOdeSystem& system, const Eigen::VectorXd& u,
                 double t0, double t1) {
  if (static_cast<std::size_t>(u.size()) != system.dim()) {
    throw ValidationError("state has dimension " + std::to_string(u.size()) +
                          ", system expects " + std::to_string(system.dim()));
  }
  if (!(t1 > t0)) throw ValidationError("step requires t1 > t0");
}

}  // namespace

Eigen::VectorXd step_constant_theta(const LinearOdeSystem& system,
                                    const Eigen::VectorXd& u, double theta,
                                    double t0, double t1,
                                    const IntegratorConfig& cfg) {
  check_state(system, u, t0, t1);
  const TrapezoidalStepper stepper(system, t1 - t0, cfg);
  Eigen::VectorXd out = u;
  stepper.advance(std::span<double>(out.data(), static_cast<std::size_t>(out.size())),
                  theta);
  return out;
}

Eigen::VectorXd step_varying_theta(const LinearOdeSystem& system,
                                   const Eigen::VectorXd& u,
                                   const ScalarFunction& theta, double t0,
                                   double t1, const IntegratorConfig& cfg) {
  check_state(system, u, t0, t1);
  const TrapezoidalStepper stepper(system, t1 - t0, cfg);
  Eigen::VectorXd out = u;
  stepper.advance(std::span<double>(out.data(), static_cast<std::size_t>(out.size())),
                  theta, t0);
  return out;
}

}  // namespace tvpf
