#include "tvpf/models.hpp"

#include <cmath>
#include <numbers>

#include "tvpf/error.hpp"

namespace tvpf {

double theta_logistic(double t) {
  return 2.0 / (1.0 + std::exp(-0.5 * (t - 7.5))) + 0.1;
}

double theta_sine(double t) {
  return 0.5 * std::sin(std::numbers::pi * t / 6.0) + 0.5;
}

double initial_advection(double x) {
  const double r = x - 2.0;
  return std::exp(-r * r / 0.25);
}

double initial_heat(double x) { return 3.0 * x - x * x; }

double gaussian_source_profile(double x, double mu, double gamma) {
  if (gamma == 0.0) throw ValidationError("source width gamma must be nonzero");
  const double r = x - mu;
  return std::exp(-r * r / (gamma * gamma));
}

std::string to_string(ProblemKind kind) {
  return kind == ProblemKind::Advection ? "advection" : "heat";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "advection") return ProblemKind::Advection;
  if (name == "heat") return ProblemKind::Heat;
  throw ValidationError("problem.kind: unknown kind '" + name +
                        "' (expected advection or heat)");
}

namespace {

double param(const NamedFunction& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

}  // namespace

ScalarFunction make_theta_function(const NamedFunction& spec) {
  if (spec.name == "logistic") {
    const double amplitude = param(spec, "amplitude", 2.0);
    const double rate = param(spec, "rate", 0.5);
    const double midpoint = param(spec, "midpoint", 7.5);
    const double offset = param(spec, "offset", 0.1);
    return [=](double t) {
      return amplitude / (1.0 + std::exp(-rate * (t - midpoint))) + offset;
    };
  }
  if (spec.name == "sine") {
    const double amplitude = param(spec, "amplitude", 0.5);
    const double period = param(spec, "period", 12.0);
    const double offset = param(spec, "offset", 0.5);
    if (period == 0.0) throw ValidationError("theta sine period must be nonzero");
    return [=](double t) {
      return amplitude * std::sin(2.0 * std::numbers::pi * t / period) + offset;
    };
  }
  if (spec.name == "constant") {
    const double value = param(spec, "value", 0.0);
    return [=](double) { return value; };
  }
  throw ValidationError("problem.theta_truth: unknown function '" + spec.name +
                        "' (expected logistic, sine or constant)");
}

ScalarFunction make_initial_condition(const NamedFunction& spec) {
  if (spec.name == "gaussian") {
    const double mu = param(spec, "mu", 2.0);
    const double gamma = param(spec, "gamma", 0.5);
    if (gamma == 0.0) throw ValidationError("initial gaussian gamma must be nonzero");
    return [=](double x) {
      const double r = x - mu;
      return std::exp(-r * r / (gamma * gamma));
    };
  }
  if (spec.name == "quadratic") {
    const double linear = param(spec, "linear", 3.0);
    const double quadratic = param(spec, "quadratic", -1.0);
    return [=](double x) { return linear * x + quadratic * x * x; };
  }
  if (spec.name == "zero") {
    return [](double) { return 0.0; };
  }
  throw ValidationError("problem.initial_condition: unknown function '" +
                        spec.name + "' (expected gaussian, quadratic or zero)");
}

double ProblemSpec::theta(double t) const { return make_theta_function(theta_truth)(t); }

double ProblemSpec::initial(double x) const {
  return make_initial_condition(initial_condition)(x);
}

double ProblemSpec::source(double x) const {
  if (kind == ProblemKind::Advection) return 1.0;
  return gaussian_source_profile(x, source_mu, source_gamma);
}

void ProblemSpec::validate() const {
  if (!(length > 0.0)) throw ValidationError("problem.L must be positive");
  if (!(final_time > 0.0)) throw ValidationError("problem.T_final must be positive");
  if (!std::isfinite(coefficient)) {
    throw ValidationError("problem coefficient must be finite");
  }
  if (kind == ProblemKind::Heat) {
    if (!(coefficient > 0.0)) throw ValidationError("problem.alpha must be positive");
    if (source_gamma == 0.0) throw ValidationError("problem.source.gamma must be nonzero");
  }
  make_theta_function(theta_truth);
  const auto u0 = make_initial_condition(initial_condition);
  if (kind == ProblemKind::Heat) {
    if (std::abs(u0(0.0)) > 1e-12 || std::abs(u0(length)) > 1e-12) {
      throw ValidationError(
          "problem.initial_condition must vanish at both Dirichlet ends");
    }
  }
}

ProblemSpec advection_logistic_problem() {
  ProblemSpec p;
  p.kind = ProblemKind::Advection;
  p.length = 5.0;
  p.final_time = 15.0;
  p.coefficient = 0.2;
  p.initial_condition = {"gaussian", {{"mu", 2.0}, {"gamma", 0.5}}};
  p.theta_truth = {"logistic",
                   {{"amplitude", 2.0}, {"rate", 0.5}, {"midpoint", 7.5}, {"offset", 0.1}}};
  return p;
}

ProblemSpec heat_sine_problem() {
  ProblemSpec p;
  p.kind = ProblemKind::Heat;
  p.length = 3.0;
  p.final_time = 50.0;
  p.coefficient = 0.2;
  p.initial_condition = {"quadratic", {{"linear", 3.0}, {"quadratic", -1.0}}};
  p.theta_truth = {"sine", {{"amplitude", 0.5}, {"period", 12.0}, {"offset", 0.5}}};
  p.source_mu = 1.5;
  p.source_gamma = 1.0;
  return p;
}

LinearOdeSystem assemble(const ProblemSpec& problem, const SpatialMesh& mesh) {
  if (problem.kind == ProblemKind::Advection) {
    return assemble_advection(mesh, problem.coefficient);
  }
  const double mu = problem.source_mu;
  const double gamma = problem.source_gamma;
  return assemble_heat(mesh, problem.coefficient, [mu, gamma](double x) {
    return gaussian_source_profile(x, mu, gamma);
  });
}

}  // namespace tvpf
