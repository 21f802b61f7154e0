#pragma once

#include <map>
#include <string>

#include "tvpf/mesh.hpp"

namespace tvpf {

// Logistic source amplitude used by the advection benchmark:
// 2 / (1 + exp(-0.5 (t - 7.5))) + 0.1
double theta_logistic(double t);

// Sinusoidal source amplitude used by the heat benchmark: 0.5 sin(pi t / 6) + 0.5
double theta_sine(double t);

// exp(-(x - 2)^2 / 0.25)
double initial_advection(double x);

// 3x - x^2
double initial_heat(double x);

// exp(-(x - mu)^2 / gamma^2); gamma == 0 is rejected.
double gaussian_source_profile(double x, double mu, double gamma);

enum class ProblemKind { Advection, Heat };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

// A function picked by name plus its real parameters, e.g.
// {"logistic", {{"amplitude", 2}, {"rate", 0.5}, {"midpoint", 7.5}, {"offset", 0.1}}}.
// Missing parameters take the benchmark defaults.
struct NamedFunction {
  std::string name;
  std::map<std::string, double> params;

  bool operator==(const NamedFunction&) const = default;
};

// Known theta names: logistic, sine, constant.
ScalarFunction make_theta_function(const NamedFunction& spec);
// Known initial-condition names: gaussian, quadratic, zero.
ScalarFunction make_initial_condition(const NamedFunction& spec);

// One of the two benchmark PDE families together with its ground truth.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::Advection;
  double length = 0.0;
  double final_time = 0.0;
  double coefficient = 0.0;  // velocity v (advection) or diffusivity alpha (heat)
  NamedFunction initial_condition;
  NamedFunction theta_truth;
  double source_mu = 0.0;     // heat only
  double source_gamma = 1.0;  // heat only

  double theta(double t) const;
  double initial(double x) const;
  // s(x); identically 1 for advection.
  double source(double x) const;

  // Throws ValidationError on a broken invariant.
  void validate() const;

  bool operator==(const ProblemSpec&) const = default;
};

ProblemSpec advection_logistic_problem();
ProblemSpec heat_sine_problem();

LinearOdeSystem assemble(const ProblemSpec& problem, const SpatialMesh& mesh);

}  // namespace tvpf
