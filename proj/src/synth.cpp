#include "tvpf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "tvpf/error.hpp"
#include "tvpf/rng.hpp"

namespace tvpf {

void ObservationSchedule::validate(std::size_t state_dim) const {
  if (state_indices.empty()) throw ValidationError("no observed locations");
  if (locations.size() != state_indices.size()) {
    throw ValidationError("observed locations and indices differ in length");
  }
  for (std::size_t k = 0; k < state_indices.size(); ++k) {
    if (state_indices[k] >= state_dim) {
      throw ValidationError("observed index " + std::to_string(state_indices[k]) +
                            " outside state of dimension " +
                            std::to_string(state_dim));
    }
    if (k > 0 && state_indices[k] <= state_indices[k - 1]) {
      throw ValidationError("observed locations must be strictly increasing");
    }
  }
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double prev = j == 0 ? 0.0 : times[j - 1];
    if (!(times[j] > prev)) {
      throw ValidationError("observation times must be positive and strictly increasing");
    }
  }
}

ObservationSchedule make_schedule(const SpatialMesh& mesh,
                                  const LinearOdeSystem& system,
                                  std::span<const double> locations,
                                  double interval, double final_time) {
  if (!(interval > 0.0)) throw ValidationError("observation.dt_obs must be positive");
  const double ratio = final_time / interval;
  const double count = std::round(ratio);
  if (count < 1.0 || std::abs(ratio - count) > 1e-9 * std::max(1.0, ratio)) {
    throw ValidationError("problem.T_final must be a positive multiple of observation.dt_obs");
  }

  ObservationSchedule schedule;
  for (const double x : locations) {
    schedule.state_indices.push_back(state_index_at(mesh, system, x));
    schedule.locations.push_back(mesh.nodes[system.state_to_node[schedule.state_indices.back()]]);
  }
  const auto steps = static_cast<std::size_t>(count);
  schedule.times.resize(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    schedule.times[j] = static_cast<double>(j + 1) * interval;
  }
  schedule.validate(system.dim());
  return schedule;
}

TruthTrajectory simulate_truth(const ProblemSpec& problem, const SpatialMesh& mesh,
                               const LinearOdeSystem& system,
                               const IntegratorConfig& cfg,
                               std::span<const double> times) {
  cfg.validate();
  const auto d = static_cast<Eigen::Index>(system.dim());
  const auto theta = make_theta_function(problem.theta_truth);
  const auto u0 = make_initial_condition(problem.initial_condition);

  TruthTrajectory out;
  out.times.reserve(times.size() + 1);
  out.times.push_back(0.0);
  out.times.insert(out.times.end(), times.begin(), times.end());
  const auto rows = static_cast<Eigen::Index>(out.times.size());
  out.states.resize(rows, d);
  out.theta.resize(rows);

  Eigen::VectorXd u(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    u[i] = u0(mesh.nodes[system.state_to_node[static_cast<std::size_t>(i)]]);
  }
  out.states.row(0) = u.transpose();
  out.theta[0] = theta(0.0);

  // Uniform schedules reuse one factorization.
  std::optional<TrapezoidalStepper> stepper;
  for (Eigen::Index j = 1; j < rows; ++j) {
    const double t0 = out.times[static_cast<std::size_t>(j - 1)];
    const double t1 = out.times[static_cast<std::size_t>(j)];
    if (!(t1 > t0)) throw ValidationError("truth times must be strictly increasing");
    const double interval = t1 - t0;
    if (!stepper || std::abs(stepper->interval() - interval) > 1e-12 * interval) {
      stepper.emplace(system, interval, cfg);
    }
    stepper->advance(std::span<double>(u.data(), static_cast<std::size_t>(d)), theta, t0);
    out.states.row(j) = u.transpose();
    out.theta[j] = theta(t1);
  }
  return out;
}

TruthTrajectory simulate_truth_refined(const ProblemSpec& problem,
                                       const SpatialMesh& mesh,
                                       const IntegratorConfig& cfg,
                                       std::span<const double> times,
                                       int refinement) {
  if (refinement < 1) throw ValidationError("truth refinement must be >= 1");
  const LinearOdeSystem coarse = assemble(problem, mesh);
  if (refinement == 1) return simulate_truth(problem, mesh, coarse, cfg, times);

  const SpatialMesh fine_mesh = build_mesh(mesh.length, mesh.intervals * refinement);
  const LinearOdeSystem fine = assemble(problem, fine_mesh);
  TruthTrajectory fine_truth = simulate_truth(problem, fine_mesh, fine, cfg, times);

  TruthTrajectory out;
  out.times = std::move(fine_truth.times);
  out.theta = std::move(fine_truth.theta);
  out.states.resize(fine_truth.states.rows(), static_cast<Eigen::Index>(coarse.dim()));
  for (std::size_t i = 0; i < coarse.dim(); ++i) {
    const std::size_t fine_node = coarse.state_to_node[i] * static_cast<std::size_t>(refinement);
    const std::size_t fine_index = state_index_at(fine_mesh, fine, fine_mesh.nodes[fine_node]);
    out.states.col(static_cast<Eigen::Index>(i)) =
        fine_truth.states.col(static_cast<Eigen::Index>(fine_index));
  }
  return out;
}

std::string to_string(NoiseRule rule) {
  return rule == NoiseRule::TemporalPerNode ? "temporal" : "spatial";
}

NoiseRule noise_rule_from_string(const std::string& name) {
  if (name == "temporal") return NoiseRule::TemporalPerNode;
  if (name == "spatial") return NoiseRule::SpatialPerTime;
  throw ValidationError("unknown noise rule '" + name + "' (expected temporal or spatial)");
}

double calibrate_noise(const Eigen::MatrixXd& states, double fraction, NoiseRule rule) {
  if (states.rows() < 2) {
    throw ValidationError("noise calibration needs at least 2 time samples");
  }
  if (states.cols() == 0) throw ValidationError("noise calibration needs states");
  auto population_sd = [](const auto& v) {
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().mean());
  };
  double total = 0.0;
  Eigen::Index count = 0;
  if (rule == NoiseRule::TemporalPerNode) {
    for (Eigen::Index c = 0; c < states.cols(); ++c) total += population_sd(states.col(c));
    count = states.cols();
  } else {
    for (Eigen::Index r = 0; r < states.rows(); ++r) total += population_sd(states.row(r));
    count = states.rows();
  }
  return fraction * total / static_cast<double>(count);
}

Dataset generate_observations(const TruthTrajectory& truth,
                              const ObservationSchedule& schedule,
                              double sigma_noise, std::uint64_t seed) {
  if (!(sigma_noise >= 0.0)) throw ValidationError("sigma_noise must be >= 0");
  const auto d = static_cast<std::size_t>(truth.states.cols());
  schedule.validate(d);
  if (static_cast<std::size_t>(truth.states.rows()) != schedule.time_count() + 1) {
    throw ValidationError("truth trajectory does not match the observation schedule");
  }

  Dataset data;
  data.schedule = schedule;
  data.sigma_noise = sigma_noise;
  data.truth_states = truth.states;
  data.truth_theta = truth.theta;

  const auto rows = static_cast<Eigen::Index>(schedule.time_count());
  const auto cols = static_cast<Eigen::Index>(schedule.observed_count());
  data.measurements.resize(rows, cols);
  auto engine = substream(seed, 0, 0, StreamKind::ObservationNoise);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto index = static_cast<Eigen::Index>(schedule.state_indices[static_cast<std::size_t>(k)]);
      data.measurements(j, k) = truth.states(j + 1, index) + sigma_noise * noise(engine);
    }
  }
  return data;
}

}  // namespace tvpf
