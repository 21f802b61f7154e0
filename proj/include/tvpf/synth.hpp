#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvpf/integrate.hpp"
#include "tvpf/mesh.hpp"
#include "tvpf/models.hpp"

namespace tvpf {

// Which state components are observed, and when. times holds t_1 < ... < t_J;
// the filter starts from t_0 = 0.
struct ObservationSchedule {
  std::vector<std::size_t> state_indices;
  std::vector<double> locations;  // mesh x of each observed component
  std::vector<double> times;

  std::size_t observed_count() const noexcept { return state_indices.size(); }
  std::size_t time_count() const noexcept { return times.size(); }

  // Indices strictly increasing and < state_dim; times strictly increasing
  // and positive.
  void validate(std::size_t state_dim) const;
};

ObservationSchedule make_schedule(const SpatialMesh& mesh,
                                  const LinearOdeSystem& system,
                                  std::span<const double> locations,
                                  double interval, double final_time);

// Truth at t_0 = 0 followed by every time in the schedule.
struct TruthTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;  // (J+1) x d
  Eigen::VectorXd theta;   // J+1
};

// Samples the initial condition at the state nodes, then steps between
// consecutive times with midpoint-sampled theta_true.
TruthTrajectory simulate_truth(const ProblemSpec& problem, const SpatialMesh& mesh,
                               const LinearOdeSystem& system,
                               const IntegratorConfig& cfg,
                               std::span<const double> times);

// Same, but integrated on a mesh `refinement` times finer and sampled back at
// the nodes of `mesh`. refinement == 1 is identical to simulate_truth.
TruthTrajectory simulate_truth_refined(const ProblemSpec& problem,
                                       const SpatialMesh& mesh,
                                       const IntegratorConfig& cfg,
                                       std::span<const double> times,
                                       int refinement);

// How "average standard deviation of the truth" is taken over a
// (times x nodes) window.
enum class NoiseRule {
  TemporalPerNode,  // std of each node's trajectory, averaged over nodes
  SpatialPerTime,   // std across nodes at each time, averaged over times
};

std::string to_string(NoiseRule rule);
NoiseRule noise_rule_from_string(const std::string& name);

// fraction * average population standard deviation under `rule`. Pass the
// truth rows of the calibration window (the observation times, without t_0).
double calibrate_noise(const Eigen::MatrixXd& states, double fraction = 0.2,
                       NoiseRule rule = NoiseRule::TemporalPerNode);

struct Dataset {
  ObservationSchedule schedule;
  Eigen::MatrixXd measurements;  // J x m
  double sigma_noise = 0.0;
  // Scoring only; the filter never reads these.
  Eigen::MatrixXd truth_states;  // (J+1) x d
  Eigen::VectorXd truth_theta;   // J+1
};

// y_j = selected truth components at t_j + N(0, sigma_noise^2) noise,
// deterministic for a given seed.
Dataset generate_observations(const TruthTrajectory& truth,
                              const ObservationSchedule& schedule,
                              double sigma_noise, std::uint64_t seed);

}  // namespace tvpf
