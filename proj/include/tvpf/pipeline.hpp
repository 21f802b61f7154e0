#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvpf/config.hpp"
#include "tvpf/filter.hpp"
#include "tvpf/mesh.hpp"
#include "tvpf/stats.hpp"
#include "tvpf/synth.hpp"

namespace tvpf {

// Everything the filter is allowed to know about the discretized problem.
struct Discretization {
  SpatialMesh mesh;
  LinearOdeSystem system;
  ObservationSchedule schedule;
  std::vector<double> state_x;  // mesh x of each state component
  Eigen::VectorXd initial_state;
};

Discretization discretize(const ExperimentConfig& cfg);

// v * dt_sub / h for advection, 0 for heat. The scheme is A-stable, so values
// above 1 only merit a warning.
double courant_number(const ExperimentConfig& cfg);

struct Simulation {
  Discretization disc;
  TruthTrajectory truth;
  Dataset data;
};

// Truth simulation, noise calibration and observation generation.
Simulation simulate_experiment(const ExperimentConfig& cfg);

FilterSummary estimate_experiment(const ExperimentConfig& cfg, const Discretization& disc,
                                  const Eigen::MatrixXd& measurements);

struct ProbeMetrics {
  double x = 0.0;
  double rmse = 0.0;
  double coverage68 = 0.0;
  double coverage95 = 0.0;
};

// Scores of one estimate against the stored truth. Time-series scores skip
// the burn-in window t < burn_in_fraction * T_final.
struct Metrics {
  double burn_in_time = 0.0;
  std::size_t scored_steps = 0;
  double theta_rmse = 0.0;
  double theta_rmse_all = 0.0;
  double theta_coverage68 = 0.0;
  double theta_coverage95 = 0.0;
  std::vector<ProbeMetrics> probes;
  double field_mean_abs_error = 0.0;
  double truth_rms = 0.0;
  double normalized_field_error = 0.0;  // mean |error| / truth RMS
  Band drift;                           // final-step sigma_E posterior
  double drift_width95 = 0.0;
  double min_ess = 0.0;
};

Metrics compute_metrics(const TruthTrajectory& truth, std::span<const double> state_x,
                        const FilterSummary& estimate, const ReportBlock& report,
                        double final_time);

// PF-mean state field, (J+1) x d.
Eigen::MatrixXd mean_field(const FilterSummary& estimate);

std::string metrics_to_json(const Metrics& m);

// File-level commands behind the CLI. Each throws ValidationError, IoError or
// DegenerateWeightsError.
void cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out);
void cmd_estimate(const ExperimentConfig& cfg, const std::filesystem::path& data,
                  const std::filesystem::path& out, bool ignore_hash = false);
Metrics cmd_report(const std::filesystem::path& data, const std::filesystem::path& est,
                   const std::filesystem::path& out, bool plots = false);

// Readers for the files written above.
struct StoredSimulation {
  ExperimentConfig config;
  std::string data_hash;
  double sigma_noise = 0.0;
  TruthTrajectory truth;
  std::vector<double> state_x;
  Eigen::MatrixXd measurements;  // J x m, schedule order
};

StoredSimulation load_simulation(const std::filesystem::path& data);

struct StoredEstimate {
  ExperimentConfig config;
  FilterSummary summary;
  std::vector<double> state_x;
};

StoredEstimate load_estimate(const std::filesystem::path& est);

}  // namespace tvpf
