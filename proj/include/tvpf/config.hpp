#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvpf/filter.hpp"
#include "tvpf/integrate.hpp"
#include "tvpf/models.hpp"
#include "tvpf/synth.hpp"

namespace tvpf {

// A prior over a vector of components: either uniform ranges scaled from the
// ground truth at t = 0, or explicit ranges given in the file.
struct PriorSpec {
  enum class Kind { Multiplicative, Explicit };

  Kind kind = Kind::Multiplicative;
  MultiplicativePrior factors;         // Multiplicative
  std::vector<UniformRange> ranges;    // Explicit

  // Throws ValidationError if an explicit prior has the wrong length.
  std::vector<UniformRange> resolve(std::span<const double> truth,
                                    const std::string& where) const;

  bool operator==(const PriorSpec&) const = default;
};

struct ObservationBlock {
  std::vector<double> locations;
  double interval = 0.0;  // dt_obs
  NoiseRule noise_rule = NoiseRule::SpatialPerTime;
  double noise_fraction = 0.2;
  std::optional<double> sigma_noise;  // overrides the rule when set

  bool operator==(const ObservationBlock&) const = default;
};

struct FilterBlock {
  std::size_t particles = 1000;
  double discount = 0.96;
  double state_noise_sd = 0.1;
  double obs_noise_sd = 1.0;
  PriorSpec state_prior;
  PriorSpec theta_prior;
  std::vector<UniformRange> drift_prior{{0.05, 10.0}};
  Resampler resampler = Resampler::Multinomial;

  bool operator==(const FilterBlock&) const = default;
};

struct ReportBlock {
  std::vector<double> probes;
  double burn_in_fraction = 0.1;
  int histogram_bins = 30;

  bool operator==(const ReportBlock&) const = default;
};

struct ExperimentConfig {
  std::string name;
  ProblemSpec problem;
  int mesh_intervals = 0;    // M
  int truth_refinement = 1;  // 1 = truth on the filter mesh
  ObservationBlock observation;
  FilterBlock filter;
  IntegratorConfig integrator;
  ReportBlock report;
  std::uint64_t seed = 0;
  std::string output_dir;

  // Field-level checks that do not need the mesh; the pipeline catches the rest
  // (off-node locations, T_final not a multiple of dt_obs).
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig advection_logistic_config();
ExperimentConfig heat_sine_config();
// "advection_logistic" or "heat_sine".
ExperimentConfig canned_config(const std::string& name);

// JSON text <-> config. Unknown keys are rejected with their dotted path.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the blocks that determine the synthetic data (problem, mesh,
// observation, integrator, seed), as 16 hex digits.
std::string data_hash(const ExperimentConfig& cfg);

// Filter settings with priors resolved against the initial truth.
FilterConfig make_filter_config(const ExperimentConfig& cfg,
                                std::span<const double> initial_state,
                                double initial_theta);

}  // namespace tvpf
