#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tvpf/integrate.hpp"
#include "tvpf/mesh.hpp"
#include "tvpf/stats.hpp"
#include "tvpf/synth.hpp"

namespace tvpf {

// One particle per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Drift coefficients are reflected at this floor after jitter.
inline constexpr double kDriftFloor = 1e-6;

struct UniformRange {
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const UniformRange&) const = default;
};

enum class Resampler { Multinomial, Systematic };

struct FilterConfig {
  std::size_t particles = 1000;  // N
  double discount = 0.96;        // delta
  double state_noise_sd = 0.1;   // sigma_C
  double obs_noise_sd = 1.0;     // sigma_D
  std::vector<UniformRange> state_prior;  // one per state component
  std::vector<UniformRange> theta_prior;  // one per TVP component
  std::vector<UniformRange> drift_prior;  // one per TVP component
  std::uint64_t seed = 0;
  Resampler resampler = Resampler::Multinomial;

  std::size_t tvp_dim() const noexcept { return theta_prior.size(); }

  // N >= 2, 1/3 < delta < 1, sigma_C >= 0, sigma_D > 0, lower <= upper for
  // every prior range, drift prior nonnegative.
  void validate() const;
};

// Per-component uniform prior around a ground-truth vector: [f_lo c, f_hi c]
// (endpoints ordered), or [-zero_halfwidth, zero_halfwidth] when |c| falls
// below zero_threshold.
struct MultiplicativePrior {
  double lower_factor = 0.5;
  double upper_factor = 1.25;
  double zero_halfwidth = 0.05;
  double zero_threshold = 1e-8;

  bool operator==(const MultiplicativePrior&) const = default;
};

std::vector<UniformRange> multiplicative_prior(std::span<const double> truth,
                                               const MultiplicativePrior& rule);

// a = (3 delta - 1) / (2 delta)
double shrink_factor(double discount);
// r^2 = 1 - a^2
double jitter_variance(double discount);

struct DriftMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct Ensemble {
  RowMatrix states;        // N x d
  RowMatrix thetas;        // N x p
  RowMatrix drift_sigmas;  // N x p
  Eigen::VectorXd weights;
  DriftMoments drift;

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }
};

Ensemble init_ensemble(const FilterConfig& cfg);

// sigma_hat = a sigma + (1 - a) mean
RowMatrix shrink_drift(const RowMatrix& sigmas, const Eigen::VectorXd& mean,
                       double discount);

// Forward map with each particle's theta held over the interval.
RowMatrix propagate_states(const RowMatrix& states, const RowMatrix& thetas,
                           const TrapezoidalStepper& stepper);

// Normalized fitness w * pi(y | predictor), computed in the log domain.
// Throws DegenerateWeightsError(step) if every term underflows.
Eigen::VectorXd fitness_weights(const Eigen::VectorXd& weights,
                                const RowMatrix& predictors,
                                std::span<const double> y,
                                std::span<const std::size_t> observed,
                                double obs_noise_sd, std::size_t step);

std::vector<std::size_t> resample_indices(const Eigen::VectorXd& probabilities,
                                          std::uint64_t seed, std::size_t step,
                                          Resampler resampler = Resampler::Multinomial);

// Row gather: out.row(n) = in.row(indices[n]).
RowMatrix gather_rows(const RowMatrix& in, std::span<const std::size_t> indices);

// Reorders the four per-particle arrays in place.
void reshuffle(std::span<const std::size_t> indices, RowMatrix& states,
               RowMatrix& thetas, RowMatrix& shrunk_sigmas, RowMatrix& predictors);

// predictors + N(0, sigma_C^2 I)
RowMatrix innovate_states(const RowMatrix& predictors, double state_noise_sd,
                          std::uint64_t seed, std::size_t step);

// shrunk + N(0, r^2 S), reflected at kDriftFloor. A zero covariance leaves the
// input untouched.
RowMatrix jitter_drift(const RowMatrix& shrunk, const Eigen::MatrixXd& cov,
                       double discount, std::uint64_t seed, std::size_t step);

// theta + N(0, diag(sigma^2)) per particle.
RowMatrix propagate_tvp(const RowMatrix& thetas, const RowMatrix& sigmas,
                        std::uint64_t seed, std::size_t step);

// Normalized pi(y | state) / pi(y | predictor).
Eigen::VectorXd reweight(const RowMatrix& states, const RowMatrix& predictors,
                         std::span<const double> y,
                         std::span<const std::size_t> observed,
                         double obs_noise_sd, std::size_t step);

// Weighted mean and covariance, no bias correction.
DriftMoments update_drift_moments(const RowMatrix& sigmas,
                                  const Eigen::VectorXd& weights);

// Per-time weighted summaries. Index 0 is the prior at t = 0; index j is the
// posterior after assimilating observation j.
struct FilterSummary {
  std::vector<double> times;
  std::vector<std::vector<Band>> states;  // [step][component]
  std::vector<std::vector<Band>> theta;
  std::vector<std::vector<Band>> drift;
  std::vector<double> ess;
  RowMatrix final_drift;  // N x p drift sample after the last step
  Eigen::VectorXd final_weights;

  std::size_t size() const noexcept { return times.size(); }
};

FilterSummary run_filter(const LinearOdeSystem& system,
                         const ObservationSchedule& schedule,
                         const Eigen::MatrixXd& measurements,
                         const FilterConfig& cfg,
                         const IntegratorConfig& integrator);

}  // namespace tvpf
