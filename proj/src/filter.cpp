#include "tvpf/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "tvpf/error.hpp"
#include "tvpf/rng.hpp"

namespace tvpf {

namespace {

void check_range(const UniformRange& r, const std::string& what) {
  if (!std::isfinite(r.lower) || !std::isfinite(r.upper) || r.lower > r.upper) {
    throw ValidationError(what + ": invalid range [" + std::to_string(r.lower) +
                          ", " + std::to_string(r.upper) + "]");
  }
}

double squared_residual(std::span<const double> y, const double* row,
                        std::span<const std::size_t> observed) {
  double sum = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double r = y[k] - row[observed[k]];
    sum += r * r;
  }
  return sum;
}

// Exponentiates log weights after subtracting their maximum and normalizes.
Eigen::VectorXd normalize_log_weights(const Eigen::VectorXd& log_weights,
                                      std::size_t step) {
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < log_weights.size(); ++n) {
    if (std::isnan(log_weights[n])) throw DegenerateWeightsError(step);
    top = std::max(top, log_weights[n]);
  }
  if (!std::isfinite(top)) throw DegenerateWeightsError(step);
  Eigen::VectorXd w = (log_weights.array() - top).exp().matrix();
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateWeightsError(step);
  return w / total;
}

void check_observation(std::span<const double> y, std::span<const std::size_t> observed,
                       Eigen::Index dim, double obs_noise_sd) {
  if (y.size() != observed.size()) {
    throw ValidationError("observation vector and observed indices differ in length");
  }
  if (!(obs_noise_sd > 0.0)) throw ValidationError("sigma_D must be positive");
  for (const double v : y) {
    if (!std::isfinite(v)) throw ValidationError("observation contains a non-finite value");
  }
  for (const std::size_t i : observed) {
    if (static_cast<Eigen::Index>(i) >= dim) {
      throw ValidationError("observed index outside the state");
    }
  }
}

std::vector<Band> summarize_columns(const RowMatrix& values,
                                    const Eigen::VectorXd& weights) {
  const auto n = static_cast<std::size_t>(values.rows());
  std::vector<Band> out;
  out.reserve(static_cast<std::size_t>(values.cols()));
  std::vector<double> column(n);
  const std::span<const double> w(weights.data(), n);
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    for (std::size_t r = 0; r < n; ++r) column[r] = values(static_cast<Eigen::Index>(r), c);
    out.push_back(summarize(WeightedSample(column, w)));
  }
  return out;
}

void record(FilterSummary& summary, double time, const Ensemble& ensemble) {
  summary.times.push_back(time);
  summary.states.push_back(summarize_columns(ensemble.states, ensemble.weights));
  summary.theta.push_back(summarize_columns(ensemble.thetas, ensemble.weights));
  summary.drift.push_back(summarize_columns(ensemble.drift_sigmas, ensemble.weights));
  summary.ess.push_back(effective_sample_size(
      std::span<const double>(ensemble.weights.data(), ensemble.size())));
}

}  // namespace

void FilterConfig::validate() const {
  if (particles < 2) throw ValidationError("filter.N must be >= 2");
  if (!(discount > 1.0 / 3.0 && discount < 1.0)) {
    throw ValidationError("filter.delta must lie in (1/3, 1)");
  }
  if (!(state_noise_sd >= 0.0)) throw ValidationError("filter.sigma_C must be >= 0");
  if (!(obs_noise_sd > 0.0)) throw ValidationError("filter.sigma_D must be > 0");
  if (state_prior.empty()) throw ValidationError("filter.state_prior is empty");
  if (theta_prior.empty()) throw ValidationError("filter.theta_prior is empty");
  if (drift_prior.size() != theta_prior.size()) {
    throw ValidationError("filter.sigmaE_prior must have one range per TVP component");
  }
  for (const auto& r : state_prior) check_range(r, "filter.state_prior");
  for (const auto& r : theta_prior) check_range(r, "filter.theta_prior");
  for (const auto& r : drift_prior) {
    check_range(r, "filter.sigmaE_prior");
    if (r.lower < 0.0) throw ValidationError("filter.sigmaE_prior must be nonnegative");
  }
}

std::vector<UniformRange> multiplicative_prior(std::span<const double> truth,
                                               const MultiplicativePrior& rule) {
  std::vector<UniformRange> out;
  out.reserve(truth.size());
  for (const double c : truth) {
    if (std::abs(c) < rule.zero_threshold) {
      out.push_back({-rule.zero_halfwidth, rule.zero_halfwidth});
    } else {
      const double a = rule.lower_factor * c;
      const double b = rule.upper_factor * c;
      out.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  return out;
}

double shrink_factor(double discount) { return (3.0 * discount - 1.0) / (2.0 * discount); }

double jitter_variance(double discount) {
  const double a = shrink_factor(discount);
  return 1.0 - a * a;
}

Ensemble init_ensemble(const FilterConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(cfg.particles);
  const auto d = static_cast<Eigen::Index>(cfg.state_prior.size());
  const auto p = static_cast<Eigen::Index>(cfg.tvp_dim());

  Ensemble e;
  e.states.resize(n, d);
  e.thetas.resize(n, p);
  e.drift_sigmas.resize(n, p);
  e.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  auto fill = [&](RowMatrix& out, const std::vector<UniformRange>& ranges,
                  StreamKind kind) {
    for (Eigen::Index i = 0; i < n; ++i) {
      auto engine = substream(cfg.seed, 0, static_cast<std::uint64_t>(i), kind);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (Eigen::Index c = 0; c < out.cols(); ++c) {
        const auto& r = ranges[static_cast<std::size_t>(c)];
        out(i, c) = r.lower + (r.upper - r.lower) * unit(engine);
      }
    }
  };
  fill(e.states, cfg.state_prior, StreamKind::PriorState);
  fill(e.thetas, cfg.theta_prior, StreamKind::PriorTheta);
  fill(e.drift_sigmas, cfg.drift_prior, StreamKind::PriorDrift);
  e.drift = update_drift_moments(e.drift_sigmas, e.weights);
  return e;
}

RowMatrix shrink_drift(const RowMatrix& sigmas, const Eigen::VectorXd& mean,
                       double discount) {
  const double a = shrink_factor(discount);
  RowMatrix out(sigmas.rows(), sigmas.cols());
  for (Eigen::Index n = 0; n < sigmas.rows(); ++n) {
    for (Eigen::Index c = 0; c < sigmas.cols(); ++c) {
      out(n, c) = a * sigmas(n, c) + (1.0 - a) * mean[c];
    }
  }
  return out;
}

RowMatrix propagate_states(const RowMatrix& states, const RowMatrix& thetas,
                           const TrapezoidalStepper& stepper) {
  if (static_cast<std::size_t>(states.cols()) != stepper.dim()) {
    throw ValidationError("ensemble state dimension does not match the system");
  }
  if (thetas.cols() != 1) {
    throw ValidationError("the forward map takes a scalar source parameter");
  }
  RowMatrix out = states;
  const auto d = static_cast<std::size_t>(out.cols());
  for (Eigen::Index n = 0; n < out.rows(); ++n) {
    stepper.advance(std::span<double>(out.row(n).data(), d), thetas(n, 0));
  }
  return out;
}

Eigen::VectorXd fitness_weights(const Eigen::VectorXd& weights,
                                const RowMatrix& predictors,
                                std::span<const double> y,
                                std::span<const std::size_t> observed,
                                double obs_noise_sd, std::size_t step) {
  check_observation(y, observed, predictors.cols(), obs_noise_sd);
  const double scale = 1.0 / (2.0 * obs_noise_sd * obs_noise_sd);
  Eigen::VectorXd log_g(predictors.rows());
  for (Eigen::Index n = 0; n < predictors.rows(); ++n) {
    log_g[n] = std::log(weights[n]) -
               scale * squared_residual(y, predictors.row(n).data(), observed);
  }
  return normalize_log_weights(log_g, step);
}

std::vector<std::size_t> resample_indices(const Eigen::VectorXd& probabilities,
                                          std::uint64_t seed, std::size_t step,
                                          Resampler resampler) {
  const auto n = static_cast<std::size_t>(probabilities.size());
  if (n == 0) throw ValidationError("cannot resample an empty ensemble");
  std::vector<double> cumulative(n);
  double running = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    running += probabilities[static_cast<Eigen::Index>(k)];
    cumulative[k] = running;
  }

  auto locate = [&](double u) {
    const double target = u * running;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), n - 1);
  };

  std::vector<std::size_t> indices(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (resampler == Resampler::Systematic) {
    auto engine = substream(seed, step, 0, StreamKind::Resample);
    const double offset = unit(engine);
    for (std::size_t k = 0; k < n; ++k) {
      indices[k] = locate((static_cast<double>(k) + offset) / static_cast<double>(n));
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      auto engine = substream(seed, step, k, StreamKind::Resample);
      indices[k] = locate(unit(engine));
    }
  }
  return indices;
}

RowMatrix gather_rows(const RowMatrix& in, std::span<const std::size_t> indices) {
  RowMatrix out(static_cast<Eigen::Index>(indices.size()), in.cols());
  for (std::size_t n = 0; n < indices.size(); ++n) {
    if (static_cast<Eigen::Index>(indices[n]) >= in.rows()) {
      throw std::out_of_range("resampling index " + std::to_string(indices[n]) +
                              " outside ensemble of size " + std::to_string(in.rows()));
    }
    out.row(static_cast<Eigen::Index>(n)) = in.row(static_cast<Eigen::Index>(indices[n]));
  }
  return out;
}

void reshuffle(std::span<const std::size_t> indices, RowMatrix& states,
               RowMatrix& thetas, RowMatrix& shrunk_sigmas, RowMatrix& predictors) {
  states = gather_rows(states, indices);
  thetas = gather_rows(thetas, indices);
  shrunk_sigmas = gather_rows(shrunk_sigmas, indices);
  predictors = gather_rows(predictors, indices);
}

RowMatrix innovate_states(const RowMatrix& predictors, double state_noise_sd,
                          std::uint64_t seed, std::size_t step) {
  RowMatrix out = predictors;
  if (state_noise_sd == 0.0) return out;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index n = 0; n < out.rows(); ++n) {
    auto engine = substream(seed, step, static_cast<std::uint64_t>(n),
                            StreamKind::StateInnovation);
    normal.reset();
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(n, c) += state_noise_sd * normal(engine);
    }
  }
  return out;
}

RowMatrix jitter_drift(const RowMatrix& shrunk, const Eigen::MatrixXd& cov,
                       double discount, std::uint64_t seed, std::size_t step) {
  const Eigen::MatrixXd scaled = jitter_variance(discount) * cov;
  if (scaled.isZero(0.0)) return shrunk;

  // Symmetric square root; tolerates a singular covariance.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = eig.eigenvectors() * roots.asDiagonal();

  RowMatrix out = shrunk;
  const Eigen::Index p = shrunk.cols();
  Eigen::VectorXd z(p);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index n = 0; n < out.rows(); ++n) {
    auto engine = substream(seed, step, static_cast<std::uint64_t>(n),
                            StreamKind::DriftJitter);
    normal.reset();
    for (Eigen::Index c = 0; c < p; ++c) z[c] = normal(engine);
    const Eigen::VectorXd zeta = factor * z;
    for (Eigen::Index c = 0; c < p; ++c) {
      out(n, c) = std::max(kDriftFloor, std::abs(out(n, c) + zeta[c]));
    }
  }
  return out;
}

RowMatrix propagate_tvp(const RowMatrix& thetas, const RowMatrix& sigmas,
                        std::uint64_t seed, std::size_t step) {
  if (thetas.rows() != sigmas.rows() || thetas.cols() != sigmas.cols()) {
    throw ValidationError("theta and drift particle arrays differ in shape");
  }
  RowMatrix out = thetas;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index n = 0; n < out.rows(); ++n) {
    auto engine = substream(seed, step, static_cast<std::uint64_t>(n),
                            StreamKind::TvpDrift);
    normal.reset();
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(n, c) += sigmas(n, c) * normal(engine);
    }
  }
  return out;
}

Eigen::VectorXd reweight(const RowMatrix& states, const RowMatrix& predictors,
                         std::span<const double> y,
                         std::span<const std::size_t> observed,
                         double obs_noise_sd, std::size_t step) {
  if (states.rows() != predictors.rows() || states.cols() != predictors.cols()) {
    throw ValidationError("states and predictors differ in shape");
  }
  check_observation(y, observed, states.cols(), obs_noise_sd);
  const double scale = 1.0 / (2.0 * obs_noise_sd * obs_noise_sd);
  Eigen::VectorXd log_w(states.rows());
  for (Eigen::Index n = 0; n < states.rows(); ++n) {
    log_w[n] = scale * (squared_residual(y, predictors.row(n).data(), observed) -
                        squared_residual(y, states.row(n).data(), observed));
  }
  return normalize_log_weights(log_w, step);
}

DriftMoments update_drift_moments(const RowMatrix& sigmas,
                                  const Eigen::VectorXd& weights) {
  if (sigmas.rows() != weights.size()) {
    throw ValidationError("drift particles and weights differ in length");
  }
  DriftMoments m;
  m.mean = (weights.transpose() * sigmas).transpose();
  const RowMatrix centered = sigmas.rowwise() - m.mean.transpose();
  m.cov = centered.transpose() * weights.asDiagonal() * centered;
  m.cov = 0.5 * (m.cov + m.cov.transpose());
  return m;
}

FilterSummary run_filter(const LinearOdeSystem& system,
                         const ObservationSchedule& schedule,
                         const Eigen::MatrixXd& measurements,
                         const FilterConfig& cfg,
                         const IntegratorConfig& integrator) {
  cfg.validate();
  integrator.validate();
  if (cfg.state_prior.size() != system.dim()) {
    throw ValidationError("filter.state_prior has " + std::to_string(cfg.state_prior.size()) +
                          " ranges, system has dimension " + std::to_string(system.dim()));
  }
  if (cfg.tvp_dim() != 1) {
    throw ValidationError("the source term carries a single time-varying parameter");
  }
  schedule.validate(system.dim());
  if (static_cast<std::size_t>(measurements.rows()) != schedule.time_count() ||
      static_cast<std::size_t>(measurements.cols()) != schedule.observed_count()) {
    throw ValidationError("measurement matrix does not match the observation schedule");
  }

  Ensemble ensemble = init_ensemble(cfg);
  FilterSummary summary;
  record(summary, 0.0, ensemble);

  const double delta = cfg.discount;
  std::optional<TrapezoidalStepper> stepper;
  std::vector<double> y(schedule.observed_count());
  double t_prev = 0.0;

  for (std::size_t j = 0; j < schedule.time_count(); ++j) {
    const std::size_t step = j + 1;
    const double t_next = schedule.times[j];
    const double interval = t_next - t_prev;
    if (!stepper || std::abs(stepper->interval() - interval) > 1e-12 * interval) {
      stepper.emplace(system, interval, integrator);
    }
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k] = measurements(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    }

    // 1. shrink drift coefficients toward their weighted mean
    RowMatrix shrunk = shrink_drift(ensemble.drift_sigmas, ensemble.drift.mean, delta);
    // 2. forward map
    RowMatrix predictors = propagate_states(ensemble.states, ensemble.thetas, *stepper);
    // 3. fitness
    const Eigen::VectorXd fitness = fitness_weights(
        ensemble.weights, predictors, y, schedule.state_indices, cfg.obs_noise_sd, step);
    // 4-5. auxiliary indices and reshuffle
    const auto indices = resample_indices(fitness, cfg.seed, step, cfg.resampler);
    reshuffle(indices, ensemble.states, ensemble.thetas, shrunk, predictors);
    // 6. state innovation
    ensemble.states = innovate_states(predictors, cfg.state_noise_sd, cfg.seed, step);
    // 7. artificial drift-coefficient evolution, S_j from the previous step
    ensemble.drift_sigmas = jitter_drift(shrunk, ensemble.drift.cov, delta, cfg.seed, step);
    // 8-9. TVP random walk with per-particle variance sigma_E^2
    ensemble.thetas = propagate_tvp(ensemble.thetas, ensemble.drift_sigmas, cfg.seed, step);
    // 10. likelihood-ratio weights
    ensemble.weights = reweight(ensemble.states, predictors, y, schedule.state_indices,
                                cfg.obs_noise_sd, step);
    // 11. drift moments
    ensemble.drift = update_drift_moments(ensemble.drift_sigmas, ensemble.weights);

    record(summary, t_next, ensemble);
    t_prev = t_next;
  }

  summary.final_drift = ensemble.drift_sigmas;
  summary.final_weights = ensemble.weights;
  return summary;
}

}  // namespace tvpf
