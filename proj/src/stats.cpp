#include "tvpf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tvpf/error.hpp"

namespace tvpf {

namespace {

constexpr double kWeightTolerance = 1e-12;
// Slack on the cumulative-weight comparison so that, e.g., the 50th of 100
// equal weights hits q = 0.5 regardless of summation rounding.
constexpr double kCumulativeSlack = 1e-12;

std::vector<std::size_t> ascending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  return order;
}

double quantile_sorted(const WeightedSample& sample,
                       const std::vector<std::size_t>& order, double q) {
  const auto values = sample.values();
  const auto weights = sample.weights();
  double cumulative = 0.0;
  for (const std::size_t i : order) {
    cumulative += weights[i];
    if (cumulative >= q - kCumulativeSlack) return values[i];
  }
  return values[order.back()];
}

void check_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ValidationError("quantile level must lie in [0, 1], got " + std::to_string(q));
  }
}

}  // namespace

WeightedSample::WeightedSample(std::span<const double> values,
                               std::span<const double> weights)
    : values_(values), weights_(weights) {
  if (values.size() != weights.size()) {
    throw ValidationError("weighted sample: values and weights differ in length");
  }
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("weighted sample: negative or NaN weight");
    total += w;
  }
  const double tolerance =
      kWeightTolerance + 16.0 * static_cast<double>(weights.size()) *
                             std::numeric_limits<double>::epsilon();
  if (!values.empty() && std::abs(total - 1.0) > tolerance) {
    throw ValidationError("weighted sample: weights sum to " + std::to_string(total));
  }
}

double weighted_mean(const WeightedSample& sample) {
  double mean = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    mean += sample.weights()[i] * sample.values()[i];
  }
  return mean;
}

double weighted_quantile(const WeightedSample& sample, double q) {
  check_q(q);
  if (sample.size() == 0) throw ValidationError("quantile of an empty sample");
  return quantile_sorted(sample, ascending_order(sample.values()), q);
}

Band summarize(const WeightedSample& sample) {
  if (sample.size() == 0) throw ValidationError("summary of an empty sample");
  const auto order = ascending_order(sample.values());
  Band band;
  band.mean = weighted_mean(sample);
  band.lo68 = quantile_sorted(sample, order, 0.16);
  band.hi68 = quantile_sorted(sample, order, 0.84);
  band.lo95 = quantile_sorted(sample, order, 0.025);
  band.hi95 = quantile_sorted(sample, order, 0.975);
  return band;
}

double rmse(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) {
    throw ValidationError("rmse: series lengths differ (" +
                          std::to_string(estimate.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
  }
  if (estimate.empty()) throw ValidationError("rmse: empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double r = estimate[i] - truth[i];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(estimate.size()));
}

Eigen::MatrixXd error_field(const Eigen::MatrixXd& truth,
                            const Eigen::MatrixXd& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw ValidationError("error_field: shape mismatch");
  }
  return (truth - estimate).cwiseAbs();
}

double coverage(std::span<const double> truth, std::span<const double> lower,
                std::span<const double> upper) {
  if (truth.size() != lower.size() || truth.size() != upper.size()) {
    throw ValidationError("coverage: series lengths differ");
  }
  if (truth.empty()) throw ValidationError("coverage: empty series");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (lower[i] <= truth[i] && truth[i] <= upper[i]) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(truth.size());
}

Histogram weighted_histogram(const WeightedSample& sample, int bins) {
  if (bins < 1) throw ValidationError("histogram needs at least one bin");
  if (sample.size() == 0) throw ValidationError("histogram of an empty sample");
  const auto values = sample.values();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;

  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + b * width;
  h.edges.back() = hi;
  h.mass.assign(static_cast<std::size_t>(bins), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<int>(std::floor((values[i] - lo) / width));
    b = std::clamp(b, 0, bins - 1);
    h.mass[static_cast<std::size_t>(b)] += sample.weights()[i];
  }
  return h;
}

double effective_sample_size(std::span<const double> weights) {
  double sum_sq = 0.0;
  for (const double w : weights) sum_sq += w * w;
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

}  // namespace tvpf
