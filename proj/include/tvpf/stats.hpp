#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tvpf {

// Values paired with nonnegative weights that sum to one (within 1e-12).
// Non-owning; the spans must outlive the sample.
class WeightedSample {
 public:
  WeightedSample(std::span<const double> values, std::span<const double> weights);

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::span<const double> values_;
  std::span<const double> weights_;
};

double weighted_mean(const WeightedSample& sample);

// Left-continuous inverse of the cumulative weight: the smallest value whose
// cumulative weight reaches q. No interpolation between atoms.
double weighted_quantile(const WeightedSample& sample, double q);

// Weighted mean with the 68% (q = 0.16, 0.84) and 95% (q = 0.025, 0.975)
// credible bounds.
struct Band {
  double mean = 0.0;
  double lo68 = 0.0;
  double hi68 = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

Band summarize(const WeightedSample& sample);

// Root mean square of estimate - truth.
double rmse(std::span<const double> estimate, std::span<const double> truth);

// |truth - estimate| element-wise.
Eigen::MatrixXd error_field(const Eigen::MatrixXd& truth,
                            const Eigen::MatrixXd& estimate);

// Fraction of indices with lower <= truth <= upper.
double coverage(std::span<const double> truth, std::span<const double> lower,
                std::span<const double> upper);

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<double> mass;   // bins, sums to 1
};

// Equal-width bins over [min, max] of the values. A sample with a single
// distinct value gets bins of unit total width centred on it.
Histogram weighted_histogram(const WeightedSample& sample, int bins);

// 1 / sum w^2
double effective_sample_size(std::span<const double> weights);

}  // namespace tvpf
