#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvpf/stats.hpp"

// Minimal static SVG charts for the report command.
namespace tvpf::plot {

// Short human-readable number, e.g. 3.3 rather than 3.2999999999999998.
std::string label(double value);

// Truth line over the PF mean with shaded 95% and 68% bands.
std::string band_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<double>& t,
                       const std::vector<double>& truth, const std::vector<Band>& bands);

std::string histogram_chart(const std::string& title, const std::string& x_label,
                            const Histogram& hist);

// rows = times, cols = xs; time runs left to right.
std::string heatmap_chart(const std::string& title, const std::vector<double>& times,
                          const std::vector<double>& xs, const Eigen::MatrixXd& values);

}  // namespace tvpf::plot
