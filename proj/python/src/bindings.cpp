#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

#include "tvpf/config.hpp"
#include "tvpf/error.hpp"
#include "tvpf/pipeline.hpp"

namespace py = pybind11;
using namespace tvpf;

namespace {

ExperimentConfig with_seed(const std::string& config_json, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = parse_config(config_json);
  if (seed) cfg.seed = *seed;
  return cfg;
}

// (J+1) x 5 array of mean, lo95, lo68, hi68, hi95 for one component.
Eigen::MatrixXd band_matrix(const std::vector<std::vector<Band>>& series, std::size_t component) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(series.size()), 5);
  for (std::size_t j = 0; j < series.size(); ++j) {
    const Band& b = series[j][component];
    out.row(static_cast<Eigen::Index>(j)) << b.mean, b.lo95, b.lo68, b.hi68, b.hi95;
  }
  return out;
}

py::dict simulation_dict(const Simulation& sim) {
  py::dict d;
  d["times"] = sim.truth.times;
  d["state_x"] = sim.disc.state_x;
  d["truth"] = sim.truth.states;
  d["theta"] = sim.truth.theta;
  d["obs_x"] = sim.disc.schedule.locations;
  d["observations"] = sim.data.measurements;
  d["sigma_noise"] = sim.data.sigma_noise;
  return d;
}

py::dict estimate_dict(const FilterSummary& s) {
  py::dict d;
  d["times"] = s.times;
  d["theta"] = band_matrix(s.theta, 0);
  d["sigma_e"] = band_matrix(s.drift, 0);
  d["state_mean"] = mean_field(s);
  d["ess"] = s.ess;
  d["final_sigma_e"] = Eigen::MatrixXd(s.final_drift);
  d["final_weights"] = s.final_weights;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Particle filter for joint state and time-varying source estimation in 1D PDEs.";

  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<DegenerateWeightsError> degenerate(m, "DegenerateWeightsError",
                                                          PyExc_RuntimeError);
  static py::exception<IoError> io(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      PyErr_SetString(validation.ptr(), e.what());
    } catch (const DegenerateWeightsError& e) {
      PyErr_SetString(degenerate.ptr(), e.what());
    } catch (const IoError& e) {
      PyErr_SetString(io.ptr(), e.what());
    }
  });

  m.def("canned_config", [](const std::string& name) { return serialize_config(canned_config(name)); },
        py::arg("name"), "JSON text of a built-in experiment (advection_logistic or heat_sine).");
  m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("config_json"), "Validate a config and return it with every default filled in.");
  m.def("data_hash", [](const std::string& text) { return data_hash(parse_config(text)); },
        py::arg("config_json"));

  m.def(
      "simulate",
      [](const std::string& text, std::optional<std::uint64_t> seed) {
        return simulation_dict(simulate_experiment(with_seed(text, seed)));
      },
      py::arg("config_json"), py::arg("seed") = py::none(),
      "Truth trajectory and noisy observations for a config.");

  m.def(
      "estimate",
      [](const std::string& text, const Eigen::MatrixXd& observations,
         std::optional<std::uint64_t> seed) {
        const ExperimentConfig cfg = with_seed(text, seed);
        const Discretization disc = discretize(cfg);
        FilterSummary s;
        {
          py::gil_scoped_release release;
          s = estimate_experiment(cfg, disc, observations);
        }
        return estimate_dict(s);
      },
      py::arg("config_json"), py::arg("observations"), py::arg("seed") = py::none(),
      "Run the filter on a J x m observation matrix in schedule order.");

  m.def(
      "run_experiment",
      [](const std::string& text, std::optional<std::uint64_t> seed) {
        const ExperimentConfig cfg = with_seed(text, seed);
        const Simulation sim = simulate_experiment(cfg);
        FilterSummary s;
        {
          py::gil_scoped_release release;
          s = estimate_experiment(cfg, sim.disc, sim.data.measurements);
        }
        const Metrics metrics =
            compute_metrics(sim.truth, sim.disc.state_x, s, cfg.report, cfg.problem.final_time);
        py::dict d;
        d["simulation"] = simulation_dict(sim);
        d["estimate"] = estimate_dict(s);
        d["metrics_json"] = metrics_to_json(metrics);
        return d;
      },
      py::arg("config_json"), py::arg("seed") = py::none(),
      "Simulate, filter and score in one call.");

  m.def(
      "simulate_to",
      [](const std::string& text, const std::filesystem::path& out,
         std::optional<std::uint64_t> seed) { cmd_simulate(with_seed(text, seed), out); },
      py::arg("config_json"), py::arg("out"), py::arg("seed") = py::none());
  m.def(
      "estimate_to",
      [](const std::string& text, const std::filesystem::path& data,
         const std::filesystem::path& out, std::optional<std::uint64_t> seed, bool ignore_hash) {
        py::gil_scoped_release release;
        cmd_estimate(with_seed(text, seed), data, out, ignore_hash);
      },
      py::arg("config_json"), py::arg("data"), py::arg("out"), py::arg("seed") = py::none(),
      py::arg("ignore_hash") = false);
  m.def(
      "report_to",
      [](const std::filesystem::path& data, const std::filesystem::path& est,
         const std::filesystem::path& out, bool plots) {
        return metrics_to_json(cmd_report(data, est, out, plots));
      },
      py::arg("data"), py::arg("est"), py::arg("out"), py::arg("plots") = false);
}
