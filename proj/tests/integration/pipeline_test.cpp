#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "tvpf/config.hpp"
#include "tvpf/error.hpp"
#include "tvpf/io.hpp"
#include "tvpf/pipeline.hpp"

using namespace tvpf;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tvpf_integration_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_advection() {
  ExperimentConfig cfg = advection_logistic_config();
  cfg.name = "tiny_advection";
  cfg.problem.final_time = 1.0;
  cfg.filter.particles = 80;
  return cfg;
}

ExperimentConfig frozen_heat() {
  ExperimentConfig cfg = heat_sine_config();
  cfg.name = "frozen_heat";
  cfg.problem.final_time = 2.0;
  cfg.problem.theta_truth = {"constant", {{"value", 0.4}}};
  cfg.filter.particles = 2;
  cfg.filter.state_noise_sd = 0.0;
  cfg.filter.drift_prior = {{0.0, 0.0}};
  cfg.filter.state_prior.factors = {1.0, 1.0, 0.0, 0.0};
  cfg.filter.theta_prior.factors = {1.0, 1.0, 0.0, 0.0};
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TVPF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("integration") {

TEST_CASE("simulate, estimate and report through files") {
  const fs::path root = fresh_dir("pipeline");
  const ExperimentConfig cfg = tiny_advection();
  cmd_simulate(cfg, root / "data");
  cmd_estimate(cfg, root / "data", root / "est");
  const Metrics m = cmd_report(root / "data", root / "est", root / "report", true);

  for (const char* f : {"truth.csv", "theta_true.csv", "observations.csv", "meta.json"}) {
    CHECK(fs::exists(root / "data" / f));
  }
  for (const char* f : {"estimate_theta.csv", "estimate_sigmaE.csv", "estimate_states.csv",
                        "estimate_diagnostics.csv", "sigmaE_posterior.csv"}) {
    CHECK(fs::exists(root / "est" / f));
  }
  for (const char* f : {"metrics.json", "error_field.csv", "sigmaE_histogram.csv", "theta.svg",
                        "error_field.svg", "probe_0.svg"}) {
    CHECK(fs::exists(root / "report" / f));
  }

  const StoredSimulation stored = load_simulation(root / "data");
  const Simulation sim = simulate_experiment(cfg);
  CHECK(stored.config == cfg);
  CHECK(stored.truth.states == sim.truth.states);
  CHECK(stored.measurements == sim.data.measurements);
  CHECK(stored.sigma_noise == sim.data.sigma_noise);

  const FilterSummary direct = estimate_experiment(cfg, sim.disc, sim.data.measurements);
  const StoredEstimate est = load_estimate(root / "est");
  REQUIRE(est.summary.size() == direct.size());
  for (std::size_t j = 0; j < direct.size(); ++j) {
    CHECK(est.summary.theta[j][0].mean == direct.theta[j][0].mean);
    CHECK(est.summary.states[j][7].hi95 == direct.states[j][7].hi95);
  }

  const auto json = nlohmann::json::parse(read_text(root / "report" / "metrics.json"));
  CHECK(json.at("theta").at("rmse").get<double>() == m.theta_rmse);
  CHECK(m.scored_steps == 19);
  const CsvTable hist = read_csv(root / "report" / "sigmaE_histogram.csv");
  double mass = 0.0;
  for (const auto& row : hist.rows) mass += row[2];
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  fs::remove_all(root);
}

TEST_CASE("frozen run scores perfectly") {
  const fs::path root = fresh_dir("frozen");
  const ExperimentConfig cfg = frozen_heat();
  cmd_simulate(cfg, root / "data");
  cmd_estimate(cfg, root / "data", root / "est");
  const Metrics m = cmd_report(root / "data", root / "est", root / "report");
  CHECK(m.theta_rmse == 0.0);
  CHECK(m.theta_coverage95 == 1.0);
  CHECK(m.field_mean_abs_error < 1e-12);
  for (const ProbeMetrics& p : m.probes) CHECK(p.coverage95 == 1.0);
  fs::remove_all(root);
}

TEST_CASE("estimate refuses data from a different configuration") {
  const fs::path root = fresh_dir("hash");
  ExperimentConfig cfg = tiny_advection();
  cmd_simulate(cfg, root / "data");
  cfg.seed = 7;
  CHECK_THROWS_AS(cmd_estimate(cfg, root / "data", root / "est"), ValidationError);
  CHECK_NOTHROW(cmd_estimate(cfg, root / "data", root / "est", true));
  cfg.observation.interval = 0.1;
  CHECK_THROWS_AS(cmd_estimate(cfg, root / "data", root / "est2", true), ValidationError);
  CHECK_THROWS_AS(cmd_report(root / "missing", root / "est", root / "r"), IoError);
  fs::remove_all(root);
}

TEST_CASE("command-line exit codes") {
  const fs::path root = fresh_dir("cli");
  const std::string cfg_path = (root / "tiny.json").string();
  write_text(cfg_path, serialize_config(tiny_advection()));
  const std::string data = (root / "data").string();
  const std::string est = (root / "est").string();

  CHECK(run_cli("simulate --config " + cfg_path + " --out " + data + " --seed 5") == 0);
  const auto meta = nlohmann::json::parse(read_text(root / "data" / "meta.json"));
  CHECK(meta.at("seed").get<std::uint64_t>() == 5);
  CHECK(run_cli("estimate --config " + cfg_path + " --data " + data + " --out " + est +
                " --seed 5") == 0);
  CHECK(run_cli("report --data " + data + " --est " + est + " --out " +
                (root / "report").string() + " --plots") == 0);
  CHECK(fs::exists(root / "report" / "theta.svg"));

  CHECK(run_cli("estimate --config " + cfg_path + " --data " + data + " --out " + est) == 2);
  CHECK(run_cli("simulate --config " + cfg_path) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate --config " + (root / "absent.json").string() + " --out " + data) == 1);

  auto bad = nlohmann::json::parse(serialize_config(tiny_advection()));
  bad["filter"]["N"] = 1;
  write_text(root / "bad.json", bad.dump());
  CHECK(run_cli("simulate --config " + (root / "bad.json").string() + " --out " + data) == 2);

  ExperimentConfig degenerate = tiny_advection();
  degenerate.filter.obs_noise_sd = 1e-200;
  write_text(root / "degenerate.json", serialize_config(degenerate));
  const std::string deg = (root / "degenerate.json").string();
  CHECK(run_cli("simulate --config " + deg + " --out " + (root / "ddata").string()) == 0);
  CHECK(run_cli("estimate --config " + deg + " --data " + (root / "ddata").string() + " --out " +
                (root / "dest").string()) == 3);
  fs::remove_all(root);
}

}
