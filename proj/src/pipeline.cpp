#include "tvpf/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "plot.hpp"
#include "tvpf/error.hpp"
#include "tvpf/io.hpp"

namespace tvpf {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kBandColumns[] = {"mean", "lo68", "hi68", "lo95", "hi95"};

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

std::vector<double> band_row(double lead, const Band& b) {
  return {lead, b.mean, b.lo68, b.hi68, b.lo95, b.hi95};
}

Band band_from_row(const std::vector<double>& row, std::size_t first) {
  return {row[first], row[first + 1], row[first + 2], row[first + 3], row[first + 4]};
}

std::vector<std::string> band_header(std::initializer_list<const char*> lead) {
  std::vector<std::string> h(lead.begin(), lead.end());
  h.insert(h.end(), std::begin(kBandColumns), std::end(kBandColumns));
  return h;
}

void require_directory(const fs::path& dir, const char* what) {
  if (!fs::is_directory(dir)) {
    throw IoError(std::string(what) + " directory '" + dir.string() + "' does not exist");
  }
}

// Splits a time-major long table (t, x, value) into the distinct times, the x
// sequence of one time block, and a (times x xs) value matrix.
struct LongField {
  std::vector<double> times;
  std::vector<double> xs;
  Eigen::MatrixXd values;
};

LongField unpack_long(const CsvTable& table, const std::string& value_column,
                      const fs::path& path) {
  const std::size_t tc = table.column("t");
  const std::size_t xc = table.column("x");
  const std::size_t vc = table.column(value_column);
  LongField f;
  for (const auto& row : table.rows) {
    if (f.times.empty() || !same_time(row[tc], f.times.back())) f.times.push_back(row[tc]);
    if (f.times.size() == 1) f.xs.push_back(row[xc]);
  }
  const std::size_t width = f.xs.size();
  if (width == 0 || table.rows.size() != f.times.size() * width) {
    throw IoError(path.string() + ": not a complete time-major (t, x) table");
  }
  f.values.resize(static_cast<Eigen::Index>(f.times.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t j = r / width;
    const std::size_t k = r % width;
    if (!same_time(table.rows[r][xc], f.xs[k]) || !same_time(table.rows[r][tc], f.times[j])) {
      throw IoError(path.string() + ": row " + std::to_string(r + 2) +
                    " breaks the time-major (t, x) layout");
    }
    f.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = table.rows[r][vc];
  }
  return f;
}

CsvTable pack_long(const std::vector<double>& times, std::span<const double> xs,
                   const Eigen::MatrixXd& values, const std::string& value_column) {
  CsvTable t;
  t.header = {"t", "x", value_column};
  t.rows.reserve(times.size() * xs.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      t.rows.push_back({times[j], xs[k],
                        values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))});
    }
  }
  return t;
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::size_t probe_index(std::span<const double> state_x, double x) {
  for (std::size_t i = 0; i < state_x.size(); ++i) {
    if (same_time(state_x[i], x)) return i;
  }
  throw ValidationError("report.probes: x = " + std::to_string(x) +
                        " is not a state node of the mesh");
}

}  // namespace

Discretization discretize(const ExperimentConfig& cfg) {
  cfg.validate();
  Discretization d;
  d.mesh = build_mesh(cfg.problem.length, cfg.mesh_intervals);
  d.system = assemble(cfg.problem, d.mesh);
  d.schedule = make_schedule(d.mesh, d.system, cfg.observation.locations,
                             cfg.observation.interval, cfg.problem.final_time);
  d.initial_state.resize(static_cast<Eigen::Index>(d.system.dim()));
  const auto u0 = make_initial_condition(cfg.problem.initial_condition);
  for (std::size_t i = 0; i < d.system.dim(); ++i) {
    const double x = d.mesh.nodes[d.system.state_to_node[i]];
    d.state_x.push_back(x);
    d.initial_state[static_cast<Eigen::Index>(i)] = u0(x);
  }
  return d;
}

double courant_number(const ExperimentConfig& cfg) {
  if (cfg.problem.kind != ProblemKind::Advection) return 0.0;
  const double h = cfg.problem.length / cfg.mesh_intervals;
  const double dt = cfg.observation.interval / cfg.integrator.substeps;
  return std::abs(cfg.problem.coefficient) * dt / h;
}

Simulation simulate_experiment(const ExperimentConfig& cfg) {
  Simulation sim;
  sim.disc = discretize(cfg);
  sim.truth = simulate_truth_refined(cfg.problem, sim.disc.mesh, cfg.integrator,
                                     sim.disc.schedule.times, cfg.truth_refinement);
  double sigma = 0.0;
  if (cfg.observation.sigma_noise) {
    sigma = *cfg.observation.sigma_noise;
  } else {
    const Eigen::MatrixXd window = sim.truth.states.bottomRows(sim.truth.states.rows() - 1);
    sigma = calibrate_noise(window, cfg.observation.noise_fraction, cfg.observation.noise_rule);
  }
  sim.data = generate_observations(sim.truth, sim.disc.schedule, sigma, cfg.seed);
  return sim;
}

FilterSummary estimate_experiment(const ExperimentConfig& cfg, const Discretization& disc,
                                  const Eigen::MatrixXd& measurements) {
  const std::vector<double> u0(disc.initial_state.data(),
                               disc.initial_state.data() + disc.initial_state.size());
  const FilterConfig filter = make_filter_config(cfg, u0, cfg.problem.theta(0.0));
  return run_filter(disc.system, disc.schedule, measurements, filter, cfg.integrator);
}

Eigen::MatrixXd mean_field(const FilterSummary& estimate) {
  const auto rows = static_cast<Eigen::Index>(estimate.size());
  const auto cols = rows == 0 ? Eigen::Index{0}
                              : static_cast<Eigen::Index>(estimate.states.front().size());
  Eigen::MatrixXd field(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index i = 0; i < cols; ++i) {
      field(j, i) = estimate.states[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].mean;
    }
  }
  return field;
}

Metrics compute_metrics(const TruthTrajectory& truth, std::span<const double> state_x,
                        const FilterSummary& estimate, const ReportBlock& report,
                        double final_time) {
  const std::size_t steps = truth.times.size();
  if (estimate.size() != steps) {
    throw ValidationError("estimate has " + std::to_string(estimate.size()) +
                          " time points, truth has " + std::to_string(steps));
  }
  for (std::size_t j = 0; j < steps; ++j) {
    if (!same_time(estimate.times[j], truth.times[j])) {
      throw ValidationError("estimate and truth time grids differ at index " +
                            std::to_string(j));
    }
  }
  if (static_cast<std::size_t>(truth.states.cols()) != state_x.size()) {
    throw ValidationError("truth field width does not match the state nodes");
  }

  Metrics m;
  m.burn_in_time = report.burn_in_fraction * final_time;
  std::vector<std::size_t> scored;
  for (std::size_t j = 0; j < steps; ++j) {
    if (truth.times[j] >= m.burn_in_time - 1e-9 * std::max(1.0, final_time)) scored.push_back(j);
  }
  if (scored.empty()) throw ValidationError("no time points after the burn-in window");
  m.scored_steps = scored.size();

  auto score = [&](auto&& truth_at, auto&& band_at, double& rmse_out, double& c68,
                   double& c95) {
    std::vector<double> est, tru, lo68, hi68, lo95, hi95;
    for (const std::size_t j : scored) {
      const Band b = band_at(j);
      tru.push_back(truth_at(j));
      est.push_back(b.mean);
      lo68.push_back(b.lo68);
      hi68.push_back(b.hi68);
      lo95.push_back(b.lo95);
      hi95.push_back(b.hi95);
    }
    rmse_out = rmse(est, tru);
    c68 = coverage(tru, lo68, hi68);
    c95 = coverage(tru, lo95, hi95);
  };

  score([&](std::size_t j) { return truth.theta[static_cast<Eigen::Index>(j)]; },
        [&](std::size_t j) { return estimate.theta[j][0]; }, m.theta_rmse,
        m.theta_coverage68, m.theta_coverage95);

  std::vector<double> theta_mean(steps);
  for (std::size_t j = 0; j < steps; ++j) theta_mean[j] = estimate.theta[j][0].mean;
  m.theta_rmse_all = rmse(theta_mean, std::span<const double>(truth.theta.data(), steps));

  for (const double x : report.probes) {
    const std::size_t i = probe_index(state_x, x);
    ProbeMetrics p;
    p.x = x;
    score([&](std::size_t j) {
            return truth.states(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
          },
          [&](std::size_t j) { return estimate.states[j][i]; }, p.rmse, p.coverage68,
          p.coverage95);
    m.probes.push_back(p);
  }

  const Eigen::MatrixXd errors = error_field(truth.states, mean_field(estimate));
  m.field_mean_abs_error = errors.mean();
  m.truth_rms = std::sqrt(truth.states.array().square().mean());
  m.normalized_field_error = m.truth_rms > 0.0 ? m.field_mean_abs_error / m.truth_rms : 0.0;

  const auto n = static_cast<std::size_t>(estimate.final_weights.size());
  const WeightedSample drift(std::span<const double>(estimate.final_drift.data(), n),
                             std::span<const double>(estimate.final_weights.data(), n));
  m.drift = summarize(drift);
  m.drift_width95 = m.drift.hi95 - m.drift.lo95;
  m.min_ess = *std::min_element(estimate.ess.begin(), estimate.ess.end());
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  json probes = json::array();
  for (const auto& p : m.probes) {
    probes.push_back({{"x", p.x},
                      {"rmse", p.rmse},
                      {"coverage68", p.coverage68},
                      {"coverage95", p.coverage95}});
  }
  const json out = {
      {"burn_in_time", m.burn_in_time},
      {"scored_steps", m.scored_steps},
      {"theta", {{"rmse", m.theta_rmse},
                 {"rmse_all_steps", m.theta_rmse_all},
                 {"coverage68", m.theta_coverage68},
                 {"coverage95", m.theta_coverage95}}},
      {"probes", probes},
      {"field", {{"mean_abs_error", m.field_mean_abs_error},
                 {"truth_rms", m.truth_rms},
                 {"normalized_error", m.normalized_field_error}}},
      {"sigmaE", {{"mean", m.drift.mean},
                  {"lo68", m.drift.lo68},
                  {"hi68", m.drift.hi68},
                  {"lo95", m.drift.lo95},
                  {"hi95", m.drift.hi95},
                  {"width95", m.drift_width95}}},
      {"min_ess", m.min_ess}};
  return out.dump(2) + "\n";
}

void cmd_simulate(const ExperimentConfig& cfg, const fs::path& out) {
  const Simulation sim = simulate_experiment(cfg);
  ensure_directory(out);
  const auto& times = sim.truth.times;

  write_csv(out / "truth.csv", pack_long(times, sim.disc.state_x, sim.truth.states, "u"));

  CsvTable theta{{"t", "theta"}, {}};
  for (std::size_t j = 0; j < times.size(); ++j) {
    theta.rows.push_back({times[j], sim.truth.theta[static_cast<Eigen::Index>(j)]});
  }
  write_csv(out / "theta_true.csv", theta);

  write_csv(out / "observations.csv", pack_long(sim.disc.schedule.times,
                                                sim.disc.schedule.locations,
                                                sim.data.measurements, "y"));

  const json meta = {{"config", json::parse(serialize_config(cfg))},
                     {"data_hash", data_hash(cfg)},
                     {"sigma_noise", sim.data.sigma_noise},
                     {"seed", cfg.seed},
                     {"state_dim", sim.disc.system.dim()},
                     {"observed", sim.disc.schedule.observed_count()},
                     {"steps", sim.disc.schedule.time_count()}};
  write_text(out / "meta.json", meta.dump(2) + "\n");
}

StoredSimulation load_simulation(const fs::path& data) {
  require_directory(data, "data");
  const json meta = read_json(data / "meta.json");
  StoredSimulation s;
  try {
    s.config = parse_config(meta.at("config").dump());
    s.data_hash = meta.at("data_hash").get<std::string>();
    s.sigma_noise = meta.at("sigma_noise").get<double>();
  } catch (const json::exception& e) {
    throw IoError((data / "meta.json").string() + ": " + e.what());
  }

  const fs::path truth_path = data / "truth.csv";
  const LongField truth = unpack_long(read_csv(truth_path), "u", truth_path);
  s.truth.times = truth.times;
  s.truth.states = truth.values;
  s.state_x = truth.xs;

  const CsvTable theta = read_csv(data / "theta_true.csv");
  const auto theta_values = theta.values("theta");
  if (theta_values.size() != s.truth.times.size()) {
    throw IoError("theta_true.csv and truth.csv have different time grids");
  }
  s.truth.theta = Eigen::Map<const Eigen::VectorXd>(theta_values.data(),
                                                     static_cast<Eigen::Index>(theta_values.size()));

  const fs::path obs_path = data / "observations.csv";
  s.measurements = unpack_long(read_csv(obs_path), "y", obs_path).values;
  return s;
}

void cmd_estimate(const ExperimentConfig& cfg, const fs::path& data, const fs::path& out,
                  bool ignore_hash) {
  require_directory(data, "data");
  const json meta = read_json(data / "meta.json");
  const std::string expected = data_hash(cfg);
  const std::string stored = meta.value("data_hash", std::string());
  if (!ignore_hash && stored != expected) {
    throw ValidationError("data in '" + data.string() + "' was generated from a different "
                          "problem/observation setup (hash " + stored + ", config gives " +
                          expected + "); pass --ignore-hash to run anyway");
  }

  const Discretization disc = discretize(cfg);
  const fs::path obs_path = data / "observations.csv";
  const LongField obs = unpack_long(read_csv(obs_path), "y", obs_path);
  const auto& sched = disc.schedule;
  bool matches = obs.times.size() == sched.time_count() && obs.xs.size() == sched.observed_count();
  for (std::size_t j = 0; matches && j < obs.times.size(); ++j) {
    matches = same_time(obs.times[j], sched.times[j]);
  }
  for (std::size_t k = 0; matches && k < obs.xs.size(); ++k) {
    matches = same_time(obs.xs[k], sched.locations[k]);
  }
  if (!matches) {
    throw ValidationError("observations.csv does not match the configured observation schedule");
  }

  const FilterSummary s = estimate_experiment(cfg, disc, obs.values);
  ensure_directory(out);

  CsvTable theta{band_header({"t"}), {}};
  CsvTable drift{band_header({"t"}), {}};
  CsvTable diagnostics{{"t", "ess"}, {}};
  CsvTable states{band_header({"t", "x"}), {}};
  for (std::size_t j = 0; j < s.size(); ++j) {
    theta.rows.push_back(band_row(s.times[j], s.theta[j][0]));
    drift.rows.push_back(band_row(s.times[j], s.drift[j][0]));
    diagnostics.rows.push_back({s.times[j], s.ess[j]});
    for (std::size_t i = 0; i < disc.state_x.size(); ++i) {
      auto row = band_row(disc.state_x[i], s.states[j][i]);
      row.insert(row.begin(), s.times[j]);
      states.rows.push_back(std::move(row));
    }
  }
  write_csv(out / "estimate_theta.csv", theta);
  write_csv(out / "estimate_sigmaE.csv", drift);
  write_csv(out / "estimate_diagnostics.csv", diagnostics);
  write_csv(out / "estimate_states.csv", states);
  write_csv(out / "estimate_field.csv", pack_long(s.times, disc.state_x, mean_field(s), "u"));

  CsvTable posterior{{"sigmaE", "weight"}, {}};
  for (Eigen::Index n = 0; n < s.final_weights.size(); ++n) {
    posterior.rows.push_back({s.final_drift(n, 0), s.final_weights[n]});
  }
  write_csv(out / "sigmaE_posterior.csv", posterior);

  const json est_meta = {{"config", json::parse(serialize_config(cfg))},
                         {"data_hash", stored},
                         {"particles", cfg.filter.particles},
                         {"steps", sched.time_count()}};
  write_text(out / "estimate_meta.json", est_meta.dump(2) + "\n");
}

StoredEstimate load_estimate(const fs::path& est) {
  require_directory(est, "estimate");
  const json meta = read_json(est / "estimate_meta.json");
  StoredEstimate e;
  try {
    e.config = parse_config(meta.at("config").dump());
  } catch (const json::exception& ex) {
    throw IoError((est / "estimate_meta.json").string() + ": " + ex.what());
  }

  FilterSummary& s = e.summary;
  const CsvTable theta = read_csv(est / "estimate_theta.csv");
  const CsvTable drift = read_csv(est / "estimate_sigmaE.csv");
  const CsvTable diagnostics = read_csv(est / "estimate_diagnostics.csv");
  const std::size_t t_col = theta.column("t");
  const std::size_t first = theta.column("mean");
  if (drift.rows.size() != theta.rows.size() || diagnostics.rows.size() != theta.rows.size()) {
    throw IoError("estimate files have different time grids");
  }
  const std::size_t ess_col = diagnostics.column("ess");
  for (std::size_t j = 0; j < theta.rows.size(); ++j) {
    s.times.push_back(theta.rows[j][t_col]);
    s.theta.push_back({band_from_row(theta.rows[j], first)});
    s.drift.push_back({band_from_row(drift.rows[j], drift.column("mean"))});
    s.ess.push_back(diagnostics.rows[j][ess_col]);
  }

  const CsvTable states = read_csv(est / "estimate_states.csv");
  if (s.times.empty() || states.rows.size() % s.times.size() != 0) {
    throw IoError("estimate_states.csv does not match estimate_theta.csv");
  }
  const std::size_t width = states.rows.size() / s.times.size();
  const std::size_t x_col = states.column("x");
  const std::size_t state_first = states.column("mean");
  s.states.assign(s.times.size(), {});
  for (std::size_t r = 0; r < states.rows.size(); ++r) {
    const std::size_t j = r / width;
    if (!same_time(states.rows[r][states.column("t")], s.times[j])) {
      throw IoError("estimate_states.csv is not time-major");
    }
    if (j == 0) e.state_x.push_back(states.rows[r][x_col]);
    s.states[j].push_back(band_from_row(states.rows[r], state_first));
  }

  const CsvTable posterior = read_csv(est / "sigmaE_posterior.csv");
  const auto values = posterior.values("sigmaE");
  const auto weights = posterior.values("weight");
  s.final_drift.resize(static_cast<Eigen::Index>(values.size()), 1);
  s.final_weights.resize(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t n = 0; n < values.size(); ++n) {
    s.final_drift(static_cast<Eigen::Index>(n), 0) = values[n];
    s.final_weights[static_cast<Eigen::Index>(n)] = weights[n];
  }
  return e;
}

Metrics cmd_report(const fs::path& data, const fs::path& est, const fs::path& out, bool plots) {
  const StoredSimulation sim = load_simulation(data);
  const StoredEstimate e = load_estimate(est);
  if (e.state_x.size() != sim.state_x.size()) {
    throw ValidationError("estimate and data were produced on different meshes");
  }
  const ReportBlock& report = e.config.report;
  const Metrics m = compute_metrics(sim.truth, sim.state_x, e.summary, report,
                                    sim.config.problem.final_time);
  ensure_directory(out);

  const Eigen::MatrixXd errors = error_field(sim.truth.states, mean_field(e.summary));
  write_csv(out / "error_field.csv", pack_long(sim.truth.times, sim.state_x, errors, "abs_error"));
  write_text(out / "metrics.json", metrics_to_json(m));

  const auto n = static_cast<std::size_t>(e.summary.final_weights.size());
  const Histogram hist = weighted_histogram(
      WeightedSample(std::span<const double>(e.summary.final_drift.data(), n),
                     std::span<const double>(e.summary.final_weights.data(), n)),
      report.histogram_bins);
  CsvTable hist_table{{"lower", "upper", "mass"}, {}};
  for (std::size_t b = 0; b < hist.mass.size(); ++b) {
    hist_table.rows.push_back({hist.edges[b], hist.edges[b + 1], hist.mass[b]});
  }
  write_csv(out / "sigmaE_histogram.csv", hist_table);

  const std::size_t steps = sim.truth.times.size();
  CsvTable theta{band_header({"t", "truth"}), {}};
  std::vector<double> truth_theta(steps);
  std::vector<Band> theta_bands(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    truth_theta[j] = sim.truth.theta[static_cast<Eigen::Index>(j)];
    theta_bands[j] = e.summary.theta[j][0];
    auto row = band_row(truth_theta[j], theta_bands[j]);
    row.insert(row.begin(), sim.truth.times[j]);
    theta.rows.push_back(std::move(row));
  }
  write_csv(out / "theta_report.csv", theta);

  CsvTable probes{band_header({"t", "x", "truth"}), {}};
  std::vector<std::vector<double>> probe_truth;
  std::vector<std::vector<Band>> probe_bands;
  for (const double x : report.probes) {
    const std::size_t i = probe_index(sim.state_x, x);
    probe_truth.emplace_back();
    probe_bands.emplace_back();
    for (std::size_t j = 0; j < steps; ++j) {
      const double u = sim.truth.states(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      const Band& b = e.summary.states[j][i];
      probe_truth.back().push_back(u);
      probe_bands.back().push_back(b);
      auto row = band_row(u, b);
      row.insert(row.begin(), {sim.truth.times[j], x});
      probes.rows.push_back(std::move(row));
    }
  }
  write_csv(out / "probes.csv", probes);

  if (plots) {
    write_text(out / "theta.svg",
               plot::band_chart("Source amplitude", "t", "theta", sim.truth.times,
                                truth_theta, theta_bands));
    write_text(out / "sigmaE_histogram.svg",
               plot::histogram_chart("Final drift coefficient posterior", "sigma_E", hist));
    write_text(out / "error_field.svg",
               plot::heatmap_chart("Absolute error of the PF mean", sim.truth.times,
                                   sim.state_x, errors));
    for (std::size_t p = 0; p < report.probes.size(); ++p) {
      write_text(out / ("probe_" + std::to_string(p) + ".svg"),
                 plot::band_chart("Solution at x = " + plot::label(report.probes[p]), "t",
                                  "u", sim.truth.times, probe_truth[p], probe_bands[p]));
    }
  }
  return m;
}

}  // namespace tvpf
