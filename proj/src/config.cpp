#include "tvpf/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tvpf/error.hpp"

namespace tvpf {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) {
    throw ValidationError((path.empty() ? std::string("config") : path) +
                          ": expected an object");
  }
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  expect_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ValidationError(join(path, key) + ": unknown key");
  }
}

const json& child(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ValidationError(join(path, key) + ": missing");
  return j.at(key);
}

double number(const json& j, const std::string& path, const char* key) {
  const json& v = child(j, path, key);
  if (!v.is_number()) throw ValidationError(join(path, key) + ": expected a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& path, const char* key,
                 double fallback) {
  return j.contains(key) ? number(j, path, key) : fallback;
}

std::int64_t integer(const json& j, const std::string& path, const char* key) {
  const json& v = child(j, path, key);
  if (!v.is_number_integer()) {
    throw ValidationError(join(path, key) + ": expected an integer");
  }
  return v.get<std::int64_t>();
}

std::string text(const json& j, const std::string& path, const char* key) {
  const json& v = child(j, path, key);
  if (!v.is_string()) throw ValidationError(join(path, key) + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& j, const std::string& path, const char* key) {
  const json& v = child(j, path, key);
  if (!v.is_array()) throw ValidationError(join(path, key) + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ValidationError(join(path, key) + "[" + std::to_string(i) +
                            "]: expected a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<UniformRange> range_list(const json& j, const std::string& path,
                                     const char* key) {
  const json& v = child(j, path, key);
  const std::string where = join(path, key);
  if (!v.is_array()) throw ValidationError(where + ": expected an array of [lower, upper]");
  std::vector<UniformRange> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& r = v[i];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      throw ValidationError(where + "[" + std::to_string(i) +
                            "]: expected [lower, upper]");
    }
    out.push_back({r[0].get<double>(), r[1].get<double>()});
  }
  return out;
}

json ranges_to_json(const std::vector<UniformRange>& ranges) {
  json out = json::array();
  for (const auto& r : ranges) out.push_back({r.lower, r.upper});
  return out;
}

// {"name": ..., <param>: <value>, ...}
NamedFunction named_function(const json& j, const std::string& path) {
  expect_object(j, path);
  NamedFunction f;
  f.name = text(j, path, "name");
  for (const auto& [key, value] : j.items()) {
    if (key == "name") continue;
    if (!value.is_number()) throw ValidationError(join(path, key) + ": expected a number");
    f.params[key] = value.get<double>();
  }
  return f;
}

json named_function_to_json(const NamedFunction& f) {
  json out = {{"name", f.name}};
  for (const auto& [key, value] : f.params) out[key] = value;
  return out;
}

ProblemSpec problem_from_json(const json& j) {
  const std::string path = "problem";
  expect_object(j, path);
  ProblemSpec p;
  p.kind = problem_kind_from_string(text(j, path, "kind"));
  if (p.kind == ProblemKind::Advection) {
    check_keys(j, path, {"kind", "L", "T_final", "v", "initial_condition", "theta_truth"});
    p.coefficient = number(j, path, "v");
  } else {
    check_keys(j, path, {"kind", "L", "T_final", "alpha", "initial_condition",
                         "theta_truth", "source"});
    p.coefficient = number(j, path, "alpha");
    const json& source = child(j, path, "source");
    check_keys(source, "problem.source", {"mu", "gamma"});
    p.source_mu = number(source, "problem.source", "mu");
    p.source_gamma = number(source, "problem.source", "gamma");
  }
  p.length = number(j, path, "L");
  p.final_time = number(j, path, "T_final");
  p.initial_condition =
      named_function(child(j, path, "initial_condition"), "problem.initial_condition");
  p.theta_truth = named_function(child(j, path, "theta_truth"), "problem.theta_truth");
  return p;
}

json problem_to_json(const ProblemSpec& p) {
  json out = {{"kind", to_string(p.kind)},
              {"L", p.length},
              {"T_final", p.final_time},
              {"initial_condition", named_function_to_json(p.initial_condition)},
              {"theta_truth", named_function_to_json(p.theta_truth)}};
  if (p.kind == ProblemKind::Advection) {
    out["v"] = p.coefficient;
  } else {
    out["alpha"] = p.coefficient;
    out["source"] = {{"mu", p.source_mu}, {"gamma", p.source_gamma}};
  }
  return out;
}

PriorSpec prior_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  PriorSpec prior;
  const std::string rule = text(j, path, "rule");
  if (rule == "multiplicative") {
    check_keys(j, path, {"rule", "lower_factor", "upper_factor", "zero_halfwidth",
                         "zero_threshold"});
    const MultiplicativePrior defaults;
    prior.kind = PriorSpec::Kind::Multiplicative;
    prior.factors.lower_factor = number_or(j, path, "lower_factor", defaults.lower_factor);
    prior.factors.upper_factor = number_or(j, path, "upper_factor", defaults.upper_factor);
    prior.factors.zero_halfwidth =
        number_or(j, path, "zero_halfwidth", defaults.zero_halfwidth);
    prior.factors.zero_threshold =
        number_or(j, path, "zero_threshold", defaults.zero_threshold);
  } else if (rule == "explicit") {
    check_keys(j, path, {"rule", "ranges"});
    prior.kind = PriorSpec::Kind::Explicit;
    prior.ranges = range_list(j, path, "ranges");
  } else {
    throw ValidationError(join(path, "rule") + ": unknown rule '" + rule +
                          "' (expected multiplicative or explicit)");
  }
  return prior;
}

json prior_to_json(const PriorSpec& prior) {
  if (prior.kind == PriorSpec::Kind::Explicit) {
    return {{"rule", "explicit"}, {"ranges", ranges_to_json(prior.ranges)}};
  }
  return {{"rule", "multiplicative"},
          {"lower_factor", prior.factors.lower_factor},
          {"upper_factor", prior.factors.upper_factor},
          {"zero_halfwidth", prior.factors.zero_halfwidth},
          {"zero_threshold", prior.factors.zero_threshold}};
}

Resampler resampler_from_string(const std::string& name, const std::string& path) {
  if (name == "multinomial") return Resampler::Multinomial;
  if (name == "systematic") return Resampler::Systematic;
  throw ValidationError(path + ": unknown resampler '" + name +
                        "' (expected multinomial or systematic)");
}

std::string to_string(Resampler r) {
  return r == Resampler::Multinomial ? "multinomial" : "systematic";
}

json data_blocks(const ExperimentConfig& cfg) {
  json obs = {{"x", cfg.observation.locations},
              {"dt_obs", cfg.observation.interval},
              {"noise_rule", to_string(cfg.observation.noise_rule)},
              {"noise_fraction", cfg.observation.noise_fraction}};
  if (cfg.observation.sigma_noise) obs["sigma_noise"] = *cfg.observation.sigma_noise;
  return {{"problem", problem_to_json(cfg.problem)},
          {"mesh", {{"M", cfg.mesh_intervals}, {"truth_refinement", cfg.truth_refinement}}},
          {"observation", obs},
          {"integrator", {{"K", cfg.integrator.substeps}}},
          {"seed", cfg.seed}};
}

json to_json(const ExperimentConfig& cfg) {
  json out = data_blocks(cfg);
  out["name"] = cfg.name;
  out["output_dir"] = cfg.output_dir;
  const FilterBlock& f = cfg.filter;
  out["filter"] = {{"N", f.particles},
                   {"delta", f.discount},
                   {"sigma_C", f.state_noise_sd},
                   {"sigma_D", f.obs_noise_sd},
                   {"state_prior", prior_to_json(f.state_prior)},
                   {"theta_prior", prior_to_json(f.theta_prior)},
                   {"sigmaE_prior", ranges_to_json(f.drift_prior)},
                   {"resampler", to_string(f.resampler)}};
  out["report"] = {{"probes", cfg.report.probes},
                   {"burn_in_fraction", cfg.report.burn_in_fraction},
                   {"histogram_bins", cfg.report.histogram_bins}};
  return out;
}

ExperimentConfig from_json(const json& j) {
  check_keys(j, "", {"name", "seed", "output_dir", "problem", "mesh", "observation",
                     "filter", "integrator", "report"});
  ExperimentConfig cfg;
  cfg.name = j.contains("name") ? text(j, "", "name") : std::string();
  cfg.output_dir = j.contains("output_dir") ? text(j, "", "output_dir") : std::string();
  const json& seed = child(j, "", "seed");
  if (!seed.is_number_unsigned()) throw ValidationError("seed: expected a nonnegative integer");
  cfg.seed = seed.get<std::uint64_t>();

  cfg.problem = problem_from_json(child(j, "", "problem"));

  const json& mesh = child(j, "", "mesh");
  check_keys(mesh, "mesh", {"M", "truth_refinement"});
  cfg.mesh_intervals = static_cast<int>(integer(mesh, "mesh", "M"));
  if (mesh.contains("truth_refinement")) {
    cfg.truth_refinement = static_cast<int>(integer(mesh, "mesh", "truth_refinement"));
  }

  const json& obs = child(j, "", "observation");
  check_keys(obs, "observation", {"x", "dt_obs", "noise_rule", "noise_fraction", "sigma_noise"});
  cfg.observation.locations = number_list(obs, "observation", "x");
  cfg.observation.interval = number(obs, "observation", "dt_obs");
  if (obs.contains("noise_rule")) {
    cfg.observation.noise_rule = noise_rule_from_string(text(obs, "observation", "noise_rule"));
  }
  cfg.observation.noise_fraction = number_or(obs, "observation", "noise_fraction", 0.2);
  if (obs.contains("sigma_noise")) {
    cfg.observation.sigma_noise = number(obs, "observation", "sigma_noise");
  }

  const json& f = child(j, "", "filter");
  check_keys(f, "filter", {"N", "delta", "sigma_C", "sigma_D", "state_prior", "theta_prior",
                           "sigmaE_prior", "resampler"});
  const std::int64_t n = integer(f, "filter", "N");
  if (n < 0) throw ValidationError("filter.N: must be nonnegative");
  cfg.filter.particles = static_cast<std::size_t>(n);
  cfg.filter.discount = number(f, "filter", "delta");
  cfg.filter.state_noise_sd = number(f, "filter", "sigma_C");
  cfg.filter.obs_noise_sd = number(f, "filter", "sigma_D");
  cfg.filter.state_prior = prior_from_json(child(f, "filter", "state_prior"), "filter.state_prior");
  cfg.filter.theta_prior = prior_from_json(child(f, "filter", "theta_prior"), "filter.theta_prior");
  cfg.filter.drift_prior = range_list(f, "filter", "sigmaE_prior");
  if (f.contains("resampler")) {
    cfg.filter.resampler =
        resampler_from_string(text(f, "filter", "resampler"), "filter.resampler");
  }

  const json& integ = child(j, "", "integrator");
  check_keys(integ, "integrator", {"K"});
  cfg.integrator.substeps = static_cast<int>(integer(integ, "integrator", "K"));

  if (j.contains("report")) {
    const json& r = j.at("report");
    check_keys(r, "report", {"probes", "burn_in_fraction", "histogram_bins"});
    if (r.contains("probes")) cfg.report.probes = number_list(r, "report", "probes");
    cfg.report.burn_in_fraction = number_or(r, "report", "burn_in_fraction", 0.1);
    if (r.contains("histogram_bins")) {
      cfg.report.histogram_bins = static_cast<int>(integer(r, "report", "histogram_bins"));
    }
  }
  return cfg;
}

std::vector<double> grid(double first, double step, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    // Rounded so the serialized values read 0.3 rather than 0.30000000000000004.
    out.push_back(std::round((first + step * k) * 1e9) / 1e9);
  }
  return out;
}

ExperimentConfig common_config() {
  ExperimentConfig cfg;
  cfg.filter.particles = 1000;
  cfg.filter.discount = 0.96;
  cfg.filter.state_noise_sd = 0.1;
  cfg.filter.drift_prior = {{0.05, 10.0}};
  cfg.integrator.substeps = 4;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

std::vector<UniformRange> PriorSpec::resolve(std::span<const double> truth,
                                             const std::string& where) const {
  if (kind == Kind::Multiplicative) return multiplicative_prior(truth, factors);
  if (ranges.size() != truth.size()) {
    throw ValidationError(where + ": expected " + std::to_string(truth.size()) +
                          " ranges, got " + std::to_string(ranges.size()));
  }
  return ranges;
}

void ExperimentConfig::validate() const {
  problem.validate();
  if (mesh_intervals < 2) throw ValidationError("mesh.M: must be >= 2");
  if (truth_refinement < 1) throw ValidationError("mesh.truth_refinement: must be >= 1");

  if (observation.locations.empty()) throw ValidationError("observation.x: empty");
  for (const double x : observation.locations) {
    if (!(x >= 0.0 && x <= problem.length)) {
      throw ValidationError("observation.x: location " + std::to_string(x) +
                            " outside [0, L]");
    }
  }
  if (!(observation.interval > 0.0)) throw ValidationError("observation.dt_obs: must be > 0");
  if (!(observation.noise_fraction >= 0.0)) {
    throw ValidationError("observation.noise_fraction: must be >= 0");
  }
  if (observation.sigma_noise && !(*observation.sigma_noise >= 0.0)) {
    throw ValidationError("observation.sigma_noise: must be >= 0");
  }

  if (filter.particles < 2) throw ValidationError("filter.N: must be >= 2");
  if (!(filter.discount > 1.0 / 3.0 && filter.discount < 1.0)) {
    throw ValidationError("filter.delta: must lie in (1/3, 1)");
  }
  if (!(filter.state_noise_sd >= 0.0)) throw ValidationError("filter.sigma_C: must be >= 0");
  if (!(filter.obs_noise_sd > 0.0)) throw ValidationError("filter.sigma_D: must be > 0");
  if (filter.drift_prior.size() != 1) {
    throw ValidationError("filter.sigmaE_prior: expected exactly one range");
  }
  for (const auto& r : filter.drift_prior) {
    if (!(r.lower >= 0.0 && r.lower <= r.upper && std::isfinite(r.upper))) {
      throw ValidationError("filter.sigmaE_prior: need 0 <= lower <= upper");
    }
  }
  if (filter.theta_prior.kind == PriorSpec::Kind::Explicit &&
      filter.theta_prior.ranges.size() != 1) {
    throw ValidationError("filter.theta_prior: expected exactly one range");
  }
  for (const PriorSpec* prior : {&filter.state_prior, &filter.theta_prior}) {
    for (const auto& r : prior->ranges) {
      if (!(r.lower <= r.upper)) {
        throw ValidationError("filter prior range has lower > upper");
      }
    }
  }

  if (integrator.substeps < 1) throw ValidationError("integrator.K: must be >= 1");

  if (report.histogram_bins < 1) throw ValidationError("report.histogram_bins: must be >= 1");
  if (!(report.burn_in_fraction >= 0.0 && report.burn_in_fraction < 1.0)) {
    throw ValidationError("report.burn_in_fraction: must lie in [0, 1)");
  }
  for (const double x : report.probes) {
    if (!(x >= 0.0 && x <= problem.length)) {
      throw ValidationError("report.probes: location " + std::to_string(x) +
                            " outside [0, L]");
    }
  }
}

ExperimentConfig advection_logistic_config() {
  ExperimentConfig cfg = common_config();
  cfg.name = "advection_logistic";
  cfg.problem = advection_logistic_problem();
  cfg.mesh_intervals = 50;
  cfg.observation.locations = grid(0.1, 0.2, 25);
  cfg.observation.interval = 0.05;
  cfg.filter.obs_noise_sd = 0.75;
  cfg.report.probes = {2.0, 3.3};
  cfg.output_dir = "runs/advection_logistic";
  return cfg;
}

ExperimentConfig heat_sine_config() {
  ExperimentConfig cfg = common_config();
  cfg.name = "heat_sine";
  cfg.problem = heat_sine_problem();
  cfg.mesh_intervals = 30;
  cfg.observation.locations = grid(0.1, 0.4, 8);
  cfg.observation.interval = 0.1;
  cfg.filter.obs_noise_sd = 1.5;
  cfg.report.probes = {0.5, 1.5};
  cfg.output_dir = "runs/heat_sine";
  return cfg;
}

ExperimentConfig canned_config(const std::string& name) {
  if (name == "advection_logistic") return advection_logistic_config();
  if (name == "heat_sine") return heat_sine_config();
  throw ValidationError("unknown canned config '" + name +
                        "' (expected advection_logistic or heat_sine)");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg = from_json(j);
  cfg.validate();
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string data_hash(const ExperimentConfig& cfg) {
  const std::string canonical = data_blocks(cfg).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

FilterConfig make_filter_config(const ExperimentConfig& cfg,
                                std::span<const double> initial_state,
                                double initial_theta) {
  FilterConfig f;
  f.particles = cfg.filter.particles;
  f.discount = cfg.filter.discount;
  f.state_noise_sd = cfg.filter.state_noise_sd;
  f.obs_noise_sd = cfg.filter.obs_noise_sd;
  f.state_prior = cfg.filter.state_prior.resolve(initial_state, "filter.state_prior");
  f.theta_prior = cfg.filter.theta_prior.resolve(std::span<const double>(&initial_theta, 1),
                                                 "filter.theta_prior");
  f.drift_prior = cfg.filter.drift_prior;
  f.seed = cfg.seed;
  f.resampler = cfg.filter.resampler;
  f.validate();
  return f;
}

}  // namespace tvpf
