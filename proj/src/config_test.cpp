#include <doctest.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "tvpf/config.hpp"
#include "tvpf/error.hpp"

using namespace tvpf;

namespace {

std::string with(const ExperimentConfig& cfg, const std::string& pointer,
                 const nlohmann::json& value) {
  nlohmann::json j = nlohmann::json::parse(serialize_config(cfg));
  j[nlohmann::json::json_pointer(pointer)] = value;
  return j.dump();
}

std::string without(const ExperimentConfig& cfg, const std::string& pointer) {
  nlohmann::json j = nlohmann::json::parse(serialize_config(cfg));
  const auto ptr = nlohmann::json::json_pointer(pointer);
  j[ptr.parent_pointer()].erase(ptr.back());
  return j.dump();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("canned configurations") {
  const ExperimentConfig adv = advection_logistic_config();
  CHECK(adv.problem.kind == ProblemKind::Advection);
  CHECK(adv.mesh_intervals == 50);
  CHECK(adv.observation.locations.size() == 25);
  CHECK(adv.observation.locations.front() == 0.1);
  CHECK(adv.observation.locations.back() == 4.9);
  CHECK(adv.observation.interval == 0.05);
  CHECK(adv.filter.obs_noise_sd == 0.75);
  CHECK(adv.filter.particles == 1000);
  CHECK(adv.filter.discount == 0.96);
  CHECK(adv.integrator.substeps == 4);

  const ExperimentConfig heat = heat_sine_config();
  CHECK(heat.problem.kind == ProblemKind::Heat);
  CHECK(heat.mesh_intervals == 30);
  CHECK(heat.observation.locations.size() == 8);
  CHECK(heat.observation.interval == 0.1);
  CHECK(heat.filter.obs_noise_sd == 1.5);
  CHECK(heat.report.probes == std::vector<double>{0.5, 1.5});

  CHECK(canned_config("heat_sine") == heat);
  CHECK_THROWS_AS(canned_config("wave"), ValidationError);
}

TEST_CASE("round trip through JSON") {
  for (const auto& cfg : {advection_logistic_config(), heat_sine_config()}) {
    CHECK(parse_config(serialize_config(cfg)) == cfg);
  }
  ExperimentConfig custom = heat_sine_config();
  custom.observation.sigma_noise = 0.25;
  custom.observation.noise_rule = NoiseRule::TemporalPerNode;
  custom.filter.theta_prior.kind = PriorSpec::Kind::Explicit;
  custom.filter.theta_prior.ranges = {{0.1, 0.9}};
  custom.filter.resampler = Resampler::Systematic;
  custom.seed = 18446744073709551615ull;
  CHECK(parse_config(serialize_config(custom)) == custom);
}

TEST_CASE("shipped config files match the canned configurations") {
  const std::filesystem::path dir = TVPF_SOURCE_DIR "/configs";
  CHECK(load_config((dir / "advection_logistic.json").string()) == advection_logistic_config());
  CHECK(load_config((dir / "heat_sine.json").string()) == heat_sine_config());
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), IoError);
}

TEST_CASE("malformed configs are rejected") {
  const ExperimentConfig cfg = heat_sine_config();
  CHECK_THROWS_AS(parse_config("{not json"), ValidationError);
  CHECK_THROWS_AS(parse_config("[]"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(with(cfg, "/filter/bogus", 1)), "filter.bogus: unknown key",
                       ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/problem/v", 1.0)), ValidationError);
  CHECK_THROWS_AS(parse_config(without(cfg, "/mesh/M")), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/mesh/M", 2.5)), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/filter/N", 1)), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/filter/delta", 0.2)), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/filter/sigma_D", 0.0)), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/filter/resampler", "stratified")), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/filter/theta_prior/rule", "gamma")), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/observation/noise_rule", "global")), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/observation/dt_obs", -0.1)), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/integrator/K", 0)), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/problem/kind", "wave")), ValidationError);
  CHECK_THROWS_AS(parse_config(with(cfg, "/seed", -1)), ValidationError);
}

TEST_CASE("data hash covers only data-defining fields") {
  const ExperimentConfig base = advection_logistic_config();
  const std::string h = data_hash(base);
  CHECK(h.size() == 16);
  CHECK(data_hash(base) == h);

  ExperimentConfig filter_change = base;
  filter_change.filter.particles = 50;
  filter_change.filter.obs_noise_sd = 2.0;
  filter_change.report.histogram_bins = 10;
  filter_change.name = "other";
  CHECK(data_hash(filter_change) == h);

  ExperimentConfig seed_change = base;
  seed_change.seed = 2;
  CHECK(data_hash(seed_change) != h);
  ExperimentConfig mesh_change = base;
  mesh_change.mesh_intervals = 100;
  CHECK(data_hash(mesh_change) != h);
  ExperimentConfig obs_change = base;
  obs_change.observation.noise_fraction = 0.1;
  CHECK(data_hash(obs_change) != h);
}

TEST_CASE("filter settings resolve priors against the initial truth") {
  const ExperimentConfig cfg = heat_sine_config();
  const std::vector<double> u0{2.0, 0.0, -4.0};
  const FilterConfig f = make_filter_config(cfg, u0, 0.5);
  REQUIRE(f.state_prior.size() == 3);
  CHECK(f.state_prior[0] == UniformRange{1.0, 2.5});
  CHECK(f.state_prior[1] == UniformRange{-0.05, 0.05});
  CHECK(f.state_prior[2] == UniformRange{-5.0, -2.0});
  CHECK(f.theta_prior[0] == UniformRange{0.25, 0.625});
  CHECK(f.seed == cfg.seed);
  CHECK(f.obs_noise_sd == 1.5);

  ExperimentConfig wrong = cfg;
  wrong.filter.state_prior.kind = PriorSpec::Kind::Explicit;
  wrong.filter.state_prior.ranges = {{0.0, 1.0}};
  CHECK_THROWS_AS(make_filter_config(wrong, u0, 0.5), ValidationError);
}

}
