// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails,
// except those listed with --known-failures C3,C4 (which still print FAIL).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tvpf/filter.hpp"
#include "tvpf/pipeline.hpp"
#include "tvpf/stats.hpp"

using namespace tvpf;
namespace fs = std::filesystem;

namespace {

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4};

struct SeedRun {
  std::uint64_t seed = 0;
  Metrics metrics;
  double final_weight_sum = 0.0;
};

SeedRun run_seed(ExperimentConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  const Simulation sim = simulate_experiment(cfg);
  const FilterSummary est = estimate_experiment(cfg, sim.disc, sim.data.measurements);
  SeedRun r;
  r.seed = seed;
  r.metrics = compute_metrics(sim.truth, sim.disc.state_x, est, cfg.report, cfg.problem.final_time);
  r.final_weight_sum = est.final_weights.sum();
  return r;
}

std::vector<SeedRun> run_all(const ExperimentConfig& cfg) {
  std::vector<SeedRun> runs;
  for (const std::uint64_t s : kSeeds) runs.push_back(run_seed(cfg, s));
  return runs;
}

std::set<std::string> known_failures;
int failures = 0;
int tolerated = 0;

void report(const std::string& id, const std::string& title, bool pass,
            const std::string& detail) {
  std::printf("%s %s %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), title.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (pass) return;
  if (known_failures.count(id) != 0) {
    ++tolerated;
  } else {
    ++failures;
  }
}

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

// C1: advection theta reproduction.
void advection_theta(const std::vector<SeedRun>& runs) {
  int good = 0;
  std::string detail;
  for (const SeedRun& r : runs) {
    const bool ok = r.metrics.theta_rmse <= 0.20 && r.metrics.theta_coverage95 >= 0.85;
    good += ok;
    detail += "seed " + std::to_string(r.seed) + " rmse " + fmt("%.3f", r.metrics.theta_rmse) +
              " cov95 " + fmt("%.3f", r.metrics.theta_coverage95) + (ok ? " ok; " : " miss; ");
  }
  report("C1", "advection theta RMSE <= 0.20 and 95% coverage >= 0.85 in 3 of 4 seeds",
         good >= 3, detail + std::to_string(good) + "/4");
}

// C2: sigma_E posterior at the final step.
void advection_drift(const std::vector<SeedRun>& runs) {
  int good = 0;
  std::string detail;
  for (const SeedRun& r : runs) {
    const double mean = r.metrics.drift.mean;
    const bool ok = mean >= 0.1 && mean <= 0.6 && r.metrics.drift_width95 < 0.5;
    good += ok;
    detail += "seed " + std::to_string(r.seed) + " mean " + fmt("%.3f", mean) + " width " +
              fmt("%.3f", r.metrics.drift_width95) + (ok ? " ok; " : " miss; ");
  }
  report("C2", "sigma_E mean in [0.1, 0.6] and 95% width < 0.5 in 3 of 4 seeds", good >= 3,
         detail + std::to_string(good) + "/4");
}

// C3: heat theta and probe coverage.
void heat_theta(const std::vector<SeedRun>& runs) {
  int good = 0;
  std::string detail;
  for (const SeedRun& r : runs) {
    bool ok = r.metrics.theta_rmse <= 0.15;
    detail += "seed " + std::to_string(r.seed) + " rmse " + fmt("%.3f", r.metrics.theta_rmse);
    for (const ProbeMetrics& p : r.metrics.probes) {
      ok = ok && p.coverage95 >= 0.85;
      detail += " cov95@" + fmt("%.2g", p.x) + " " + fmt("%.3f", p.coverage95);
    }
    good += ok;
    detail += ok ? " ok; " : " miss; ";
  }
  report("C3", "heat theta RMSE <= 0.15 and probe 95% coverage >= 0.85 in 3 of 4 seeds",
         good >= 3, detail + std::to_string(good) + "/4");
}

// C4: normalized field error, heat below advection for every seed.
void field_error_order(const std::vector<SeedRun>& adv, const std::vector<SeedRun>& heat) {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < adv.size(); ++i) {
    const double a = adv[i].metrics.normalized_field_error;
    const double h = heat[i].metrics.normalized_field_error;
    ok = ok && h < a;
    detail += "seed " + std::to_string(adv[i].seed) + " heat " + fmt("%.4f", h) + " advection " +
              fmt("%.4f", a) + "; ";
  }
  report("C4", "normalized field error heat < advection for every seed", ok, detail);
}

// C5: ||u_K - u_2K|| / ||u_2K - u_4K|| over the whole canned trajectory.
void integrator_order() {
  bool ok = true;
  std::string detail;
  for (const ExperimentConfig& cfg : {advection_logistic_config(), heat_sine_config()}) {
    const Discretization disc = discretize(cfg);
    const int k = cfg.integrator.substeps;
    const auto run = [&](int substeps) {
      return simulate_truth(cfg.problem, disc.mesh, disc.system, {substeps}, disc.schedule.times)
          .states;
    };
    const Eigen::MatrixXd a = run(k);
    const Eigen::MatrixXd b = run(2 * k);
    const Eigen::MatrixXd c = run(4 * k);
    const double ratio = (a - b).norm() / (b - c).norm();
    ok = ok && ratio >= 3.4 && ratio <= 4.6;
    detail += cfg.name + " " + fmt("%.3f", ratio) + "; ";
  }
  report("C5", "self-convergence ratio in [3.4, 4.6] on both systems", ok, detail);
}

struct Check {
  std::string name;
  bool pass;
};

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary);
  std::ifstream fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  const std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  return sa == sb;
}

bool directories_identical(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> left;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) left.push_back(fs::relative(e.path(), a));
  }
  std::size_t right = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) right += e.is_regular_file();
  if (left.empty() || left.size() != right) return false;
  return std::all_of(left.begin(), left.end(),
                     [&](const fs::path& rel) { return same_bytes(a / rel, b / rel); });
}

// C6: invariant suite.
void invariants(const std::vector<SeedRun>& adv, const std::vector<SeedRun>& heat) {
  std::vector<Check> checks;

  double worst_sum = 0.0;
  for (const auto* runs : {&adv, &heat}) {
    for (const SeedRun& r : *runs) worst_sum = std::max(worst_sum, std::abs(r.final_weight_sum - 1.0));
  }
  {
    std::mt19937_64 engine(5);
    std::normal_distribution<double> normal(0.0, 3.0);
    RowMatrix pred(1000, 4);
    for (Eigen::Index i = 0; i < pred.size(); ++i) pred.data()[i] = normal(engine);
    const std::vector<double> y{0.5, -1.0};
    const std::vector<std::size_t> observed{0, 3};
    const Eigen::VectorXd prior = Eigen::VectorXd::Constant(1000, 1e-3);
    worst_sum = std::max(worst_sum,
                         std::abs(fitness_weights(prior, pred, y, observed, 0.2, 1).sum() - 1.0));
    worst_sum = std::max(worst_sum,
                         std::abs(reweight(pred * 1.1, pred, y, observed, 0.2, 1).sum() - 1.0));
  }
  checks.push_back({"weight normalization " + fmt("%.1e", worst_sum), worst_sum <= 1e-12});

  const std::size_t big = 10000;
  FilterConfig lw;
  lw.particles = big;
  lw.state_prior = {{0.0, 1.0}};
  lw.theta_prior = {{0.0, 1.0}};
  lw.drift_prior = {{0.05, 10.0}};
  lw.seed = 11;
  const Ensemble e = init_ensemble(lw);
  Eigen::VectorXd w(static_cast<Eigen::Index>(big));
  std::mt19937_64 wengine(3);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  for (Eigen::Index n = 0; n < w.size(); ++n) w[n] = unit(wengine);
  w /= w.sum();
  const DriftMoments m = update_drift_moments(e.drift_sigmas, w);
  const RowMatrix shrunk = shrink_drift(e.drift_sigmas, m.mean, lw.discount);
  const double shrunk_mean = (w.transpose() * shrunk.col(0))(0);
  const double mean_err = std::abs(shrunk_mean - m.mean[0]) / m.mean[0];
  checks.push_back({"shrinkage mean preservation " + fmt("%.1e", mean_err), mean_err <= 1e-14});

  const RowMatrix jittered = jitter_drift(shrunk, m.cov, lw.discount, lw.seed, 1);
  const DriftMoments after = update_drift_moments(jittered, w);
  const double var_ratio = after.cov(0, 0) / m.cov(0, 0);
  checks.push_back({"Liu-West variance ratio " + fmt("%.4f", var_ratio),
                    std::abs(var_ratio - 1.0) <= 0.05});

  bool counts_ok = true;
  Eigen::VectorXd g(5);
  g << 0.05, 0.25, 0.1, 0.37, 0.23;
  for (std::size_t step = 1; step <= 50; ++step) {
    std::vector<double> sys_counts(5, 0.0);
    for (const std::size_t k : resample_indices(g, 7, step, Resampler::Systematic)) sys_counts[k] += 1;
    for (int k = 0; k < 5; ++k) {
      counts_ok = counts_ok && sys_counts[static_cast<std::size_t>(k)] >= std::floor(5 * g[k]) &&
                  sys_counts[static_cast<std::size_t>(k)] <= std::ceil(5 * g[k]);
    }
  }
  Eigen::VectorXd wide = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(big));
  for (Eigen::Index n = 0; n < wide.size(); ++n) wide[n] = g[n % 5] / (static_cast<double>(big) / 5);
  std::vector<double> multi(5, 0.0);
  for (const std::size_t k : resample_indices(wide, 7, 1)) multi[k % 5] += 1;
  for (int k = 0; k < 5; ++k) {
    const double expected = static_cast<double>(big) * g[k];
    counts_ok = counts_ok && std::abs(multi[static_cast<std::size_t>(k)] - expected) <=
                                 4.0 * std::sqrt(expected * (1.0 - g[k]));
  }
  checks.push_back({"resampling count bounds", counts_ok});

  {
    ExperimentConfig cfg = advection_logistic_config();
    cfg.problem.theta_truth = {"constant", {{"value", 0.0}}};
    const Discretization disc = discretize(cfg);
    const TruthTrajectory t =
        simulate_truth(cfg.problem, disc.mesh, disc.system, cfg.integrator, disc.schedule.times);
    const double s0 = t.states.row(0).sum();
    double drift = 0.0;
    for (Eigen::Index j = 0; j < t.states.rows(); ++j) {
      drift = std::max(drift, std::abs(t.states.row(j).sum() - s0) / std::abs(s0));
    }
    checks.push_back({"advection mass conservation " + fmt("%.1e", drift), drift <= 1e-10});
  }

  {
    const Discretization disc = discretize(heat_sine_config());
    const Eigen::MatrixXd a = disc.system.matrix.to_dense();
    const bool symmetric = (a - a.transpose()).cwiseAbs().maxCoeff() == 0.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const double top = eig.eigenvalues().maxCoeff();
    checks.push_back({"heat matrix symmetric, largest eigenvalue " + fmt("%.3g", top),
                      symmetric && top < 0.0});
  }

  {
    std::mt19937_64 engine(21);
    std::normal_distribution<double> normal(0.0, 1.0);
    bool monotone = true;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(257), wq(257);
      double total = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = normal(engine);
        wq[i] = std::exp(2.0 * normal(engine));
        total += wq[i];
      }
      for (double& x : wq) x /= total;
      const WeightedSample sample(v, wq);
      double prev = -INFINITY;
      for (int q = 0; q <= 200; ++q) {
        const double value = weighted_quantile(sample, q / 200.0);
        monotone = monotone && value >= prev;
        prev = value;
      }
    }
    checks.push_back({"quantile monotonicity", monotone});
  }

  {
    const fs::path root =
        fs::temp_directory_path() / ("tvpf_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    ExperimentConfig cfg = advection_logistic_config();
    cfg.filter.particles = 250;
    const auto pipeline = [&](const std::string& tag) {
      const fs::path dir = root / tag;
      cmd_simulate(cfg, dir / "data");
      cmd_estimate(cfg, dir / "data", dir / "est");
      cmd_report(dir / "data", dir / "est", dir / "report", true);
      return dir;
    };
    const bool identical = directories_identical(pipeline("first"), pipeline("second"));
    fs::remove_all(root);
    checks.push_back({"byte-identical pipeline re-run", identical});
  }

  bool ok = true;
  std::string detail;
  for (const Check& c : checks) {
    ok = ok && c.pass;
    detail += c.name + (c.pass ? " ok; " : " FAILED; ");
  }
  report("C6", "invariant suite", ok, detail);
}

// C7: two identical particles with zero noise against the truth oracle.
void oracle_equivalence() {
  bool ok = true;
  std::string detail;
  for (ExperimentConfig cfg : {advection_logistic_config(), heat_sine_config()}) {
    const double theta = cfg.problem.theta(0.0);
    cfg.problem.theta_truth = {"constant", {{"value", theta}}};
    cfg.filter.particles = 2;
    cfg.filter.state_noise_sd = 0.0;
    cfg.filter.drift_prior = {{0.0, 0.0}};
    cfg.filter.state_prior.factors = {1.0, 1.0, 0.0, 0.0};
    cfg.filter.theta_prior.factors = {1.0, 1.0, 0.0, 0.0};
    const Simulation sim = simulate_experiment(cfg);
    const FilterSummary est = estimate_experiment(cfg, sim.disc, sim.data.measurements);
    const Eigen::MatrixXd field = mean_field(est);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < field.rows(); ++j) {
      const double scale = sim.truth.states.row(j).norm();
      worst = std::max(worst, (field.row(j) - sim.truth.states.row(j)).norm() / scale);
    }
    ok = ok && worst <= 1e-10;
    detail += cfg.name + " max relative deviation " + fmt("%.2e", worst) + "; ";
  }
  report("C7", "zero-noise filter matches the truth oracle within 1e-10", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failures" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string id; std::getline(list, id, ',');) known_failures.insert(id);
    } else {
      std::fprintf(stderr, "usage: %s [--known-failures C3,C4]\n", argv[0]);
      return 2;
    }
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::vector<SeedRun> adv = run_all(advection_logistic_config());
    advection_theta(adv);
    advection_drift(adv);
    const std::vector<SeedRun> heat = run_all(heat_sine_config());
    heat_theta(heat);
    field_error_order(adv, heat);
    integrator_order();
    invariants(adv, heat);
    oracle_equivalence();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance run aborted: %s\n", e.what());
    return 1;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criteria failed unexpectedly, %d known failures, %.1f s\n", failures,
              tolerated, secs);
  return failures == 0 ? 0 : 1;
}
