// manqala: plan, run and report quantum mancala state-preparation experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "manqala/artifacts.hpp"
#include "manqala/error.hpp"
#include "manqala/rng.hpp"

namespace fs = std::filesystem;
using namespace manqala;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kUnconverged = 3 };

struct Options {
  std::string config;
  std::string out_dir = ".";
  std::string plan_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  std::optional<std::size_t> shots;
  std::optional<int> repetitions;
  std::optional<std::string> strategy;
  std::optional<double> threshold;
  std::optional<std::string> metric_mode;
  std::size_t samples = 1;
  unsigned workers = 0;
};

Scenario load(const Options& o) {
  Scenario s = parse_scenario(o.config);
  if (o.seed) s.seed = *o.seed;
  if (o.trajectories) s.trajectories = *o.trajectories;
  if (o.shots) s.shots = *o.shots;
  if (o.strategy) {
    if (*o.strategy != "all") parse_strategy(*o.strategy);
    s.strategy = *o.strategy;
  }
  if (o.threshold) {
    if (!(*o.threshold > 0.0 && *o.threshold <= 1.0)) {
      throw ConfigError("--threshold must lie in (0, 1]");
    }
    s.threshold = *o.threshold;
  }
  if (o.metric_mode) s.metric = parse_metric_mode(*o.metric_mode);
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "resolved scenario (hash " << format_hash(scenario_hash(s))
            << ", seed " << s.seed << "):\n"
            << scenario_to_json(s) << "\n";
  return s;
}

fs::path prepare_out_dir(const Options& o) {
  fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error("output directory " + o.out_dir + " is not writable");
  }
  return dir;
}

ArtifactHeader header_of(const Scenario& s) { return {scenario_hash(s), s.seed}; }

fs::path plan_file(const Options& o) {
  return o.plan_path.empty() ? fs::path(o.out_dir) / "plan.json" : fs::path(o.plan_path);
}

int cmd_plan(const Options& o) {
  const Scenario s = load(o);
  const fs::path dir = prepare_out_dir(o);
  Experiment ex = make_experiment(s);

  PlanArtifact plan;
  plan.header = header_of(s);
  plan.sites = s.sites;
  plan.particles = s.particles;
  plan.target = s.target;
  plan.horizon = s.horizon;
  for (Strategy strategy : scenario_strategies(s)) {
    ControllerConfig cfg{strategy, s.target, ex.times, s.max_repetitions, {}, {}};
    cfg = plan_controller(std::move(cfg), ex.initial);
    precompute_times(cfg, ex.initial);
    StrategyPlan sp{strategy, cfg.demarcation, cfg.moves.value_or(std::vector<Move>{})};
    plan.strategies.push_back(std::move(sp));
  }
  plan.tables = ex.times->tables();
  const fs::path out = plan_file(o);
  write_file(out.string(), plan_to_json(plan));
  std::cout << "wrote " << out.string() << " (" << plan.tables.size()
            << " designated-time tables)\n";
  return kOk;
}

Experiment experiment_with_plan(const Scenario& s, const Options& o) {
  const fs::path path = plan_file(o);
  if (!fs::exists(path)) {
    throw ConfigError("no plan at " + path.string() + "; run `manqala plan` first");
  }
  const PlanArtifact plan = plan_from_json(read_file(path.string()));
  if (plan.sites != s.sites || plan.particles != s.particles || plan.target != s.target) {
    throw ConfigError("plan " + path.string() + " was made for a different lattice or target");
  }
  Experiment ex = make_experiment(s);
  for (const auto& table : plan.tables) ex.times->preload(table);
  return ex;
}

int cmd_run(const Options& o) {
  Scenario s = load(o);
  if (o.repetitions) s.max_repetitions = *o.repetitions;
  const fs::path dir = prepare_out_dir(o);
  const Experiment ex = experiment_with_plan(s, o);
  const ArtifactHeader header = header_of(s);

  int status = kOk;
  for (Strategy strategy : scenario_strategies(s)) {
    EnsembleOptions opts;
    opts.trajectories = s.trajectories;
    opts.master_seed = s.seed;
    opts.budget.max_repetitions = s.max_repetitions;
    opts.budget.max_time = s.max_jt;
    opts.workers = o.workers;
    const ControllerConfig cfg{strategy, s.target, ex.times, s.max_repetitions, {}, {}};
    EnsembleResult result = run_ensemble(ex, cfg, opts);

    TrajectoryOptions detailed;
    detailed.keep_samples = true;
    const ControllerConfig planned = plan_controller(cfg, ex.initial);
    for (std::size_t k = 0; k < std::min(o.samples, result.records.size()); ++k) {
      result.records[k] = run_trajectory(ex, planned, k, trajectory_seed(s.seed, k),
                                         opts.budget, detailed);
    }

    const std::string name = to_string(strategy);
    std::ostringstream stats, traj;
    write_stats_csv(stats, header, result.stats);
    write_trajectory_csv(traj, header, result.records);
    write_file((dir / ("stats_" + name + ".csv")).string(), stats.str());
    write_file((dir / ("trajectories_" + name + ".csv")).string(), traj.str());

    std::size_t successes = 0;
    for (const auto& r : result.records) successes += r.success ? 1 : 0;
    const Convergence c = convergence_time(result.stats, s.threshold);
    std::cout << name << ": " << successes << "/" << result.records.size()
              << " reached the target; mean d_B >= " << s.threshold << " at Jt = "
              << (c.time ? std::to_string(*c.time) : std::string("never"))
              << ", average std " << c.average_std << "\n";
    if (successes != result.records.size()) status = kUnconverged;
  }
  return status;
}

int cmd_histogram(const Options& o) {
  const Scenario s = load(o);
  const fs::path dir = prepare_out_dir(o);
  const Experiment ex = experiment_with_plan(s, o);
  std::vector<int> reps = s.histogram_repetitions;
  if (o.repetitions) reps = {*o.repetitions};

  std::vector<SuccessHistogram> all;
  for (Strategy strategy : scenario_strategies(s)) {
    for (int r : reps) {
      const ControllerConfig cfg{strategy, s.target, ex.times, std::nullopt, {}, {}};
      all.push_back(success_histogram(ex, cfg, r, s.shots, s.seed, o.workers));
      std::printf("%-12s reps=%d target=%.4f initial=%.4f rest=%.4f\n",
                  to_string(strategy), r, all.back().target, all.back().initial,
                  all.back().rest);
    }
  }
  std::ostringstream out;
  write_histogram_csv(out, header_of(s), all);
  write_file((dir / "histogram.csv").string(), out.str());
  return kOk;
}

int cmd_report(const Options& o) {
  const Scenario s = load(o);
  const fs::path dir = prepare_out_dir(o);
  std::vector<StrategySummary> summaries;
  std::map<std::string, std::size_t> slot;
  for (Strategy strategy : scenario_strategies(s)) {
    slot[to_string(strategy)] = summaries.size();
    summaries.push_back({to_string(strategy), std::nullopt, 0.0, {}});
  }

  bool any_data = false;
  int status = kOk;
  for (auto& summary : summaries) {
    const fs::path path = dir / ("stats_" + summary.strategy + ".csv");
    if (!fs::exists(path)) continue;
    std::ifstream in(path);
    for (const auto& stats : read_stats_csv(in)) {
      const Convergence c = convergence_time(stats, s.threshold);
      summary.convergence_time = c.time;
      summary.average_std = c.average_std;
      any_data = true;
      if (!c.time) status = kUnconverged;
    }
  }
  const fs::path hist = dir / "histogram.csv";
  if (fs::exists(hist)) {
    std::ifstream in(hist);
    for (const auto& row : read_histogram_csv(in)) {
      auto it = slot.find(row.strategy);
      if (it == slot.end()) continue;
      summaries[it->second].histogram[row.repetitions][row.label] = row.probability;
      any_data = true;
    }
  }
  if (!any_data) throw ConfigError("no stats or histogram CSVs in " + o.out_dir);

  const std::string json = summary_to_json(header_of(s), s.threshold, summaries);
  write_file((dir / "summary.json").string(), json);
  std::cout << json;
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum mancala state preparation: plan, run and report"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", o.out_dir, "Directory for artifacts");
    sub->add_option("--plan", o.plan_path, "Plan artifact (default <out-dir>/plan.json)");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--strategy", o.strategy, "fumes, zfumes, manqala, mod-manqala or all");
    sub->add_option("--metric-mode", o.metric_mode, "eq2 or cumulative");
    sub->add_option("--threshold", o.threshold, "Convergence threshold on mean d_B");
    sub->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  };
  CLI::App* plan = app.add_subcommand("plan", "Precompute designated times, demarcation and moves");
  CLI::App* run = app.add_subcommand("run", "Run trajectory ensembles and write stats CSVs");
  CLI::App* histogram = app.add_subcommand("histogram", "Success histograms by repetition count");
  CLI::App* report = app.add_subcommand("report", "Summarize convergence and histograms");
  for (CLI::App* sub : {plan, run, histogram, report}) add_common(sub);
  run->add_option("--trajectories", o.trajectories, "Trajectories per strategy");
  run->add_option("--repetitions", o.repetitions, "Repetition budget per trajectory");
  run->add_option("--samples", o.samples, "Trajectories that keep grid-sample rows");
  histogram->add_option("--shots", o.shots, "Trajectories per histogram cell");
  histogram->add_option("--repetitions", o.repetitions, "Single repetition count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*plan) return cmd_plan(o);
    if (*run) return cmd_run(o);
    if (*histogram) return cmd_histogram(o);
    return cmd_report(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
