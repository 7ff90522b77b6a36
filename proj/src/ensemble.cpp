#include "manqala/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "manqala/error.hpp"
#include "manqala/measurement.hpp"
#include "manqala/rng.hpp"

namespace manqala {

namespace {

/// Runs body(k) for k in [0, count) on a pool of threads.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = cursor++; k < count; k = cursor++) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard guard(failure_mutex);
          if (!failure) failure = std::current_exception();
          cursor = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

class TrajectoryRunner {
 public:
  TrajectoryRunner(const Experiment& ex, TrajectoryRecord& record,
                   const TrajectoryOptions& options)
      : ex_(ex),
        record_(record),
        options_(options),
        target_state_(fock_state(ex.evolver->basis_ptr(), ex.target)),
        target_n_(to_expectations(ex.target)),
        initial_n_(occupation_expectations(ex.initial)) {}

  double distance(const ExpectationVector& n) const {
    return bosonic_distance(n, target_n_, initial_n_, ex_.metric);
  }

  void event(EventKind kind, const StateVector& psi, double time,
             std::optional<Occupation> outcome = std::nullopt) {
    TrajectoryEvent e;
    e.time = time;
    e.kind = kind;
    e.occupations = occupation_expectations(psi);
    e.bosonic_distance = distance(e.occupations);
    e.target_probability = target_probability(psi, target_state_);
    e.outcome = std::move(outcome);
    record_.events.push_back(std::move(e));
  }

  void sample(const StateVector& psi, double time) {
    if (options_.keep_samples) {
      event(EventKind::sample, psi, time);
      record_.grid_distance.push_back(record_.events.back().bosonic_distance);
    } else {
      record_.grid_distance.push_back(distance(occupation_expectations(psi)));
    }
  }

  /// Samples grid points in [start, start + duration).
  void sample_segment(const EvolutionSegment& seg, double start, double duration) {
    if (!options_.record_grid) return;
    const double end = start + duration;
    for (;;) {
      const double t = static_cast<double>(next_grid_) * ex_.grid_step;
      if (t >= end - 1e-12) break;
      sample(seg.at(std::max(0.0, t - start)), t);
      ++next_grid_;
    }
  }

  void sample_origin(const StateVector& psi) {
    if (!options_.record_grid) return;
    sample(psi, 0.0);
    next_grid_ = 1;
  }

 private:
  const Experiment& ex_;
  TrajectoryRecord& record_;
  const TrajectoryOptions& options_;
  StateVector target_state_;
  ExpectationVector target_n_;
  ExpectationVector initial_n_;
  std::size_t next_grid_ = 0;
};

}  // namespace

Experiment Experiment::create(const LatticeShape& shape, const ModelParams& model,
                              StateVector initial, Occupation target,
                              MetricMode metric, double grid_step,
                              double horizon) {
  auto basis = enumerate_basis(shape);
  if (static_cast<int>(target.size()) != shape.sites ||
      total_particles(target) != shape.particles) {
    throw ArgumentError("target " + format_occupation(target) +
                        " does not fit the lattice");
  }
  if (!initial.basis || initial.basis->sites() != shape.sites ||
      initial.basis->particles() != shape.particles) {
    throw ArgumentError("initial state lives on a different lattice");
  }
  if (!(grid_step > 0.0)) throw ArgumentError("grid step must be > 0");
  initial.basis = basis;
  auto evolver =
      std::make_shared<const Evolver>(basis, build_hamiltonian(*basis, model));
  Experiment ex;
  ex.evolver = evolver;
  ex.times = std::make_shared<TimeOracle>(evolver, horizon);
  ex.initial = std::move(initial);
  ex.target = std::move(target);
  ex.metric = metric;
  ex.grid_step = grid_step;
  return ex;
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::evolve_start: return "evolve_start";
    case EventKind::measure: return "measure";
    case EventKind::lock_change: return "lock_change";
    case EventKind::done: return "done";
    case EventKind::sample: return "sample";
  }
  return "?";
}

TrajectoryRecord run_trajectory(const Experiment& experiment,
                                const ControllerConfig& config,
                                std::size_t trajectory_id, std::uint64_t seed,
                                const Budget& budget,
                                const TrajectoryOptions& options) {
  TrajectoryRecord record;
  record.trajectory_id = trajectory_id;
  record.seed = seed;
  TrajectoryRunner runner(experiment, record, options);
  Rng rng(seed);

  ControllerConfig cfg = config;
  if (!cfg.times) cfg.times = experiment.times;
  if (budget.max_repetitions) cfg.max_repetitions = budget.max_repetitions;
  auto prepared = prepare_controller(std::move(cfg), experiment.initial);
  Controller& controller = prepared.controller;
  std::optional<Action> queued = std::move(prepared.initial_action);

  StateVector psi = experiment.initial;
  std::optional<Occupation> board = as_fock(psi);
  double now = 0.0;
  std::optional<LockSpec> lock_in_force;
  runner.sample_origin(psi);

  for (;;) {
    if (!queued && budget.max_time && now >= *budget.max_time) break;
    Action action = queued ? std::move(*queued) : controller.next(board);
    queued.reset();

    if (const auto* done = std::get_if<DoneAction>(&action)) {
      record.success = done->success;
      runner.event(EventKind::done, psi, now, board);
      break;
    }
    if (const auto* ev = std::get_if<EvolveAction>(&action)) {
      if (!(ev->duration > 0.0)) throw Error("controller emitted an empty evolution");
      if (lock_in_force != ev->lock) {
        if (lock_in_force || !ev->lock.empty()) {
          runner.event(EventKind::lock_change, psi, now);
        }
        lock_in_force = ev->lock;
      }
      runner.event(EventKind::evolve_start, psi, now);
      const EvolutionSegment seg(experiment.evolver->subspace(ev->lock), psi);
      runner.sample_segment(seg, now, ev->duration);
      psi = seg.at(ev->duration);
      now += ev->duration;
      board.reset();
      if (ev->landing) {
        const auto landed = as_fock(psi);
        if (landed != ev->landing) {
          throw Error("deterministic move missed its landing board " +
                      format_occupation(*ev->landing));
        }
        psi = fock_state(experiment.evolver->basis_ptr(), *landed);
        board = landed;
      }
      continue;
    }
    const auto& me = std::get<MeasureAction>(action);
    MeasurementOutcome outcome = sample_measurement(psi, me.sites, rng);
    psi = std::move(outcome.post_state);
    board = as_fock(psi);
    ++record.measurements;
    runner.event(EventKind::measure, psi, now, board ? *board : outcome.counts);
  }

  record.repetitions = controller.repetitions();
  record.end_time = now;
  record.final_board = board;
  record.final_distance = runner.distance(occupation_expectations(psi));
  return record;
}

EnsembleStats aggregate(const std::vector<TrajectoryRecord>& records,
                        double grid_step, const std::string& strategy) {
  EnsembleStats stats;
  stats.strategy = strategy;
  stats.grid_step = grid_step;
  stats.trajectories = records.size();
  std::size_t points = 1;
  for (const auto& r : records) points = std::max(points, r.grid_distance.size() + 1);
  stats.time_grid.resize(points);
  stats.mean.assign(points, 0.0);
  stats.stddev.assign(points, 0.0);
  if (records.empty()) return stats;

  auto value = [](const TrajectoryRecord& r, std::size_t k) {
    return k < r.grid_distance.size() ? r.grid_distance[k] : r.final_distance;
  };
  const double n = static_cast<double>(records.size());
  for (std::size_t k = 0; k < points; ++k) {
    stats.time_grid[k] = static_cast<double>(k) * grid_step;
    double sum = 0.0;
    for (const auto& r : records) sum += value(r, k);
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& r : records) {
      const double d = value(r, k) - mean;
      sq += d * d;
    }
    stats.mean[k] = mean;
    stats.stddev[k] = std::sqrt(sq / n);
  }
  return stats;
}

EnsembleResult run_ensemble(const Experiment& experiment,
                            const ControllerConfig& config,
                            const EnsembleOptions& options) {
  ControllerConfig cfg = config;
  if (!cfg.times) cfg.times = experiment.times;
  cfg = plan_controller(std::move(cfg), experiment.initial);

  EnsembleResult result;
  result.records.resize(options.trajectories);
  parallel_for(options.trajectories, options.workers, [&](std::size_t k) {
    result.records[k] =
        run_trajectory(experiment, cfg, k, trajectory_seed(options.master_seed, k),
                       options.budget, options.trajectory);
  });
  result.stats = aggregate(result.records, experiment.grid_step,
                           to_string(config.strategy));
  return result;
}

SuccessHistogram success_histogram(const Experiment& experiment,
                                   ControllerConfig config, int repetitions,
                                   std::size_t shots, std::uint64_t master_seed,
                                   unsigned workers) {
  if (repetitions < 1) throw ArgumentError("repetitions must be >= 1");
  if (shots == 0) throw ArgumentError("shots must be >= 1");
  EnsembleOptions options;
  options.trajectories = shots;
  options.master_seed = master_seed;
  options.budget.max_repetitions = repetitions;
  options.workers = workers;
  options.trajectory.record_grid = false;
  const auto result = run_ensemble(experiment, config, options);

  SuccessHistogram h;
  h.strategy = to_string(config.strategy);
  h.repetitions = repetitions;
  h.shots = shots;
  const auto initial_board = as_fock(experiment.initial);
  std::map<Occupation, std::size_t> counts;
  std::size_t target = 0, initial = 0;
  for (const auto& r : result.records) {
    if (!r.final_board) throw Error("trajectory ended without a measured board");
    ++counts[*r.final_board];
    if (*r.final_board == experiment.target) {
      ++target;
    } else if (initial_board && *r.final_board == *initial_board) {
      ++initial;
    }
  }
  const double n = static_cast<double>(shots);
  h.target = static_cast<double>(target) / n;
  h.initial = static_cast<double>(initial) / n;
  h.rest = static_cast<double>(shots - target - initial) / n;
  for (const auto& [board, c] : counts) h.outcomes[board] = static_cast<double>(c) / n;
  return h;
}

Convergence convergence_time(const EnsembleStats& stats, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ArgumentError("threshold must lie in (0, 1]");
  }
  Convergence c;
  std::size_t last = stats.mean.size();
  for (std::size_t k = 0; k < stats.mean.size(); ++k) {
    if (stats.mean[k] >= threshold) {
      c.time = stats.time_grid[k];
      last = k + 1;
      break;
    }
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < last; ++k) sum += stats.stddev[k];
  c.average_std = last ? sum / static_cast<double>(last) : 0.0;
  return c;
}

}  // namespace manqala
