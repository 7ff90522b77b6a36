#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "manqala/metrics.hpp"
#include "manqala/strategies.hpp"

namespace manqala {

/// Everything a trajectory needs besides its controller and seed.
struct Experiment {
  std::shared_ptr<const Evolver> evolver;
  std::shared_ptr<TimeOracle> times;
  StateVector initial;
  Occupation target;
  MetricMode metric = MetricMode::eq2;
  double grid_step = 0.01;

  /// Builds the basis, Hamiltonian and oracle. Throws on particle-total
  /// mismatch between the initial state, target and lattice.
  static Experiment create(const LatticeShape& shape, const ModelParams& model,
                           StateVector initial, Occupation target,
                           MetricMode metric = MetricMode::eq2,
                           double grid_step = 0.01,
                           double horizon = kDefaultHorizon);
};

struct Budget {
  std::optional<int> max_repetitions;
  /// No new action starts once the clock has reached this Jt.
  std::optional<double> max_time;
};

enum class EventKind { evolve_start, measure, lock_change, done, sample };

const char* to_string(EventKind kind);

struct TrajectoryEvent {
  double time = 0.0;
  EventKind kind = EventKind::evolve_start;
  ExpectationVector occupations;
  double bosonic_distance = 0.0;
  double target_probability = 0.0;
  std::optional<Occupation> outcome;
};

struct TrajectoryRecord {
  std::size_t trajectory_id = 0;
  std::uint64_t seed = 0;
  std::vector<TrajectoryEvent> events;
  /// d_B at grid points k·step for k·step < end_time; later points hold
  /// final_distance.
  std::vector<double> grid_distance;
  double final_distance = 0.0;
  double end_time = 0.0;
  bool success = false;
  int repetitions = 0;
  int measurements = 0;
  std::optional<Occupation> final_board;
};

struct TrajectoryOptions {
  bool record_grid = true;
  /// Adds a sample event with full expectations at every grid point.
  bool keep_samples = false;
};

TrajectoryRecord run_trajectory(const Experiment& experiment,
                                const ControllerConfig& config,
                                std::size_t trajectory_id, std::uint64_t seed,
                                const Budget& budget,
                                const TrajectoryOptions& options = {});

struct EnsembleOptions {
  std::size_t trajectories = 1000;
  std::uint64_t master_seed = 0;
  Budget budget;
  unsigned workers = 0;  // 0: hardware concurrency
  TrajectoryOptions trajectory;
};

struct EnsembleStats {
  std::string strategy;
  double grid_step = 0.01;
  std::vector<double> time_grid;
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
  std::size_t trajectories = 0;
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<TrajectoryRecord> records;  // indexed by trajectory id
};

/// Runs trajectories in parallel; trajectory k uses trajectory_seed(master, k)
/// and results are merged by index, so any worker count gives identical
/// output.
EnsembleResult run_ensemble(const Experiment& experiment,
                            const ControllerConfig& config,
                            const EnsembleOptions& options);

/// Mean and population std of d_B on the common grid, extended to the
/// latest end time among the records.
EnsembleStats aggregate(const std::vector<TrajectoryRecord>& records,
                        double grid_step, const std::string& strategy);

struct SuccessHistogram {
  std::string strategy;
  int repetitions = 0;
  std::size_t shots = 0;
  double target = 0.0;
  double initial = 0.0;
  double rest = 0.0;
  std::map<Occupation, double> outcomes;  // final measured board
};

/// `shots` trajectories capped at `repetitions` stochastic rounds, binned by
/// their final measured board.
SuccessHistogram success_histogram(const Experiment& experiment,
                                   ControllerConfig config, int repetitions,
                                   std::size_t shots, std::uint64_t master_seed,
                                   unsigned workers = 0);

struct Convergence {
  std::optional<double> time;  // first grid time with mean d_B >= threshold
  double average_std = 0.0;    // mean of std over grid points up to `time`
};

/// Throws ArgumentError unless 0 < threshold <= 1. When the threshold is
/// never reached the average runs over the whole grid.
Convergence convergence_time(const EnsembleStats& stats, double threshold);

}  // namespace manqala
