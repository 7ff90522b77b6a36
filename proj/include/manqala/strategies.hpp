#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "manqala/demarcation.hpp"
#include "manqala/planner.hpp"

namespace manqala {

enum class Strategy { fumes, zfumes, manqala, mod_manqala };

/// "fumes", "zfumes", "manqala", "mod-manqala". Throws ArgumentError.
Strategy parse_strategy(const std::string& name);
const char* to_string(Strategy strategy);
std::vector<Strategy> all_strategies();

struct EvolveAction {
  double duration = 0.0;
  LockSpec lock;
  /// Set for deterministic moves: the Fock board the evolution must land on.
  std::optional<Occupation> landing;
};

struct MeasureAction {
  std::vector<int> sites;
  /// False for the collapse of a superposition initial state and for the
  /// intermediate measurements of a parallel round.
  bool counted = true;
};

struct DoneAction {
  bool success = false;
};

using Action = std::variant<EvolveAction, MeasureAction, DoneAction>;

struct ControllerConfig {
  Strategy strategy = Strategy::fumes;
  Occupation target;
  std::shared_ptr<const TimeOracle> times;
  /// Stochastic repetitions allowed; unlimited when empty.
  std::optional<int> max_repetitions;
  /// Optional precomputed (mod-)ManQala plan for a Fock initial board. When
  /// absent it is derived from the first observed board.
  std::optional<Demarcation> demarcation;
  std::optional<std::vector<Move>> moves;
};

enum class ControllerPhase { collapse, deterministic, stochastic, finished };

/// Deterministic policy. The caller reports the board it knows after each
/// action (a measured outcome or the landing of a deterministic move), or
/// nothing when the state is not a known Fock state.
///
/// A repetition is one round of the stochastic phase: every unsolved region
/// evolves under its own lock for its designated time and the lattice is
/// measured. FUMES and Z-FUMES have a single region spanning the lattice;
/// (mod-)ManQala has one region per unsolved demarcated group. Before each
/// evolution a region sheds edge runs already at their target counts, which
/// become locked.
class Controller {
 public:
  /// Throws ArgumentError for an inconsistent config.
  explicit Controller(ControllerConfig config);

  Action next(const std::optional<Occupation>& board);

  Strategy strategy() const { return config_.strategy; }
  const Occupation& target() const { return config_.target; }
  ControllerPhase phase() const { return phase_; }
  int repetitions() const { return repetitions_; }

  /// Present once a (mod-)ManQala controller has planned.
  const std::optional<Demarcation>& demarcation() const { return config_.demarcation; }
  const std::optional<std::vector<Move>>& moves() const { return config_.moves; }

 private:
  struct Region {
    int first = 0;
    int last = 0;
  };

  void plan(const Occupation& board);
  void enqueue_moves(const std::vector<Move>& moves);
  Action stochastic_step(const Occupation& board);
  Action finish(bool success);

  ControllerConfig config_;
  int sites_ = 0;
  ControllerPhase phase_ = ControllerPhase::collapse;
  bool planned_ = false;
  std::vector<Region> regions_;
  Occupation settled_board_;  // end of the deterministic phase
  std::deque<Action> pending_;
  std::deque<Region> round_;
  bool round_open_ = false;
  int repetitions_ = 0;
  std::optional<DoneAction> done_;
};

/// Edge-inward locking inside [first, last]: maximal runs at either end whose
/// counts equal the target are pinned. Returns the remaining segment, or
/// nothing when the region already matches.
std::optional<std::pair<int, int>> shrink_region(const Occupation& board,
                                                 const Occupation& target,
                                                 int first, int last);

/// Lock pinning every site outside [first, last] at its board count.
LockSpec complement_lock(const Occupation& board, int first, int last);

/// Fills in the (mod-)ManQala demarcation and compiled moves when the
/// initial state is a Fock state, so every trajectory shares one plan.
ControllerConfig plan_controller(ControllerConfig config,
                                 const StateVector& initial);

/// Lock and intermediate goal for one stochastic evolution of the region
/// [first, last]: the region, optionally shrunk by edge-inward locking, is
/// free and heads for the target; everything else is pinned where it is.
struct SearchStep {
  int first = 0;
  int last = 0;
  LockSpec lock;
  Occupation goal;
};

/// Throws ArgumentError if the region already matches the target.
SearchStep search_step(const Occupation& board, const Occupation& target,
                       int first, int last, bool edge_locking);

/// Resolves, through the config's oracle, every designated time the
/// controller can ask for when started from `initial` (each Fock component
/// of a superposition is planned as its own branch).
void precompute_times(const ControllerConfig& config, const StateVector& initial);

struct PreparedController {
  Controller controller;
  std::optional<Action> initial_action;  // Measure(all) for non-Fock starts
};

PreparedController prepare_controller(ControllerConfig config,
                                      const StateVector& initial);

}  // namespace manqala
