#include "manqala/strategies.hpp"

#include <algorithm>

#include "manqala/error.hpp"
#include "manqala/measurement.hpp"

namespace manqala {

namespace {

bool is_manqala(Strategy s) {
  return s == Strategy::manqala || s == Strategy::mod_manqala;
}

bool same_multiset(Occupation a, Occupation b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

bool matches_on(const Occupation& board, const Occupation& target, int first,
                int last) {
  for (int s = first; s <= last; ++s) {
    if (board[static_cast<std::size_t>(s)] != target[static_cast<std::size_t>(s)]) {
      return false;
    }
  }
  return true;
}

}  // namespace

Strategy parse_strategy(const std::string& name) {
  if (name == "fumes") return Strategy::fumes;
  if (name == "zfumes" || name == "z-fumes") return Strategy::zfumes;
  if (name == "manqala") return Strategy::manqala;
  if (name == "mod-manqala" || name == "mod_manqala") return Strategy::mod_manqala;
  throw ArgumentError("unknown strategy '" + name + "'");
}

const char* to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::fumes: return "fumes";
    case Strategy::zfumes: return "zfumes";
    case Strategy::manqala: return "manqala";
    case Strategy::mod_manqala: return "mod-manqala";
  }
  return "?";
}

std::vector<Strategy> all_strategies() {
  return {Strategy::fumes, Strategy::zfumes, Strategy::manqala,
          Strategy::mod_manqala};
}

std::optional<std::pair<int, int>> shrink_region(const Occupation& board,
                                                 const Occupation& target,
                                                 int first, int last) {
  int a = first, b = last;
  while (a <= b && board[static_cast<std::size_t>(a)] == target[static_cast<std::size_t>(a)]) ++a;
  if (a > b) return std::nullopt;
  while (board[static_cast<std::size_t>(b)] == target[static_cast<std::size_t>(b)]) --b;
  return std::make_pair(a, b);
}

LockSpec complement_lock(const Occupation& board, int first, int last) {
  LockSpec lock;
  for (int s = 0; s < static_cast<int>(board.size()); ++s) {
    if (s < first || s > last) lock.pins[s] = board[static_cast<std::size_t>(s)];
  }
  return lock;
}

SearchStep search_step(const Occupation& board, const Occupation& target,
                       int first, int last, bool edge_locking) {
  SearchStep step;
  step.first = first;
  step.last = last;
  if (edge_locking) {
    const auto seg = shrink_region(board, target, first, last);
    if (!seg) throw ArgumentError("region already matches the target");
    std::tie(step.first, step.last) = *seg;
  } else if (matches_on(board, target, first, last)) {
    throw ArgumentError("region already matches the target");
  }
  step.lock = complement_lock(board, step.first, step.last);
  step.goal = board;
  for (int s = step.first; s <= step.last; ++s) {
    step.goal[static_cast<std::size_t>(s)] = target[static_cast<std::size_t>(s)];
  }
  return step;
}

void precompute_times(const ControllerConfig& config, const StateVector& initial) {
  if (!config.times) throw ArgumentError("controller needs a designated-time oracle");
  const TimeOracle& oracle = *config.times;
  const FockBasis& basis = *initial.basis;
  const int last = basis.sites() - 1;
  const bool edge_locking = config.strategy != Strategy::fumes;

  auto resolve = [&](const Occupation& board, int first, int end) {
    if (matches_on(board, config.target, first, end)) return;
    const SearchStep step = search_step(board, config.target, first, end, edge_locking);
    oracle.lookup(board, step.lock, step.goal);
  };

  if (!is_manqala(config.strategy)) {
    for (const auto& board : basis.states()) resolve(board, 0, last);
    return;
  }
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (std::norm(initial.amplitudes[static_cast<Eigen::Index>(k)]) <= 1e-15) continue;
    const Occupation& start = basis.state(k);
    if (start == config.target) continue;
    ControllerConfig branch = config;
    if (!as_fock(initial)) {
      branch.demarcation.reset();
      branch.moves.reset();
    }
    branch = plan_controller(std::move(branch), fock_state(initial.basis, start));
    const Demarcation& d = *branch.demarcation;
    for (std::size_t g = 0; g < d.partition.size(); ++g) {
      if (d.solved[g]) continue;
      const SiteGroup& group = d.partition[g];
      for (const auto& board : basis.states()) {
        bool outside_fixed = true;
        for (int s = 0; s <= last && outside_fixed; ++s) {
          if (!group.contains(s)) {
            outside_fixed = board[static_cast<std::size_t>(s)] ==
                            d.goal[static_cast<std::size_t>(s)];
          }
        }
        if (outside_fixed) resolve(board, group.first, group.last());
      }
    }
  }
}

Controller::Controller(ControllerConfig config) : config_(std::move(config)) {
  if (!config_.times) throw ArgumentError("controller needs a designated-time oracle");
  sites_ = static_cast<int>(config_.target.size());
  if (sites_ != config_.times->evolver().basis().sites()) {
    throw ArgumentError("target length differs from the lattice");
  }
  if (config_.max_repetitions && *config_.max_repetitions < 0) {
    throw ArgumentError("max_repetitions must be >= 0");
  }
  if (config_.moves && !config_.demarcation) {
    throw ArgumentError("compiled moves given without a demarcation");
  }
}

Action Controller::finish(bool success) {
  done_ = DoneAction{success};
  phase_ = ControllerPhase::finished;
  pending_.clear();
  return *done_;
}

void Controller::enqueue_moves(const std::vector<Move>& moves) {
  for (const auto& m : moves) {
    pending_.push_back(EvolveAction{m.duration, m.lock, m.after});
  }
}

void Controller::plan(const Occupation& board) {
  planned_ = true;
  if (!is_manqala(config_.strategy)) {
    regions_ = {{0, sites_ - 1}};
    return;
  }
  const bool constrained = config_.strategy == Strategy::manqala;
  if (!config_.demarcation ||
      apply_permutation(config_.demarcation->permutation, board) !=
          config_.demarcation->goal) {
    config_.demarcation = demarcate_sublattices(board, config_.target);
    config_.moves.reset();
  }
  if (!config_.moves) {
    config_.moves =
        compile_moves(config_.demarcation->permutation, constrained, board);
  }
  const Demarcation& d = *config_.demarcation;
  settled_board_ = d.goal;
  regions_.clear();
  for (std::size_t g = 0; g < d.partition.size(); ++g) {
    if (!d.solved[g]) regions_.push_back({d.partition[g].first, d.partition[g].last()});
  }
  enqueue_moves(*config_.moves);
  if (!pending_.empty()) phase_ = ControllerPhase::deterministic;
}

Action Controller::next(const std::optional<Occupation>& board) {
  if (done_) return *done_;
  if (!pending_.empty()) {
    Action a = pending_.front();
    pending_.pop_front();
    return a;
  }
  if (!board) {
    phase_ = ControllerPhase::collapse;
    return MeasureAction{all_sites(sites_), false};
  }
  if (static_cast<int>(board->size()) != sites_) {
    throw ArgumentError("observed board has the wrong number of sites");
  }
  if (*board == config_.target) return finish(true);
  if (!planned_) {
    plan(*board);
    if (!pending_.empty()) return next(board);
  }
  phase_ = ControllerPhase::stochastic;
  return stochastic_step(*board);
}

Action Controller::stochastic_step(const Occupation& board) {
  if (!round_open_) {
    if (config_.max_repetitions && repetitions_ >= *config_.max_repetitions) {
      return finish(false);
    }
    if (config_.strategy == Strategy::manqala && board != settled_board_ &&
        same_multiset(board, settled_board_)) {
      enqueue_moves(shortest_moves(board, settled_board_, false));
      Action a = pending_.front();
      pending_.pop_front();
      return a;
    }
    round_.clear();
    for (const auto& r : regions_) {
      if (!matches_on(board, config_.target, r.first, r.last)) round_.push_back(r);
    }
    if (round_.empty()) {
      throw Error("board " + format_occupation(board) +
                  " differs from the target outside every search region");
    }
    round_open_ = true;
    ++repetitions_;
  }

  while (matches_on(board, config_.target, round_.front().first, round_.front().last)) {
    round_.pop_front();
    if (round_.empty()) {
      round_open_ = false;
      return stochastic_step(board);
    }
  }
  const Region region = round_.front();
  round_.pop_front();

  const SearchStep step =
      search_step(board, config_.target, region.first, region.last,
                  config_.strategy != Strategy::fumes);
  const DesignatedTime t = config_.times->lookup(board, step.lock, step.goal);
  if (!(t.time > 0.0)) {
    throw PlanLookupError("no positive designated time from " +
                          format_occupation(board) + " towards " +
                          format_occupation(step.goal));
  }
  const bool closes_round = round_.empty();
  pending_.push_back(MeasureAction{all_sites(sites_), closes_round});
  if (closes_round) round_open_ = false;
  return EvolveAction{t.time, step.lock, std::nullopt};
}

ControllerConfig plan_controller(ControllerConfig config,
                                 const StateVector& initial) {
  const auto board = as_fock(initial);
  if (board && is_manqala(config.strategy) && *board != config.target &&
      !config.demarcation) {
    config.demarcation = demarcate_sublattices(*board, config.target);
    config.moves = compile_moves(config.demarcation->permutation,
                                 config.strategy == Strategy::manqala, *board);
  }
  return config;
}

PreparedController prepare_controller(ControllerConfig config,
                                      const StateVector& initial) {
  Controller controller(plan_controller(std::move(config), initial));
  std::optional<Action> first;
  if (!as_fock(initial)) {
    first = MeasureAction{all_sites(initial.basis->sites()), false};
  }
  return {std::move(controller), std::move(first)};
}

}  // namespace manqala
