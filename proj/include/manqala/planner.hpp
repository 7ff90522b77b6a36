#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include "manqala/dynamics.hpp"

namespace manqala {

inline constexpr double kDefaultHorizon = 4.0 * std::numbers::pi;
inline constexpr double kDefaultTimeGridStep = 1e-3;

struct DesignatedTime {
  double time = 0.0;         // units of 1/J
  double probability = 0.0;  // target probability reached at `time`
};

/// Designated evolution times towards one target, optionally under a lock.
struct DesignatedTimes {
  Occupation target;
  std::optional<LockSpec> lock;
  double horizon = kDefaultHorizon;
  std::map<Occupation, DesignatedTime> entries;
};

/// Time in [0, horizon] maximizing |<target| U(t) |config>|^2, where U is
/// the locked propagator when `lock` is non-empty. Dense grid scan, then
/// golden-section refinement around every near-maximal grid peak; the highest
/// refined peak wins, the earliest on ties (1e-9). Exactly 0 when
/// config == target.
DesignatedTime designated_time(const Evolver& evolver, const Occupation& config,
                               const Occupation& target, const LockSpec& lock,
                               double horizon = kDefaultHorizon,
                               double grid_step = kDefaultTimeGridStep);

/// Throws ArgumentError when horizon <= 0.
DesignatedTimes designated_times(const Evolver& evolver,
                                 const Occupation& target,
                                 const std::vector<Occupation>& configs,
                                 const std::optional<LockSpec>& lock,
                                 double horizon = kDefaultHorizon,
                                 double grid_step = kDefaultTimeGridStep);

/// Thread-safe memo of designated times keyed by (config, lock, target).
/// Preloaded from a plan artifact; missing entries are computed on demand
/// unless the oracle is frozen.
class TimeOracle {
 public:
  TimeOracle(std::shared_ptr<const Evolver> evolver,
             double horizon = kDefaultHorizon,
             double grid_step = kDefaultTimeGridStep);

  const Evolver& evolver() const { return *evolver_; }
  double horizon() const { return horizon_; }

  /// Throws PlanLookupError for a missing entry in a frozen oracle.
  DesignatedTime lookup(const Occupation& config, const LockSpec& lock,
                        const Occupation& target) const;

  void preload(const DesignatedTimes& table);
  void set_frozen(bool frozen) { frozen_ = frozen; }

  /// Current contents grouped by (lock, target).
  std::vector<DesignatedTimes> tables() const;

 private:
  using Key = std::tuple<LockSpec, Occupation, Occupation>;  // lock, target, config

  std::shared_ptr<const Evolver> evolver_;
  double horizon_;
  double grid_step_;
  bool frozen_ = false;
  mutable std::mutex mutex_;
  mutable std::map<Key, DesignatedTime> memo_;
};

}  // namespace manqala
