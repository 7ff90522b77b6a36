#include "manqala/planner.hpp"

#include <algorithm>
#include <cmath>

#include "manqala/error.hpp"

namespace manqala {

namespace {

// Grid peaks within this of the grid maximum are refined as candidates; the
// spectrum is often commensurate, so the global maximum recurs periodically.
constexpr double kCandidateMargin = 1e-6;
constexpr double kTieTolerance = 1e-9;
constexpr double kGoldenTolerance = 1e-10;

std::size_t position_in(const std::vector<std::size_t>& range, std::size_t k,
                        const char* what) {
  auto it = std::lower_bound(range.begin(), range.end(), k);
  if (it == range.end() || *it != k) {
    throw LeakageError(std::string(what) + " lies outside the locked subspace");
  }
  return static_cast<std::size_t>(it - range.begin());
}

/// |Σ_k a_k exp(-i w_k t)|^2
class TransitionProbability {
 public:
  TransitionProbability(const SubspaceSpectrum& spec, std::size_t from,
                        std::size_t to)
      : values_(spec.values) {
    const auto f = static_cast<Eigen::Index>(from);
    const auto g = static_cast<Eigen::Index>(to);
    weights_ = spec.vectors.row(g).transpose().cwiseProduct(
        spec.vectors.row(f).adjoint());
  }

  double operator()(double t) const {
    Complex amp = 0.0;
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
      amp += weights_[k] * std::polar(1.0, -values_[k] * t);
    }
    return std::norm(amp);
  }

 private:
  Eigen::VectorXd values_;
  Eigen::VectorXcd weights_;
};

DesignatedTime golden_max(const TransitionProbability& p, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double pc = p(c), pd = p(d);
  while (b - a > kGoldenTolerance) {
    if (pc >= pd) {
      b = d;
      d = c;
      pd = pc;
      c = b - inv_phi * (b - a);
      pc = p(c);
    } else {
      a = c;
      c = d;
      pc = pd;
      d = a + inv_phi * (b - a);
      pd = p(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, p(t)};
}

}  // namespace

DesignatedTime designated_time(const Evolver& evolver, const Occupation& config,
                               const Occupation& target, const LockSpec& lock,
                               double horizon, double grid_step) {
  if (!(horizon > 0.0)) throw ArgumentError("designated-time horizon must be > 0");
  if (!(grid_step > 0.0)) throw ArgumentError("grid step must be > 0");
  const FockBasis& basis = evolver.basis();
  const std::size_t from = basis.index_of(config);
  const std::size_t to = basis.index_of(target);
  if (!lock.admits(config)) {
    throw LeakageError("configuration " + format_occupation(config) +
                       " violates lock {" + format_lock(lock) + "}");
  }
  if (config == target) return {0.0, 1.0};

  const auto spec = evolver.subspace(lock);
  const TransitionProbability prob(*spec, position_in(spec->range, from, "config"),
                                   position_in(spec->range, to, "target"));

  const auto steps = static_cast<std::size_t>(std::floor(horizon / grid_step));
  std::vector<double> times;
  times.reserve(steps + 2);
  for (std::size_t g = 0; g <= steps; ++g) times.push_back(g * grid_step);
  if (horizon - times.back() > 1e-12) times.push_back(horizon);

  std::vector<double> values(times.size());
  double grid_max = 0.0;
  for (std::size_t g = 0; g < times.size(); ++g) {
    values[g] = prob(times[g]);
    grid_max = std::max(grid_max, values[g]);
  }

  DesignatedTime best{0.0, -1.0};
  for (std::size_t g = 0; g < times.size(); ++g) {
    if (values[g] < grid_max - kCandidateMargin) continue;
    const bool left_ok = g == 0 || values[g] >= values[g - 1];
    const bool right_ok = g + 1 == times.size() || values[g] >= values[g + 1];
    if (!left_ok || !right_ok) continue;

    DesignatedTime peak =
        golden_max(prob, g == 0 ? times[0] : times[g - 1],
                   g + 1 == times.size() ? times[g] : times[g + 1]);
    if (peak.probability < values[g]) peak = {times[g], values[g]};
    if (peak.probability > best.probability + kTieTolerance) best = peak;
  }
  return best;
}

DesignatedTimes designated_times(const Evolver& evolver,
                                 const Occupation& target,
                                 const std::vector<Occupation>& configs,
                                 const std::optional<LockSpec>& lock,
                                 double horizon, double grid_step) {
  if (!(horizon > 0.0)) throw ArgumentError("designated-time horizon must be > 0");
  DesignatedTimes out;
  out.target = target;
  out.lock = lock;
  out.horizon = horizon;
  const LockSpec effective = lock.value_or(LockSpec{});
  for (const auto& config : configs) {
    out.entries[config] =
        designated_time(evolver, config, target, effective, horizon, grid_step);
  }
  return out;
}

TimeOracle::TimeOracle(std::shared_ptr<const Evolver> evolver, double horizon,
                       double grid_step)
    : evolver_(std::move(evolver)), horizon_(horizon), grid_step_(grid_step) {
  if (!(horizon_ > 0.0)) throw ArgumentError("designated-time horizon must be > 0");
}

DesignatedTime TimeOracle::lookup(const Occupation& config, const LockSpec& lock,
                                  const Occupation& target) const {
  Key key{lock, target, config};
  {
    std::lock_guard guard(mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    if (frozen_) {
      throw PlanLookupError("plan has no designated time for " +
                            format_occupation(config) + " under lock {" +
                            format_lock(lock) + "} towards " +
                            format_occupation(target));
    }
  }
  const DesignatedTime fresh =
      designated_time(*evolver_, config, target, lock, horizon_, grid_step_);
  std::lock_guard guard(mutex_);
  return memo_.emplace(std::move(key), fresh).first->second;
}

void TimeOracle::preload(const DesignatedTimes& table) {
  const LockSpec lock = table.lock.value_or(LockSpec{});
  std::lock_guard guard(mutex_);
  for (const auto& [config, entry] : table.entries) {
    memo_[Key{lock, table.target, config}] = entry;
  }
}

std::vector<DesignatedTimes> TimeOracle::tables() const {
  std::lock_guard guard(mutex_);
  std::vector<DesignatedTimes> out;
  for (const auto& [key, entry] : memo_) {
    const auto& [lock, target, config] = key;
    if (out.empty() || out.back().target != target ||
        out.back().lock.value_or(LockSpec{}) != lock) {
      DesignatedTimes table;
      table.target = target;
      if (!lock.empty()) table.lock = lock;
      table.horizon = horizon_;
      out.push_back(std::move(table));
    }
    out.back().entries[config] = entry;
  }
  return out;
}

}  // namespace manqala
