#include "manqala/demarcation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <string>

#include "manqala/error.hpp"
#include "manqala/tchoukaillon.hpp"

namespace manqala {

namespace {

constexpr int kMaxDemarcationSites = 8;
constexpr double kCostTolerance = 1e-9;

struct Visit {
  double cost = 0.0;
  Occupation parent;
  MoveKind kind = MoveKind::two_site;
  int leftmost = -1;  // -1 marks the source
};

Occupation apply_move(const Occupation& board, MoveKind kind, int leftmost) {
  Occupation out = board;
  const auto j = static_cast<std::size_t>(leftmost);
  std::swap(out[j], out[j + (kind == MoveKind::two_site ? 1 : 2)]);
  return out;
}

/// Single-source shortest move durations to every rearrangement of `from`.
std::map<Occupation, Visit> explore_moves(const Occupation& from,
                                          bool allow_three_site,
                                          const Occupation* stop_at = nullptr) {
  using Entry = std::pair<double, Occupation>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::map<Occupation, Visit> seen;
  seen[from] = Visit{};
  queue.emplace(0.0, from);
  const int sites = static_cast<int>(from.size());

  while (!queue.empty()) {
    auto [cost, board] = queue.top();
    queue.pop();
    if (cost > seen[board].cost + 1e-12) continue;
    if (stop_at && board == *stop_at) break;

    auto relax = [&](MoveKind kind, int j) {
      Occupation next = apply_move(board, kind, j);
      if (next == board) return;
      const double c = cost + move_duration(kind);
      auto it = seen.find(next);
      if (it != seen.end() && it->second.cost <= c + 1e-12) return;
      seen[next] = Visit{c, board, kind, j};
      queue.emplace(c, std::move(next));
    };
    for (int j = 0; j + 1 < sites; ++j) relax(MoveKind::two_site, j);
    if (allow_three_site) {
      for (int j = 0; j + 2 < sites; ++j) relax(MoveKind::three_site, j);
    }
  }
  return seen;
}

bool is_rearrangement(Occupation a, Occupation b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

Partition partition_from_mask(unsigned mask, int sites) {
  Partition out;
  int start = 0;
  for (int s = 0; s + 1 < sites; ++s) {
    if (mask & (1u << s)) {
      out.push_back({start, s + 1 - start});
      start = s + 1;
    }
  }
  out.push_back({start, sites - start});
  return out;
}

}  // namespace

LockSpec Demarcation::solved_lock() const {
  LockSpec lock;
  for (std::size_t g = 0; g < partition.size(); ++g) {
    if (!solved[g]) continue;
    for (int s = partition[g].first; s <= partition[g].last(); ++s) {
      lock.pins[s] = goal[static_cast<std::size_t>(s)];
    }
  }
  return lock;
}

void validate_partition(const Partition& partition, int sites) {
  int next = 0;
  for (const auto& g : partition) {
    if (g.first != next || g.count < 1) {
      throw ArgumentError("partition groups must be contiguous and non-empty");
    }
    next += g.count;
  }
  if (next != sites) {
    throw ArgumentError("partition covers " + std::to_string(next) +
                        " sites, lattice has " + std::to_string(sites));
  }
}

ExpectationVector sublattice_populations(const ExpectationVector& n,
                                         const Partition& partition) {
  validate_partition(partition, static_cast<int>(n.size()));
  ExpectationVector out;
  out.reserve(partition.size());
  for (const auto& g : partition) {
    double sum = 0.0;
    for (int s = g.first; s <= g.last(); ++s) sum += n[static_cast<std::size_t>(s)];
    out.push_back(sum);
  }
  return out;
}

Occupation apply_permutation(const std::vector<int>& permutation,
                             const Occupation& board) {
  if (permutation.size() != board.size()) {
    throw ArgumentError("permutation length differs from the board");
  }
  std::vector<bool> hit(board.size(), false);
  Occupation out(board.size());
  for (std::size_t i = 0; i < board.size(); ++i) {
    const int p = permutation[i];
    if (p < 0 || p >= static_cast<int>(board.size()) ||
        hit[static_cast<std::size_t>(p)]) {
      throw ArgumentError("permutation is not a bijection");
    }
    hit[static_cast<std::size_t>(p)] = true;
    out[i] = board[static_cast<std::size_t>(p)];
  }
  return out;
}

Demarcation demarcate_sublattices(const Occupation& initial,
                                  const Occupation& target) {
  if (initial.size() != target.size() || initial.empty()) {
    throw ArgumentError("initial and target boards differ in length");
  }
  if (total_particles(initial) != total_particles(target)) {
    throw ArgumentError("initial and target particle totals differ");
  }
  const int sites = static_cast<int>(initial.size());
  if (sites > kMaxDemarcationSites) {
    throw SizingError("demarcation search is limited to " +
                      std::to_string(kMaxDemarcationSites) + " sites");
  }

  const auto costs = explore_moves(initial, true);
  std::vector<int> perm(static_cast<std::size_t>(sites));
  std::iota(perm.begin(), perm.end(), 0);

  Demarcation best;
  bool have = false;
  const unsigned masks = 1u << (sites - 1);
  do {
    const Occupation goal = apply_permutation(perm, initial);
    const double cost = costs.at(goal).cost;
    for (unsigned mask = 0; mask < masks; ++mask) {
      const int groups = std::popcount(mask) + 1;
      if (have) {
        const int best_groups = static_cast<int>(best.partition.size());
        if (groups < best_groups) continue;
        if (groups == best_groups && cost > best.compiled_duration - kCostTolerance) {
          continue;
        }
      }
      Partition partition = partition_from_mask(mask, sites);
      std::vector<int> residuals;
      std::vector<bool> solved;
      bool ok = true;
      for (const auto& g : partition) {
        int r = 0;
        bool match = true;
        for (int s = g.first; s <= g.last(); ++s) {
          const auto k = static_cast<std::size_t>(s);
          r += goal[k] - target[k];
          match = match && goal[k] == target[k];
        }
        if (r != 0) {
          ok = false;
          break;
        }
        if (!match && !solved.empty() && !solved.back()) {
          ok = false;
          break;
        }
        residuals.push_back(r);
        solved.push_back(match);
      }
      if (!ok) continue;
      best = Demarcation{std::move(partition), perm, std::move(residuals), goal,
                         std::move(solved), cost};
      have = true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double move_duration(MoveKind kind) {
  return kind == MoveKind::two_site ? std::numbers::pi / 2.0
                                    : std::numbers::sqrt2 * std::numbers::pi / 2.0;
}

const char* to_string(MoveKind kind) {
  return kind == MoveKind::two_site ? "two_site" : "three_site";
}

Move make_move(MoveKind kind, int leftmost, const Occupation& board) {
  const int span = kind == MoveKind::two_site ? 2 : 3;
  if (leftmost < 0 || leftmost + span > static_cast<int>(board.size())) {
    throw SiteRangeError("move at site " + std::to_string(leftmost) +
                         " does not fit on " + std::to_string(board.size()) +
                         " sites");
  }
  Move m;
  m.kind = kind;
  m.leftmost = leftmost;
  m.duration = move_duration(kind);
  m.before = board;
  m.after = apply_move(board, kind, leftmost);
  for (int s = 0; s < static_cast<int>(board.size()); ++s) {
    if (s < leftmost || s >= leftmost + span) {
      m.lock.pins[s] = board[static_cast<std::size_t>(s)];
    }
  }
  return m;
}

double total_duration(const std::vector<Move>& moves) {
  double t = 0.0;
  for (const auto& m : moves) t += m.duration;
  return t;
}

std::vector<Move> shortest_moves(const Occupation& from, const Occupation& to,
                                 bool allow_three_site) {
  if (from.size() != to.size() || !is_rearrangement(from, to)) {
    throw ArgumentError(format_occupation(to) + " is not a rearrangement of " +
                        format_occupation(from));
  }
  const auto seen = explore_moves(from, allow_three_site, &to);
  std::vector<Move> moves;
  for (Occupation at = to; at != from;) {
    const Visit& v = seen.at(at);
    moves.push_back(make_move(v.kind, v.leftmost, v.parent));
    at = v.parent;
  }
  std::reverse(moves.begin(), moves.end());
  return moves;
}

std::vector<Move> compile_moves(const std::vector<int>& permutation,
                                bool mancala_constrained,
                                const Occupation& board) {
  const Occupation goal = apply_permutation(permutation, board);
  if (!mancala_constrained) return shortest_moves(board, goal);

  const TchoukaillonPlan plan = tchoukaillon_plan(board);
  if (!plan.winnable) {
    throw UnwinnableBoardError("board " + format_occupation(board) +
                               " has no winning Tchoukaillon play");
  }
  std::vector<Move> moves;
  Occupation at = board;
  if (at == goal) return moves;
  for (const Sow& s : plan.sows) {
    for (int j = s.pit - 1; j >= 0; --j) {
      const auto k = static_cast<std::size_t>(j);
      if (at[k] == at[k + 1]) continue;
      moves.push_back(make_move(MoveKind::two_site, j, at));
      at = moves.back().after;
      if (at == goal) return moves;
    }
  }
  throw UnwinnableBoardError("Tchoukaillon play from " + format_occupation(board) +
                             " never reaches " + format_occupation(goal));
}

}  // namespace manqala
