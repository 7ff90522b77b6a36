#pragma once

#include <vector>

#include "manqala/dynamics.hpp"
#include "manqala/metrics.hpp"

namespace manqala {

/// Contiguous run of sites [first, first + count).
struct SiteGroup {
  int first = 0;
  int count = 1;

  int last() const { return first + count - 1; }
  bool contains(int site) const { return site >= first && site <= last(); }

  friend bool operator==(const SiteGroup&, const SiteGroup&) = default;
};

using Partition = std::vector<SiteGroup>;

/// Partition plus a site permutation that makes every group's particle total
/// match the target. goal[i] = initial[permutation[i]].
struct Demarcation {
  Partition partition;
  std::vector<int> permutation;
  std::vector<int> residuals;  // Σ over group of (goal - target), all zero
  Occupation goal;
  std::vector<bool> solved;    // goal equals target on every site of the group
  double compiled_duration = 0.0;

  /// Pins every site of a solved group at its target count.
  LockSpec solved_lock() const;
};

/// Exhaustive search over compositions x permutations. Accepts a candidate
/// when all residuals vanish and no two neighbouring groups are both
/// unsolved. Ranking: most groups, then the shortest unconstrained
/// compilation, then the lexicographically smallest permutation, then the
/// earliest composition in cut-mask order.
/// Throws ArgumentError on length or particle-total mismatch, SizingError for
/// M > 8.
Demarcation demarcate_sublattices(const Occupation& initial,
                                  const Occupation& target);

/// Per-group sums in group order. Throws ArgumentError if the partition does
/// not tile the vector.
ExpectationVector sublattice_populations(const ExpectationVector& n,
                                         const Partition& partition);

void validate_partition(const Partition& partition, int sites);

Occupation apply_permutation(const std::vector<int>& permutation,
                             const Occupation& board);

enum class MoveKind { two_site, three_site };

/// Timed population permutation. A two-site move on (j, j+1) lasts π/2 and
/// exchanges the two counts; a three-site move on (j, j+1, j+2) lasts √2·π/2
/// and exchanges the outer counts. All other sites are pinned.
struct Move {
  MoveKind kind = MoveKind::two_site;
  int leftmost = 0;
  double duration = 0.0;
  LockSpec lock;
  Occupation before;
  Occupation after;

  int span() const { return kind == MoveKind::two_site ? 2 : 3; }
};

double move_duration(MoveKind kind);
const char* to_string(MoveKind kind);

/// Throws SiteRangeError if the move does not fit on the board.
Move make_move(MoveKind kind, int leftmost, const Occupation& board);

double total_duration(const std::vector<Move>& moves);

/// Cheapest move sequence turning `from` into `to` (Dijkstra over boards;
/// moves that leave the board unchanged are skipped). Throws ArgumentError if
/// `to` is not a rearrangement of `from`.
std::vector<Move> shortest_moves(const Occupation& from, const Occupation& to,
                                 bool allow_three_site = true);

/// Unconstrained: shortest_moves to the permuted board. Constrained: replay
/// the Tchoukaillon winning play on `board`, each sow of pit d expanded into
/// the adjacent swaps (d-1,d), (d-2,d-1), ..., (0,1), stopping as soon as the
/// permuted board is reached. Throws UnwinnableBoardError when the board is
/// unwinnable or the play never passes through the permuted board.
std::vector<Move> compile_moves(const std::vector<int>& permutation,
                                bool mancala_constrained,
                                const Occupation& board);

}  // namespace manqala
