// Independent reference implementations used only by the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "manqala/fock_space.hpp"

namespace oracle {

using manqala::Occupation;

/// Every M-tuple over [0, N] with sum N, sorted in decreasing lexicographic order.
inline std::vector<Occupation> brute_basis(int particles, int sites) {
  std::vector<Occupation> out;
  Occupation digits(static_cast<std::size_t>(sites), 0);
  for (;;) {
    if (std::accumulate(digits.begin(), digits.end(), 0) == particles) out.push_back(digits);
    int k = sites - 1;
    while (k >= 0 && digits[static_cast<std::size_t>(k)] == particles) {
      digits[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++digits[static_cast<std::size_t>(k)];
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline double binomial(int n, int k) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(n - k + 1.0)));
}

/// a†_i a_j by acting on each occupation vector directly.
inline Eigen::MatrixXcd hop(const std::vector<Occupation>& basis, int i, int j) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  std::map<Occupation, Eigen::Index> where;
  for (Eigen::Index k = 0; k < dim; ++k) where[basis[static_cast<std::size_t>(k)]] = k;
  for (Eigen::Index k = 0; k < dim; ++k) {
    Occupation n = basis[static_cast<std::size_t>(k)];
    double amp = std::sqrt(static_cast<double>(n[static_cast<std::size_t>(j)]));
    if (amp == 0.0) continue;
    n[static_cast<std::size_t>(j)] -= 1;
    amp *= std::sqrt(static_cast<double>(n[static_cast<std::size_t>(i)] + 1));
    n[static_cast<std::size_t>(i)] += 1;
    m(where.at(n), k) += amp;
  }
  return m;
}

/// exp(-iHt) by Taylor series with scaling and squaring.
inline Eigen::MatrixXcd expm_series(const Eigen::MatrixXcd& h, double t) {
  using C = std::complex<double>;
  const Eigen::MatrixXcd a = C(0.0, -t) * h;
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const Eigen::MatrixXcd x = a / std::pow(2.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Exhaustive Tchoukaillon search: any pit d holding exactly d stones may be
/// sown. Returns true if the board can be emptied into the Ruma.
inline bool winnable_by_search(const Occupation& board) {
  bool empty = true;
  for (std::size_t k = 1; k < board.size(); ++k) empty = empty && board[k] == 0;
  if (empty) return true;
  for (std::size_t d = 1; d < board.size(); ++d) {
    if (board[d] != static_cast<int>(d)) continue;
    Occupation next = board;
    next[d] = 0;
    for (std::size_t k = 0; k < d; ++k) ++next[k];
    if (winnable_by_search(next)) return true;
  }
  return false;
}

/// Shortest move durations between site permutations (as permutation
/// states, not boards) by plain Bellman-Ford relaxation.
inline std::map<std::vector<int>, double> permutation_costs(int sites) {
  const double two = std::numbers::pi / 2.0;
  const double three = std::numbers::sqrt2 * std::numbers::pi / 2.0;
  std::vector<int> id(static_cast<std::size_t>(sites));
  std::iota(id.begin(), id.end(), 0);
  std::map<std::vector<int>, double> cost;
  std::vector<int> p = id;
  do cost[p] = std::numeric_limits<double>::infinity();
  while (std::next_permutation(p.begin(), p.end()));
  cost[id] = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [perm, c] : cost) {
      if (!std::isfinite(c)) continue;
      for (int j = 0; j + 1 < sites; ++j) {
        for (int span : {1, 2}) {
          if (j + span >= sites) continue;
          std::vector<int> q = perm;
          std::swap(q[static_cast<std::size_t>(j)], q[static_cast<std::size_t>(j + span)]);
          const double nc = c + (span == 1 ? two : three);
          if (nc < cost[q] - 1e-12) {
            cost[q] = nc;
            changed = true;
          }
        }
      }
    }
  }
  return cost;
}

struct DemarcationChoice {
  int groups = 0;
  double cost = 0.0;
  std::vector<int> permutation;
  std::vector<std::pair<int, int>> partition;  // inclusive site ranges
};

/// Enumerates partitions recursively and permutations independently of the
/// library, with board cost = cheapest permutation state producing the board.
inline DemarcationChoice best_demarcation(const Occupation& initial,
                                          const Occupation& target) {
  const int sites = static_cast<int>(initial.size());
  const auto perm_cost = permutation_costs(sites);
  std::map<Occupation, double> board_cost;
  for (const auto& [perm, c] : perm_cost) {
    Occupation b(initial.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = initial[static_cast<std::size_t>(perm[i])];
    auto it = board_cost.find(b);
    if (it == board_cost.end() || c < it->second) board_cost[b] = c;
  }

  std::vector<std::vector<std::pair<int, int>>> partitions;
  std::function<void(int, std::vector<std::pair<int, int>>&)> grow =
      [&](int start, std::vector<std::pair<int, int>>& acc) {
        if (start == sites) {
          partitions.push_back(acc);
          return;
        }
        for (int end = start; end < sites; ++end) {
          acc.emplace_back(start, end);
          grow(end + 1, acc);
          acc.pop_back();
        }
      };
  std::vector<std::pair<int, int>> acc;
  grow(0, acc);

  DemarcationChoice best;
  best.groups = 0;
  for (const auto& [perm, unused] : perm_cost) {
    Occupation goal(initial.size());
    for (std::size_t i = 0; i < goal.size(); ++i) goal[i] = initial[static_cast<std::size_t>(perm[i])];
    const double c = board_cost.at(goal);
    for (const auto& part : partitions) {
      bool ok = true;
      bool previous_unsolved = false;
      for (const auto& [a, b] : part) {
        int r = 0;
        bool solved = true;
        for (int s = a; s <= b; ++s) {
          r += goal[static_cast<std::size_t>(s)] - target[static_cast<std::size_t>(s)];
          solved = solved && goal[static_cast<std::size_t>(s)] == target[static_cast<std::size_t>(s)];
        }
        if (r != 0 || (!solved && previous_unsolved)) ok = false;
        previous_unsolved = !solved;
      }
      if (!ok) continue;
      const int g = static_cast<int>(part.size());
      const bool better =
          g > best.groups ||
          (g == best.groups && c < best.cost - 1e-9) ||
          (g == best.groups && std::abs(c - best.cost) <= 1e-9 && perm < best.permutation);
      if (better) best = {g, c, perm, part};
    }
  }
  return best;
}

}  // namespace oracle
