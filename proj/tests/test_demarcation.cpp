#include <doctest.h>

#include <numbers>

#include "manqala/demarcation.hpp"
#include "manqala/error.hpp"
#include "oracles.hpp"

using namespace manqala;

namespace {

constexpr double kTwo = std::numbers::pi / 2;
const double kThree = std::numbers::sqrt2 * std::numbers::pi / 2;

void check_valid(const Demarcation& d, const Occupation& initial, const Occupation& target) {
  validate_partition(d.partition, static_cast<int>(initial.size()));
  CHECK(d.goal == apply_permutation(d.permutation, initial));
  REQUIRE(d.residuals.size() == d.partition.size());
  for (std::size_t g = 0; g < d.partition.size(); ++g) {
    CHECK(d.residuals[g] == 0);
    bool match = true;
    for (int s = d.partition[g].first; s <= d.partition[g].last(); ++s) {
      match = match && d.goal[static_cast<std::size_t>(s)] == target[static_cast<std::size_t>(s)];
    }
    CHECK(d.solved[g] == match);
    if (g > 0) CHECK((d.solved[g] || d.solved[g - 1]));
  }
}

}  // namespace

TEST_CASE("identical boards split into singletons") {
  const Demarcation d = demarcate_sublattices({1, 2, 0, 1}, {1, 2, 0, 1});
  CHECK(d.partition.size() == 4);
  CHECK(d.permutation == std::vector<int>{0, 1, 2, 3});
  CHECK(d.compiled_duration == 0.0);
}

TEST_CASE("three-site board pairs the Ruma with its neighbour") {
  const Demarcation d = demarcate_sublattices({0, 1, 2}, {3, 0, 0});
  check_valid(d, {0, 1, 2}, {3, 0, 0});
  CHECK(d.partition == Partition{{0, 2}, {2, 1}});
  CHECK(d.permutation == std::vector<int>{2, 1, 0});
  CHECK(d.goal == Occupation{2, 1, 0});
  CHECK(d.compiled_duration == doctest::Approx(kThree));
  CHECK(d.solved_lock() == parse_lock("2:0"));
}

TEST_CASE("five-site boards") {
  {
    const Demarcation d = demarcate_sublattices({3, 1, 0, 1, 0}, {1, 1, 1, 1, 1});
    check_valid(d, {3, 1, 0, 1, 0}, {1, 1, 1, 1, 1});
    CHECK(d.partition == Partition{{0, 1}, {1, 3}, {4, 1}});
    CHECK(d.goal == Occupation{1, 3, 0, 0, 1});
    CHECK(d.compiled_duration == doctest::Approx(2 * kTwo));
    CHECK(sublattice_populations(to_expectations(d.goal), d.partition) == ExpectationVector{1, 3, 1});
  }
  {
    const Demarcation d = demarcate_sublattices({1, 3, 0, 1, 0}, {1, 1, 1, 1, 1});
    check_valid(d, {1, 3, 0, 1, 0}, {1, 1, 1, 1, 1});
    CHECK(d.partition == Partition{{0, 1}, {1, 3}, {4, 1}});
    CHECK(d.compiled_duration == doctest::Approx(kTwo));
  }
  {
    // Neighbouring unsolved pairs would leak into each other; a particle is
    // moved into the middle to separate them.
    const Demarcation d = demarcate_sublattices({2, 0, 0, 2, 1}, {1, 1, 1, 1, 1});
    check_valid(d, {2, 0, 0, 2, 1}, {1, 1, 1, 1, 1});
    CHECK(d.partition == Partition{{0, 2}, {2, 1}, {3, 2}});
    CHECK(d.goal == Occupation{2, 0, 1, 2, 0});
    CHECK(d.compiled_duration == doctest::Approx(kThree));
  }
  {
    const Demarcation d = demarcate_sublattices({1, 0, 1, 0, 3}, {1, 1, 1, 1, 1});
    check_valid(d, {1, 0, 1, 0, 3}, {1, 1, 1, 1, 1});
    CHECK(d.partition == Partition{{0, 1}, {1, 1}, {2, 3}});
    CHECK(d.goal == Occupation{1, 1, 0, 0, 3});
  }
}

TEST_CASE("demarcation agrees with the brute-force oracle") {
  for (int m = 1; m <= 4; ++m) {
    for (int n = 0; n <= 4; ++n) {
      const auto boards = oracle::brute_basis(n, m);
      for (const auto& initial : boards) {
        for (const auto& target : boards) {
          const Demarcation d = demarcate_sublattices(initial, target);
          const auto ref = oracle::best_demarcation(initial, target);
          INFO(format_occupation(initial) << " -> " << format_occupation(target));
          check_valid(d, initial, target);
          CHECK(static_cast<int>(d.partition.size()) == ref.groups);
          CHECK(d.compiled_duration == doctest::Approx(ref.cost));
          CHECK(d.permutation == ref.permutation);
        }
      }
    }
  }
}

TEST_CASE("sublattice populations") {
  CHECK(sublattice_populations({1, 1, 1, 1, 1}, {{0, 1}, {1, 3}, {4, 1}}) == ExpectationVector{1, 3, 1});
  CHECK(sublattice_populations({3, 1, 0, 1, 0}, {{0, 1}, {1, 3}, {4, 1}}) == ExpectationVector{3, 2, 0});
  CHECK(sublattice_populations({0.5, 2, 0.5}, {{0, 1}, {1, 1}, {2, 1}}) == ExpectationVector{0.5, 2, 0.5});
  CHECK_THROWS_AS(sublattice_populations({1, 1, 1}, {{0, 2}}), ArgumentError);
  CHECK_THROWS_AS(sublattice_populations({1, 1, 1}, {{0, 1}, {2, 1}}), ArgumentError);
}

TEST_CASE("move compilation") {
  CHECK(compile_moves({0, 1, 2}, true, {0, 1, 2}).empty());
  CHECK(compile_moves({0, 1, 2}, false, {0, 1, 2}).empty());

  const auto constrained = compile_moves({2, 1, 0}, true, {0, 1, 2});
  REQUIRE(constrained.size() == 3);
  for (const auto& m : constrained) CHECK(m.kind == MoveKind::two_site);
  CHECK(total_duration(constrained) == doctest::Approx(3 * kTwo));
  CHECK(constrained.back().after == Occupation{2, 1, 0});
  CHECK(constrained[0].lock == parse_lock("2:2"));

  const auto free = compile_moves({2, 1, 0}, false, {0, 1, 2});
  REQUIRE(free.size() == 1);
  CHECK(free[0].kind == MoveKind::three_site);
  CHECK(free[0].duration == doctest::Approx(kThree));
  CHECK(free[0].lock.empty());

  CHECK_THROWS_AS(compile_moves({2, 1, 0}, true, {0, 2, 1}), UnwinnableBoardError);
  CHECK_THROWS_AS(compile_moves({0, 0, 1}, false, {0, 1, 2}), ArgumentError);
  CHECK_THROWS_AS(make_move(MoveKind::three_site, 1, {0, 1, 2}), SiteRangeError);
  CHECK_THROWS_AS(shortest_moves({0, 1, 2}, {1, 1, 1}), ArgumentError);
}

TEST_CASE("compiled moves realize permutations under locked dynamics") {
  for (int m = 2; m <= 5; ++m) {
    const Occupation board = [&] {
      Occupation b(static_cast<std::size_t>(m));
      for (int s = 0; s < m; ++s) b[static_cast<std::size_t>(s)] = s % 3;
      return b;
    }();
    const int n = total_particles(board);
    auto basis = enumerate_basis({m, n});
    const Evolver ev(basis, build_hamiltonian(*basis, {}));
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      const Occupation goal = apply_permutation(perm, board);
      StateVector psi = fock_state(basis, board);
      for (const Move& mv : compile_moves(perm, false, board)) {
        psi = ev.locked_propagate(mv.lock, psi, mv.duration);
      }
      const auto n_out = occupation_expectations(psi);
      for (int s = 0; s < m; ++s) {
        CHECK(std::abs(n_out[static_cast<std::size_t>(s)] - goal[static_cast<std::size_t>(s)]) < 1e-9);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("constrained moves follow the winning play") {
  auto basis = enumerate_basis({4, 5});
  const Evolver ev(basis, build_hamiltonian(*basis, {}));
  const Occupation board{0, 1, 1, 3};
  // Sow pit 1, then pit 3 as three leftward swaps.
  const std::vector<int> perm{3, 1, 0, 2};
  const auto moves = compile_moves(perm, true, board);
  CHECK(moves.size() == 4);
  for (const auto& m : moves) CHECK(m.kind == MoveKind::two_site);
  StateVector psi = fock_state(basis, board);
  for (const auto& m : moves) psi = ev.locked_propagate(m.lock, psi, m.duration);
  CHECK(as_fock(psi) == Occupation{3, 1, 0, 1});
  CHECK_THROWS_AS(compile_moves({3, 2, 1, 0}, true, board), UnwinnableBoardError);
}
