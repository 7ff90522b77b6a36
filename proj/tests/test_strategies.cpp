#include <doctest.h>

#include <numbers>
#include <set>

#include "fixtures.hpp"
#include "manqala/error.hpp"
#include "manqala/measurement.hpp"

using namespace manqala;

namespace {

EvolveAction as_evolve(const Action& a) {
  REQUIRE(std::holds_alternative<EvolveAction>(a));
  return std::get<EvolveAction>(a);
}

}  // namespace

TEST_CASE("strategy names") {
  for (Strategy s : all_strategies()) CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_strategy("greedy"), ArgumentError);
}

TEST_CASE("FUMES evolves without locks and measures everything") {
  const Experiment ex = fixture::flagship();
  Controller c(fixture::config(ex, Strategy::fumes));
  const EvolveAction e = as_evolve(c.next(Occupation{0, 1, 2}));
  CHECK(e.lock.empty());
  CHECK(e.duration == doctest::Approx(std::acos(-2.0 / 3.0) / std::sqrt(2.0)).epsilon(1e-6));
  const Action m = c.next(std::nullopt);
  REQUIRE(std::holds_alternative<MeasureAction>(m));
  CHECK(std::get<MeasureAction>(m).sites == all_sites(3));
  CHECK(as_evolve(c.next(Occupation{1, 1, 1})).duration == doctest::Approx(1.1107).epsilon(1e-3));
  c.next(std::nullopt);
  const Action done = c.next(Occupation{3, 0, 0});
  REQUIRE(std::holds_alternative<DoneAction>(done));
  CHECK(std::get<DoneAction>(done).success);
  CHECK(c.repetitions() == 2);
}

TEST_CASE("Z-FUMES locks matching edge runs only") {
  const Experiment ex = fixture::flagship();
  Controller c(fixture::config(ex, Strategy::zfumes));
  const EvolveAction e = as_evolve(c.next(Occupation{2, 1, 0}));
  CHECK(e.lock == parse_lock("2:0"));
  CHECK(e.duration == doctest::Approx(0.615).epsilon(0.02));

  Controller d(fixture::config(ex, Strategy::zfumes));
  CHECK(as_evolve(d.next(Occupation{1, 0, 2})).lock.empty());
  Controller f(fixture::config(ex, Strategy::zfumes));
  CHECK(std::holds_alternative<DoneAction>(f.next(Occupation{3, 0, 0})));

  CHECK(shrink_region({1, 0, 2}, {3, 0, 0}, 0, 2) == std::pair{0, 2});
  CHECK(shrink_region({0, 3, 0}, {3, 0, 0}, 0, 2) == std::pair{0, 1});
  CHECK(shrink_region({1, 1, 1, 2, 0}, {1, 1, 1, 1, 1}, 0, 4) == std::pair{3, 4});
  CHECK_FALSE(shrink_region({3, 0, 0}, {3, 0, 0}, 0, 2));
}

TEST_CASE("repetition budget ends the search") {
  const Experiment ex = fixture::flagship();
  Controller c(fixture::config(ex, Strategy::fumes, 1));
  c.next(Occupation{0, 1, 2});
  c.next(std::nullopt);
  const Action a = c.next(Occupation{1, 1, 1});
  REQUIRE(std::holds_alternative<DoneAction>(a));
  CHECK_FALSE(std::get<DoneAction>(a).success);
  CHECK(c.phase() == ControllerPhase::finished);
}

TEST_CASE("ManQala phase one: three timed swaps to (2,1,0)") {
  const Experiment ex = fixture::flagship();
  const auto prepared = prepare_controller(fixture::config(ex, Strategy::manqala), ex.initial);
  CHECK_FALSE(prepared.initial_action);
  Controller c = prepared.controller;
  double total = 0.0;
  std::optional<Occupation> board = Occupation{0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    const EvolveAction e = as_evolve(c.next(board));
    REQUIRE(e.landing);
    total += e.duration;
    board = e.landing;
  }
  CHECK(total == doctest::Approx(3 * std::numbers::pi / 2));
  CHECK(board == Occupation{2, 1, 0});
  const EvolveAction locked = as_evolve(c.next(board));
  CHECK(locked.lock == parse_lock("2:0"));
  CHECK(locked.duration == doctest::Approx(0.615).epsilon(0.02));
  CHECK(c.phase() == ControllerPhase::stochastic);
  c.next(std::nullopt);

  // A swapped outcome is first restored with one swap.
  const EvolveAction restore = as_evolve(c.next(Occupation{1, 2, 0}));
  CHECK(restore.landing == Occupation{2, 1, 0});
  CHECK(restore.duration == doctest::Approx(std::numbers::pi / 2));
  CHECK(as_evolve(c.next(Occupation{2, 1, 0})).duration == doctest::Approx(locked.duration));
  c.next(std::nullopt);
  // (0,3,0) is not a rearrangement of (2,1,0): straight to its locked time.
  const EvolveAction fallback = as_evolve(c.next(Occupation{0, 3, 0}));
  CHECK_FALSE(fallback.landing);
  CHECK(fallback.duration == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
}

TEST_CASE("mod-ManQala phase one is a single three-site move") {
  const Experiment ex = fixture::flagship();
  Controller c(fixture::config(ex, Strategy::mod_manqala));
  const EvolveAction e = as_evolve(c.next(Occupation{0, 1, 2}));
  CHECK(e.duration == doctest::Approx(std::numbers::sqrt2 * std::numbers::pi / 2));
  CHECK(e.landing == Occupation{2, 1, 0});
  CHECK(as_evolve(c.next(e.landing)).lock == parse_lock("2:0"));
  c.next(std::nullopt);
  // Failed outcomes go straight to their locked designated time.
  const EvolveAction f = as_evolve(c.next(Occupation{1, 2, 0}));
  CHECK_FALSE(f.landing);
  CHECK(f.duration == doctest::Approx(0.955).epsilon(0.02));
}

TEST_CASE("parallel rounds on separated regions") {
  auto basis = enumerate_basis({5, 5});
  const Experiment ex = fixture::five_site(fock_state(basis, {2, 0, 0, 2, 1}));
  Controller c(fixture::config(ex, Strategy::mod_manqala));
  const EvolveAction move = as_evolve(c.next(Occupation{2, 0, 0, 2, 1}));
  CHECK(move.landing == Occupation{2, 0, 1, 2, 0});
  CHECK(move.lock == parse_lock("0:2,1:0"));

  const EvolveAction left = as_evolve(c.next(move.landing));
  CHECK(left.lock == parse_lock("2:1,3:2,4:0"));
  const Action m1 = c.next(std::nullopt);
  CHECK_FALSE(std::get<MeasureAction>(m1).counted);
  const EvolveAction right = as_evolve(c.next(Occupation{1, 1, 1, 2, 0}));
  CHECK(right.lock == parse_lock("0:1,1:1,2:1"));
  const Action m2 = c.next(std::nullopt);
  CHECK(std::get<MeasureAction>(m2).counted);
  CHECK(c.repetitions() == 1);
  CHECK(std::get<DoneAction>(c.next(Occupation{1, 1, 1, 1, 1})).success);
}

TEST_CASE("superposition starts with an uncounted collapse") {
  auto basis = enumerate_basis({5, 5});
  const Experiment ex = fixture::five_site(fixture::two_branch_state(basis));
  const auto prepared = prepare_controller(fixture::config(ex, Strategy::mod_manqala), ex.initial);
  REQUIRE(prepared.initial_action);
  const auto& m = std::get<MeasureAction>(*prepared.initial_action);
  CHECK(m.sites == all_sites(5));
  CHECK_FALSE(m.counted);

  // Branch-specific planning after the collapse.
  Controller c = prepared.controller;
  const EvolveAction first = as_evolve(c.next(Occupation{1, 3, 0, 1, 0}));
  CHECK(first.landing == Occupation{1, 3, 0, 0, 1});
  REQUIRE(c.demarcation());
  CHECK(c.demarcation()->partition == Partition{{0, 1}, {1, 3}, {4, 1}});
}

TEST_CASE("phase-two outcomes stay inside the locked four-state space") {
  const Experiment ex = fixture::flagship();
  const std::set<Occupation> allowed{{2, 1, 0}, {1, 2, 0}, {0, 3, 0}, {3, 0, 0}};
  for (Strategy s : {Strategy::manqala, Strategy::mod_manqala}) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto rec = run_trajectory(ex, fixture::config(ex, s), 0, seed, {});
      for (const auto& e : rec.events) {
        if (e.kind == EventKind::measure) CHECK(allowed.count(*e.outcome) == 1);
      }
    }
  }
}

TEST_CASE("FUMES alternates evolve and measure") {
  const Experiment ex = fixture::flagship();
  for (Strategy s : {Strategy::fumes, Strategy::zfumes}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto rec = run_trajectory(ex, fixture::config(ex, s), 0, seed, {});
      EventKind last = EventKind::measure;
      for (const auto& e : rec.events) {
        if (e.kind != EventKind::evolve_start && e.kind != EventKind::measure) continue;
        CHECK(e.kind != last);
        last = e.kind;
      }
      CHECK(last == EventKind::measure);
    }
  }
}
