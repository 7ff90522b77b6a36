#include <doctest.h>

#include <numbers>

#include "manqala/dynamics.hpp"
#include "manqala/error.hpp"
#include "manqala/metrics.hpp"
#include "oracles.hpp"

using namespace manqala;

namespace {

Evolver make_evolver(int sites, int particles, ModelParams p = {}) {
  auto basis = enumerate_basis({sites, particles});
  return Evolver(basis, build_hamiltonian(*basis, p));
}

StateVector random_state(BasisPtr basis, unsigned seed) {
  std::srand(seed);
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(static_cast<Eigen::Index>(basis->size()));
  v.normalize();
  return {basis, v};
}

}  // namespace

TEST_CASE("Hamiltonian entries") {
  auto b1 = enumerate_basis({2, 1});
  const Eigen::MatrixXcd h1 = build_hamiltonian(*b1, {}).matrix();
  Eigen::MatrixXcd expect(2, 2);
  expect << 0, -1, -1, 0;
  CHECK((h1 - expect).norm() < 1e-15);

  auto b3 = enumerate_basis({3, 3});
  CHECK(build_hamiltonian(*b3, {0.0, 0.0, 0.0}).matrix().norm() == 0.0);

  auto b2 = enumerate_basis({2, 2});
  const Eigen::MatrixXcd h2 = build_hamiltonian(*b2, {0.0, 2.0, 0.0}).matrix();
  CHECK(h2(0, 0).real() == doctest::Approx(2.0));
  CHECK(h2(1, 1).real() == doctest::Approx(0.0));
  CHECK(h2(2, 2).real() == doctest::Approx(2.0));

  const Eigen::MatrixXcd h = build_hamiltonian(*b3, {1.0, 0.7, 0.3}).matrix();
  CHECK((h - h.adjoint()).norm() < 1e-14);
}

TEST_CASE("non-Hermitian input is rejected") {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(HermitianOperator{m}, ArgumentError);
}

TEST_CASE("propagator matches the power-series oracle") {
  for (auto [m, n] : {std::pair{2, 1}, std::pair{3, 2}, std::pair{3, 3}, std::pair{4, 2}, std::pair{2, 5}}) {
    const Evolver ev = make_evolver(m, n, {1.0, 0.4, 0.2});
    REQUIRE(ev.basis().size() <= 20);
    const StateVector psi = random_state(ev.basis_ptr(), 7);
    for (double t : {0.0, 0.3, 1.66, 4.0}) {
      const Eigen::VectorXcd ref = oracle::expm_series(ev.hamiltonian().matrix(), t) * psi.amplitudes;
      CHECK((ev.propagate(psi, t).amplitudes - ref).norm() < 1e-8);
    }
  }
}

TEST_CASE("single-particle transfer at pi/2") {
  const Evolver ev = make_evolver(2, 1);
  const StateVector out = ev.propagate(fock_state(ev.basis_ptr(), {1, 0}), std::numbers::pi / 2);
  CHECK(std::abs(out.amplitudes[0]) < 1e-12);
  CHECK(std::abs(out.amplitudes[1] - Complex(0.0, 1.0)) < 1e-12);
}

TEST_CASE("norm and particle number are conserved") {
  const Evolver ev = make_evolver(4, 4, {1.0, 0.5, 0.1});
  const StateVector psi = random_state(ev.basis_ptr(), 11);
  for (double t = 0.0; t < 10.0; t += 0.7) {
    const StateVector out = ev.propagate(psi, t);
    CHECK(std::abs(out.norm() - 1.0) < 1e-10);
    const auto n = occupation_expectations(out);
    CHECK(std::abs(std::accumulate(n.begin(), n.end(), 0.0) - 4.0) < 1e-10);
  }
}

TEST_CASE("Mott state expectations are stationary") {
  const Evolver ev = make_evolver(3, 3);
  const StateVector mott = fock_state(ev.basis_ptr(), {1, 1, 1});
  for (double t : {0.4, 1.3, 7.0}) {
    for (double n : occupation_expectations(ev.propagate(mott, t))) {
      CHECK(n == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("Zeno projector ranges") {
  auto b = enumerate_basis({3, 3});
  const Projector p = zeno_projector(*b, parse_lock("2:0"));
  CHECK(p.rank() == 4);
  std::set<Occupation> kept;
  for (auto k : p.range) kept.insert(b->state(k));
  CHECK(kept == std::set<Occupation>{{3, 0, 0}, {2, 1, 0}, {1, 2, 0}, {0, 3, 0}});
  CHECK(zeno_projector(*b, {}).rank() == b->size());
  CHECK_THROWS_AS(zeno_projector(*b, parse_lock("0:4")), EmptyRangeError);
  CHECK_THROWS_AS(zeno_projector(*b, parse_lock("3:0")), SiteRangeError);

  auto b5 = enumerate_basis({5, 5});
  const Projector p5 = zeno_projector(*b5, parse_lock("0:3,1:1,2:0"));
  CHECK(p5.rank() == 2);
  for (auto k : p5.range) {
    CHECK(b5->state(k)[0] == 3);
    CHECK(b5->state(k)[1] == 1);
    CHECK(b5->state(k)[2] == 0);
  }
  const Eigen::MatrixXd d = p5.dense();
  CHECK((d * d - d).norm() == 0.0);
}

TEST_CASE("lock text format") {
  LockSpec lock = parse_lock("2:0,3:1");
  CHECK(lock.pins == std::map<int, int>{{2, 0}, {3, 1}});
  CHECK(format_lock(lock) == "2:0,3:1");
  CHECK(parse_lock("").empty());
  CHECK(lock.admits({1, 1, 0, 1}));
  CHECK_FALSE(lock.admits({1, 0, 1, 1}));
}

TEST_CASE("locked evolution keeps pinned sites and stays in range") {
  const Evolver ev = make_evolver(3, 3);
  const LockSpec lock = parse_lock("2:0");
  const StateVector start = fock_state(ev.basis_ptr(), {2, 1, 0});
  for (double t = 0.0; t < 6.0; t += 0.37) {
    const StateVector out = ev.locked_propagate(lock, start, t);
    CHECK(std::abs(out.norm() - 1.0) < 1e-10);
    CHECK(std::abs(occupation_expectations(out)[2]) < 1e-12);
    double leaked = 0.0;
    for (std::size_t k = 0; k < ev.basis().size(); ++k) {
      if (!lock.admits(ev.basis().state(k))) leaked += std::norm(out.amplitudes[static_cast<Eigen::Index>(k)]);
    }
    CHECK(leaked <= 1e-9);
  }
  CHECK_THROWS_AS(ev.locked_propagate(lock, fock_state(ev.basis_ptr(), {0, 1, 2}), 1.0), LeakageError);

  const LockSpec all = parse_lock("0:2,1:1,2:0");
  CHECK((ev.locked_propagate(all, start, 3.3).amplitudes - start.amplitudes).norm() < 1e-12);

  // Free functions agree with the cached evolver.
  const StateVector a = locked_propagate(ev.hamiltonian(), lock, start, 0.8);
  CHECK((a.amplitudes - ev.locked_propagate(lock, start, 0.8).amplitudes).norm() < 1e-12);
}

TEST_CASE("locked two-site swap inside five sites") {
  const Evolver ev = make_evolver(5, 5);
  const LockSpec lock = parse_lock("0:3,1:1,2:0");
  const StateVector out =
      ev.locked_propagate(lock, fock_state(ev.basis_ptr(), {3, 1, 0, 1, 0}), std::numbers::pi / 2);
  CHECK(as_fock(out) == Occupation{3, 1, 0, 0, 1});
}

TEST_CASE("evolution segments sample the same trajectory") {
  const Evolver ev = make_evolver(3, 3);
  const StateVector start = fock_state(ev.basis_ptr(), {0, 1, 2});
  const EvolutionSegment seg(ev.subspace({}), start);
  for (double t : {0.0, 0.5, 1.627}) {
    CHECK((seg.at(t).amplitudes - ev.propagate(start, t).amplitudes).norm() < 1e-12);
  }
}
