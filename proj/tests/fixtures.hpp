#pragma once

#include "manqala/ensemble.hpp"

namespace fixture {

inline manqala::Experiment flagship(manqala::MetricMode metric = manqala::MetricMode::eq2) {
  auto basis = manqala::enumerate_basis({3, 3});
  return manqala::Experiment::create({3, 3}, {}, manqala::fock_state(basis, {0, 1, 2}),
                                     {3, 0, 0}, metric);
}

inline manqala::StateVector two_branch_state(manqala::BasisPtr basis) {
  manqala::StateVector psi{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))};
  psi.amplitudes[static_cast<Eigen::Index>(basis->index_of({3, 1, 0, 1, 0}))] = std::sqrt(2.0 / 3.0);
  psi.amplitudes[static_cast<Eigen::Index>(basis->index_of({1, 3, 0, 1, 0}))] =
      manqala::Complex(0, -1.0 / std::sqrt(3.0));
  return psi;
}

inline manqala::Experiment five_site(manqala::StateVector initial) {
  return manqala::Experiment::create({5, 5}, {}, std::move(initial), {1, 1, 1, 1, 1});
}

inline manqala::ControllerConfig config(const manqala::Experiment& ex, manqala::Strategy s,
                                        std::optional<int> reps = std::nullopt) {
  return manqala::ControllerConfig{s, ex.target, ex.times, reps, {}, {}};
}

}  // namespace fixture
