#pragma once

#include <vector>

#include "manqala/dynamics.hpp"
#include "manqala/rng.hpp"

namespace manqala {

/// One branch of an ideal site-occupation measurement.
struct MeasurementOutcome {
  std::vector<int> measured_sites;
  std::vector<int> counts;  // occupation at each measured site, same order
  double probability = 0.0;
  StateVector post_state;   // renormalized projection
};

/// All branches with nonzero probability, ordered by the first basis state
/// (canonical order) that realizes each branch. Probabilities sum to 1.
/// Throws ArgumentError for an empty or out-of-range site set.
std::vector<MeasurementOutcome> outcome_distribution(
    const StateVector& psi, const std::vector<int>& sites);

/// Inverse-CDF draw over outcome_distribution's ordering.
MeasurementOutcome sample_measurement(const StateVector& psi,
                                      const std::vector<int>& sites, Rng& rng);

std::vector<int> all_sites(int sites);

}  // namespace manqala
