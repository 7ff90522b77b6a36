#pragma once

#include <vector>

#include "manqala/dynamics.hpp"

namespace manqala {

/// Expected particle count per site.
using ExpectationVector = std::vector<double>;

/// How tunneling distance is evaluated.
///   eq2        Σ_k |d_k + d_{k+1}| over adjacent pairs of d = nA - nB.
///   cumulative Σ_k |Σ_{j<=k} d_j|, a literal hop count.
/// The two agree for M = 3 and diverge from M = 4 on: d = (1,-1,1,-1) is 0
/// under eq2 but 2 hops under cumulative.
enum class MetricMode { eq2, cumulative };

MetricMode parse_metric_mode(const std::string& name);
const char* to_string(MetricMode mode);

struct CostWeights {
  double lambda1 = 1.0;  // bosonic distance
  double lambda2 = 0.0;  // projective measurements
  double lambda3 = 0.0;  // mancala-rule violations

  bool is_convex(double tol = 1e-12) const;
};

ExpectationVector occupation_expectations(const StateVector& psi);
ExpectationVector to_expectations(const Occupation& occ);

/// Throws ArgumentError on length mismatch or M < 2.
double tunneling_distance(const ExpectationVector& a, const ExpectationVector& b,
                          MetricMode mode = MetricMode::eq2);

/// 1 - d_T(a, target) / d_T(initial, target); 1 when initial == target
/// (span below 1e-9).
/// Not clamped: negative values mean the state moved away from the target.
double bosonic_distance(const ExpectationVector& a,
                        const ExpectationVector& target,
                        const ExpectationVector& initial,
                        MetricMode mode = MetricMode::eq2);

/// |<target|psi>|^2. Throws ArgumentError if the bases differ.
double target_probability(const StateVector& psi, const StateVector& target);

double manqala_cost(const CostWeights& weights, double bosonic_dist,
                    int num_projections, int mancala_violations);

}  // namespace manqala
