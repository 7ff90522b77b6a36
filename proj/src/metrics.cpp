#include "manqala/metrics.hpp"

#include <cmath>

#include "manqala/error.hpp"

namespace manqala {

MetricMode parse_metric_mode(const std::string& name) {
  if (name == "eq2") return MetricMode::eq2;
  if (name == "cumulative") return MetricMode::cumulative;
  throw ArgumentError("unknown metric mode '" + name +
                      "' (expected eq2 or cumulative)");
}

const char* to_string(MetricMode mode) {
  return mode == MetricMode::eq2 ? "eq2" : "cumulative";
}

bool CostWeights::is_convex(double tol) const {
  return lambda1 >= 0 && lambda2 >= 0 && lambda3 >= 0 &&
         std::abs(lambda1 + lambda2 + lambda3 - 1.0) <= tol;
}

ExpectationVector occupation_expectations(const StateVector& psi) {
  const FockBasis& basis = *psi.basis;
  ExpectationVector n(static_cast<std::size_t>(basis.sites()), 0.0);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double w = std::norm(psi.amplitudes[static_cast<Eigen::Index>(k)]);
    if (w == 0.0) continue;
    const Occupation& occ = basis.state(k);
    for (std::size_t i = 0; i < occ.size(); ++i) n[i] += w * occ[i];
  }
  return n;
}

ExpectationVector to_expectations(const Occupation& occ) {
  return ExpectationVector(occ.begin(), occ.end());
}

double tunneling_distance(const ExpectationVector& a, const ExpectationVector& b,
                          MetricMode mode) {
  if (a.size() != b.size()) {
    throw ArgumentError("tunneling_distance: length mismatch");
  }
  if (a.size() < 2) throw ArgumentError("tunneling_distance needs M >= 2");

  double total = 0.0;
  if (mode == MetricMode::eq2) {
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
      total += std::abs((a[k] - b[k]) + (a[k + 1] - b[k + 1]));
    }
  } else {
    double running = 0.0;
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
      running += a[k] - b[k];
      total += std::abs(running);
    }
  }
  return total;
}

constexpr double kDegenerateSpan = 1e-9;

double bosonic_distance(const ExpectationVector& a,
                        const ExpectationVector& target,
                        const ExpectationVector& initial, MetricMode mode) {
  // Expectations of superpositions carry rounding noise; a superfluid start
  // towards a Mott target has span ~1e-15 rather than exactly 0.
  const double span = tunneling_distance(initial, target, mode);
  if (span <= kDegenerateSpan) return 1.0;
  return 1.0 - tunneling_distance(a, target, mode) / span;
}

double target_probability(const StateVector& psi, const StateVector& target) {
  if (psi.basis != target.basis &&
      (psi.basis->sites() != target.basis->sites() ||
       psi.basis->particles() != target.basis->particles())) {
    throw ArgumentError("target_probability: states live on different bases");
  }
  if (psi.amplitudes.size() != target.amplitudes.size()) {
    throw ArgumentError("target_probability: dimension mismatch");
  }
  return std::norm(target.amplitudes.dot(psi.amplitudes));
}

double manqala_cost(const CostWeights& w, double bosonic_dist,
                    int num_projections, int mancala_violations) {
  return w.lambda1 * (1.0 - bosonic_dist) + w.lambda2 * num_projections +
         w.lambda3 * mancala_violations;
}

}  // namespace manqala
