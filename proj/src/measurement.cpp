#include "manqala/measurement.hpp"

#include <map>
#include <numeric>

#include "manqala/error.hpp"

namespace manqala {

namespace {

// Branch probabilities at or below this are numerical noise from evolution.
constexpr double kNegligible = 1e-15;

}  // namespace

std::vector<int> all_sites(int sites) {
  std::vector<int> out(static_cast<std::size_t>(sites));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<MeasurementOutcome> outcome_distribution(
    const StateVector& psi, const std::vector<int>& sites) {
  if (sites.empty()) throw ArgumentError("measurement needs at least one site");
  const FockBasis& basis = *psi.basis;
  for (int s : sites) {
    if (s < 0 || s >= basis.sites()) {
      throw SiteRangeError("measured site " + std::to_string(s) +
                           " outside the lattice");
    }
  }

  const double total = psi.amplitudes.squaredNorm();
  if (total <= 0.0) throw ArgumentError("cannot measure a zero state");

  std::vector<MeasurementOutcome> out;
  std::map<std::vector<int>, std::size_t> slot;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Complex amp = psi.amplitudes[static_cast<Eigen::Index>(k)];
    const double w = std::norm(amp);
    if (w == 0.0) continue;
    std::vector<int> counts;
    counts.reserve(sites.size());
    for (int s : sites) counts.push_back(basis.state(k)[static_cast<std::size_t>(s)]);

    auto [it, fresh] = slot.emplace(counts, out.size());
    if (fresh) {
      out.push_back(MeasurementOutcome{
          sites, counts, 0.0,
          StateVector{psi.basis, Eigen::VectorXcd::Zero(psi.amplitudes.size())}});
    }
    MeasurementOutcome& o = out[it->second];
    o.probability += w / total;
    o.post_state.amplitudes[static_cast<Eigen::Index>(k)] = amp;
  }

  std::erase_if(out, [](const MeasurementOutcome& o) {
    return o.probability <= kNegligible;
  });
  double kept = 0.0;
  for (const auto& o : out) kept += o.probability;
  for (auto& o : out) {
    o.probability /= kept;
    o.post_state.amplitudes /= o.post_state.amplitudes.norm();
  }
  return out;
}

MeasurementOutcome sample_measurement(const StateVector& psi,
                                      const std::vector<int>& sites, Rng& rng) {
  auto outcomes = outcome_distribution(psi, sites);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (auto& o : outcomes) {
    cumulative += o.probability;
    if (u < cumulative) return std::move(o);
  }
  return std::move(outcomes.back());
}

}  // namespace manqala
