#include "manqala/fock_space.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "manqala/error.hpp"

namespace manqala {

std::size_t basis_dimension(const LatticeShape& shape, std::size_t limit) {
  if (shape.sites < 1) throw ArgumentError("lattice needs at least one site");
  if (shape.particles < 0) throw ArgumentError("particle count must be >= 0");

  // binomial(N+M-1, N) built incrementally; each partial product is itself a
  // binomial coefficient so the division is exact.
  const auto n = static_cast<unsigned long long>(shape.particles);
  const auto m = static_cast<unsigned long long>(shape.sites);
  __extension__ using Wide = unsigned __int128;
  Wide value = 1;
  for (unsigned long long k = 1; k <= n; ++k) {
    value = value * (m - 1 + k) / k;
    if (value > limit) {
      throw SizingError("basis dimension exceeds limit of " +
                        std::to_string(limit) + " for N=" +
                        std::to_string(shape.particles) +
                        ", M=" + std::to_string(shape.sites));
    }
  }
  return static_cast<std::size_t>(value);
}

namespace {

void enumerate_into(std::vector<Occupation>& out, Occupation& prefix,
                    int remaining, int site, int sites) {
  if (site == sites - 1) {
    prefix[site] = remaining;
    out.push_back(prefix);
    return;
  }
  for (int count = remaining; count >= 0; --count) {
    prefix[site] = count;
    enumerate_into(out, prefix, remaining - count, site + 1, sites);
  }
}

}  // namespace

BasisPtr enumerate_basis(const LatticeShape& shape, std::size_t max_dimension) {
  const std::size_t dim = basis_dimension(shape, max_dimension);

  auto basis = std::shared_ptr<FockBasis>(new FockBasis());
  basis->shape_ = shape;
  basis->states_.reserve(dim);
  Occupation prefix(static_cast<std::size_t>(shape.sites), 0);
  enumerate_into(basis->states_, prefix, shape.particles, 0, shape.sites);
  for (std::size_t k = 0; k < basis->states_.size(); ++k) {
    basis->index_.emplace(basis->states_[k], k);
  }
  return basis;
}

bool FockBasis::contains(const Occupation& occ) const {
  return index_.find(occ) != index_.end();
}

std::size_t FockBasis::index_of(const Occupation& occ) const {
  auto it = index_.find(occ);
  if (it == index_.end()) {
    throw NotMemberError("occupation " + format_occupation(occ) +
                         " is not in the N=" + std::to_string(particles()) +
                         ", M=" + std::to_string(sites()) + " basis");
  }
  return it->second;
}

SparseMatrix hop_matrix(const FockBasis& basis, int i, int j) {
  const int m = basis.sites();
  if (i < 0 || i >= m || j < 0 || j >= m) {
    throw SiteRangeError("site index out of range in hop_matrix(" +
                         std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(basis.size());

  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Occupation& occ = basis.state(k);
    const auto col = static_cast<Eigen::Index>(k);
    if (i == j) {
      if (occ[i] != 0) triplets.emplace_back(col, col, Complex(occ[i], 0.0));
      continue;
    }
    if (occ[j] == 0) continue;
    Occupation moved = occ;
    const double amp = std::sqrt(static_cast<double>(occ[i] + 1) * occ[j]);
    moved[i] += 1;
    moved[j] -= 1;
    const auto row = static_cast<Eigen::Index>(basis.index_of(moved));
    triplets.emplace_back(row, col, Complex(amp, 0.0));
  }

  SparseMatrix out(dim, dim);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::string format_occupation(const Occupation& occ) {
  std::string out;
  for (std::size_t k = 0; k < occ.size(); ++k) {
    if (k) out += ';';
    out += std::to_string(occ[k]);
  }
  return out;
}

Occupation parse_occupation(const std::string& text) {
  Occupation out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ArgumentError("malformed occupation vector '" + text + "'");
    }
  }
  if (out.empty()) throw ArgumentError("empty occupation vector");
  return out;
}

int total_particles(const Occupation& occ) {
  return std::accumulate(occ.begin(), occ.end(), 0);
}

}  // namespace manqala
