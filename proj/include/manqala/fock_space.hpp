#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

namespace manqala {

using Complex = std::complex<double>;

/// Particle count per site. Site 0 is the Ruma.
using Occupation = std::vector<int>;

struct LatticeShape {
  int sites = 1;
  int particles = 0;
};

inline constexpr std::size_t kDefaultMaxDimension = 1'000'000;

/// binomial(N+M-1, N). Throws SizingError if the value exceeds `limit`.
std::size_t basis_dimension(const LatticeShape& shape,
                            std::size_t limit = kDefaultMaxDimension);

/// The N-particle, M-site bosonic Fock basis in lexicographically decreasing
/// order, so (N,0,...,0) is state 0. Immutable after construction.
class FockBasis {
 public:
  const LatticeShape& shape() const { return shape_; }
  int sites() const { return shape_.sites; }
  int particles() const { return shape_.particles; }
  std::size_t size() const { return states_.size(); }

  const std::vector<Occupation>& states() const { return states_; }
  const Occupation& state(std::size_t k) const { return states_.at(k); }

  bool contains(const Occupation& occ) const;

  /// Throws NotMemberError for vectors outside the basis.
  std::size_t index_of(const Occupation& occ) const;

 private:
  friend std::shared_ptr<const FockBasis> enumerate_basis(const LatticeShape&,
                                                          std::size_t);
  FockBasis() = default;

  LatticeShape shape_;
  std::vector<Occupation> states_;
  std::map<Occupation, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

BasisPtr enumerate_basis(const LatticeShape& shape,
                         std::size_t max_dimension = kDefaultMaxDimension);

inline std::size_t index_of(const FockBasis& basis, const Occupation& occ) {
  return basis.index_of(occ);
}

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Matrix of a†_i a_j on the basis; for i == j the number operator n_i.
SparseMatrix hop_matrix(const FockBasis& basis, int i, int j);

/// "3;0;0"
std::string format_occupation(const Occupation& occ);
/// Inverse of format_occupation. Throws ArgumentError on malformed input.
Occupation parse_occupation(const std::string& text);

int total_particles(const Occupation& occ);

}  // namespace manqala
