#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manqala/fock_space.hpp"

namespace manqala {

/// Bose-Hubbard couplings. Strategies only ever run with V = mu = 0.
struct ModelParams {
  double hopping = 1.0;             // J
  double interaction = 0.0;         // V
  double chemical_potential = 0.0;  // mu
};

/// Dense Hermitian matrix with a lazily computed, cached eigendecomposition.
/// Copies share the cache.
class HermitianOperator {
 public:
  /// Throws ArgumentError if the matrix is not Hermitian to 1e-12.
  explicit HermitianOperator(Eigen::MatrixXcd matrix);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Eigen::Index dimension() const { return matrix_.rows(); }

  const Eigen::VectorXd& eigenvalues() const { return spectrum().values; }
  const Eigen::MatrixXcd& eigenvectors() const { return spectrum().vectors; }

 private:
  struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
  };
  struct Cache {
    std::once_flag once;
    Spectrum spectrum;
  };
  const Spectrum& spectrum() const;

  Eigen::MatrixXcd matrix_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Zeno lock: each pinned site is held at a fixed occupation.
struct LockSpec {
  std::map<int, int> pins;  // site -> required count

  bool empty() const { return pins.empty(); }
  bool is_locked(int site) const { return pins.count(site) != 0; }
  bool admits(const Occupation& occ) const;

  friend bool operator==(const LockSpec&, const LockSpec&) = default;
  friend auto operator<=>(const LockSpec&, const LockSpec&) = default;
};

/// "2:0,3:1"; empty string for no lock.
std::string format_lock(const LockSpec& lock);
LockSpec parse_lock(const std::string& text);

/// Amplitudes over a Fock basis.
struct StateVector {
  BasisPtr basis;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

StateVector fock_state(BasisPtr basis, const Occupation& occ);

/// Returns the occupation if the state is a single Fock state up to `tol`
/// of missing probability.
std::optional<Occupation> as_fock(const StateVector& psi, double tol = 1e-9);

/// H = -J Σ_<i,j>(a†_i a_j + h.c.) + V/2 Σ n_i(n_i-1) - mu Σ n_i on an open chain.
HermitianOperator build_hamiltonian(const FockBasis& basis,
                                    const ModelParams& params);

/// Diagonal 0/1 projector onto the basis states admitted by a lock.
struct Projector {
  std::size_t dimension = 0;
  std::vector<std::size_t> range;  // kept basis indices, ascending

  std::size_t rank() const { return range.size(); }
  Eigen::MatrixXd dense() const;
};

/// Throws EmptyRangeError when no state satisfies the pins and SiteRangeError
/// for pins outside [0, M).
Projector zeno_projector(const FockBasis& basis, const LockSpec& lock);

/// Spectral data of PHP restricted to the range of P.
struct SubspaceSpectrum {
  std::vector<std::size_t> range;
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;  // range.size() x range.size()
};

/// exp(-iHt) psi, via the spectral decomposition.
StateVector propagate(const HermitianOperator& h, const StateVector& psi,
                      double t);

/// P exp(-i PHP t) psi. Throws LeakageError if |P psi|^2 < 1 - 1e-9.
StateVector locked_propagate(const HermitianOperator& h, const LockSpec& lock,
                             const StateVector& psi, double t);

/// A Hamiltonian together with a cache of locked-subspace spectra, shareable
/// across trajectory workers.
class Evolver {
 public:
  Evolver(BasisPtr basis, HermitianOperator hamiltonian);

  const FockBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const HermitianOperator& hamiltonian() const { return hamiltonian_; }

  /// Spectrum of PHP on the range of the lock (the full H for an empty lock).
  std::shared_ptr<const SubspaceSpectrum> subspace(const LockSpec& lock) const;

  StateVector propagate(const StateVector& psi, double t) const;
  StateVector locked_propagate(const LockSpec& lock, const StateVector& psi,
                               double t) const;

 private:
  BasisPtr basis_;
  HermitianOperator hamiltonian_;
  mutable std::mutex mutex_;
  mutable std::map<LockSpec, std::shared_ptr<const SubspaceSpectrum>> cache_;
};

/// psi(t) for one evolution segment, with the projection onto the eigenbasis
/// done once so repeated sampling costs one matrix-vector product.
class EvolutionSegment {
 public:
  EvolutionSegment(std::shared_ptr<const SubspaceSpectrum> spectrum,
                   const StateVector& start);

  StateVector at(double t) const;

 private:
  std::shared_ptr<const SubspaceSpectrum> spectrum_;
  BasisPtr basis_;
  Eigen::VectorXcd coefficients_;
};

}  // namespace manqala
