#include "manqala/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "manqala/error.hpp"

namespace manqala {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kLeakageTol = 1e-9;

Eigen::VectorXcd phases(const Eigen::VectorXd& values, double t) {
  Eigen::VectorXcd out(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    out[k] = std::polar(1.0, -values[k] * t);
  }
  return out;
}

void check_same_basis(const StateVector& psi, Eigen::Index dim) {
  if (!psi.basis || psi.amplitudes.size() != dim) {
    throw ArgumentError("state vector does not match the operator dimension");
  }
}

}  // namespace

HermitianOperator::HermitianOperator(Eigen::MatrixXcd matrix)
    : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw ArgumentError("Hermitian operator must be square");
  }
  const double deviation =
      matrix_.size() == 0
          ? 0.0
          : (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (deviation > kHermitianTol) {
    throw ArgumentError("matrix is not Hermitian (max deviation " +
                        std::to_string(deviation) + ")");
  }
}

const HermitianOperator::Spectrum& HermitianOperator::spectrum() const {
  std::call_once(cache_->once, [this] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_);
    cache_->spectrum.values = solver.eigenvalues();
    cache_->spectrum.vectors = solver.eigenvectors();
  });
  return cache_->spectrum;
}

bool LockSpec::admits(const Occupation& occ) const {
  for (const auto& [site, count] : pins) {
    if (occ.at(static_cast<std::size_t>(site)) != count) return false;
  }
  return true;
}

std::string format_lock(const LockSpec& lock) {
  std::string out;
  for (const auto& [site, count] : lock.pins) {
    if (!out.empty()) out += ',';
    out += std::to_string(site) + ":" + std::to_string(count);
  }
  return out;
}

LockSpec parse_lock(const std::string& text) {
  LockSpec lock;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ArgumentError("malformed lock entry '" + item + "'");
    }
    try {
      lock.pins[std::stoi(item.substr(0, colon))] =
          std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ArgumentError("malformed lock entry '" + item + "'");
    }
  }
  return lock;
}

StateVector fock_state(BasisPtr basis, const Occupation& occ) {
  StateVector psi{basis, Eigen::VectorXcd::Zero(
                             static_cast<Eigen::Index>(basis->size()))};
  psi.amplitudes[static_cast<Eigen::Index>(basis->index_of(occ))] = 1.0;
  return psi;
}

std::optional<Occupation> as_fock(const StateVector& psi, double tol) {
  Eigen::Index best = 0;
  const double top = psi.amplitudes.cwiseAbs2().maxCoeff(&best);
  const double total = psi.amplitudes.squaredNorm();
  if (total <= 0.0 || top < total * (1.0 - tol)) return std::nullopt;
  return psi.basis->state(static_cast<std::size_t>(best));
}

HermitianOperator build_hamiltonian(const FockBasis& basis,
                                    const ModelParams& params) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const int m = basis.sites();

  if (params.hopping != 0.0) {
    for (int i = 0; i + 1 < m; ++i) {
      h -= params.hopping * Eigen::MatrixXcd(hop_matrix(basis, i, i + 1));
      h -= params.hopping * Eigen::MatrixXcd(hop_matrix(basis, i + 1, i));
    }
  }
  for (std::size_t k = 0; k < basis.size(); ++k) {
    double diag = 0.0;
    for (int n : basis.state(k)) {
      diag += 0.5 * params.interaction * n * (n - 1);
      diag -= params.chemical_potential * n;
    }
    const auto idx = static_cast<Eigen::Index>(k);
    h(idx, idx) += diag;
  }
  return HermitianOperator(std::move(h));
}

Eigen::MatrixXd Projector::dense() const {
  const auto dim = static_cast<Eigen::Index>(dimension);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k : range) {
    p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  }
  return p;
}

Projector zeno_projector(const FockBasis& basis, const LockSpec& lock) {
  for (const auto& [site, count] : lock.pins) {
    if (site < 0 || site >= basis.sites()) {
      throw SiteRangeError("locked site " + std::to_string(site) +
                           " outside the lattice");
    }
  }
  Projector p;
  p.dimension = basis.size();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (lock.admits(basis.state(k))) p.range.push_back(k);
  }
  if (p.range.empty()) {
    throw EmptyRangeError("no basis state satisfies lock {" +
                          format_lock(lock) + "}");
  }
  return p;
}

namespace {

std::shared_ptr<SubspaceSpectrum> make_subspace(const FockBasis& basis,
                                                const HermitianOperator& h,
                                                const LockSpec& lock) {
  auto out = std::make_shared<SubspaceSpectrum>();
  if (lock.empty()) {
    out->range.resize(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) out->range[k] = k;
    out->values = h.eigenvalues();
    out->vectors = h.eigenvectors();
    return out;
  }
  out->range = zeno_projector(basis, lock).range;
  const auto r = static_cast<Eigen::Index>(out->range.size());
  Eigen::MatrixXcd block(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      block(a, b) = h.matrix()(static_cast<Eigen::Index>(out->range[a]),
                               static_cast<Eigen::Index>(out->range[b]));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
  out->values = solver.eigenvalues();
  out->vectors = solver.eigenvectors();
  return out;
}

Eigen::VectorXcd restrict_to(const StateVector& psi,
                             const std::vector<std::size_t>& range) {
  Eigen::VectorXcd sub(static_cast<Eigen::Index>(range.size()));
  for (std::size_t a = 0; a < range.size(); ++a) {
    sub[static_cast<Eigen::Index>(a)] =
        psi.amplitudes[static_cast<Eigen::Index>(range[a])];
  }
  const double total = psi.amplitudes.squaredNorm();
  if (sub.squaredNorm() < total * (1.0 - kLeakageTol)) {
    throw LeakageError("state has weight " +
                       std::to_string(total - sub.squaredNorm()) +
                       " outside the locked subspace");
  }
  return sub;
}

StateVector evolve_in(const SubspaceSpectrum& spec, const StateVector& psi,
                      double t) {
  const Eigen::VectorXcd sub = restrict_to(psi, spec.range);
  const Eigen::VectorXcd evolved =
      spec.vectors *
      (phases(spec.values, t).cwiseProduct(spec.vectors.adjoint() * sub));
  StateVector out{psi.basis, Eigen::VectorXcd::Zero(psi.amplitudes.size())};
  for (std::size_t a = 0; a < spec.range.size(); ++a) {
    out.amplitudes[static_cast<Eigen::Index>(spec.range[a])] =
        evolved[static_cast<Eigen::Index>(a)];
  }
  return out;
}

}  // namespace

StateVector propagate(const HermitianOperator& h, const StateVector& psi,
                      double t) {
  check_same_basis(psi, h.dimension());
  const auto& v = h.eigenvectors();
  StateVector out{psi.basis, v * (phases(h.eigenvalues(), t)
                                      .cwiseProduct(v.adjoint() * psi.amplitudes))};
  return out;
}

StateVector locked_propagate(const HermitianOperator& h, const LockSpec& lock,
                             const StateVector& psi, double t) {
  check_same_basis(psi, h.dimension());
  const auto spec = make_subspace(*psi.basis, h, lock);
  return evolve_in(*spec, psi, t);
}

Evolver::Evolver(BasisPtr basis, HermitianOperator hamiltonian)
    : basis_(std::move(basis)), hamiltonian_(std::move(hamiltonian)) {
  if (hamiltonian_.dimension() != static_cast<Eigen::Index>(basis_->size())) {
    throw ArgumentError("Hamiltonian dimension does not match the basis");
  }
}

std::shared_ptr<const SubspaceSpectrum> Evolver::subspace(
    const LockSpec& lock) const {
  {
    std::lock_guard guard(mutex_);
    auto it = cache_.find(lock);
    if (it != cache_.end()) return it->second;
  }
  // Computed outside the lock; a racing duplicate is identical and dropped.
  std::shared_ptr<const SubspaceSpectrum> fresh =
      make_subspace(*basis_, hamiltonian_, lock);
  std::lock_guard guard(mutex_);
  return cache_.emplace(lock, std::move(fresh)).first->second;
}

StateVector Evolver::propagate(const StateVector& psi, double t) const {
  return locked_propagate(LockSpec{}, psi, t);
}

StateVector Evolver::locked_propagate(const LockSpec& lock,
                                      const StateVector& psi, double t) const {
  check_same_basis(psi, hamiltonian_.dimension());
  return evolve_in(*subspace(lock), psi, t);
}

EvolutionSegment::EvolutionSegment(
    std::shared_ptr<const SubspaceSpectrum> spectrum, const StateVector& start)
    : spectrum_(std::move(spectrum)), basis_(start.basis) {
  coefficients_ =
      spectrum_->vectors.adjoint() * restrict_to(start, spectrum_->range);
}

StateVector EvolutionSegment::at(double t) const {
  const Eigen::VectorXcd evolved =
      spectrum_->vectors *
      phases(spectrum_->values, t).cwiseProduct(coefficients_);
  StateVector out{basis_,
                  Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_->size()))};
  for (std::size_t a = 0; a < spectrum_->range.size(); ++a) {
    out.amplitudes[static_cast<Eigen::Index>(spectrum_->range[a])] =
        evolved[static_cast<Eigen::Index>(a)];
  }
  return out;
}

}  // namespace manqala
