#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace monret {

using Complex = std::complex<double>;

inline constexpr double kDefaultDegeneracyTol = 1e-9;
inline constexpr double kDefaultWeightFloor = 1e-12;

// One energy level with the spectral weight |<E_j|Psi>|^2 of the initial state.
struct Level {
  double energy = 0.0;
  double weight = 0.0;
};

// Energy levels straight out of a diagonalization: possibly degenerate,
// possibly with zero weight.
class RawSpectralModel {
 public:
  RawSpectralModel() = default;
  // Throws InvalidInput unless all entries are finite, weights are
  // non-negative and sum to 1 within 1e-10.
  explicit RawSpectralModel(std::vector<Level> levels);

  const std::vector<Level>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }

 private:
  std::vector<Level> levels_;
};

// The accessible Hilbert space: strictly increasing energies, strictly
// positive weights summing to 1. Its size is the dimension N.
class CanonicalSpectralModel {
 public:
  // Validates the invariants; throws InvalidInput on violation.
  CanonicalSpectralModel(std::vector<double> energies, std::vector<double> weights);

  const std::vector<double>& energies() const noexcept { return energies_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t dimension() const noexcept { return energies_.size(); }

  double energy(std::size_t j) const { return energies_.at(j); }
  double weight(std::size_t j) const { return weights_.at(j); }

  // Already-canonical models pass through canonicalize() unchanged.
  RawSpectralModel to_raw() const;

 private:
  std::vector<double> energies_;
  std::vector<double> weights_;
};

// Hermitian matrix plus a normalized initial state.
struct HamiltonianInput {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd initial_state;
};

RawSpectralModel spectral_decompose(const HamiltonianInput& h);

// Merges levels closer than `degeneracy_tol` (chained clustering on the sorted
// spectrum; weights summed, energy weight-averaged), drops levels with weight
// below `weight_floor`, and renormalizes.
CanonicalSpectralModel canonicalize(const RawSpectralModel& raw,
                                    double degeneracy_tol = kDefaultDegeneracyTol,
                                    double weight_floor = kDefaultWeightFloor);

// Symmetric two-level system with levels -J, +J and equal weights.
CanonicalSpectralModel two_level_model(double J);

}  // namespace monret
