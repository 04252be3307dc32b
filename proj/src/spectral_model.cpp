#include "monret/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "monret/errors.hpp"

namespace monret {
namespace {

constexpr double kWeightSumTol = 1e-10;
constexpr double kHermiticityTol = 1e-10;
constexpr double kStateNormTol = 1e-10;

}  // namespace

RawSpectralModel::RawSpectralModel(std::vector<Level> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw InvalidInput("spectral model has no levels");
  double sum = 0.0;
  for (const auto& level : levels_) {
    if (!std::isfinite(level.energy) || !std::isfinite(level.weight))
      throw InvalidInput("spectral model contains a non-finite entry");
    if (level.weight < 0.0) throw InvalidInput("spectral weight is negative");
    sum += level.weight;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os << "spectral weights sum to " << sum << ", expected 1";
    throw InvalidInput(os.str());
  }
}

CanonicalSpectralModel::CanonicalSpectralModel(std::vector<double> energies,
                                               std::vector<double> weights)
    : energies_(std::move(energies)), weights_(std::move(weights)) {
  if (energies_.empty()) throw InvalidInput("canonical model is empty");
  if (energies_.size() != weights_.size())
    throw InvalidInput("energies and weights differ in length");
  double sum = 0.0;
  for (std::size_t j = 0; j < energies_.size(); ++j) {
    if (!std::isfinite(energies_[j]) || !std::isfinite(weights_[j]))
      throw InvalidInput("canonical model contains a non-finite entry");
    if (!(weights_[j] > 0.0)) throw InvalidInput("canonical weights must be strictly positive");
    if (j > 0 && !(energies_[j] > energies_[j - 1]))
      throw InvalidInput("canonical energies must be strictly increasing");
    sum += weights_[j];
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) throw InvalidInput("canonical weights do not sum to 1");
}

RawSpectralModel CanonicalSpectralModel::to_raw() const {
  std::vector<Level> levels(energies_.size());
  for (std::size_t j = 0; j < levels.size(); ++j) levels[j] = {energies_[j], weights_[j]};
  return RawSpectralModel(std::move(levels));
}

RawSpectralModel spectral_decompose(const HamiltonianInput& h) {
  const auto n = h.matrix.rows();
  if (n == 0 || h.matrix.cols() != n) throw InvalidInput("Hamiltonian must be a non-empty square matrix");
  if (h.initial_state.size() != n) throw InvalidInput("initial state dimension does not match Hamiltonian");
  if (!h.matrix.allFinite() || !h.initial_state.allFinite())
    throw InvalidInput("Hamiltonian input contains non-finite entries");

  const double herm = (h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermiticityTol) {
    std::ostringstream os;
    os << "Hamiltonian is not Hermitian (residual " << herm << ")";
    throw InvalidInput(os.str());
  }
  const double norm = h.initial_state.norm();
  if (std::abs(norm - 1.0) > kStateNormTol) {
    std::ostringstream os;
    os << "initial state is not normalized (norm " << norm << ")";
    throw InvalidInput(os.str());
  }

  // Symmetrize to remove the sub-tolerance anti-Hermitian part.
  const Eigen::MatrixXcd sym = 0.5 * (h.matrix + h.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalHealthError("Hermitian eigensolver failed");

  std::vector<Level> levels(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex overlap = solver.eigenvectors().col(j).dot(h.initial_state);
    levels[static_cast<std::size_t>(j)] = {solver.eigenvalues()(j), std::norm(overlap)};
    sum += std::norm(overlap);
  }
  if (std::abs(sum - 1.0) > 1e-9) throw NumericalHealthError("eigenbasis weights do not sum to 1");
  // Absorb rounding so the raw-model invariant holds at its tighter tolerance.
  for (auto& level : levels) level.weight /= sum;
  return RawSpectralModel(std::move(levels));
}

CanonicalSpectralModel canonicalize(const RawSpectralModel& raw, double degeneracy_tol,
                                    double weight_floor) {
  if (!(degeneracy_tol > 0.0)) throw InvalidInput("degeneracy_tol must be positive");
  if (!(weight_floor >= 0.0)) throw InvalidInput("weight_floor must be non-negative");

  std::vector<Level> sorted = raw.levels();
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });

  // Energies are averaged as offsets from the first member, so a singleton
  // cluster keeps its energy bit for bit.
  struct Cluster {
    double first_energy = 0.0;
    double weighted_offset = 0.0;
    double weight = 0.0;
    double last_energy = 0.0;
  };
  std::vector<Cluster> clusters;
  for (const auto& level : sorted) {
    if (clusters.empty() || level.energy - clusters.back().last_energy > degeneracy_tol)
      clusters.push_back({level.energy, 0.0, 0.0, 0.0});
    auto& c = clusters.back();
    c.weighted_offset += level.weight * (level.energy - c.first_energy);
    c.weight += level.weight;
    c.last_energy = level.energy;
  }

  std::vector<double> energies;
  std::vector<double> weights;
  for (const auto& c : clusters) {
    if (c.weight < weight_floor || c.weight <= 0.0) continue;
    energies.push_back(c.first_energy + c.weighted_offset / c.weight);
    weights.push_back(c.weight);
  }
  if (energies.empty()) throw InvalidInput("accessible Hilbert space is empty: all weights below floor");

  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (auto& w : weights) w /= total;
  return CanonicalSpectralModel(std::move(energies), std::move(weights));
}

CanonicalSpectralModel two_level_model(double J) {
  if (!(J > 0.0) || !std::isfinite(J)) throw InvalidInput("J must be finite and positive");
  return CanonicalSpectralModel({-J, J}, {0.5, 0.5});
}

}  // namespace monret
