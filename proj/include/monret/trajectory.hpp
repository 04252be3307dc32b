#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "monret/distribution.hpp"
#include "monret/rng.hpp"
#include "monret/spectral_model.hpp"

namespace monret {

inline constexpr std::int64_t kDefaultMaxMeasurements = 1'000'000;

// One realization of the monitored evolution: waiting times tau_k, first
// detection amplitudes phi_k, and survival probabilities S_k (no detection in
// the first k measurements).
struct Trajectory {
  std::vector<double> taus;
  std::vector<Complex> amplitudes;
  std::vector<double> survival;
  std::vector<double> detection_probs;

  std::size_t size() const noexcept { return taus.size(); }
};

// Amplitudes of the monitored evolution for a given sequence of waiting times.
// O(N) per step. Throws InvalidInput for a non-positive tau and
// NumericalHealthError if the two survival routes (1 - sum |phi|^2 and the
// norm of the projected state) disagree by more than 1e-8.
Trajectory amplitudes_for(const CanonicalSpectralModel& model, std::span<const double> taus);

struct FirstDetectionSample {
  std::int64_t k = 0;  // number of measurements up to and including detection
  double t = 0.0;      // detection time tau_1 + ... + tau_k
  bool censored = false;
};

// Samples the first detection event, measuring at most k_max times. A run that
// reaches k_max without detection is returned with censored = true and k = k_max.
FirstDetectionSample sample_first_detection(const CanonicalSpectralModel& model,
                                            const TimeDistribution& dist, RandomStream& rng,
                                            std::int64_t k_max = kDefaultMaxMeasurements);

// phi_M(omega) = sum_{k=1}^{M} exp(i omega k) phi_k on every grid point.
std::vector<Complex> truncated_ft(const Trajectory& tr, std::span<const double> omega_grid);

// Trajectory draw with `steps` waiting times sampled from `dist`.
Trajectory sample_trajectory(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                             RandomStream& rng, std::size_t steps);

// CSV with columns k, tau_k, t_k, re_phi, im_phi, prob, survival.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

// ---------------------------------------------------------------------------
// Monte Carlo estimators. Samples are split into fixed-size chunks; chunk c
// uses RandomStream(seed, c), and chunk results are reduced in chunk order, so
// output is identical for any thread count.

struct MonteCarloOptions {
  std::uint64_t seed = 0;
  std::int64_t samples = 100'000;
  std::int64_t k_max = kDefaultMaxMeasurements;
  int threads = 0;  // 0: hardware concurrency
  int max_order = 2;
};

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
};

struct FirstDetectionStats {
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  std::int64_t censored = 0;
  // moments_k[m-1] estimates E[k^m], uncensored samples only; same for t.
  std::vector<EstimateWithError> moments_k;
  std::vector<EstimateWithError> moments_t;
  // histogram[k-1] counts detections at measurement k (uncensored).
  std::vector<std::int64_t> histogram;

  double censored_fraction() const {
    return samples > 0 ? static_cast<double>(censored) / static_cast<double>(samples) : 0.0;
  }
};

FirstDetectionStats estimate_first_detection(const CanonicalSpectralModel& model,
                                             const TimeDistribution& dist,
                                             const MonteCarloOptions& opts);

// Realization averages of phi_k* phi_k' for k, k' <= K. Entry (k-1, k'-1) of
// `mean` holds the estimate; `std_error` the standard error of its real and
// imaginary parts combined in quadrature.
struct AmplitudeStats {
  std::uint64_t seed = 0;
  std::int64_t realizations = 0;
  Eigen::MatrixXcd mean;
  Eigen::MatrixXd std_error;
};

AmplitudeStats estimate_amplitude_correlations(const CanonicalSpectralModel& model,
                                               const TimeDistribution& dist, std::size_t K,
                                               std::int64_t realizations, std::uint64_t seed,
                                               int threads = 0);

// Resolves a thread request: explicit value, else MONRET_THREADS, else
// hardware concurrency.
int resolve_threads(int requested);

}  // namespace monret
