#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "monret/distribution.hpp"
#include "monret/spectral_model.hpp"
#include "monret/trajectory.hpp"

namespace monret {

inline constexpr double kWindingZeroTol = 1e-9;
inline constexpr double kRootMargin = 1e-6;
inline constexpr double kSnapTol = 0.05;
inline constexpr std::size_t kDefaultWindingGrid = 1024;

enum class WindingMethod { phase_unwrap, poly_roots, series_mean, correlator_contour };
std::string to_string(WindingMethod m);

struct WindingResult {
  int winding = 0;     // snapped integer
  double value = 0.0;  // before snapping
  WindingMethod method = WindingMethod::phase_unwrap;
  double residual = 0.0;  // |value - winding|

  // phase_unwrap
  double min_modulus = 0.0;
  double max_phase_jump = 0.0;
  std::size_t grid_points = 0;
  // poly_roots
  std::vector<double> root_moduli;
  // correlator_contour
  double imag_part = 0.0;
  double max_norm_deviation = 0.0;
  std::size_t truncation_K = 0;
};

// omega_i = 2 pi i / n, i = 0..n-1.
std::vector<double> uniform_omega_grid(std::size_t n);

// Winding of a closed curve sampled on a uniform grid over [0, 2 pi); the
// segment from the last sample back to the first is included. Throws
// UndefinedWinding if a sample has modulus below kWindingZeroTol or adjacent
// samples differ in phase by more than pi/2.
WindingResult winding_from_samples(std::span<const Complex> samples);

// Same, for a callable, doubling the grid from `initial_points` until every
// adjacent phase jump is below pi/2.
WindingResult winding_of(const std::function<Complex(double)>& curve,
                         std::size_t initial_points = kDefaultWindingGrid,
                         std::size_t max_points = std::size_t{1} << 22);

// Winding of phi_M(omega) for a realization.
WindingResult trajectory_winding(const Trajectory& tr, std::size_t initial_points = kDefaultWindingGrid);

// Winding of sum_{k=1}^{M} c_k z^k around the unit circle, counted as one (the
// factor z) plus the number of roots of c_1 + c_2 z + ... + c_M z^{M-1}
// strictly inside the unit disk. InvalidInput if |c_M| <= kWindingZeroTol;
// UndefinedWinding if a root lies within kRootMargin of the circle.
WindingResult winding_poly(std::span<const Complex> coeffs);

// Averaged winding sum_k k <|phi_k|^2>, computed through mean_k.
WindingResult averaged_winding(const CanonicalSpectralModel& model, const TimeDistribution& dist);

// Winding of the averaged correlator <phi~^*(omega) phi~(omega + omega')>:
// (1/2pi) int d omega [-i d/domega' log <...>]_{omega'=0}, from truncated
// correlator double sums, Richardson-extrapolated central differences in
// omega' (step fd_step) and the periodic trapezoid rule over omega_points.
// K_trunc = 0 picks K automatically so the truncation bound is below 1e-6.
WindingResult correlator_winding(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                                 std::size_t omega_points = 128, std::size_t K_trunc = 0,
                                 double fd_step = 1e-3);

}  // namespace monret
