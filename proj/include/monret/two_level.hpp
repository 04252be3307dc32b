#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "monret/distribution.hpp"
#include "monret/spectral_model.hpp"

namespace monret {

// Symmetric two-level system: levels -J and +J, equal weights.
struct TwoLevelParams {
  double J;
  TimeDistribution dist;

  TwoLevelParams(double J, TimeDistribution dist);  // InvalidInput unless J > 0 and finite
  CanonicalSpectralModel model() const { return two_level_model(J); }
  // <cos 2 J tau> and <exp(2 i J tau)>.
  double cos2_average() const;
  Complex y() const { return dist.char_fn(2.0 * J); }
};

// Closed-form first detection amplitudes for the given waiting times.
std::vector<Complex> phi_k_closed(const TwoLevelParams& p, std::span<const double> taus);

// Survival after n = taus.size() measurements: sin^2(J tau_1) prod_{k>=2} cos^2(J tau_k).
double survival_closed(const TwoLevelParams& p, std::span<const double> taus);

// Closed-form generating functions. ResonanceError when the denominator is
// below 1e-10 in modulus.
Complex closed_F(const TwoLevelParams& p, double omega);
Complex closed_F_tau(const TwoLevelParams& p, double omega);

// sum_k k^2 <|phi_k|^2> = 2 (3 - C)/(1 - C), C = <cos 2 J tau>.
// ResonanceError when 1 - C < 1e-12.
double second_moment_closed(const TwoLevelParams& p);

// det(1 - z Gamma) = 1 - z <cos^2 J tau>.
Complex determinant_closed(const TwoLevelParams& p, Complex z);

struct FluctuationRow {
  double J;
  double random;         // exponential waiting times with the given rate
  double stroboscopic;   // fixed tau; +inf at resonance
};

// Second moment of the measurement count versus J. The random curve uses
// Exponential(rate = tau_or_rate), the stroboscopic one Fixed(tau =
// tau_or_rate) and reports +inf where J tau is a multiple of pi.
std::vector<FluctuationRow> fluctuation_curves(std::span<const double> j_grid, double tau_or_rate);

// CSV with header J,second_moment_random,second_moment_stroboscopic; "inf"
// marks stroboscopic divergences.
void write_fluctuation_csv(std::ostream& os, std::span<const FluctuationRow> rows);

}  // namespace monret
