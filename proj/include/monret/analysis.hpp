#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "monret/distribution.hpp"
#include "monret/spectral_model.hpp"
#include "monret/superoperator.hpp"
#include "monret/trajectory.hpp"

namespace monret {

inline constexpr double kDefaultMomentRelTol = 1e-12;
inline constexpr std::size_t kMaxSeriesTerms = 1'000'000;

// F(omega) = sum_k exp(i k omega) <|phi_k|^2> = e^{i omega} Tr[(1 - e^{i omega} Gamma)^-1 G].
Complex generating_F(const SuperoperatorSet& s, double omega);
Complex generating_F(const CanonicalSpectralModel& model, const TimeDistribution& dist, double omega);

// F_tau(omega) = sum_k <exp(i omega t_k) |phi_k|^2> = Tr[(1 - Gamma_omega)^-1 G_omega].
Complex generating_F_tau(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                         double omega);

// Mean number of measurements Tr[(1 - Gamma)^-2 dhat E Pi], via two solves.
double mean_k(const SuperoperatorSet& s);
double mean_k(const CanonicalSpectralModel& model, const TimeDistribution& dist);

// mean(dist) * mean_k, cross-checked against -i F_tau'(0) by finite
// differences (relative 1e-5; NumericalHealthError otherwise).
double mean_t(const CanonicalSpectralModel& model, const TimeDistribution& dist);

// (-i d/domega)^m applied to f at 0 by Richardson-extrapolated central
// differences; m in {1, 2}.
Complex fd_derivative(const std::function<Complex(double)>& f, int m, double h);

// The truncated series sum_{k<=K} k^m <|phi_k|^2> with a geometric tail bound.
struct MomentSeries {
  double value = 0.0;
  std::size_t truncation_K = 0;
  double tail_bound = 0.0;
  double spectral_radius = 0.0;
  std::optional<double> finite_difference;  // m in {1, 2}
};

// Sums k^m <|phi_k|^2> until the bound on the remainder is below
// rel_tol * value. ResonanceError if the spectral radius of Gamma is within
// resonance_tol of 1; for m in {1,2} NumericalHealthError if the series and the
// finite-difference derivative of F disagree by more than 1e-4 relative.
MomentSeries moment_series(const SuperoperatorSet& s, int m, double rel_tol = kDefaultMomentRelTol,
                           double resonance_tol = kDefaultResonanceTol);
double moment(const CanonicalSpectralModel& model, const TimeDistribution& dist, int m,
              double rel_tol = kDefaultMomentRelTol);

// Truncated double sum sum_{k,k'<=K} exp(i(k'-k) omega) <phi_k^* phi_k'>,
// which tends to <|phi~(omega)|^2> = 1.
Complex averaged_norm(const Eigen::MatrixXcd& correlators, double omega);

// Chooses K so that the remainder of the double sum weighted by k'^power is
// bounded by `target`, using |<phi_k^* phi_k'>| <= sqrt(P_k P_k').
struct DoubleSumTruncation {
  std::size_t K = 0;
  double tail_bound = 0.0;    // weighted by k'^power
  double tail_bound_0 = 0.0;  // unweighted
};
DoubleSumTruncation choose_double_sum_truncation(const SuperoperatorSet& s, double target,
                                                 int power = 0);

// Stroboscopic (fixed tau0) closed forms. u~(omega) = sum_j p_j z_j/(1 - z_j),
// z_j = exp(i(omega - E_j tau0)); phi~ = 1 - 1/(1 + u~). ResonanceError when
// some z_j is 1 or two levels coincide modulo 2*pi/tau0.
Complex stroboscopic_u(const CanonicalSpectralModel& model, double tau0, double omega);
Complex stroboscopic_phi(const CanonicalSpectralModel& model, double tau0, double omega);

enum class MomentMethod { exact, monte_carlo, closed_form_2ls };
std::string to_string(MomentMethod m);

struct MomentReport {
  double mean_k = 0.0;
  double mean_t = 0.0;
  std::map<int, double> moments_k;
  std::map<int, double> moments_t;
  // Monte Carlo only: standard errors of the entries above.
  std::map<int, double> std_errors_k;
  std::map<int, double> std_errors_t;
  std::int64_t truncation_K = 0;
  double tail_bound = 0.0;
  MomentMethod method = MomentMethod::exact;
  double censored_fraction = 0.0;
  std::optional<std::uint64_t> seed;
  std::int64_t samples = 0;
};

// Exact report: k-moments 1..m_max from the series, t-moment 1 from the mean
// time relation and t-moment 2 from finite differences of F_tau.
MomentReport exact_report(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                          int m_max, double rel_tol = kDefaultMomentRelTol);

MomentReport monte_carlo_report(const FirstDetectionStats& stats);

}  // namespace monret
