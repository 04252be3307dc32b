#include "monret/winding.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "monret/analysis.hpp"
#include "monret/errors.hpp"
#include "monret/superoperator.hpp"

namespace monret {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxPhaseJump = 0.5 * std::numbers::pi;

void snap(WindingResult& r) {
  r.winding = static_cast<int>(std::lround(r.value));
  r.residual = std::abs(r.value - r.winding);
  if (r.residual > kSnapTol) {
    std::ostringstream os;
    os << to_string(r.method) << " winding " << r.value << " is not close to an integer";
    throw NumericalHealthError(os.str());
  }
}

}  // namespace

std::string to_string(WindingMethod m) {
  switch (m) {
    case WindingMethod::phase_unwrap:
      return "phase_unwrap";
    case WindingMethod::poly_roots:
      return "poly_roots";
    case WindingMethod::series_mean:
      return "series_mean";
    case WindingMethod::correlator_contour:
      return "correlator_contour";
  }
  return "unknown";
}

std::vector<double> uniform_omega_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
  return grid;
}

WindingResult winding_from_samples(std::span<const Complex> samples) {
  if (samples.size() < 3) throw InvalidInput("need at least three samples for a winding number");
  WindingResult r;
  r.method = WindingMethod::phase_unwrap;
  r.grid_points = samples.size();
  r.min_modulus = std::abs(samples[0]);
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Complex a = samples[i];
    const Complex b = samples[(i + 1) % samples.size()];
    r.min_modulus = std::min(r.min_modulus, std::abs(a));
    if (std::abs(a) < kWindingZeroTol) {
      std::ostringstream os;
      os << "curve passes through the origin at sample " << i;
      throw UndefinedWinding(os.str());
    }
    // arg(b / a) without forming the quotient
    const double jump = std::arg(b * std::conj(a));
    r.max_phase_jump = std::max(r.max_phase_jump, std::abs(jump));
    total += jump;
  }
  if (r.max_phase_jump > kMaxPhaseJump) {
    std::ostringstream os;
    os << "grid of " << samples.size() << " points is under-resolved (phase jump "
       << r.max_phase_jump << ")";
    throw UndefinedWinding(os.str());
  }
  r.value = total / kTwoPi;
  snap(r);
  return r;
}

WindingResult winding_of(const std::function<Complex(double)>& curve, std::size_t initial_points,
                         std::size_t max_points) {
  for (std::size_t n = std::max<std::size_t>(initial_points, 4); n <= max_points; n *= 2) {
    const auto grid = uniform_omega_grid(n);
    std::vector<Complex> samples(n);
    for (std::size_t i = 0; i < n; ++i) samples[i] = curve(grid[i]);
    // Only resolution failures are retried; a zero on the curve is final.
    double max_jump = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      max_jump = std::max(max_jump, std::abs(std::arg(samples[(i + 1) % n] * std::conj(samples[i]))));
    bool has_zero = false;
    for (const auto& v : samples) has_zero = has_zero || std::abs(v) < kWindingZeroTol;
    if (max_jump <= kMaxPhaseJump || has_zero) return winding_from_samples(samples);
  }
  throw UndefinedWinding("phase could not be resolved within the maximum grid size");
}

WindingResult trajectory_winding(const Trajectory& tr, std::size_t initial_points) {
  return winding_of(
      [&](double omega) {
        const double grid[1] = {omega};
        return truncated_ft(tr, grid).front();
      },
      initial_points);
}

WindingResult winding_poly(std::span<const Complex> coeffs) {
  if (coeffs.empty()) throw InvalidInput("no coefficients");
  const Complex lead = coeffs.back();
  if (std::abs(lead) <= kWindingZeroTol) throw InvalidInput("leading coefficient vanishes");

  WindingResult r;
  r.method = WindingMethod::poly_roots;
  const auto degree = static_cast<Eigen::Index>(coeffs.size()) - 1;
  int inside = 0;
  if (degree > 0) {
    // Companion matrix of the monic polynomial sum_{k<degree} (c_{k+1}/lead) z^k + z^degree.
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalHealthError("companion eigensolver failed");
    for (Eigen::Index i = 0; i < degree; ++i) {
      const double modulus = std::abs(solver.eigenvalues()(i));
      r.root_moduli.push_back(modulus);
      if (std::abs(modulus - 1.0) < kRootMargin) {
        std::ostringstream os;
        os << "root of modulus " << modulus << " lies on the unit circle";
        throw UndefinedWinding(os.str());
      }
      if (modulus < 1.0) ++inside;
    }
  }
  r.value = 1.0 + inside;
  snap(r);
  return r;
}

WindingResult averaged_winding(const CanonicalSpectralModel& model, const TimeDistribution& dist) {
  WindingResult r;
  r.method = WindingMethod::series_mean;
  r.value = mean_k(model, dist);
  snap(r);
  return r;
}

WindingResult correlator_winding(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                                 std::size_t omega_points, std::size_t K_trunc, double fd_step) {
  if (omega_points < 4) throw InvalidInput("omega_points must be at least 4");
  if (!(fd_step > 0.0)) throw InvalidInput("fd_step must be positive");
  const SuperoperatorSet s = build(model, dist);
  s.require_off_resonance();
  const DoubleSumTruncation trunc = choose_double_sum_truncation(s, 1e-6, 1);
  if (K_trunc != 0 && K_trunc < trunc.K) {
    std::ostringstream os;
    os << "K_trunc = " << K_trunc << " leaves a truncation bound above 1e-6 (need K >= "
       << trunc.K << ")";
    throw InvalidInput(os.str());
  }
  const std::size_t K = std::max(K_trunc, trunc.K);
  const Eigen::MatrixXcd corr = correlator_matrix(s, K);
  const auto Ki = static_cast<Eigen::Index>(K);

  WindingResult r;
  r.method = WindingMethod::correlator_contour;
  r.truncation_K = K;
  r.grid_points = omega_points;
  Complex integral = 0.0;
  for (double omega : uniform_omega_grid(omega_points)) {
    Eigen::RowVectorXcd bra(Ki);
    for (Eigen::Index k = 0; k < Ki; ++k) bra(k) = std::polar(1.0, -omega * static_cast<double>(k + 1));
    const Eigen::RowVectorXcd bra_corr = bra * corr;
    // <phi~^*(omega) phi~(omega + shift)>
    auto pair_sum = [&](double shift) {
      Complex acc = 0.0;
      for (Eigen::Index kp = 0; kp < Ki; ++kp)
        acc += bra_corr(kp) * std::polar(1.0, (omega + shift) * static_cast<double>(kp + 1));
      return acc;
    };
    const Complex norm = pair_sum(0.0);
    r.max_norm_deviation = std::max(r.max_norm_deviation, std::abs(norm - 1.0));
    auto d1 = [&](double h) { return (pair_sum(h) - pair_sum(-h)) / (2.0 * h); };
    const Complex derivative = (4.0 * d1(0.5 * fd_step) - d1(fd_step)) / 3.0;
    integral += Complex(0.0, -1.0) * derivative / norm;
  }
  if (r.max_norm_deviation > 10.0 * trunc.tail_bound_0 + 1e-12) {
    std::ostringstream os;
    os << "averaged norm deviates from 1 by " << r.max_norm_deviation << " (bound "
       << trunc.tail_bound_0 << ")";
    throw NumericalHealthError(os.str());
  }
  integral /= static_cast<double>(omega_points);
  r.value = integral.real();
  r.imag_part = integral.imag();
  snap(r);
  return r;
}

}  // namespace monret
