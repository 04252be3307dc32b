#include "monret/two_level.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "monret/errors.hpp"

namespace monret {
namespace {

constexpr double kDenominatorTol = 1e-10;

Complex checked_ratio(Complex num, Complex den, const char* what) {
  if (std::abs(den) < kDenominatorTol) {
    std::ostringstream os;
    os << what << ": denominator " << std::abs(den) << " vanishes (resonance)";
    throw ResonanceError(os.str());
  }
  return num / den;
}

}  // namespace

TwoLevelParams::TwoLevelParams(double J_, TimeDistribution dist_) : J(J_), dist(std::move(dist_)) {
  if (!std::isfinite(J) || J <= 0.0) throw InvalidInput("J must be finite and positive");
}

double TwoLevelParams::cos2_average() const {
  return 0.5 * (dist.char_fn(2.0 * J) + dist.char_fn(-2.0 * J)).real();
}

std::vector<Complex> phi_k_closed(const TwoLevelParams& p, std::span<const double> taus) {
  std::vector<Complex> phi;
  phi.reserve(taus.size());
  if (taus.empty()) return phi;
  phi.emplace_back(std::cos(p.J * taus[0]));
  const double first = -std::sin(p.J * taus[0]);
  double middle = 1.0;  // cos(J tau_2) ... cos(J tau_{k-1})
  for (std::size_t k = 1; k < taus.size(); ++k) {
    phi.emplace_back(first * middle * std::sin(p.J * taus[k]));
    middle *= std::cos(p.J * taus[k]);
  }
  return phi;
}

double survival_closed(const TwoLevelParams& p, std::span<const double> taus) {
  if (taus.empty()) return 1.0;
  const double s1 = std::sin(p.J * taus[0]);
  double s = s1 * s1;
  for (std::size_t k = 1; k < taus.size(); ++k) {
    const double c = std::cos(p.J * taus[k]);
    s *= c * c;
  }
  return s;
}

Complex closed_F(const TwoLevelParams& p, double omega) {
  const double c = p.cos2_average();
  const Complex e = std::polar(1.0, omega);
  return e * checked_ratio((2.0 * e - 1.0) * c - 1.0, e * (c + 1.0) - 2.0, "closed_F");
}

Complex closed_F_tau(const TwoLevelParams& p, double omega) {
  const Complex a = p.dist.char_fn(omega);
  const Complex b = 0.5 * (p.dist.char_fn(omega + 2.0 * p.J) + p.dist.char_fn(omega - 2.0 * p.J));
  return checked_ratio((2.0 * a - 1.0) * b - a, b + a - 2.0, "closed_F_tau");
}

double second_moment_closed(const TwoLevelParams& p) {
  const double c = p.cos2_average();
  if (1.0 - c < 1e-12) {
    std::ostringstream os;
    os << "second moment diverges: <cos 2 J tau> = " << c;
    throw ResonanceError(os.str());
  }
  return 2.0 * (3.0 - c) / (1.0 - c);
}

Complex determinant_closed(const TwoLevelParams& p, Complex z) {
  // <cos^2 J tau> = (1 + <cos 2 J tau>)/2
  return 1.0 - z * 0.5 * (1.0 + p.cos2_average());
}

std::vector<FluctuationRow> fluctuation_curves(std::span<const double> j_grid, double tau_or_rate) {
  if (!std::isfinite(tau_or_rate) || tau_or_rate <= 0.0)
    throw InvalidInput("tau_or_rate must be finite and positive");
  std::vector<FluctuationRow> rows;
  rows.reserve(j_grid.size());
  for (double J : j_grid) {
    FluctuationRow row{J, 0.0, 0.0};
    row.random = second_moment_closed(TwoLevelParams(J, Exponential{tau_or_rate}));
    // cos(2 J tau) is 1 exactly at J tau = n pi; the grid rarely hits that in
    // floating point, so a relative margin marks the divergence.
    const double c = std::cos(2.0 * J * tau_or_rate);
    row.stroboscopic = (1.0 - c < 1e-12) ? std::numeric_limits<double>::infinity()
                                         : 2.0 * (3.0 - c) / (1.0 - c);
    rows.push_back(row);
  }
  return rows;
}

void write_fluctuation_csv(std::ostream& os, std::span<const FluctuationRow> rows) {
  os << "J,second_moment_random,second_moment_stroboscopic\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.J << ',' << r.random << ',';
    if (std::isinf(r.stroboscopic))
      os << "inf";
    else
      os << r.stroboscopic;
    os << '\n';
  }
}

}  // namespace monret
