#include "monret/trajectory.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "monret/errors.hpp"

namespace monret {
namespace {

constexpr double kSurvivalMismatchTol = 1e-8;

// State of the monitored evolution in the energy basis, phases q_j = sqrt(p_j).
class MonitoredState {
 public:
  explicit MonitoredState(const CanonicalSpectralModel& model)
      : energies_(model.energies()), q_(model.dimension()), a_(model.dimension()) {
    for (std::size_t j = 0; j < q_.size(); ++j) {
      q_[j] = std::sqrt(model.weight(j));
      a_[j] = q_[j];
    }
  }

  // Evolves for tau, returns the overlap with the initial state, and projects
  // it out. Returns phi for the current (unnormalized) state.
  Complex step(double tau) {
    Complex phi = 0.0;
    for (std::size_t j = 0; j < a_.size(); ++j) {
      a_[j] *= std::polar(1.0, -energies_[j] * tau);
      phi += q_[j] * a_[j];
    }
    for (std::size_t j = 0; j < a_.size(); ++j) a_[j] -= phi * q_[j];
    return phi;
  }

  double norm2() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return s;
  }

  void normalize() {
    const double n = std::sqrt(norm2());
    if (n > 0.0)
      for (auto& v : a_) v /= n;
  }

 private:
  const std::vector<double>& energies_;
  std::vector<double> q_;
  std::vector<Complex> a_;
};

}  // namespace

Trajectory amplitudes_for(const CanonicalSpectralModel& model, std::span<const double> taus) {
  for (double tau : taus)
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInput("waiting times must be positive");

  Trajectory tr;
  tr.taus.assign(taus.begin(), taus.end());
  tr.amplitudes.reserve(taus.size());
  tr.survival.reserve(taus.size());
  tr.detection_probs.reserve(taus.size());

  MonitoredState state(model);
  double detected = 0.0;
  for (double tau : taus) {
    const Complex phi = state.step(tau);
    const double prob = std::norm(phi);
    detected += prob;
    const double s_projected = state.norm2();
    const double s_partial = 1.0 - detected;
    if (std::abs(s_projected - s_partial) > kSurvivalMismatchTol) {
      std::ostringstream os;
      os << "survival mismatch at step " << tr.amplitudes.size() + 1 << ": " << s_projected
         << " vs " << s_partial;
      throw NumericalHealthError(os.str());
    }
    tr.amplitudes.push_back(phi);
    tr.detection_probs.push_back(prob);
    tr.survival.push_back(std::max(0.0, s_partial));
  }
  return tr;
}

FirstDetectionSample sample_first_detection(const CanonicalSpectralModel& model,
                                            const TimeDistribution& dist, RandomStream& rng,
                                            std::int64_t k_max) {
  if (k_max < 1) throw InvalidInput("k_max must be at least 1");
  // The state is renormalized after each null outcome, so |phi|^2 is the
  // detection probability conditional on no earlier detection.
  MonitoredState state(model);
  double t = 0.0;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const double tau = dist.sample(rng);
    t += tau;
    const double conditional = std::norm(state.step(tau));
    if (rng.uniform() < conditional) return {k, t, false};
    state.normalize();
    if (state.norm2() == 0.0) return {k, t, false};
  }
  return {k_max, t, true};
}

std::vector<Complex> truncated_ft(const Trajectory& tr, std::span<const double> omega_grid) {
  if (tr.amplitudes.empty()) throw InvalidInput("trajectory is empty");
  std::vector<Complex> out;
  out.reserve(omega_grid.size());
  for (double omega : omega_grid) {
    // Horner in z = exp(i omega): z (phi_1 + z (phi_2 + ...)).
    const Complex z = std::polar(1.0, omega);
    Complex acc = 0.0;
    for (auto it = tr.amplitudes.rbegin(); it != tr.amplitudes.rend(); ++it) acc = acc * z + *it;
    out.push_back(acc * z);
  }
  return out;
}

Trajectory sample_trajectory(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                             RandomStream& rng, std::size_t steps) {
  std::vector<double> taus(steps);
  for (auto& tau : taus) tau = dist.sample(rng);
  return amplitudes_for(model, taus);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const auto old_precision = os.precision(17);
  os << "k,tau_k,t_k,re_phi,im_phi,prob,survival\n";
  double t = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    t += tr.taus[i];
    os << i + 1 << ',' << tr.taus[i] << ',' << t << ',' << tr.amplitudes[i].real() << ','
       << tr.amplitudes[i].imag() << ',' << tr.detection_probs[i] << ',' << tr.survival[i] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace monret
