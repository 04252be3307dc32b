#include "monret/analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "monret/errors.hpp"

namespace monret {
namespace {

constexpr double kImagTol = 1e-10;
constexpr double kMomentFdStep = 1e-4;
constexpr double kMomentFdRelTol = 1e-4;
constexpr double kMeanTimeFdRelTol = 1e-5;
constexpr std::size_t kMinSeriesTerms = 20;

Complex trace_with_ghat(const SuperoperatorSet& s, const Eigen::VectorXcd& column) {
  return (s.weight_pairs().cast<Complex>().transpose() * column).value();
}

// log of sum_{k>K} k^m r^k, bounded by a geometric series with ratio
// r ((K+2)/(K+1))^m. +inf if that ratio is not below 1.
double log_tail_factor(int m, double r, std::size_t K) {
  if (r <= 0.0) return -std::numeric_limits<double>::infinity();
  const double k1 = static_cast<double>(K + 1);
  const double q = r * std::pow((k1 + 1.0) / k1, m);
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  return m * std::log(k1) + k1 * std::log(r) - std::log1p(-q);
}

// Running estimate of C in P_k <= C r^k, kept in log form.
class GeometricEnvelope {
 public:
  explicit GeometricEnvelope(double rho) : r_(rho + (1.0 - rho) / 8.0), log_r_(std::log(r_)) {}

  void observe(std::size_t k, double p) {
    const double a = std::abs(p);
    if (a > 0.0) log_c_ = std::max(log_c_, std::log(a) - static_cast<double>(k) * log_r_);
  }

  // Bound on sum_{k>K} k^m P_k.
  double tail(int m, std::size_t K) const {
    return std::exp(log_c_ + log_tail_factor(m, r_, K));
  }

  // Bound on sum_{k>K} k^m sqrt(P_k).
  double sqrt_tail(int m, std::size_t K) const {
    return std::exp(0.5 * log_c_ + log_tail_factor(m, std::sqrt(r_), K));
  }

  double rate() const noexcept { return r_; }

 private:
  double r_;
  double log_r_;
  double log_c_ = -std::numeric_limits<double>::infinity();
};

void require_subcritical(double rho, double resonance_tol) {
  if (rho >= 1.0 - resonance_tol) {
    std::ostringstream os;
    os.precision(17);
    os << "spectral radius of Gamma is " << rho
       << "; moments of the first detection number diverge at this resonance";
    throw ResonanceError(os.str(), 1.0 - rho);
  }
}

}  // namespace

std::string to_string(MomentMethod m) {
  switch (m) {
    case MomentMethod::exact:
      return "exact";
    case MomentMethod::monte_carlo:
      return "monte_carlo";
    case MomentMethod::closed_form_2ls:
      return "closed_form_2ls";
  }
  return "unknown";
}

Complex generating_F(const SuperoperatorSet& s, double omega) {
  if (omega == 0.0) s.require_off_resonance();
  const Complex z = std::polar(1.0, omega);
  const ShiftedSystem sys(s, z);
  return z * trace_with_ghat(s, sys.solve(s.dhat_diagonal()));
}

Complex generating_F(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                     double omega) {
  return generating_F(build(model, dist), omega);
}

Complex generating_F_tau(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                         double omega) {
  const SuperoperatorSet s = build(model, dist, omega);
  if (omega == 0.0) s.require_off_resonance();
  const ShiftedSystem sys(s, 1.0);
  return trace_with_ghat(s, sys.solve(s.dhat_diagonal()));
}

double mean_k(const SuperoperatorSet& s) {
  s.require_off_resonance();
  const ShiftedSystem sys(s, 1.0);
  const Eigen::VectorXcd once = sys.solve(s.dhat_diagonal());
  const Complex value = trace_with_ghat(s, sys.solve(once));
  if (std::abs(value.imag()) > kImagTol)
    throw NumericalHealthError("mean number of measurements has a non-zero imaginary part");
  return value.real();
}

double mean_k(const CanonicalSpectralModel& model, const TimeDistribution& dist) {
  return mean_k(build(model, dist));
}

Complex fd_derivative(const std::function<Complex(double)>& f, int m, double h) {
  const Complex minus_i(0.0, -1.0);
  if (m == 1) {
    auto d1 = [&](double step) { return (f(step) - f(-step)) / (2.0 * step); };
    return minus_i * (4.0 * d1(0.5 * h) - d1(h)) / 3.0;
  }
  if (m == 2) {
    const Complex f0 = f(0.0);
    auto d2 = [&](double step) { return (f(step) - 2.0 * f0 + f(-step)) / (step * step); };
    return -(4.0 * d2(0.5 * h) - d2(h)) / 3.0;
  }
  throw InvalidInput("finite-difference derivative supports orders 1 and 2 only");
}

double mean_t(const CanonicalSpectralModel& model, const TimeDistribution& dist) {
  const double value = dist.mean() * mean_k(model, dist);
  const Complex fd = fd_derivative(
      [&](double w) { return generating_F_tau(model, dist, w); }, 1, kMomentFdStep);
  if (std::abs(fd - value) > kMeanTimeFdRelTol * std::max(1.0, std::abs(value))) {
    std::ostringstream os;
    os.precision(17);
    os << "mean detection time " << value << " disagrees with -i F_tau'(0) = " << fd;
    throw NumericalHealthError(os.str());
  }
  return value;
}

MomentSeries moment_series(const SuperoperatorSet& s, int m, double rel_tol, double resonance_tol) {
  if (m < 1) throw InvalidInput("moment order must be at least 1");
  if (!(rel_tol > 0.0)) throw InvalidInput("rel_tol must be positive");
  s.require_off_resonance();
  MomentSeries out;
  out.spectral_radius = spectral_radius(s);
  require_subcritical(out.spectral_radius, resonance_tol);

  GeometricEnvelope env(out.spectral_radius);
  const Eigen::VectorXcd pp = s.weight_pairs().cast<Complex>();
  Eigen::VectorXcd v = s.dhat_diagonal();
  double sum = 0.0;
  for (std::size_t k = 1;; ++k) {
    const Complex pk = pp.dot(v);
    if (std::abs(pk.imag()) > kImagTol) throw NumericalHealthError("non-real return probability");
    sum += std::pow(static_cast<double>(k), m) * pk.real();
    env.observe(k, pk.real());
    if (k >= kMinSeriesTerms) {
      const double tail = env.tail(m, k);
      if (tail <= rel_tol * std::abs(sum)) {
        out.truncation_K = k;
        out.tail_bound = tail;
        break;
      }
    }
    if (k >= kMaxSeriesTerms)
      throw NumericalHealthError("moment series did not converge within the term cap");
    v = s.gamma() * v;
  }
  out.value = sum;

  if (m <= 2) {
    const Complex fd = fd_derivative([&](double w) { return generating_F(s, w); }, m, kMomentFdStep);
    out.finite_difference = fd.real();
    if (std::abs(fd - sum) > kMomentFdRelTol * std::max(1.0, std::abs(sum))) {
      std::ostringstream os;
      os.precision(17);
      os << "moment " << m << " from series (" << sum << ") disagrees with finite differences ("
         << fd << ")";
      throw NumericalHealthError(os.str());
    }
  }
  return out;
}

double moment(const CanonicalSpectralModel& model, const TimeDistribution& dist, int m,
              double rel_tol) {
  return moment_series(build(model, dist), m, rel_tol).value;
}

Complex averaged_norm(const Eigen::MatrixXcd& correlators, double omega) {
  // a^H C a with a_k = exp(i k omega)
  Eigen::VectorXcd a(std::max(correlators.rows(), correlators.cols()));
  for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = std::polar(1.0, static_cast<double>(k) * omega);
  return a.head(correlators.rows()).dot(correlators * a.head(correlators.cols()));
}

DoubleSumTruncation choose_double_sum_truncation(const SuperoperatorSet& s, double target,
                                                 int power) {
  if (!(target > 0.0)) throw InvalidInput("target must be positive");
  s.require_off_resonance();
  const double rho = spectral_radius(s);
  require_subcritical(rho, kDefaultResonanceTol);
  GeometricEnvelope env(rho);
  const Eigen::VectorXcd pp = s.weight_pairs().cast<Complex>();
  Eigen::VectorXcd v = s.dhat_diagonal();
  double a0 = 0.0, ap = 0.0;
  for (std::size_t k = 1; k <= kMaxSeriesTerms; ++k) {
    const double pk = std::max(0.0, pp.dot(v).real());
    env.observe(k, pk);
    a0 += std::sqrt(pk);
    ap += std::pow(static_cast<double>(k), power) * std::sqrt(pk);
    if (k >= kMinSeriesTerms) {
      const double t0 = env.sqrt_tail(0, k);
      const double tp = env.sqrt_tail(power, k);
      const double bound = (a0 + t0) * tp + t0 * (ap + tp);
      if (bound <= target) return {k, bound, 2.0 * a0 * t0 + 2.0 * t0 * t0};
    }
    v = s.gamma() * v;
  }
  throw NumericalHealthError("double-sum truncation did not converge within the term cap");
}

namespace {

void check_stroboscopic(const CanonicalSpectralModel& model, double tau0, double omega) {
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) throw InvalidInput("tau0 must be positive");
  const auto& e = model.energies();
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (std::size_t l = j + 1; l < e.size(); ++l) {
      if (std::abs(1.0 - std::polar(1.0, (e[l] - e[j]) * tau0)) < kDefaultResonanceTol) {
        std::ostringstream os;
        os << "levels " << j << " and " << l << " coincide modulo 2*pi/tau0";
        throw ResonanceError(os.str());
      }
    }
    if (std::abs(1.0 - std::polar(1.0, omega - e[j] * tau0)) < kDefaultResonanceTol) {
      std::ostringstream os;
      os.precision(17);
      os << "omega = " << omega << " is resonant with level " << j;
      throw ResonanceError(os.str());
    }
  }
}

}  // namespace

Complex stroboscopic_u(const CanonicalSpectralModel& model, double tau0, double omega) {
  check_stroboscopic(model, tau0, omega);
  Complex u = 0.0;
  for (std::size_t j = 0; j < model.dimension(); ++j) {
    const Complex zeta = std::polar(1.0, omega - model.energy(j) * tau0);
    u += model.weight(j) * zeta / (1.0 - zeta);
  }
  return u;
}

Complex stroboscopic_phi(const CanonicalSpectralModel& model, double tau0, double omega) {
  const Complex u = stroboscopic_u(model, tau0, omega);
  return 1.0 - 1.0 / (1.0 + u);
}

MomentReport exact_report(const CanonicalSpectralModel& model, const TimeDistribution& dist,
                          int m_max, double rel_tol) {
  if (m_max < 1) throw InvalidInput("m_max must be at least 1");
  const SuperoperatorSet s = build(model, dist);
  MomentReport r;
  r.method = MomentMethod::exact;
  r.mean_k = mean_k(s);
  for (int m = 1; m <= m_max; ++m) {
    const MomentSeries ms = moment_series(s, m, rel_tol);
    r.moments_k[m] = ms.value;
    r.truncation_K = std::max<std::int64_t>(r.truncation_K, static_cast<std::int64_t>(ms.truncation_K));
    r.tail_bound = std::max(r.tail_bound, ms.tail_bound);
  }
  r.mean_t = mean_t(model, dist);
  r.moments_t[1] = r.mean_t;
  if (m_max >= 2) {
    const Complex fd = fd_derivative(
        [&](double w) { return generating_F_tau(model, dist, w); }, 2, 1e-3);
    r.moments_t[2] = fd.real();
  }
  return r;
}

MomentReport monte_carlo_report(const FirstDetectionStats& stats) {
  MomentReport r;
  r.method = MomentMethod::monte_carlo;
  r.seed = stats.seed;
  r.samples = stats.samples;
  r.censored_fraction = stats.censored_fraction();
  for (std::size_t i = 0; i < stats.moments_k.size(); ++i) {
    const int m = static_cast<int>(i) + 1;
    r.moments_k[m] = stats.moments_k[i].mean;
    r.std_errors_k[m] = stats.moments_k[i].std_error;
    r.moments_t[m] = stats.moments_t[i].mean;
    r.std_errors_t[m] = stats.moments_t[i].std_error;
  }
  if (!stats.moments_k.empty()) {
    r.mean_k = stats.moments_k[0].mean;
    r.mean_t = stats.moments_t[0].mean;
  }
  return r;
}

}  // namespace monret
