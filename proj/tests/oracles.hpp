// Independent reference implementations used only by tests.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "monret/distribution.hpp"
#include "monret/spectral_model.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// A model embedded in a randomly rotated basis, so the simulator below never
// sees the eigenbasis.
struct DenseSystem {
  MatrixXcd H;
  VectorXcd psi;
};

inline MatrixXcd random_unitary(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(gen), g(gen));
  Eigen::HouseholderQR<MatrixXcd> qr(a);
  return qr.householderQ() * MatrixXcd::Identity(n, n);
}

inline DenseSystem embed(const monret::CanonicalSpectralModel& m, std::mt19937_64& gen) {
  const auto n = static_cast<Eigen::Index>(m.dimension());
  const MatrixXcd V = random_unitary(n, gen);
  VectorXcd diag(n), amp(n);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (Eigen::Index j = 0; j < n; ++j) {
    diag(j) = m.energy(static_cast<std::size_t>(j));
    amp(j) = std::polar(std::sqrt(m.weight(static_cast<std::size_t>(j))), phase(gen));
  }
  return {V * diag.asDiagonal() * V.adjoint(), V * amp};
}

// Monitored evolution with explicit matrix exponentials and the projector
// 1 - |psi><psi|: phi_k = <psi| U(tau_k) [(1 - P) U(tau_{k-1})] ... |psi>.
inline std::vector<Complex> simulate(const DenseSystem& s, const std::vector<double>& taus) {
  const auto n = s.H.rows();
  const MatrixXcd P = MatrixXcd::Identity(n, n) - s.psi * s.psi.adjoint();
  std::vector<Complex> phi;
  VectorXcd chi = s.psi;
  for (double tau : taus) {
    const MatrixXcd U = (Complex(0.0, -tau) * s.H).exp();
    const VectorXcd evolved = U * chi;
    phi.push_back(s.psi.dot(evolved));  // conjugates psi
    chi = P * evolved;
  }
  return phi;
}

inline double density(const monret::TimeDistribution& d, double t) {
  return std::visit(
      [t](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, monret::Exponential>)
          return law.rate * std::exp(-law.rate * t);
        else if constexpr (std::is_same_v<T, monret::Uniform>)
          return (t >= law.a && t <= law.b) ? 1.0 / (law.b - law.a) : 0.0;
        else if constexpr (std::is_same_v<T, monret::Gamma>)
          return std::exp(law.shape * std::log(law.rate) + (law.shape - 1.0) * std::log(t) - law.rate * t -
                          std::lgamma(law.shape));
        else
          return 0.0;
      },
      d.variant());
}

// Support used for quadrature: [lo, hi] carrying all but ~1e-16 of the mass.
inline std::pair<double, double> support(const monret::TimeDistribution& d) {
  return std::visit(
      [](const auto& law) -> std::pair<double, double> {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, monret::Exponential>)
          return {0.0, 40.0 / law.rate};
        else if constexpr (std::is_same_v<T, monret::Uniform>)
          return {law.a, law.b};
        else if constexpr (std::is_same_v<T, monret::Gamma>)
          return {0.0, (law.shape + 40.0 + 10.0 * std::sqrt(law.shape)) / law.rate};
        else
          return {law.tau0, law.tau0};
      },
      d.variant());
}

// Composite 20-point Gauss-Legendre on panels of width <= `width`; the
// integrands here oscillate at most a few times per unit length.
inline double panel_integrate(const std::function<double(double)>& fn, double lo, double hi, double width = 0.25) {
  const auto panels = static_cast<int>(std::ceil((hi - lo) / width));
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + (hi - lo) * i / panels, b = lo + (hi - lo) * (i + 1) / panels;
    total += boost::math::quadrature::gauss<double, 20>::integrate(fn, a, b);
  }
  return total;
}

// <f(tau)> by quadrature over the support (Fixed: f(tau0)).
inline Complex average(const monret::TimeDistribution& d, const std::function<Complex(double)>& f) {
  if (d.is_fixed()) return f(std::get<monret::Fixed>(d.variant()).tau0);
  const auto [lo, hi] = support(d);
  auto integrand = [&](double t) { return f(t) * density(d, t); };
  auto re = [&](double t) { return integrand(t).real(); };
  auto im = [&](double t) { return integrand(t).imag(); };
  const auto* g = std::get_if<monret::Gamma>(&d.variant());
  if (g && g->shape < 1.0) {
    // Integrable t^(k-1) singularity at the origin: tanh-sinh on [0, 1].
    boost::math::quadrature::tanh_sinh<double> ts;
    return {ts.integrate(re, 0.0, 1.0) + panel_integrate(re, 1.0, hi),
            ts.integrate(im, 0.0, 1.0) + panel_integrate(im, 1.0, hi)};
  }
  return {panel_integrate(re, lo, hi), panel_integrate(im, lo, hi)};
}

inline Complex char_fn(const monret::TimeDistribution& d, double z) {
  return average(d, [z](double t) { return std::polar(1.0, z * t); });
}

// <g(tau_1, ..., tau_k)> for a uniform law by tensor Gauss-Legendre.
template <int Points>
Complex uniform_average(double a, double b, int k, const std::function<Complex(const std::vector<double>&)>& g) {
  using Rule = boost::math::quadrature::gauss<double, Points>;
  // Full node set on [-1, 1] from the half-rule Boost stores.
  std::vector<double> x, w;
  const auto& ax = Rule::abscissa();
  const auto& aw = Rule::weights();
  for (std::size_t i = 0; i < ax.size(); ++i) {
    if (ax[i] == 0.0) {
      x.push_back(0.0);
      w.push_back(aw[i]);
    } else {
      x.push_back(ax[i]);
      w.push_back(aw[i]);
      x.push_back(-ax[i]);
      w.push_back(aw[i]);
    }
  }
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  std::vector<double> taus(static_cast<std::size_t>(k));
  Complex total = 0.0;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < k; ++i) {
      taus[static_cast<std::size_t>(i)] = mid + half * x[idx[static_cast<std::size_t>(i)]];
      weight *= 0.5 * w[idx[static_cast<std::size_t>(i)]];  // density 1/(b-a) times half
    }
    total += weight * g(taus);
    int i = 0;
    while (i < k && ++idx[static_cast<std::size_t>(i)] == x.size()) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == k) break;
  }
  return total;
}

// Random non-degenerate spectrum: energies in [-3, 3] with gaps >= 0.05,
// weights uniform(0.2, 1) normalized.
inline monret::CanonicalSpectralModel random_model(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> e(-3.0, 3.0), w(0.2, 1.0);
  std::vector<double> energies;
  while (energies.size() < n) {
    const double c = e(gen);
    bool ok = true;
    for (double x : energies) ok = ok && std::abs(x - c) > 0.05;
    if (ok) energies.push_back(c);
  }
  std::sort(energies.begin(), energies.end());
  std::vector<double> weights(n);
  double sum = 0.0;
  for (auto& x : weights) sum += (x = w(gen));
  for (auto& x : weights) x /= sum;
  return {energies, weights};
}

// One member of each family with moderate parameters.
inline std::vector<monret::TimeDistribution> families() {
  return {monret::TimeDistribution(monret::Fixed{0.7}), monret::TimeDistribution(monret::Exponential{1.0}),
          monret::TimeDistribution(monret::Uniform{0.5, 1.5}), monret::TimeDistribution(monret::Gamma{2.0, 2.0})};
}

}  // namespace oracle
