#include "monret/distribution.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "monret/errors.hpp"

namespace monret {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// sin(x)/x, accurate near 0.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace

TimeDistribution::TimeDistribution(Fixed d) : law_(d) {
  if (!positive_finite(d.tau0)) throw InvalidInput("fixed time step must be positive");
}

TimeDistribution::TimeDistribution(Exponential d) : law_(d) {
  if (!positive_finite(d.rate)) throw InvalidInput("exponential rate must be positive");
}

TimeDistribution::TimeDistribution(Uniform d) : law_(d) {
  if (!std::isfinite(d.a) || !std::isfinite(d.b) || d.a < 0.0 || !(d.b > d.a))
    throw InvalidInput("uniform bounds must satisfy 0 <= a < b");
}

TimeDistribution::TimeDistribution(Gamma d) : law_(d) {
  if (!positive_finite(d.shape) || !positive_finite(d.rate))
    throw InvalidInput("gamma shape and rate must be positive");
}

double TimeDistribution::sample(RandomStream& rng) const {
  auto& eng = rng.engine();
  return std::visit(
      overloaded{
          [](const Fixed& d) { return d.tau0; },
          [&](const Exponential& d) {
            double t;
            do t = std::exponential_distribution<double>(d.rate)(eng);
            while (!(t > 0.0));
            return t;
          },
          [&](const Uniform& d) {
            double t;
            do t = std::uniform_real_distribution<double>(d.a, d.b)(eng);
            while (!(t > 0.0));
            return t;
          },
          [&](const Gamma& d) {
            double t;
            do t = std::gamma_distribution<double>(d.shape, 1.0 / d.rate)(eng);
            while (!(t > 0.0));
            return t;
          },
      },
      law_);
}

std::complex<double> TimeDistribution::char_fn(double z) const {
  using C = std::complex<double>;
  return std::visit(
      overloaded{
          [z](const Fixed& d) { return std::polar(1.0, z * d.tau0); },
          [z](const Exponential& d) { return 1.0 / C(1.0, -z / d.rate); },
          [z](const Uniform& d) {
            const double half = 0.5 * (d.b - d.a);
            return std::polar(sinc(z * half), z * (d.a + d.b) * 0.5);
          },
          [z](const Gamma& d) {
            if (z == 0.0) return C(1.0, 0.0);
            return std::exp(-d.shape * std::log(C(1.0, -z / d.rate)));
          },
      },
      law_);
}

double TimeDistribution::mean() const {
  return std::visit(overloaded{
                        [](const Fixed& d) { return d.tau0; },
                        [](const Exponential& d) { return 1.0 / d.rate; },
                        [](const Uniform& d) { return 0.5 * (d.a + d.b); },
                        [](const Gamma& d) { return d.shape / d.rate; },
                    },
                    law_);
}

std::string TimeDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Fixed& d) { os << "fixed(tau=" << d.tau0 << ")"; },
                 [&](const Exponential& d) { os << "exponential(rate=" << d.rate << ")"; },
                 [&](const Uniform& d) { os << "uniform(a=" << d.a << ", b=" << d.b << ")"; },
                 [&](const Gamma& d) { os << "gamma(shape=" << d.shape << ", rate=" << d.rate << ")"; },
             },
             law_);
  return os.str();
}

}  // namespace monret
