#pragma once

#include <complex>
#include <string>
#include <variant>

#include "monret/rng.hpp"

namespace monret {

// Waiting-time laws for the interval between successive measurements.
struct Fixed {
  double tau0;
};
struct Exponential {
  double rate;
};
struct Uniform {
  double a;
  double b;
};
struct Gamma {
  double shape;
  double rate;
};

class TimeDistribution {
 public:
  using Variant = std::variant<Fixed, Exponential, Uniform, Gamma>;

  // Each constructor validates its parameters and throws InvalidInput.
  TimeDistribution(Fixed d);
  TimeDistribution(Exponential d);
  TimeDistribution(Uniform d);
  TimeDistribution(Gamma d);

  const Variant& variant() const noexcept { return law_; }
  bool is_fixed() const noexcept { return std::holds_alternative<Fixed>(law_); }

  // Draws one waiting time tau > 0. Fixed returns tau0 exactly.
  double sample(RandomStream& rng) const;

  // <exp(i z tau)>, closed form per variant. Gamma uses the principal branch
  // of (1 - i z / rate)^(-shape).
  std::complex<double> char_fn(double z) const;

  double mean() const;

  // Short human-readable description, e.g. "exponential(rate=1)".
  std::string describe() const;

 private:
  Variant law_;
};

}  // namespace monret
