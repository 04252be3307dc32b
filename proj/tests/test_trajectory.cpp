#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "monret/analysis.hpp"
#include "monret/errors.hpp"
#include "monret/trajectory.hpp"
#include "monret/winding.hpp"
#include "oracles.hpp"

using namespace monret;

TEST_CASE("amplitudes match the state-vector simulator") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> tau(0.05, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = oracle::random_model(1 + rep % 6, gen);
    const auto dense = oracle::embed(m, gen);
    std::vector<double> taus(12);
    for (auto& t : taus) t = tau(gen);
    const auto expected = oracle::simulate(dense, taus);
    const auto tr = amplitudes_for(m, taus);
    for (std::size_t k = 0; k < taus.size(); ++k) CHECK(std::abs(tr.amplitudes[k] - expected[k]) < 1e-12);
  }
}

TEST_CASE("survival is the unexplained probability") {
  std::mt19937_64 gen(8);
  const auto m = oracle::random_model(5, gen);
  std::vector<double> taus = {0.3, 1.2, 0.8, 2.2, 0.1, 0.9, 1.7};
  const auto tr = amplitudes_for(m, taus);
  double acc = 0.0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    acc += std::norm(tr.amplitudes[k]);
    CHECK(tr.detection_probs[k] == doctest::Approx(std::norm(tr.amplitudes[k])));
    CHECK(std::abs(tr.survival[k] - (1.0 - acc)) < 1e-12);
    CHECK(tr.survival[k] >= -1e-15);
    if (k > 0) CHECK(tr.survival[k] <= tr.survival[k - 1] + 1e-15);
  }
}

TEST_CASE("one level: detected at the first measurement") {
  const CanonicalSpectralModel m({0.4}, {1.0});
  const std::vector<double> taus = {1.3, 0.2};
  const auto tr = amplitudes_for(m, taus);
  CHECK(std::abs(tr.amplitudes[0] - std::polar(1.0, -0.4 * 1.3)) < 1e-15);
  CHECK(std::abs(tr.amplitudes[1]) < 1e-15);
}

TEST_CASE("non-positive waiting times are rejected") {
  const auto m = two_level_model(1.0);
  const std::vector<double> bad = {0.5, 0.0};
  CHECK_THROWS_AS(amplitudes_for(m, bad), InvalidInput);
}

TEST_CASE("truncated transform") {
  const auto m = two_level_model(1.0);
  const std::vector<double> taus = {0.7, 1.1, 0.4};
  const auto tr = amplitudes_for(m, taus);
  const std::vector<double> grid = {0.0, 0.5, 2.0};
  const auto ft = truncated_ft(tr, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Complex direct = 0.0;
    for (std::size_t k = 0; k < taus.size(); ++k) direct += std::polar(1.0, grid[i] * (k + 1.0)) * tr.amplitudes[k];
    CHECK(std::abs(ft[i] - direct) < 1e-14);
  }
}

TEST_CASE("trajectory CSV layout") {
  const auto m = two_level_model(1.0);
  const std::vector<double> taus = {0.5, 0.5};
  std::ostringstream os;
  write_trajectory_csv(os, amplitudes_for(m, taus));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,tau_k,t_k,re_phi,im_phi,prob,survival");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("first detection sampling: one level, censoring") {
  RandomStream rng(1);
  const CanonicalSpectralModel one({0.0}, {1.0});
  const auto s = sample_first_detection(one, TimeDistribution(Exponential{1.0}), rng);
  CHECK(s.k == 1);
  CHECK_FALSE(s.censored);

  // Stroboscopic 2LS at J tau = pi/2: phi_1 = 0 and |phi_2| = 1.
  const auto tl = two_level_model(1.0);
  RandomStream r2(4);
  const auto s2 = sample_first_detection(tl, TimeDistribution(Fixed{std::numbers::pi / 2}), r2);
  CHECK(s2.k == 2);
  CHECK(s2.t == doctest::Approx(std::numbers::pi));

  // Same protocol stopped after one measurement: never detected.
  RandomStream r3(5);
  const auto s3 = sample_first_detection(tl, TimeDistribution(Fixed{std::numbers::pi / 2}), r3, 1);
  CHECK(s3.censored);
  CHECK(s3.k == 1);
}

TEST_CASE("Monte Carlo is thread-count independent") {
  std::mt19937_64 gen(9);
  const auto m = oracle::random_model(3, gen);
  MonteCarloOptions o;
  o.seed = 77;
  o.samples = 20000;
  o.threads = 1;
  const auto a = estimate_first_detection(m, TimeDistribution(Exponential{1.0}), o);
  o.threads = 3;
  const auto b = estimate_first_detection(m, TimeDistribution(Exponential{1.0}), o);
  CHECK(a.histogram == b.histogram);
  CHECK(a.moments_k[0].mean == b.moments_k[0].mean);
  CHECK(a.moments_t[1].mean == b.moments_t[1].mean);
  o.seed = 78;
  const auto c = estimate_first_detection(m, TimeDistribution(Exponential{1.0}), o);
  CHECK(a.histogram != c.histogram);
}

TEST_CASE("Monte Carlo mean number of measurements equals N") {
  std::mt19937_64 gen(10);
  for (std::size_t n : {1u, 2u, 4u}) {
    const auto m = oracle::random_model(n, gen);
    for (const auto& d : oracle::families()) {
      MonteCarloOptions o;
      o.seed = 100 + n;
      o.samples = 40000;
      const auto s = estimate_first_detection(m, d, o);
      CHECK(s.censored == 0);
      CHECK(std::abs(s.moments_k[0].mean - double(n)) < 4.0 * s.moments_k[0].std_error + 1e-12);
      CHECK(std::abs(s.moments_t[0].mean - d.mean() * double(n)) < 4.0 * s.moments_t[0].std_error + 1e-12);
    }
  }
}

TEST_CASE("thread resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("amplitude correlations by realization averaging") {
  const auto tl = two_level_model(1.0);
  const auto st = estimate_amplitude_correlations(tl, TimeDistribution(Uniform{0.5, 1.5}), 3, 20000, 5);
  CHECK(st.mean.rows() == 3);
  // <|phi_1|^2> = <cos^2 tau> for the 2LS with J = 1.
  const double expected = 0.5 + 0.5 * (std::sin(3.0) - std::sin(1.0)) / 2.0;
  CHECK(std::abs(st.mean(0, 0).real() - expected) < 4.0 * st.std_error(0, 0));
}

TEST_CASE("normalization over long sampled trajectories") {
  std::mt19937_64 gen(14);
  for (const auto& d : oracle::families()) {
    const auto m = oracle::random_model(5, gen);
    RandomStream rng(3);
    const auto tr = sample_trajectory(m, d, rng, 200);
    double acc = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      acc += std::norm(tr.amplitudes[k]);
      CHECK(std::abs(acc + tr.survival[k] - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("transform of worked amplitude sequences") {
  const CanonicalSpectralModel one({0.0}, {1.0});
  const std::vector<double> taus = {0.5};
  const auto single = amplitudes_for(one, taus);
  const auto grid = uniform_omega_grid(16);
  for (const auto& v : truncated_ft(single, grid)) CHECK(std::abs(std::abs(v) - 1.0) < 1e-15);

  const auto tl = two_level_model(1.0);
  const std::vector<double> strobe(2, std::numbers::pi / 2);
  const auto tr = amplitudes_for(tl, strobe);
  const auto ft = truncated_ft(tr, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(ft[i] + std::polar(1.0, 2.0 * grid[i])) < 1e-14);

  Trajectory empty;
  CHECK_THROWS_AS(truncated_ft(empty, grid), InvalidInput);
}
