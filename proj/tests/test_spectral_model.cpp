#include <doctest.h>

#include <random>

#include "monret/errors.hpp"
#include "monret/spectral_model.hpp"
#include "oracles.hpp"

using namespace monret;

TEST_CASE("raw model validation") {
  CHECK_THROWS_AS(RawSpectralModel({{0.0, 0.5}, {1.0, 0.4}}), InvalidInput);
  CHECK_THROWS_AS(RawSpectralModel({{0.0, -0.1}, {1.0, 1.1}}), InvalidInput);
  CHECK_THROWS_AS(RawSpectralModel({{std::nan(""), 1.0}}), InvalidInput);
  CHECK_NOTHROW(RawSpectralModel({{0.0, 0.25}, {0.0, 0.75}}));
}

TEST_CASE("canonical model invariants") {
  CHECK_THROWS_AS(CanonicalSpectralModel({1.0, 0.0}, {0.5, 0.5}), InvalidInput);
  CHECK_THROWS_AS(CanonicalSpectralModel({0.0, 0.0}, {0.5, 0.5}), InvalidInput);
  CHECK_THROWS_AS(CanonicalSpectralModel({0.0, 1.0}, {1.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(CanonicalSpectralModel({}, {}), InvalidInput);
  const CanonicalSpectralModel m({-1.0, 2.0}, {0.3, 0.7});
  CHECK(m.dimension() == 2);
}

TEST_CASE("canonicalize merges degenerate levels and drops empty ones") {
  // Degenerate pair carrying 0.2 + 0.3, a zero-weight level, and a level
  // below the weight floor.
  const RawSpectralModel raw({{1.0, 0.2}, {-2.0, 0.5 - 1e-14}, {1.0 + 1e-11, 0.3}, {5.0, 0.0}, {7.0, 1e-14}});
  const auto m = canonicalize(raw);
  REQUIRE(m.dimension() == 2);
  CHECK(m.energy(0) == doctest::Approx(-2.0));
  CHECK(m.energy(1) == doctest::Approx(1.0 + 0.6e-11).epsilon(1e-14));
  CHECK(m.weight(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.weight(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.weight(0) + m.weight(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("canonicalize is idempotent on canonical models") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = oracle::random_model(1 + rep % 7, gen);
    const auto again = canonicalize(m.to_raw());
    CHECK(again.energies() == m.energies());
    for (std::size_t j = 0; j < m.dimension(); ++j) CHECK(again.weight(j) == doctest::Approx(m.weight(j)).epsilon(1e-15));
  }
}

TEST_CASE("everything below the floor is an error") {
  CHECK_THROWS_AS(canonicalize(RawSpectralModel({{0.0, 1.0}}), 1e-9, 2.0), InvalidInput);
}

TEST_CASE("spectral decomposition of a rotated Hamiltonian") {
  std::mt19937_64 gen(11);
  for (std::size_t n : {1u, 2u, 4u, 7u}) {
    const auto m = oracle::random_model(n, gen);
    const auto dense = oracle::embed(m, gen);
    const auto recovered = canonicalize(spectral_decompose({dense.H, dense.psi}));
    REQUIRE(recovered.dimension() == n);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(recovered.energy(j) == doctest::Approx(m.energy(j)).epsilon(1e-10));
      CHECK(recovered.weight(j) == doctest::Approx(m.weight(j)).epsilon(1e-10));
    }
  }
}

TEST_CASE("degenerate Hamiltonian: accessible dimension counts merged levels") {
  // H = diag(1, 1, 3) with psi spread over all three: N = 2.
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(3, 3);
  H(0, 0) = 1.0;
  H(1, 1) = 1.0;
  H(2, 2) = 3.0;
  Eigen::VectorXcd psi(3);
  psi << 0.6, 0.0, 0.8;
  psi(1) = Complex(0.0, 0.0);
  const auto m = canonicalize(spectral_decompose({H, psi}));
  CHECK(m.dimension() == 2);
  CHECK(m.weight(0) == doctest::Approx(0.36));

  // An eigenvector orthogonal to psi is not accessible.
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(3);
  e1(0) = 1.0;
  CHECK(canonicalize(spectral_decompose({H, e1})).dimension() == 1);
}

TEST_CASE("Hamiltonian input checks") {
  Eigen::MatrixXcd H(2, 2);
  H << 0.0, 1.0, 0.5, 0.0;
  Eigen::VectorXcd psi(2);
  psi << 1.0, 0.0;
  CHECK_THROWS_AS(spectral_decompose({H, psi}), InvalidInput);
  H(1, 0) = 1.0;
  psi(0) = 2.0;
  CHECK_THROWS_AS(spectral_decompose({H, psi}), InvalidInput);
  Eigen::VectorXcd wrong(3);
  wrong << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(spectral_decompose({H, wrong}), InvalidInput);
}

TEST_CASE("two level model") {
  const auto m = two_level_model(0.8);
  CHECK(m.energies() == std::vector<double>{-0.8, 0.8});
  CHECK(m.weights() == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(two_level_model(0.0), InvalidInput);
}

TEST_CASE("worked decompositions") {
  Eigen::MatrixXcd H(2, 2);
  H << 0.0, 1.0, 1.0, 0.0;
  Eigen::VectorXcd psi(2);
  psi << 1.0, 0.0;
  const auto m = canonicalize(spectral_decompose({H, psi}));
  CHECK(m.energy(0) == doctest::Approx(-1.0));
  CHECK(m.energy(1) == doctest::Approx(1.0));
  CHECK(m.weight(0) == doctest::Approx(0.5));

  H << 0.0, 0.0, 0.0, 5.0;
  const auto raw = spectral_decompose({H, psi});
  REQUIRE(raw.size() == 2);
  CHECK(raw.levels()[0].weight == doctest::Approx(1.0));
  CHECK(raw.levels()[1].weight == doctest::Approx(0.0));
  CHECK(canonicalize(raw).dimension() == 1);
}

TEST_CASE("random Hermitian: weights are overlaps with true eigenvectors") {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd A(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = Complex(g(gen), g(gen));
  const Eigen::MatrixXcd H = A + A.adjoint();
  Eigen::VectorXcd psi(4);
  for (int i = 0; i < 4; ++i) psi(i) = Complex(g(gen), g(gen));
  psi.normalize();
  const auto raw = spectral_decompose({H, psi});
  double total = 0.0;
  for (const auto& level : raw.levels()) {
    // Eigenvector from the null space of H - E, checked by its residual.
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(H - level.energy * Eigen::MatrixXcd::Identity(4, 4));
    lu.setThreshold(1e-9);
    const Eigen::VectorXcd v = lu.kernel().col(0).normalized();
    CHECK((H * v - level.energy * v).norm() < 1e-9);
    CHECK(std::norm(v.dot(psi)) == doctest::Approx(level.weight).epsilon(1e-8));
    total += level.weight;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("canonicalize: worked cases and weight ratios") {
  const auto merged = canonicalize(RawSpectralModel({{1.0, 0.25}, {1.0, 0.25}, {2.0, 0.5}}));
  CHECK(merged.energies() == std::vector<double>{1.0, 2.0});
  CHECK(merged.weights() == std::vector<double>{0.5, 0.5});
  const auto dropped = canonicalize(RawSpectralModel({{0.0, 1.0}, {3.0, 0.0}}));
  CHECK(dropped.dimension() == 1);
  CHECK(dropped.energy(0) == 0.0);

  const auto renorm = canonicalize(RawSpectralModel({{0.0, 0.3}, {1.0, 0.5}, {2.0, 0.2 - 1e-13}, {3.0, 1e-13}}));
  REQUIRE(renorm.dimension() == 3);
  CHECK(std::abs(renorm.weight(0) / renorm.weight(1) - 0.6) < 1e-12);
}
