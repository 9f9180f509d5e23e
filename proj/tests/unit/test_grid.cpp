#include <doctest.h>

#include <random>

#include "dfrc/grid.hpp"
#include "oracles.hpp"

using namespace dfrc;

namespace {

Eigen::MatrixXd random_grid(Rng& rng, int K, int M) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd p(K, M);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) p(k, m) = u(rng);
  return p;
}

}  // namespace

TEST_CASE("doppler phase vector") {
  auto a = doppler_phase_vector(0, 0.0, 4);
  for (int m = 0; m < 4; ++m) CHECK(std::abs(a(m) - cd(1, 0)) < 1e-15);

  auto b = doppler_phase_vector(2, 0.0, 4);
  const double expect[] = {1, -1, 1, -1};
  for (int m = 0; m < 4; ++m) CHECK(std::abs(b(m) - cd(expect[m], 0)) < 1e-14);

  auto c = doppler_phase_vector(1, 0.3, 16);
  CHECK(std::abs(c.sum()) == doctest::Approx(5.904701608945793).epsilon(1e-12));
  CHECK(std::abs(c.sum()) == doctest::Approx(oracle::dirichlet_sum(-0.7, 16)).epsilon(1e-12));
  CHECK((c.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("range phase vector") {
  auto a = range_phase_vector(0, 8);
  CHECK((a.array() - cd(1, 0)).abs().maxCoeff() < 1e-15);
  auto b = range_phase_vector(4, 8);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(b(k) - cd(k % 2 ? -1 : 1, 0)) < 1e-14);
  auto c = range_phase_vector(1, 8);
  CHECK(std::abs(c.sum()) < 1e-14);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(c(k) - std::polar(1.0, 2 * kPi * k / 8)) < 1e-14);
}

TEST_CASE("ambiguity examples") {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(32, 16);
  CHECK(std::abs(ambiguity(ones, 0, 0, 0.0) - cd(512, 0)) < 1e-10);
  CHECK(std::abs(ambiguity(ones, 3, 0, 0.0)) < 1e-10);
  CHECK(std::abs(ambiguity(ones, 0, 1, 0.3)) == doctest::Approx(188.95045148626537).epsilon(1e-12));
}

TEST_CASE("epsilon samples") {
  CHECK(epsilon_samples(1) == std::vector<double>{0.0});
  CHECK(epsilon_samples(2) == std::vector<double>{-0.25, 0.25});
  CHECK(epsilon_samples(4) == std::vector<double>{-0.375, -0.125, 0.125, 0.375});
  for (int c = 1; c < 20; ++c) {
    auto e = epsilon_samples(c);
    for (int l = 0; l < c; ++l) {
      CHECK(std::abs(e[l]) < 0.5);
      CHECK(e[l] == doctest::Approx(-e[c - 1 - l]));
    }
  }
}

TEST_CASE("bin linearization round trip") {
  for (int q = 0; q < 8 * 16; ++q) {
    auto b = bin_from_index(q, 8, 16);
    CHECK(bin_in_range(b, 8, 16));
    CHECK(linear_bin_index(b, 8, 16) == q);
  }
  CHECK(linear_bin_index({0, -8}, 8, 16) == 0);
  CHECK(linear_bin_index({3, 0}, 8, 16) == 3 + 8 * 8);
  CHECK_FALSE(bin_in_range({8, 0}, 8, 16));
  CHECK_FALSE(bin_in_range({0, 8}, 8, 16));
}

TEST_CASE("config geometry and validation") {
  OfdmConfig c = OfdmConfig::standard(32, 8, 8);
  CHECK(c.K_T() == 40);
  CHECK(c.sigma_n2 == doctest::Approx(db_to_linear(-208) * 90.909e6 / 32).epsilon(1e-12));
  CHECK(c.radar_sigma2() == doctest::Approx(c.sigma_n2 / db_to_linear(-140)).epsilon(1e-12));
  // K=1024, K_G=256, M=512 gives about 0.87 m/s from the resolution formula
  OfdmConfig big = OfdmConfig::standard(1024, 256, 512);
  CHECK(big.velocity_resolution() == doctest::Approx(0.86637).epsilon(1e-3));
  CHECK(c.range_resolution() == doctest::Approx(1.6489).epsilon(1e-3));
  CHECK_NOTHROW(c.validate());

  OfdmConfig bad = c;
  bad.K_G = 32;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.M = 7;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.B = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("ambiguity matches the direct oracle and the surface agrees with point values") {
  Rng rng = derive_stream(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd p = random_grid(rng, 16, 8);
    double eps = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    Eigen::MatrixXcd s = ambiguity_surface(p, 4, eps);
    for (int n = 0; n < 4; ++n)
      for (int v = -4; v < 4; ++v) {
        cd ref = oracle::af_direct(p, n, v, eps);
        CHECK(std::abs(ambiguity(p, n, v, eps) - ref) <= 1e-10 * p.sum());
        CHECK(std::abs(s(n, v + 4) - ref) <= 1e-10 * p.sum());
      }
  }
}

TEST_CASE("ambiguity properties") {
  Rng rng = derive_stream(12, 0);
  std::uniform_real_distribution<double> ue(-0.5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd p = random_grid(rng, 8, 4), p2 = random_grid(rng, 8, 4);
    const double total = p.sum();
    CHECK(std::abs(ambiguity(p, 0, 0, 0.0) - cd(total, 0)) <= 1e-14 * total);
    double eps = ue(rng);
    for (int n = 0; n < 8; ++n)
      for (int v = -2; v < 2; ++v) {
        CHECK(std::abs(ambiguity(p, n, v, eps)) <= total * (1 + 1e-14));
        cd lin = ambiguity(Eigen::MatrixXd(2.0 * p - 0.5 * p2), n, v, eps);
        CHECK(std::abs(lin - (2.0 * ambiguity(p, n, v, eps) - 0.5 * ambiguity(p2, n, v, eps))) < 1e-12 * total);
      }
    for (int v = -2; v < 2; ++v)
      CHECK(std::abs(ambiguity(p, 0, -v, -eps) - std::conj(ambiguity(p, 0, v, eps))) < 1e-12 * total);
  }
}

TEST_CASE("uniform spreading nulls every off-zero delay") {
  Rng rng = derive_stream(13, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0), ue(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd pm(8);
    for (int m = 0; m < 8; ++m) pm(m) = u(rng);
    PowerGrid g = PowerGrid::spread(pm, 16, pm.sum());
    CHECK(g.valid());
    Eigen::MatrixXcd s = ambiguity_surface(g.values, 8, ue(rng));
    CHECK(s.bottomRows(7).cwiseAbs().maxCoeff() < 1e-9 * g.total());
  }
}

TEST_CASE("power grid helpers") {
  PowerGrid u = PowerGrid::uniform(2, 2, 4.0);
  CHECK(u.values.isApprox(Eigen::MatrixXd::Ones(2, 2)));
  CHECK(u.valid());
  CHECK(u.symbol_powers().isApprox(Eigen::Vector2d(2, 2)));
  PowerGrid over = u;
  over.values(0, 0) = 3.0;
  CHECK_FALSE(over.valid());
  PowerGrid neg = u;
  neg.values(0, 0) = -0.1;
  neg.values(1, 1) = 1.1;
  CHECK_FALSE(neg.valid());
}
