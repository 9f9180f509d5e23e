#include <doctest.h>

#include <random>

#include "dfrc/waveform.hpp"
#include "oracles.hpp"

using namespace dfrc;

namespace {

SymbolGrid bpsk(Rng& rng, int K, int M) {
  std::bernoulli_distribution b(0.5);
  SymbolGrid X(K, M);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) X(k, m) = b(rng) ? 1.0 : -1.0;
  return X;
}

SymbolGrid gaussian_grid(Rng& rng, int K, int M) {
  SymbolGrid X(K, M);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) X(k, m) = complex_normal(rng, 1.0);
  return X;
}

}  // namespace

TEST_CASE("modulate examples") {
  OfdmConfig cfg = OfdmConfig::standard(8, 2, 2);
  SymbolGrid X = SymbolGrid::Zero(8, 2);
  X(0, 0) = std::sqrt(8.0);
  Eigen::VectorXcd x = modulate(X, cfg);
  REQUIRE(x.size() == 10 * 2);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(x(i) - cd(1, 0)) < 1e-14);
  for (int i = 10; i < 20; ++i) CHECK(std::abs(x(i)) < 1e-14);

  SymbolGrid Y = SymbolGrid::Zero(8, 2);
  Y.col(0).setOnes();
  Eigen::VectorXcd y = modulate(Y, cfg);
  // impulse sqrt(K) at n = 0, which follows the K_G-sample prefix
  CHECK(std::abs(y(2) - cd(std::sqrt(8.0), 0)) < 1e-13);
  for (int i = 0; i < 10; ++i)
    if (i != 2) CHECK(std::abs(y(i)) < 1e-13);
  // prefix copies the last K_G samples
  CHECK(std::abs(y(0) - y(8)) < 1e-15);
  CHECK(std::abs(y(1) - y(9)) < 1e-15);
}

TEST_CASE("modulate is unitary and demodulate inverts it") {
  OfdmConfig cfg = OfdmConfig::standard(16, 4, 4);
  Rng rng = derive_stream(21, 0);
  for (int t = 0; t < 10; ++t) {
    SymbolGrid X = gaussian_grid(rng, 16, 4);
    Eigen::VectorXcd x = modulate(X, cfg);
    for (int m = 0; m < 4; ++m)
      CHECK(x.segment(m * 20 + 4, 16).squaredNorm() == doctest::Approx(X.col(m).squaredNorm()).epsilon(1e-12));
    SymbolGrid back = demodulate(x, cfg);
    CHECK((back - X).norm() <= 1e-12 * X.norm());
  }
  CHECK_THROWS_AS(modulate(SymbolGrid::Zero(8, 4), cfg), std::invalid_argument);
}

TEST_CASE("echo synthesis examples") {
  Rng rng = derive_stream(22, 0);
  SymbolGrid X = gaussian_grid(rng, 16, 8);
  EchoParams e;
  SymbolGrid Y = synthesize_echo(X, e, rng);
  CHECK((Y - X).norm() < 1e-14);

  e.bin = {3, 2};
  Y = synthesize_echo(X, e, rng);
  for (int m = 0; m < 8; ++m)
    for (int k = 0; k < 16; ++k) {
      cd ref = X(k, m) * std::polar(1.0, -6 * kPi * k / 16) * std::polar(1.0, 4 * kPi * m / 8);
      CHECK(std::abs(Y(k, m) - ref) < 1e-13);
    }

  EchoParams noise;
  noise.a = 0.0;
  noise.sigma_n2 = 1.0;
  SymbolGrid big = SymbolGrid::Zero(100, 100);
  SymbolGrid W = synthesize_echo(big, noise, rng);
  double mean_sq = W.cwiseAbs2().mean();
  // E|w|^4 = 2 for unit complex Gaussian, so the sample variance of |w|^2 is 1
  double se = std::sqrt(1.0 / 1e4);
  CHECK(std::abs(mean_sq - 1.0) < 3 * se);
  CHECK(std::abs(W.real().array().square().mean() - 0.5) < 3 * std::sqrt(0.5 / 1e4));
}

TEST_CASE("time-domain path agrees with direct synthesis on grid") {
  OfdmConfig cfg = OfdmConfig::standard(16, 4, 8);
  Rng rng = derive_stream(23, 0);
  for (int t = 0; t < 10; ++t) {
    SymbolGrid X = gaussian_grid(rng, 16, 8);
    EchoParams e;
    e.a = std::polar(0.7, 1.1);
    e.bin = {t % 4, t % 8 - 4};
    SymbolGrid direct = synthesize_echo(X, e, rng);
    SymbolGrid td = propagate_time_domain(X, e, cfg);
    CHECK((direct - td).norm() <= 1e-9 * X.norm());
  }
}

TEST_CASE("ml estimate examples") {
  Rng rng = derive_stream(24, 0);
  SymbolGrid X = bpsk(rng, 32, 8);
  CHECK(ml_estimate(X, X, 8) == DelayDopplerBin{0, 0});
  EchoParams e;
  e.bin = {3, 2};
  SymbolGrid Y = synthesize_echo(X, e, rng);
  CHECK(ml_estimate(Y, X, 8) == DelayDopplerBin{3, 2});
  CHECK_THROWS(ml_estimate(Y, SymbolGrid::Zero(32, 8), 8));
}

TEST_CASE("fft estimator equals the brute force double sum") {
  Rng rng = derive_stream(25, 0);
  MlEstimator est(8, 4, 4);
  for (int t = 0; t < 100; ++t) {
    SymbolGrid X = gaussian_grid(rng, 8, 4);
    EchoParams e;
    e.bin = bin_from_index(t % 16, 4, 4);
    e.eps = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    e.sigma_n2 = 2.0;
    SymbolGrid Y = synthesize_echo(X, e, rng);
    DelayDopplerBin ref = oracle::brute_force_ml(Y, X, 4);
    CHECK(ml_estimate(Y, X, 4) == ref);
    CHECK(est(Y, X) == ref);
    // global complex scaling leaves the decision alone
    CHECK(ml_estimate(Y * std::polar(3.5, -0.4), X, 4) == ref);
  }
}

TEST_CASE("statistic matches the matched filter sum") {
  Rng rng = derive_stream(26, 0);
  SymbolGrid X = gaussian_grid(rng, 8, 4), Y = gaussian_grid(rng, 8, 4);
  Eigen::MatrixXd s = ml_statistic(Y, X, 4);
  for (int n = 0; n < 4; ++n)
    for (int v = -2; v < 2; ++v) {
      cd acc = 0.0;
      for (int m = 0; m < 4; ++m)
        for (int k = 0; k < 8; ++k)
          acc += Y(k, m) * std::conj(X(k, m)) * std::polar(1.0, 2 * kPi * (double(n) * k / 8 - double(v) * m / 4));
      CHECK(s(n, v + 2) == doctest::Approx(std::abs(acc)).epsilon(1e-12));
    }
}

TEST_CASE("noiseless on-grid recovery is exact") {
  Rng rng = derive_stream(27, 0);
  MlEstimator est(32, 8, 8);
  std::uniform_int_distribution<int> q(0, 63);
  int hits = 0;
  for (int t = 0; t < 1000; ++t) {
    SymbolGrid X = bpsk(rng, 32, 8);
    EchoParams e;
    e.bin = bin_from_index(q(rng), 8, 8);
    e.a = std::polar(1e-3, 2.0);
    hits += est(synthesize_echo(X, e, rng), X) == e.bin;
  }
  CHECK(hits == 1000);
}

TEST_CASE("pure noise picks the true bin at chance rate") {
  Rng rng = derive_stream(28, 0);
  MlEstimator est(8, 4, 4);
  const int trials = 100000;
  int hits = 0;
  SymbolGrid X = bpsk(rng, 8, 4);
  EchoParams e;
  e.a = 0.0;
  e.sigma_n2 = 1.0;
  std::uniform_int_distribution<int> q(0, 15);
  for (int t = 0; t < trials; ++t) {
    e.bin = bin_from_index(q(rng), 4, 4);
    hits += est(synthesize_echo(X, e, rng), X) == e.bin;
  }
  const double p = 1.0 / 16, se = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(double(hits) / trials - p) < 3 * se);
}
