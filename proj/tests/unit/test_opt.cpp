#include <doctest.h>

#include <random>

#include "dfrc/experiment.hpp"
#include "dfrc/opt.hpp"
#include "oracles.hpp"

using namespace dfrc;

namespace {

CommChannel test_channel(int K, std::uint64_t seed) {
  OfdmConfig c = OfdmConfig::standard(K, 2, 2);
  return synthesize_channel(18, seed, K, c.comm_loss_db, c.noise_density());
}

bool non_increasing(const std::vector<double>& t, double slack) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] > t[i - 1] + slack * std::max(1.0, std::abs(t[i - 1]))) return false;
  return true;
}

double mean_spread_over_k(const GaussianInput& g, int m) {
  double lo = 1e300, hi = -1e300;
  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < g.K; ++k) {
      lo = std::min(lo, g.pbar(g.index(c, k, m)));
      hi = std::max(hi, g.pbar(g.index(c, k, m)));
    }
  return hi - lo;
}

}  // namespace

TEST_CASE("psk output is an exact spread of the symbol powers") {
  const OfdmConfig cfg = OfdmConfig::standard(32, 8, 8);
  const auto eps = epsilon_samples(8);
  for (double dbw : {-15.0, 0.0, 6.0, 15.0}) {
    const double P = db_to_linear(dbw);
    PskResult r = optimize_psk(cfg, P, cfg.radar_sigma2(), eps);
    CHECK(r.converged);
    CHECK(r.primal_residual <= 1e-6);
    CHECK(std::abs(r.p_m.sum() - P) <= 1e-12 * P);
    CHECK((r.p_m.array() >= 0).all());
    for (int m = 0; m < cfg.M; ++m)
      for (int k = 0; k < cfg.K; ++k) CHECK(r.grid.values(k, m) == r.p_m(m) / cfg.K);
    const double uni = ubop(PowerGrid::uniform(cfg.K, cfg.M, P), cfg.radar_sigma2(), eps, cfg.K_G);
    CHECK(ubop(r.grid, cfg.radar_sigma2(), eps, cfg.K_G) <= uni * (1 + 1e-12));
  }
}

TEST_CASE("psk is deterministic") {
  const OfdmConfig cfg = OfdmConfig::standard(32, 8, 16);
  const auto eps = epsilon_samples(8);
  PskResult a = optimize_psk(cfg, 1.0, cfg.radar_sigma2(), eps);
  PskResult b = optimize_psk(cfg, 1.0, cfg.radar_sigma2(), eps);
  CHECK(a.iterations == b.iterations);
  CHECK(a.p_m == b.p_m);
}

TEST_CASE("psk allocation is window shaped at low SNR") {
  const OfdmConfig cfg = OfdmConfig::standard(32, 8, 16);
  PskResult r = optimize_psk(cfg, db_to_linear(-15.0), cfg.radar_sigma2(), epsilon_samples(8));
  const Eigen::VectorXd& p = r.p_m;
  Eigen::Index top = 0;
  p.maxCoeff(&top);
  CHECK(top > 0);
  CHECK(top < cfg.M - 1);
  const double slack = 1e-6 * p.maxCoeff();
  for (Eigen::Index m = 1; m <= top; ++m) CHECK(p(m) >= p(m - 1) - slack);
  for (Eigen::Index m = top + 1; m < p.size(); ++m) CHECK(p(m) <= p(m - 1) + slack);
  CHECK(p(0) < 0.5 * p(top));
}

TEST_CASE("psk allocation flattens at high SNR") {
  const OfdmConfig cfg = OfdmConfig::standard(32, 8, 16);
  PskResult r = optimize_psk(cfg, db_to_linear(20.0), cfg.radar_sigma2(), epsilon_samples(8));
  CHECK(r.p_m.minCoeff() > 0);
  CHECK(r.p_m.maxCoeff() / r.p_m.minCoeff() <= 1.2);
}

TEST_CASE("psk beats the Hamming window at low SNR") {
  const OfdmConfig cfg = OfdmConfig::standard(32, 8, 16);
  const auto eps = epsilon_samples(8);
  for (double dbw : {-15.0, 0.0, 5.0}) {
    const double P = db_to_linear(dbw);
    PskResult r = optimize_psk(cfg, P, cfg.radar_sigma2(), eps);
    const double ham = ubop(baseline_allocation(BaselineKind::Hamming, cfg, P), cfg.radar_sigma2(), eps, cfg.K_G);
    CHECK(ubop(r.grid, cfg.radar_sigma2(), eps, cfg.K_G) < ham);
  }
}

TEST_CASE("psk residual meets the tolerance on random instances") {
  Rng rng = derive_stream(808, 0);
  std::uniform_int_distribution<int> mi(0, 2), li(1, 8);
  std::uniform_real_distribution<double> pw(-20.0, 30.0);
  const int Ms[] = {4, 8, 16};
  for (int t = 0; t < 20; ++t) {
    const OfdmConfig cfg = OfdmConfig::standard(32, 8, Ms[mi(rng)]);
    const auto eps = epsilon_samples(li(rng));
    const double P = db_to_linear(pw(rng));
    PskResult r = optimize_psk(cfg, P, cfg.radar_sigma2(), eps);
    CHECK(r.converged);
    CHECK(r.primal_residual <= 1e-6);
    CHECK(r.trace.size() == std::size_t(r.iterations) + 1);
  }
}

TEST_CASE("psk with a fixed penalty") {
  const OfdmConfig cfg = OfdmConfig::standard(32, 8, 8);
  OptimizerOptions o;
  o.rho = 50.0;
  PskResult r = optimize_psk(cfg, 1.0, cfg.radar_sigma2(), epsilon_samples(4), o);
  CHECK(r.rho == 50.0);
  CHECK(std::abs(r.p_m.sum() - 1.0) < 1e-12);
  if (!r.converged) CHECK(!r.diagnostic.empty());
}

TEST_CASE("psk argument errors") {
  const OfdmConfig cfg = OfdmConfig::standard(32, 8, 8);
  CHECK_THROWS_AS(optimize_psk(cfg, 0.0, 1.0, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(optimize_psk(cfg, 1.0, 0.0, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(optimize_psk(cfg, 1.0, 1.0, {}), std::invalid_argument);
}

TEST_CASE("baseline allocations") {
  SUBCASE("uniform") {
    PowerGrid g = baseline_allocation(BaselineKind::Uniform, OfdmConfig::standard(2, 1, 2), 4.0);
    CHECK(g.values == Eigen::MatrixXd::Ones(2, 2));
  }
  SUBCASE("crb puts everything on the edge subcarriers") {
    PowerGrid g = baseline_allocation(BaselineKind::Crb, OfdmConfig::standard(4, 1, 1), 4.0);
    Eigen::VectorXd want(4);
    want << 2, 0, 0, 2;
    CHECK(g.values.col(0) == want);
  }
  SUBCASE("hamming") {
    const OfdmConfig cfg = OfdmConfig::standard(8, 2, 4);
    PowerGrid g = baseline_allocation(BaselineKind::Hamming, cfg, 3.0);
    const double w[] = {0.08, 0.77, 0.77, 0.08};
    const double sum = 1.7;
    for (int m = 0; m < 4; ++m) {
      CHECK(g.symbol_powers()(m) == doctest::Approx(3.0 * w[m] / sum).epsilon(1e-12));
      CHECK(g.values.col(m).maxCoeff() == g.values.col(m).minCoeff());
    }
    CHECK(g.total() == doctest::Approx(3.0).epsilon(1e-14));
  }
  SUBCASE("kaiser") {
    const OfdmConfig cfg = OfdmConfig::standard(8, 2, 9);
    PowerGrid g = baseline_allocation(BaselineKind::Kaiser, cfg, 2.0);
    Eigen::VectorXd p = g.symbol_powers();
    CHECK(g.total() == doctest::Approx(2.0).epsilon(1e-14));
    for (int m = 0; m < 9; ++m) CHECK(p(m) == doctest::Approx(p(8 - m)).epsilon(1e-13));
    for (int m = 1; m <= 4; ++m) CHECK(p(m) > p(m - 1));
    // beta = 0 is the rectangular window
    OptimizerOptions o;
    o.kaiser_beta = 0.0;
    PowerGrid flat = baseline_allocation(BaselineKind::Kaiser, cfg, 2.0, o);
    CHECK((flat.values - PowerGrid::uniform(8, 9, 2.0).values).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("rmi is uniform") {
    const OfdmConfig cfg = OfdmConfig::standard(4, 2, 4);
    CHECK(baseline_allocation(BaselineKind::Rmi, cfg, 1.0).values == PowerGrid::uniform(4, 4, 1.0).values);
  }
  SUBCASE("names") {
    for (auto k : {BaselineKind::Uniform, BaselineKind::Hamming, BaselineKind::Kaiser, BaselineKind::Rmi,
                   BaselineKind::Crb})
      CHECK(parse_baseline_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_baseline_kind("blackman"), std::invalid_argument);
  }
}

TEST_CASE("baseline gaussian corners") {
  const OfdmConfig cfg = OfdmConfig::standard(8, 2, 4);
  const CommChannel ch = test_channel(8, 3);
  const double P = 2.0;

  GaussianInput zero = baseline_gaussian(BaselineKind::Crb, cfg, P, ch, 0.0);
  CHECK(zero.sigma.isZero());
  CHECK((zero.grid_power() - baseline_allocation(BaselineKind::Crb, cfg, P).values).cwiseAbs().maxCoeff() < 1e-15);

  const double mr = max_rate(cfg, ch, P);
  GaussianInput full = baseline_gaussian(BaselineKind::Rmi, cfg, P, ch, mr * (1 - 1e-12));
  CHECK(full.valid(P));
  CHECK(full.means().cwiseAbs().maxCoeff() < 1e-5 * P);
  CHECK(full.total() == doctest::Approx(P).epsilon(1e-9));

  try {
    baseline_gaussian(BaselineKind::Rmi, cfg, P, ch, 1.01 * mr);
    FAIL("expected InfeasibleRate");
  } catch (const InfeasibleRate& e) {
    CHECK(e.achievable == doctest::Approx(mr).epsilon(1e-12));
  }
}

TEST_CASE("baseline gaussian on a flat channel matches the barrier oracle") {
  const OfdmConfig cfg = OfdmConfig::standard(8, 2, 4);
  CommChannel ch = test_channel(8, 1);
  ch.h.setConstant(ch.h.mean());
  const double P = 1.0;
  const double R_c = 0.4 * max_rate(cfg, ch, P);
  GaussianInput g = baseline_gaussian(BaselineKind::Rmi, cfg, P, ch, R_c);

  WaterfillProblem wp =
      rate_waterfill(Eigen::VectorXd::Constant(g.size(), P), Eigen::VectorXd::Ones(g.size()), ch.rate_gains(4, cfg.B), R_c);
  Eigen::VectorXd ref = oracle::waterfill_barrier(wp);
  CHECK((g.sigma - ref).cwiseAbs().maxCoeff() < 1e-6 * ref.maxCoeff());
  CHECK(g.sigma.maxCoeff() - g.sigma.minCoeff() < 1e-12 * g.sigma.maxCoeff());
  Eigen::VectorXd mean = g.pbar - g.sigma;
  CHECK(mean.maxCoeff() - mean.minCoeff() < 1e-12 * mean.maxCoeff());
  CHECK(g.total() == doctest::Approx(P).epsilon(1e-12));
}

TEST_CASE("gaussian optimizer corners") {
  const OfdmConfig cfg = OfdmConfig::standard(8, 4, 4);
  const CommChannel ch = test_channel(8, 5);
  const auto eps = epsilon_samples(4);
  const double P = 1.0, s2 = cfg.radar_sigma2();

  // flat up to the sidelobe clamp
  SUBCASE("no rate constraint keeps every symbol flat across subcarriers") {
    GaussianResult r = optimize_gaussian(cfg, P, s2, ch, 0.0, eps);
    CHECK(r.input.sigma.isZero());
    for (int m = 0; m < cfg.M; ++m) CHECK(mean_spread_over_k(r.input, m) < 1e-4 * r.input.pbar.maxCoeff());
    CHECK(r.input.total() == doctest::Approx(P).epsilon(1e-9));
  }
  SUBCASE("full rate puts the budget into the variances by water-filling") {
    const double mr = max_rate(cfg, ch, P);
    GaussianResult r = optimize_gaussian(cfg, P, s2, ch, mr * (1 - 1e-12), eps);
    Eigen::VectorXd wf = waterfill_sum_power(ch.rate_gains(cfg.M, cfg.B), P);
    CHECK((r.input.sigma - wf).cwiseAbs().maxCoeff() < 1e-5 * P);
    CHECK((r.input.pbar - r.input.sigma).cwiseAbs().maxCoeff() < 1e-5 * P);
  }
  SUBCASE("infeasible rate") {
    CHECK_THROWS_AS(optimize_gaussian(cfg, P, s2, ch, 1.5 * max_rate(cfg, ch, P), eps), InfeasibleRate);
  }
}

TEST_CASE("gaussian optimizer descends and keeps its constraints") {
  const OfdmConfig cfg = OfdmConfig::standard(8, 4, 4);
  const auto eps = epsilon_samples(4);
  Rng rng = derive_stream(61, 0);
  std::uniform_real_distribution<double> frac(0.05, 0.9), pw(-5.0, 10.0);
  for (int t = 0; t < 6; ++t) {
    const CommChannel ch = test_channel(8, 100 + t);
    const double P = db_to_linear(pw(rng));
    const double R_c = frac(rng) * max_rate(cfg, ch, P);
    GaussianResult r = optimize_gaussian(cfg, P, cfg.radar_sigma2(), ch, R_c, eps);
    CHECK(r.converged);
    CHECK(non_increasing(r.trace, 1e-8));
    CHECK(r.input.valid(P));
    CHECK(achievable_rate(r.input.sigma, ch, cfg.K, cfg.M, cfg.B) >= R_c * (1 - 1e-9));
    GaussianInput start = baseline_gaussian(BaselineKind::Rmi, cfg, P, ch, R_c);
    CHECK(aubop(r.input, cfg.radar_sigma2(), eps, cfg.K_G) <= aubop(start, cfg.radar_sigma2(), eps, cfg.K_G) + 1e-9);
  }
}

TEST_CASE("mean power fraction falls as the rate constraint grows") {
  const OfdmConfig cfg = OfdmConfig::standard(8, 4, 4);
  const CommChannel ch = test_channel(8, 9);
  const double mr = max_rate(cfg, ch, 1.0);
  double last = 2.0;
  for (double f : {0.0, 0.25, 0.5, 0.75, 0.95}) {
    GaussianResult r = optimize_gaussian(cfg, 1.0, cfg.radar_sigma2(), ch, f * mr, epsilon_samples(4));
    const double frac = r.input.mean_fraction();
    CHECK(frac < last + 1e-6);
    last = frac;
  }
}

TEST_CASE("decoupled optimizer") {
  const auto eps = epsilon_samples(4);

  SUBCASE("one symbol collapses to the full problem") {
    const OfdmConfig cfg = OfdmConfig::standard(8, 4, 1);
    const CommChannel ch = test_channel(8, 21);
    const double R_c = 0.5 * max_rate(cfg, ch, 1.0);
    GaussianResult full = optimize_gaussian(cfg, 1.0, cfg.radar_sigma2(), ch, R_c, eps);
    DecoupledResult dec = optimize_decoupled(cfg, 1.0, cfg.radar_sigma2(), ch, R_c, eps);
    const double a = aubop(full.input, cfg.radar_sigma2(), eps, cfg.K_G);
    const double b = aubop(dec.input, cfg.radar_sigma2(), eps, cfg.K_G);
    CHECK(b == doctest::Approx(a).epsilon(1e-4));
  }
  SUBCASE("rate surrogate never exceeds the exact rate") {
    const OfdmConfig cfg = OfdmConfig::standard(8, 4, 8);
    for (std::uint64_t s = 0; s < 4; ++s) {
      const CommChannel ch = test_channel(8, 40 + s);
      const double R_c = (0.1 + 0.1 * double(s)) * max_rate(cfg, ch, 1.0);
      DecoupledResult dec = optimize_decoupled(cfg, 1.0, cfg.radar_sigma2(), ch, R_c, eps);
      REQUIRE(dec.surrogate_rate.size() == dec.exact_rate.size());
      for (std::size_t i = 0; i < dec.exact_rate.size(); ++i) {
        CHECK(dec.surrogate_rate[i] <= dec.exact_rate[i] + 1e-12);
        CHECK(dec.surrogate_rate[i] >= R_c * (1 - 1e-9));
      }
      CHECK(non_increasing(dec.trace, 1e-8));
    }
  }
  SUBCASE("output has the product structure and meets its constraints") {
    const OfdmConfig cfg = OfdmConfig::standard(8, 4, 8);
    const CommChannel ch = test_channel(8, 77);
    const double P = 2.0;
    const double R_c = 0.3 * max_rate(cfg, ch, P);
    DecoupledResult dec = optimize_decoupled(cfg, P, cfg.radar_sigma2(), ch, R_c, eps);
    CHECK(dec.input.valid(P));
    CHECK(achievable_rate(dec.input.sigma, ch, cfg.K, cfg.M, cfg.B) >= R_c * (1 - 1e-9));
    CHECK(dec.p.sum() == doctest::Approx(P).epsilon(1e-12));
    const Eigen::VectorXd pn = dec.p / dec.p.sum();
    for (int m = 0; m < cfg.M; ++m)
      for (int k = 0; k < cfg.K; ++k)
        for (int c = 0; c < 2; ++c) {
          const int q = dec.input.index(c, k, m);
          CHECK(dec.input.pbar(q) == doctest::Approx(P * pn(m) * dec.pbar_K(c * cfg.K + k)).epsilon(1e-12));
          CHECK(dec.input.sigma(q) == doctest::Approx(P * pn(m) * dec.sigma_K(c * cfg.K + k)).epsilon(1e-12));
        }
  }
  SUBCASE("rates beyond the decoupled ceiling are refused") {
    const OfdmConfig cfg = OfdmConfig::standard(8, 4, 8);
    const CommChannel ch = test_channel(8, 78);
    const double mr = max_rate(cfg, ch, 1.0);
    try {
      optimize_decoupled(cfg, 1.0, cfg.radar_sigma2(), ch, mr, eps);
      FAIL("expected InfeasibleRate");
    } catch (const InfeasibleRate& e) {
      CHECK(e.achievable <= mr);
      CHECK(e.achievable > 0);
    }
  }
}
