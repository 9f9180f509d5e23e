#include "dfrc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dfrc {

SymbolSource SymbolSource::psk(const PowerGrid& p, int order) {
  if (order < 1) throw std::invalid_argument("psk order must be >= 1");
  SymbolSource s;
  s.kind = Kind::Psk;
  s.grid = p;
  s.psk_order = order;
  return s;
}

SymbolSource SymbolSource::from_gaussian(const GaussianInput& g) {
  SymbolSource s;
  s.kind = Kind::Gaussian;
  s.gaussian = g;
  return s;
}

SymbolGrid SymbolSource::draw(Rng& rng) const {
  if (kind == Kind::Psk) {
    const int K = grid.K(), M = grid.M();
    SymbolGrid X(K, M);
    std::uniform_int_distribution<int> sym(0, psk_order - 1);
    for (int m = 0; m < M; ++m)
      for (int k = 0; k < K; ++k) {
        double ph = 2.0 * kPi * sym(rng) / psk_order;
        X(k, m) = std::polar(std::sqrt(grid.values(k, m)), ph);
      }
    return X;
  }
  const GaussianInput& g = gaussian;
  SymbolGrid X(g.K, g.M);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd mu = g.means();
  for (int m = 0; m < g.M; ++m)
    for (int k = 0; k < g.K; ++k) {
      int qr = g.index(0, k, m), qi = g.index(1, k, m);
      double re = mu(qr) + std::sqrt(std::max(g.sigma(qr), 0.0)) * nd(rng);
      double im = mu(qi) + std::sqrt(std::max(g.sigma(qi), 0.0)) * nd(rng);
      X(k, m) = cd(re, im);
    }
  return X;
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  std::size_t h = x.size() / 2;
  return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

ExperimentResult simulate_op(const OfdmConfig& cfg, const SymbolSource& src, const SimulationSpec& spec,
                             std::size_t trials, std::uint64_t master_seed) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  const int K = cfg.K, KG = cfg.K_G, M = cfg.M;
  std::vector<unsigned char> miss(trials);
  std::vector<double> err_r(trials), err_v(trials);
  const double rres = cfg.range_resolution();
  const double vres = cfg.velocity_resolution();

  auto worker = [&](std::size_t begin, std::size_t end) {
    MlEstimator est(K, KG, M);
    std::uniform_int_distribution<int> bin(0, KG * M - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = derive_stream(master_seed, t);
      SymbolGrid X = src.draw(rng);
      EchoParams e;
      e.bin = bin_from_index(bin(rng), KG, M);
      double eps = unit(rng) - 0.5;
      e.eps = spec.on_grid ? 0.0 : eps;
      e.a = std::polar(spec.amplitude, 2.0 * kPi * unit(rng));
      e.sigma_n2 = spec.sigma_n2;
      SymbolGrid Y = synthesize_echo(X, e, rng);
      DelayDopplerBin hat;
      if (X.cwiseAbs2().sum() == 0.0)
        hat = {0, -M / 2};
      else
        hat = est(Y, X);
      miss[t] = !(hat == e.bin);
      double dr = (hat.n - e.bin.n) * rres;
      double dv = (hat.v - e.bin.v) * vres;
      err_r[t] = dr * dr;
      err_v[t] = dv * dv;
    }
  };

  int nt = spec.threads > 0 ? spec.threads : int(std::max(1u, std::thread::hardware_concurrency()));
  nt = int(std::min<std::size_t>(std::size_t(nt), trials));
  if (nt <= 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (trials + nt - 1) / nt;
    for (int i = 0; i < nt; ++i) {
      std::size_t b = i * chunk, e = std::min(trials, b + chunk);
      if (b < e) pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult r;
  r.trials = trials;
  for (unsigned char c : miss) r.outliers += c;
  r.op_hat = double(r.outliers) / double(trials);
  wilson_interval(r.outliers, trials, r.ci_lo, r.ci_hi);
  r.ci95 = 0.5 * (r.ci_hi - r.ci_lo);
  r.mse_range_m2 = pairwise_sum(err_r) / double(trials);
  r.mse_velocity_m2s2 = pairwise_sum(err_v) / double(trials);
  return r;
}

}  // namespace dfrc
