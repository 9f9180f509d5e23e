#pragma once

#include <memory>

#include <Eigen/Dense>

#include "dfrc/grid.hpp"
#include "dfrc/random.hpp"

namespace dfrc {

// K x M frequency-domain symbols X[k,m]
using SymbolGrid = Eigen::MatrixXcd;

struct EchoParams {
  cd a{1.0, 0.0};
  DelayDopplerBin bin;
  double eps = 0.0;
  double sigma_n2 = 0.0;
};

// Unitary IDFT per symbol, last K_G samples prepended. Length K_T * M.
Eigen::VectorXcd modulate(const SymbolGrid& X, const OfdmConfig& cfg);
// Strip CP, unitary DFT per symbol.
SymbolGrid demodulate(const Eigen::VectorXcd& x, const OfdmConfig& cfg);

// Y = a X e^{-j2pi n0 k/K} e^{j2pi(v0+eps)m/M} + W
SymbolGrid synthesize_echo(const SymbolGrid& X, const EchoParams& e, Rng& rng);

// Noiseless echo through the sampled time-domain path: circular delay
// inside the CP, per-symbol Doppler phase, CP removal, DFT.
SymbolGrid propagate_time_domain(const SymbolGrid& X, const EchoParams& e, const OfdmConfig& cfg);

// Matched-filter statistic |sum Y X* e^{j2pi nk/K} e^{-j2pi vm/M}| for all
// bins, K_G x M with column v + M/2.
Eigen::MatrixXd ml_statistic(const SymbolGrid& Y, const SymbolGrid& X, int K_G);

// argmax of ml_statistic; ties go to the smallest linear index
DelayDopplerBin ml_estimate(const SymbolGrid& Y, const SymbolGrid& X, int K_G);

// Reusable estimator with preallocated buffers; one per thread.
class MlEstimator {
 public:
  MlEstimator(int K, int K_G, int M);
  ~MlEstimator();
  MlEstimator(MlEstimator&&) noexcept;
  MlEstimator& operator=(MlEstimator&&) noexcept;

  DelayDopplerBin operator()(const SymbolGrid& Y, const SymbolGrid& X);
  const Eigen::MatrixXd& statistic() const { return stat_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Eigen::MatrixXd stat_;
};

}  // namespace dfrc
