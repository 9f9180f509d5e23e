#pragma once

#include <cstdint>
#include <span>

#include "dfrc/grid.hpp"
#include "dfrc/metrics.hpp"
#include "dfrc/random.hpp"
#include "dfrc/waveform.hpp"

namespace dfrc {

// Where the communication symbols of each trial come from.
struct SymbolSource {
  enum class Kind { Psk, Gaussian };
  Kind kind = Kind::Psk;
  PowerGrid grid;          // Psk: |X|^2 per element
  GaussianInput gaussian;  // Gaussian: X_R, X_I ~ N(mu, sigma) per element
  int psk_order = 2;

  static SymbolSource psk(const PowerGrid& p, int order = 2);
  static SymbolSource from_gaussian(const GaussianInput& g);

  SymbolGrid draw(Rng& rng) const;
};

struct SimulationSpec {
  // echo amplitude A and per-element noise power sigma_N^2
  double amplitude = 1.0;
  double sigma_n2 = 1.0;
  // force eps = 0
  bool on_grid = false;
  // 0 picks the hardware concurrency
  int threads = 0;
};

ExperimentResult simulate_op(const OfdmConfig& cfg, const SymbolSource& src, const SimulationSpec& spec,
                             std::size_t trials, std::uint64_t master_seed);

// Fixed-order pairwise sum; the result depends only on the input order.
double pairwise_sum(std::span<const double> x);

}  // namespace dfrc
