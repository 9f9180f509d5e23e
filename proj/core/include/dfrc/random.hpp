#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace dfrc {

using Rng = std::mt19937_64;

// Independent stream for (master seed, index); same pair, same stream.
Rng derive_stream(std::uint64_t master_seed, std::uint64_t index);

// Two-level derivation, e.g. (seed, sweep point) then (point seed, trial).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

// Circular complex Gaussian with E|w|^2 = variance.
std::complex<double> complex_normal(Rng& rng, double variance);

}  // namespace dfrc
