#include "dfrc/random.hpp"

#include <cmath>

namespace dfrc {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{std::uint32_t(master_seed), std::uint32_t(master_seed >> 32),
                    std::uint32_t(index), std::uint32_t(index >> 32), 0x5eedu};
  return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix(mix(master_seed) ^ (index + 0x632be59bd9b4e019ULL));
}

std::complex<double> complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  double re = n(rng);
  double im = n(rng);
  return {re, im};
}

}  // namespace dfrc
