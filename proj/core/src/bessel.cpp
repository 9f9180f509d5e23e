#include "dfrc/bessel.hpp"

#include <cmath>
#include <stdexcept>

#include "dfrc/grid.hpp"

namespace dfrc {

double log_bessel_i0(double z) {
  if (z < 0) throw std::domain_error("log_bessel_i0: negative argument");
  if (z < 50.0) {
    // sum_j ((z/2)^j / j!)^2
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < 400 && term > 1e-17 * sum; ++j) {
      term *= q / (double(j) * j);
      sum += term;
    }
    return std::log(sum);
  }
  const double t = 1.0 / (8.0 * z);
  return z - 0.5 * std::log(2.0 * kPi * z) + std::log1p(t * (1.0 + t * (4.5 + t * 37.5)));
}

double exp_neg_times_i0(double a, double b) { return std::exp(-a + log_bessel_i0(b)); }

}  // namespace dfrc
