#pragma once

namespace dfrc {

// log I0(z), z >= 0. Power series (40 terms) below 15, asymptotic above.
double log_bessel_i0(double z);

// exp(-a) * I0(b), fused in log space
double exp_neg_times_i0(double a, double b);

}  // namespace dfrc
