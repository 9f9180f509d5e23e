#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dfrc {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Grid geometry plus the link-budget terms that set the radar and comm SNR.
struct OfdmConfig {
  int K = 32;
  int K_G = 8;
  int M = 8;
  double B = 90.909e6;
  double f_c = 24e9;
  // per-element receiver noise power, frequency domain
  double sigma_n2 = 0.0;
  double radar_loss_db = 130.0;
  double comm_loss_db = 108.0;
  double rcs_dbsm = -10.0;
  double noise_density_dbw_hz = -208.0;

  // sigma_n2 = N0 * B / K
  static OfdmConfig standard(int K, int K_G, int M);

  int K_T() const { return K + K_G; }
  double delay_resolution() const { return 1.0 / B; }
  double doppler_resolution() const { return B / (double(K_T()) * M); }
  double range_resolution() const { return kSpeedOfLight / (2.0 * B); }
  double velocity_resolution() const {
    return doppler_resolution() * kSpeedOfLight / (2.0 * f_c);
  }
  // two-way amplitude^2 of the target echo
  double echo_gain() const { return db_to_linear(-radar_loss_db + rcs_dbsm); }
  // sigma^2 = sigma_N^2 / A^2
  double radar_sigma2() const { return sigma_n2 / echo_gain(); }
  double noise_density() const { return db_to_linear(noise_density_dbw_hz); }
  int bins() const { return K_G * M; }

  // throws std::invalid_argument naming the offending field
  void validate() const;
};

struct DelayDopplerBin {
  int n = 0;
  int v = 0;
  bool operator==(const DelayDopplerBin&) const = default;
};

// q = n + (v + M/2) * K_G
int linear_bin_index(DelayDopplerBin b, int K_G, int M);
DelayDopplerBin bin_from_index(int q, int K_G, int M);
bool bin_in_range(DelayDopplerBin b, int K_G, int M);

// K x M nonnegative powers p_{k,m}
struct PowerGrid {
  Eigen::MatrixXd values;
  double budget = 0.0;

  int K() const { return int(values.rows()); }
  int M() const { return int(values.cols()); }
  double total() const { return values.sum(); }
  Eigen::VectorXd symbol_powers() const { return values.colwise().sum().transpose(); }
  bool valid(double tol = 1e-9) const;

  static PowerGrid uniform(int K, int M, double budget);
  // p_{k,m} = p_m / K
  static PowerGrid spread(const Eigen::VectorXd& p_m, int K, double budget);
};

struct AfValue {
  int n = 0;
  int v = 0;
  double eps = 0.0;
  cd value;
};

// exp(-j 2 pi m (v - eps) / M)
Eigen::VectorXcd doppler_phase_vector(int v, double eps, int M);
// exp(j 2 pi n k / K)
Eigen::VectorXcd range_phase_vector(int n, int K);

// Direct double sum over the grid.
cd ambiguity(const Eigen::MatrixXd& p, int n, int v, double eps);
inline cd ambiguity(const PowerGrid& p, int n, int v, double eps) {
  return ambiguity(p.values, n, v, eps);
}
AfValue ambiguity_value(const PowerGrid& p, int n, int v, double eps);

// All r_{n,v,eps} for n < K_G, v in [-M/2, M/2); column index v + M/2.
// Same double sum, factored as (F^R p) F^D^T.
Eigen::MatrixXcd ambiguity_surface(const Eigen::MatrixXd& p, int K_G, double eps);

// Midpoint grid (2l - count - 1) / (2 count), l = 1..count.
std::vector<double> epsilon_samples(int count);

}  // namespace dfrc
