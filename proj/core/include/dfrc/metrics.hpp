#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dfrc/grid.hpp"

namespace dfrc {

// Second moments and variances of the real/imag symbol components.
// Entry q = c*K*M + m*K + k, c = 0 real, c = 1 imag.
struct GaussianInput {
  int K = 0;
  int M = 0;
  Eigen::VectorXd pbar;
  Eigen::VectorXd sigma;

  GaussianInput() = default;
  GaussianInput(int K_, int M_)
      : K(K_), M(M_), pbar(Eigen::VectorXd::Zero(2 * K_ * M_)), sigma(Eigen::VectorXd::Zero(2 * K_ * M_)) {}

  int size() const { return 2 * K * M; }
  int index(int c, int k, int m) const { return c * K * M + m * K + k; }
  double total() const { return pbar.sum(); }
  // pbar_R + pbar_I per (k,m); the mean ambiguity function is that of this grid
  Eigen::MatrixXd grid_power() const;
  Eigen::VectorXd means() const;
  double mean_fraction() const;
  bool valid(double budget, double tol = 1e-8) const;

  // deterministic symbols with p/2 on each component
  static GaussianInput from_power_grid(const PowerGrid& p);
};

// h_k are power gains (path loss included); sigma_c2 is the noise density.
struct CommChannel {
  Eigen::VectorXd h;
  double sigma_c2 = 0.0;

  // diagonal of C = 2K diag(1_{2M} (x) h / (B sigma_C^2)), length 2KM
  Eigen::VectorXd rate_gains(int M, double B) const;
};

struct ExperimentResult {
  double snr_point = 0.0;
  double op_hat = 0.0;
  double ci95 = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double mse_range_m2 = 0.0;
  double mse_velocity_m2s2 = 0.0;
  std::size_t trials = 0;
  std::size_t outliers = 0;
};

struct RadicandAudit {
  double min_radicand = 0.0;
  int negative_beyond_tol = 0;
};

double ubop(const PowerGrid& p, double sigma2, const std::vector<double>& eps_set, int K_G);
double op_bessel_approx(const PowerGrid& p, double sigma2, const std::vector<double>& eps_set, int K_G);

// E|r_{n,v,eps}|^2 = |pbar^T f|^2 + 2||pbar||^2 - 2||pbar - sigma||^2
double pairwise_second_moment(const GaussianInput& g, int n, int v, double eps);
// |E r_{0,0,eps}|
double mean_peak_magnitude(const GaussianInput& g, double eps);

double aubop(const GaussianInput& g, double sigma2, const std::vector<double>& eps_set, int K_G,
             RadicandAudit* audit = nullptr);

// bits/s/Hz; sigma indexed like GaussianInput
double achievable_rate(const Eigen::VectorXd& sigma, const CommChannel& ch, int K, int M, double B);

// Wilson score interval at 95%
void wilson_interval(std::size_t successes, std::size_t trials, double& lo, double& hi);

}  // namespace dfrc
