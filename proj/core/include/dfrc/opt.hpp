#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dfrc/grid.hpp"
#include "dfrc/metrics.hpp"

namespace dfrc {

struct OptimizerOptions {
  double eps_s = 1e-4;
  int scp_max_iter = 100;
  int admm_max_iter = 500;
  int bcd_max_iter = 200;
  // ADMM penalty; 0 derives it from the curvature of the objective at the start
  double rho = 0.0;
  double rho_scale = 1.0;
  double primal_tol = 1e-6;
  double kaiser_beta = 6.0;
  double qp_tol = 1e-9;
  // lower clamp on the sidelobe magnitudes g, relative to the budget
  double g_floor = 1e-6;
};

struct InfeasibleRate : std::runtime_error {
  double achievable;
  InfeasibleRate(const std::string& what, double max_rate) : std::runtime_error(what), achievable(max_rate) {}
};

struct PskResult {
  PowerGrid grid;
  Eigen::VectorXd p_m;
  bool converged = false;
  int iterations = 0;
  double rho = 0.0;
  double primal_residual = 0.0;
  // ubop of the p-iterates
  std::vector<double> trace;
  std::string diagnostic;
};

struct GaussianResult {
  GaussianInput input;
  bool converged = false;
  int iterations = 0;
  // aubop after each outer iteration, starting with the initial point
  std::vector<double> trace;
  std::string diagnostic;
  std::vector<std::string> warnings;
};

struct DecoupledResult : GaussianResult {
  Eigen::VectorXd p;        // per-symbol powers, sum = P_max
  Eigen::VectorXd pbar_K;   // length 2K, sum <= 1
  Eigen::VectorXd sigma_K;
  // lower-bound and exact rate at each accepted variance update
  std::vector<double> surrogate_rate;
  std::vector<double> exact_rate;
};

PskResult optimize_psk(const OfdmConfig& cfg, double P_max, double sigma2, const std::vector<double>& eps_set,
                       const OptimizerOptions& opts = {});

GaussianResult optimize_gaussian(const OfdmConfig& cfg, double P_max, double sigma2, const CommChannel& ch,
                                 double R_c, const std::vector<double>& eps_set,
                                 const OptimizerOptions& opts = {});

DecoupledResult optimize_decoupled(const OfdmConfig& cfg, double P_max, double sigma2, const CommChannel& ch,
                                   double R_c, const std::vector<double>& eps_set,
                                   const OptimizerOptions& opts = {});

enum class BaselineKind { Uniform, Hamming, Kaiser, Rmi, Crb };

BaselineKind parse_baseline_kind(const std::string& s);
std::string to_string(BaselineKind k);

PowerGrid baseline_allocation(BaselineKind kind, const OfdmConfig& cfg, double P_max,
                              const OptimizerOptions& opts = {});

// Minimal variance for R_c, leftover budget to the means (Rmi or Crb shape).
GaussianInput baseline_gaussian(BaselineKind kind, const OfdmConfig& cfg, double P_max, const CommChannel& ch,
                                double R_c);

// Largest rate reachable with the whole budget in the variances.
double max_rate(const OfdmConfig& cfg, const CommChannel& ch, double P_max);

// Window coefficients, length M
Eigen::VectorXd hamming_window(int M);
Eigen::VectorXd kaiser_window(int M, double beta);

}  // namespace dfrc
