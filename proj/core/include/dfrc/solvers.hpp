#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dfrc {

// Entrywise argmin of alpha_q |r_q| + rho/2 |r_q - beta_q|^2.
// A negative alpha_q pushes the magnitude up; with beta_q = 0 the phase is
// then arbitrary and the real axis is used.
Eigen::VectorXcd prox_scaled_magnitude(const Eigen::VectorXd& alpha, const Eigen::VectorXcd& beta, double rho);

// min 1/2 x'Hx + c'x  s.t.  A x <= b,  lower <= x <= upper
// Infinite bounds are allowed; A may have zero rows.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return int(c.size()); }
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(H * x) + c.dot(x); }
  // constraints, bounds unset -> unbounded
  static QpProblem make(Eigen::MatrixXd H, Eigen::VectorXd c);
};

struct QpKkt {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double max() const;
};

struct QpResult {
  Eigen::VectorXd x;
  // multipliers for A x <= b, lower and upper bounds; all >= 0
  Eigen::VectorXd lambda;
  Eigen::VectorXd mu_lower;
  Eigen::VectorXd mu_upper;
  double objective = 0.0;
  int iterations = 0;
  QpKkt kkt;
};

struct QpInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QpNotConvex : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QpUnbounded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense primal active-set method. warm_start may be infeasible.
QpResult solve_qp(const QpProblem& q, double tol = 1e-9, const Eigen::VectorXd* warm_start = nullptr);

QpKkt qp_kkt_residuals(const QpProblem& q, const QpResult& r);

// min beta'sigma  s.t.  sum_q w_q log2(1 + g_q sigma_q) + offset >= target,  0 <= sigma <= cap
// Solution sigma_q = clip(u w_q / beta_q - 1/g_q, 0, cap_q) with u from bisection.
struct WaterfillProblem {
  Eigen::VectorXd cap;
  Eigen::VectorXd beta;
  Eigen::VectorXd gains;
  Eigen::VectorXd weights;
  double offset = 0.0;
  double target = 0.0;

  double rate(const Eigen::VectorXd& sigma) const;
  Eigen::VectorXd sigma_at(double u) const;
};

struct WaterfillResult {
  Eigen::VectorXd sigma;
  double u = 0.0;
  double rate = 0.0;
};

struct WaterfillInfeasible : std::runtime_error {
  double achievable;
  WaterfillInfeasible(const std::string& what, double max_rate)
      : std::runtime_error(what), achievable(max_rate) {}
};

WaterfillResult waterfill_bisection(const WaterfillProblem& p, double tol = 1e-10);

// Uniform-weight problem of the rate constraint: weights 1/n, no offset.
WaterfillProblem rate_waterfill(const Eigen::VectorXd& cap, const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& gains, double target);

// max sum_q w log2(1 + g_q s_q) s.t. sum s <= budget, s >= 0 (classic water level)
Eigen::VectorXd waterfill_sum_power(const Eigen::VectorXd& gains, double budget);

}  // namespace dfrc
