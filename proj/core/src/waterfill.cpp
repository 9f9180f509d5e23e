#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfrc/solvers.hpp"

namespace dfrc {

double WaterfillProblem::rate(const Eigen::VectorXd& sigma) const {
  double acc = offset;
  for (Eigen::Index q = 0; q < sigma.size(); ++q) acc += weights(q) * std::log2(1.0 + gains(q) * sigma(q));
  return acc;
}

Eigen::VectorXd WaterfillProblem::sigma_at(double u) const {
  const Eigen::Index n = cap.size();
  Eigen::VectorXd s(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    if (gains(q) <= 0 || weights(q) <= 0) {
      // no rate contribution: only a free (beta <= 0) entry goes up
      s(q) = beta(q) < 0 ? cap(q) : 0.0;
    } else if (beta(q) <= 0) {
      s(q) = u > 0 || beta(q) < 0 ? cap(q) : 0.0;
    } else {
      s(q) = std::clamp(u * weights(q) / beta(q) - 1.0 / gains(q), 0.0, cap(q));
    }
  }
  return s;
}

WaterfillResult waterfill_bisection(const WaterfillProblem& p, double tol) {
  const Eigen::Index n = p.cap.size();
  if (p.beta.size() != n || p.gains.size() != n || p.weights.size() != n)
    throw std::invalid_argument("waterfill: vector lengths differ");
  if ((p.cap.array() < 0).any()) throw std::invalid_argument("waterfill: negative cap");
  if (p.target < 0) throw std::invalid_argument("waterfill: negative rate target");

  const double max_rate = p.rate(p.cap);
  const double rtol = 1e-12 * std::max(1.0, std::abs(p.target));
  if (max_rate < p.target - rtol) {
    std::ostringstream os;
    os << "rate target " << p.target << " exceeds the maximum " << max_rate << " reachable within the caps";
    throw WaterfillInfeasible(os.str(), max_rate);
  }
  WaterfillResult r;
  r.sigma = p.sigma_at(0.0);
  r.rate = p.rate(r.sigma);
  if (r.rate >= p.target) return r;

  double lo = 0.0, hi = 1.0;
  Eigen::VectorXd s_hi = p.sigma_at(hi);
  for (int i = 0; i < 2000 && p.rate(s_hi) < p.target; ++i) {
    lo = hi;
    hi *= 2.0;
    s_hi = p.sigma_at(hi);
  }
  // the target is reachable at the caps, so the bracket exists unless
  // the only way there is an infinite multiplier; fall back to the caps
  if (p.rate(s_hi) < p.target) {
    r.sigma = p.cap;
    r.u = hi;
    r.rate = max_rate;
    return r;
  }
  const double active_tol = 1e-3 * tol * std::max(1.0, std::abs(p.target));
  for (int i = 0; i < 400; ++i) {
    double rate_hi = p.rate(s_hi);
    if (hi - lo <= tol * hi && rate_hi - p.target <= active_tol) break;
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Eigen::VectorXd s_mid = p.sigma_at(mid);
    if (p.rate(s_mid) >= p.target) {
      hi = mid;
      s_hi = std::move(s_mid);
    } else {
      lo = mid;
    }
  }
  r.sigma = s_hi;
  r.u = hi;
  r.rate = p.rate(s_hi);
  return r;
}

WaterfillProblem rate_waterfill(const Eigen::VectorXd& cap, const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& gains, double target) {
  WaterfillProblem p;
  p.cap = cap;
  p.beta = beta;
  p.gains = gains;
  p.weights = Eigen::VectorXd::Constant(cap.size(), 1.0 / double(cap.size()));
  p.target = target;
  return p;
}

Eigen::VectorXd waterfill_sum_power(const Eigen::VectorXd& gains, double budget) {
  const Eigen::Index n = gains.size();
  auto fill = [&](double level) {
    Eigen::VectorXd s(n);
    for (Eigen::Index q = 0; q < n; ++q) s(q) = gains(q) > 0 ? std::max(0.0, level - 1.0 / gains(q)) : 0.0;
    return s;
  };
  if (budget <= 0 || gains.maxCoeff() <= 0) return Eigen::VectorXd::Zero(n);
  double lo = 0.0, hi = budget + 1.0 / gains.maxCoeff();
  while (fill(hi).sum() < budget) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (fill(mid).sum() > budget ? hi : lo) = mid;
  }
  return fill(lo);
}

}  // namespace dfrc
